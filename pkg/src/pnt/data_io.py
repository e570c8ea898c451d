"""LIBSVM text format, row normalization and seeded synthetic datasets."""
from __future__ import annotations

import bz2
import io
import math
from dataclasses import dataclass
from os import PathLike
from typing import Optional, TextIO, Union

import numpy as np
import scipy.sparse as sp


class LibsvmParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Dataset:
    features: sp.csr_matrix
    labels: np.ndarray
    name: str = "dataset"

    def __post_init__(self):
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("feature row count must equal label count")
        if not np.all(np.abs(self.labels) == 1.0):
            raise ValueError("labels must be +1 or -1")

    @property
    def shape(self) -> tuple[int, int]:
        return self.features.shape


_LABELS = {"+1": 1.0, "1": 1.0, "-1": -1.0, "+1.0": 1.0, "1.0": 1.0, "-1.0": -1.0}


def parse_libsvm(stream: Union[TextIO, str], n_features: Optional[int] = None,
                 name: str = "dataset") -> Dataset:
    """Parse ``<label> <idx>:<val> ...`` lines; indices are 1-based in the text.

    ``n_features`` overrides the column count inferred from the largest index
    (files omit trailing all-zero columns).
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    labels, indptr, indices, values = [], [0], [], []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            labels.append(_LABELS[tokens[0]])
        except KeyError:
            raise LibsvmParseError(lineno, f"label {tokens[0]!r} is not +1 or -1") from None
        prev = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise LibsvmParseError(lineno, f"malformed feature {tok!r}")
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise LibsvmParseError(lineno, f"non-numeric token {tok!r}") from None
            if idx <= prev:
                raise LibsvmParseError(lineno, f"index {idx} not increasing (or < 1)")
            if not math.isfinite(val):
                raise LibsvmParseError(lineno, f"non-finite value in {tok!r}")
            prev = idx
            if val != 0.0:
                indices.append(idx - 1)
                values.append(val)
        indptr.append(len(indices))
    inferred = max(indices) + 1 if indices else 0
    if n_features is None:
        n_features = inferred
    elif n_features < inferred:
        raise ValueError(f"n_features={n_features} is smaller than the largest index {inferred}")
    X = sp.csr_matrix(
        (np.asarray(values, dtype=np.float64), np.asarray(indices, dtype=np.int32),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(labels), n_features),
    )
    return Dataset(X, np.asarray(labels, dtype=np.float64), name)


def load_libsvm(path: Union[str, PathLike], n_features: Optional[int] = None,
                name: Optional[str] = None) -> Dataset:
    opener = bz2.open if str(path).endswith(".bz2") else open
    with opener(path, "rt") as fh:
        return parse_libsvm(fh, n_features, name or str(path))


def write_libsvm(dataset: Dataset, stream: TextIO) -> None:
    X = sp.csr_matrix(dataset.features)
    X.sort_indices()
    for i, label in enumerate(dataset.labels):
        lo, hi = X.indptr[i], X.indptr[i + 1]
        feats = " ".join(f"{j + 1}:{v!r}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi].tolist()))
        head = "+1" if label > 0 else "-1"
        stream.write(f"{head} {feats}\n" if feats else f"{head}\n")


def dumps_libsvm(dataset: Dataset) -> str:
    buf = io.StringIO()
    write_libsvm(dataset, buf)
    return buf.getvalue()


def normalize_rows(dataset: Dataset) -> Dataset:
    """Scale every nonzero row to unit Euclidean norm; zero rows stay zero."""
    X = sp.csr_matrix(dataset.features, dtype=np.float64, copy=True)
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    scale = np.ones_like(norms)
    nz = norms > 0
    scale[nz] = 1.0 / norms[nz]
    X = sp.csr_matrix(sp.diags(scale) @ X)
    X.sort_indices()
    return Dataset(X, dataset.labels.copy(), dataset.name)


def generate_synthetic_logistic(N: int, n: int, sparsity: float = 0.2, seed: int = 0,
                                density: float = 1.0, noise: float = 0.1,
                                name: Optional[str] = None) -> Dataset:
    """Seeded binary classification data from a sparse ±1 ground truth.

    ``sparsity`` is the fraction of nonzeros in the ground-truth weights and
    ``density`` the fraction of nonzero features per row.
    """
    if N < 1 or n < 1:
        raise ValueError("N and n must be positive")
    if not 0.0 < sparsity <= 1.0 or not 0.0 < density <= 1.0:
        raise ValueError("sparsity and density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    k = math.ceil(sparsity * n)
    w = np.zeros(n)
    support = rng.choice(n, size=k, replace=False)
    w[support] = rng.choice([-1.0, 1.0], size=k)
    per_row = max(1, math.ceil(density * n))
    rows = np.repeat(np.arange(N), per_row)
    cols = np.concatenate([np.sort(rng.choice(n, size=per_row, replace=False)) for _ in range(N)])
    vals = rng.standard_normal(N * per_row)
    X = sp.csr_matrix((vals, (rows, cols)), shape=(N, n))
    X.eliminate_zeros()
    X.sort_indices()
    score = X @ w + noise * rng.standard_normal(N)
    labels = np.where(score >= 0.0, 1.0, -1.0)
    return Dataset(X, labels, name or f"synthetic-N{N}-n{n}-seed{seed}")
