"""Linear-algebra kernels shared by the losses, residuals and inner solvers.

Sparse matrices are ``scipy.sparse.csr_matrix`` in canonical form (sorted
column indices, no explicit zeros).  Hessians of the form ``B + alpha*I`` are
represented either densely or in the structured form ``A^T diag(d) A / N``,
which is never materialized.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, aslinearoperator

Matrix = Union[np.ndarray, sp.spmatrix, sp.sparray]


def as_matrix(A) -> Matrix:
    """Return ``A`` as a float dense array or a canonical CSR matrix."""
    if sp.issparse(A):
        A = sp.csr_matrix(A, dtype=np.float64)
        A.eliminate_zeros()
        A.sort_indices()
        A.sum_duplicates()
        return A
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    return A


def matvec(A: Matrix, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != A.shape[1]:
        raise ValueError(f"dimension mismatch: matrix {A.shape} times vector {x.shape}")
    return np.asarray(A @ x).ravel()


def rmatvec(A: Matrix, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != A.shape[0]:
        raise ValueError(f"dimension mismatch: transpose of {A.shape} times vector {y.shape}")
    return np.asarray(A.T @ y).ravel()


def column_sq_norms(A: Matrix) -> np.ndarray:
    if sp.issparse(A):
        return np.asarray(A.multiply(A).sum(axis=0)).ravel()
    return np.einsum("ij,ij->j", A, A)


def weighted_column_sq_norms(A: Matrix, d: np.ndarray) -> np.ndarray:
    """``sum_i d_i A_ij^2`` for every column j."""
    if sp.issparse(A):
        return np.asarray(A.multiply(A).T @ d).ravel()
    return (A * A).T @ d


class SpectralNorm(NamedTuple):
    value: float
    converged: bool
    n_iter: int


def estimate_spectral_norm(A, tol: float = 1e-6, max_iter: int = 500, seed: int = 42) -> SpectralNorm:
    """Largest singular value of ``A`` by power iteration on ``A^T A``.

    ``A`` may be a dense array, a sparse matrix or a scipy ``LinearOperator``.
    The start vector is drawn from ``default_rng(seed)`` so the estimate is
    deterministic.  When ``max_iter`` is exhausted the last estimate is
    returned with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    op = aslinearoperator(A)
    m, n = op.shape
    if m == 0 or n == 0:
        return SpectralNorm(0.0, True, 0)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for it in range(1, max_iter + 1):
        Av = op.matvec(v)
        w = op.rmatvec(Av)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return SpectralNorm(0.0, True, it)
        new_sigma = np.sqrt(nw)
        v = w / nw
        if abs(new_sigma - sigma) <= tol * new_sigma:
            # Rayleigh quotient at the final vector is at least as accurate
            sigma = max(new_sigma, float(np.linalg.norm(op.matvec(v))))
            return SpectralNorm(float(sigma), True, it)
        sigma = new_sigma
    return SpectralNorm(float(sigma), False, max_iter)


@dataclass(frozen=True)
class DenseHessian:
    """``B + alpha*I`` with an explicit symmetric ``B``."""

    B: np.ndarray
    alpha: float = 0.0

    def __post_init__(self):
        B = np.asarray(self.B, dtype=np.float64)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("B must be square")
        scale = max(1.0, float(np.max(np.abs(B)))) if B.size else 1.0
        if not np.allclose(B, B.T, rtol=0.0, atol=1e-12 * scale):
            raise ValueError("B must be symmetric")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.B.shape[0]

    def apply(self, v) -> np.ndarray:
        return matvec(self.B, v) + self.alpha * np.asarray(v, dtype=np.float64)

    def diag(self) -> np.ndarray:
        return np.diag(self.B) + self.alpha

    def todense(self) -> np.ndarray:
        return self.B + self.alpha * np.eye(self.n)

    def with_alpha(self, alpha: float) -> "DenseHessian":
        return replace(self, alpha=float(alpha))

    def curvature_operator(self) -> LinearOperator:
        """The PSD part ``B`` as a symmetric linear operator."""
        return aslinearoperator(self.B)


@dataclass(frozen=True)
class StructuredHessian:
    """``A^T diag(d) A * scale + alpha*I`` applied without forming ``B``."""

    A: Matrix
    d: np.ndarray
    scale: float = 1.0
    alpha: float = 0.0
    _csc: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.float64)
        if d.shape != (self.A.shape[0],):
            raise ValueError(f"d has shape {d.shape}, expected ({self.A.shape[0]},)")
        if np.any(d < 0):
            raise ValueError("structured weights d must be nonnegative")
        if self.alpha < 0 or self.scale < 0:
            raise ValueError("alpha and scale must be nonnegative")
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        return self.scale * rmatvec(self.A, self.d * matvec(self.A, v)) + self.alpha * v

    def diag(self) -> np.ndarray:
        return self.scale * weighted_column_sq_norms(self.A, self.d) + self.alpha

    def todense(self) -> np.ndarray:
        A = self.A.toarray() if sp.issparse(self.A) else self.A
        return self.scale * (A.T * self.d) @ A + self.alpha * np.eye(self.n)

    def with_alpha(self, alpha: float) -> "StructuredHessian":
        return replace(self, alpha=float(alpha))

    def csc(self) -> sp.csc_matrix:
        """Column-compressed copy of ``A`` for coordinate sweeps (cached)."""
        if self._csc is None:
            C = sp.csc_matrix(self.A, dtype=np.float64)
            C.sort_indices()
            object.__setattr__(self, "_csc", C)
        return self._csc

    def curvature_operator(self) -> LinearOperator:
        n = self.n

        def mv(v):
            v = np.ravel(v)
            return self.scale * rmatvec(self.A, self.d * matvec(self.A, v))

        return LinearOperator((n, n), matvec=mv, rmatvec=mv, dtype=np.float64)


HessianRep = Union[DenseHessian, StructuredHessian]


def hessian_apply(H: HessianRep, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (H.n,):
        raise ValueError(f"dimension mismatch: Hessian of size {H.n} applied to {v.shape}")
    return H.apply(v)


def hessian_diag(H: HessianRep) -> np.ndarray:
    return H.diag()


def curvature_norm(H: HessianRep, seed: int = 42) -> SpectralNorm:
    """Spectral norm of the PSD part of ``H`` (without the ridge)."""
    return estimate_spectral_norm(H.curvature_operator(), seed=seed)
