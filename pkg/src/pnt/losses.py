"""Smooth convex losses ``f`` with value, gradient and Hessian evaluation.

All concrete losses have the structured form ``f(x) = h(Ax) + <b, x>`` so
their Hessians are returned as :class:`~pnt.linalg.StructuredHessian`.
"""
from __future__ import annotations

import abc
import warnings
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .linalg import (
    Matrix,
    StructuredHessian,
    as_matrix,
    estimate_spectral_norm,
    matvec,
    rmatvec,
)


class LipschitzEstimateWarning(RuntimeWarning):
    """Power iteration stopped before reaching its tolerance."""


class SmoothLoss(abc.ABC):
    n: int

    @abc.abstractmethod
    def value(self, x) -> float: ...

    @abc.abstractmethod
    def gradient(self, x) -> np.ndarray: ...

    @abc.abstractmethod
    def hessian(self, x) -> StructuredHessian: ...

    @abc.abstractmethod
    def lipschitz_gradient(self) -> float: ...

    def value_and_gradient(self, x) -> tuple[float, np.ndarray]:
        return self.value(x), self.gradient(x)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {x.shape}")
        return x


def _spectral_norm_sq(A: Matrix) -> float:
    est = estimate_spectral_norm(A)
    if not est.converged:
        warnings.warn(
            f"spectral norm estimate did not converge after {est.n_iter} iterations",
            LipschitzEstimateWarning,
            stacklevel=3,
        )
    return est.value**2


class LogisticLoss(SmoothLoss):
    """Mean logistic loss ``(1/N) sum_i log(1 + exp(-b_i a_i^T x))``."""

    def __init__(self, A, labels):
        self.A = as_matrix(A)
        self.labels = np.asarray(labels, dtype=np.float64)
        if self.labels.shape != (self.A.shape[0],):
            raise ValueError("one label per row of A is required")
        if not np.all(np.abs(self.labels) == 1.0):
            raise ValueError("labels must be +1 or -1")
        self.N, self.n = self.A.shape

    def margins(self, x) -> np.ndarray:
        return self.labels * matvec(self.A, self._check(x))

    def value(self, x) -> float:
        z = self.margins(x)
        return float(np.mean(np.log1p(np.exp(-np.abs(z))) + np.maximum(0.0, -z)))

    def gradient(self, x) -> np.ndarray:
        z = self.margins(x)
        return -rmatvec(self.A, self.labels * expit(-z)) / self.N

    def value_and_gradient(self, x):
        z = self.margins(x)
        val = float(np.mean(np.log1p(np.exp(-np.abs(z))) + np.maximum(0.0, -z)))
        return val, -rmatvec(self.A, self.labels * expit(-z)) / self.N

    def hessian(self, x) -> StructuredHessian:
        s = expit(self.margins(x))
        return StructuredHessian(self.A, s * (1.0 - s), 1.0 / self.N, 0.0, self._csc)

    @cached_property
    def _csc(self):
        C = sp.csc_matrix(self.A, dtype=np.float64)
        C.sort_indices()
        return C

    @cached_property
    def _lipschitz(self) -> float:
        return _spectral_norm_sq(self.A) / (4.0 * self.N)

    def lipschitz_gradient(self) -> float:
        return self._lipschitz


class LeastSquaresLoss(SmoothLoss):
    """``0.5 * ||Ax - rhs||^2``."""

    def __init__(self, A, rhs):
        self.A = as_matrix(A)
        self.rhs = np.asarray(rhs, dtype=np.float64)
        if self.rhs.shape != (self.A.shape[0],):
            raise ValueError("rhs length must equal the number of rows of A")
        self.m, self.n = self.A.shape

    def residual(self, x) -> np.ndarray:
        return matvec(self.A, self._check(x)) - self.rhs

    def value(self, x) -> float:
        r = self.residual(x)
        return 0.5 * float(r @ r)

    def gradient(self, x) -> np.ndarray:
        return rmatvec(self.A, self.residual(x))

    def value_and_gradient(self, x):
        r = self.residual(x)
        return 0.5 * float(r @ r), rmatvec(self.A, r)

    def hessian(self, x=None) -> StructuredHessian:
        return StructuredHessian(self.A, np.ones(self.m), 1.0, 0.0, self._csc)

    def evaluate(self, x):
        """Value, gradient and Hessian in one pass."""
        val, grad = self.value_and_gradient(x)
        return val, grad, self.hessian(x)

    @cached_property
    def _csc(self):
        C = sp.csc_matrix(self.A, dtype=np.float64)
        C.sort_indices()
        return C

    @cached_property
    def _lipschitz(self) -> float:
        return _spectral_norm_sq(self.A)

    def lipschitz_gradient(self) -> float:
        return self._lipschitz


class LinearLoss(SmoothLoss):
    """``<c, x>``; zero curvature, gradient constant."""

    def __init__(self, c):
        self.c = np.asarray(c, dtype=np.float64)
        if self.c.ndim != 1:
            raise ValueError("c must be a vector")
        self.n = self.c.shape[0]
        self._empty = sp.csr_matrix((0, self.n))

    def value(self, x) -> float:
        return float(self.c @ self._check(x))

    def gradient(self, x) -> np.ndarray:
        self._check(x)
        return self.c.copy()

    def hessian(self, x=None) -> StructuredHessian:
        return StructuredHessian(self._empty, np.zeros(0), 1.0, 0.0)

    def lipschitz_gradient(self) -> float:
        return 0.0


def least_squares_eval(loss: LeastSquaresLoss, x):
    return loss.evaluate(x)
