"""Convex regularizers ``g`` with values and proximal operators.

``value`` returns ``INFEASIBLE`` (IEEE +inf) outside the domain so objective
comparisons reject such points without producing NaN.
"""
from __future__ import annotations

import abc
import math

import numpy as np

INFEASIBLE = math.inf


def soft_threshold(u, tau):
    return np.sign(u) * np.maximum(np.abs(u) - tau, 0.0)


class Regularizer(abc.ABC):
    separable: bool = False

    @abc.abstractmethod
    def value(self, x) -> float: ...

    @abc.abstractmethod
    def prox(self, u, t: float = 1.0) -> np.ndarray:
        """``argmin_x g(x) + ||x - u||^2 / (2t)``."""

    def prox_coordinate(self, j: int, u_j: float, t: float) -> float:
        raise TypeError(f"{type(self).__name__} is not separable")

    def cd_params(self, n: int):
        """``(weight, lower, upper)`` arrays for the compiled coordinate sweep.

        A separable member's coordinate prox must equal
        ``clip(soft_threshold(u, weight_j * t), lower_j, upper_j)``.
        """
        raise TypeError(f"{type(self).__name__} is not separable")

    def subgradient_distance(self, grad, x) -> float:
        """``dist(0, grad + dg(x))``; only defined for some members."""
        raise NotImplementedError(type(self).__name__)


class Zero(Regularizer):
    separable = True

    def value(self, x) -> float:
        return 0.0

    def prox(self, u, t=1.0):
        return np.array(u, dtype=np.float64)

    def prox_coordinate(self, j, u_j, t):
        return float(u_j)

    def cd_params(self, n):
        return np.zeros(n), np.full(n, -np.inf), np.full(n, np.inf)

    def subgradient_distance(self, grad, x):
        return float(np.linalg.norm(grad))

    def __repr__(self):
        return "Zero()"


class L1(Regularizer):
    """``lam * ||x||_1``."""

    separable = True

    def __init__(self, lam: float):
        if lam < 0:
            raise ValueError("lam must be nonnegative")
        self.lam = float(lam)

    def value(self, x) -> float:
        return self.lam * float(np.sum(np.abs(x)))

    def prox(self, u, t=1.0):
        if t <= 0:
            raise ValueError("prox scale must be positive")
        return soft_threshold(np.asarray(u, dtype=np.float64), self.lam * t)

    def prox_coordinate(self, j, u_j, t):
        return float(soft_threshold(u_j, self.lam * t))

    def cd_params(self, n):
        return np.full(n, self.lam), np.full(n, -np.inf), np.full(n, np.inf)

    def subgradient_distance(self, grad, x):
        grad = np.asarray(grad, dtype=np.float64)
        x = np.asarray(x, dtype=np.float64)
        # off the kinks the subdifferential is a point, on them an interval
        dist = np.where(
            x != 0.0,
            np.abs(grad + self.lam * np.sign(x)),
            np.maximum(np.abs(grad) - self.lam, 0.0),
        )
        return float(np.linalg.norm(dist))

    def __repr__(self):
        return f"L1(lam={self.lam!r})"


class Box(Regularizer):
    """Indicator of ``{x : lower <= x <= upper}``."""

    separable = True

    def __init__(self, lower, upper):
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        if lower.shape != upper.shape or np.any(lower > upper):
            raise ValueError("malformed box: need lower <= upper with equal shapes")
        self.lower, self.upper = lower, upper

    def value(self, x) -> float:
        x = np.asarray(x)
        if np.all(x >= self.lower) and np.all(x <= self.upper):
            return 0.0
        return INFEASIBLE

    def prox(self, u, t=1.0):
        return np.clip(np.asarray(u, dtype=np.float64), self.lower, self.upper)

    def prox_coordinate(self, j, u_j, t):
        return float(min(max(u_j, self.lower[j]), self.upper[j]))

    def cd_params(self, n):
        return (
            np.zeros(n),
            np.broadcast_to(self.lower, (n,)).copy(),
            np.broadcast_to(self.upper, (n,)).copy(),
        )

    def __repr__(self):
        return f"Box({self.lower!r}, {self.upper!r})"


class Norm2(Regularizer):
    """``weight * ||x||_2``; not separable, prox is block soft-thresholding."""

    def __init__(self, weight: float = 1.0):
        if weight < 0:
            raise ValueError("weight must be nonnegative")
        self.weight = float(weight)

    def value(self, x) -> float:
        return self.weight * float(np.linalg.norm(x))

    def prox(self, u, t=1.0):
        if t <= 0:
            raise ValueError("prox scale must be positive")
        u = np.asarray(u, dtype=np.float64)
        nu = np.linalg.norm(u)
        tau = self.weight * t
        if nu <= tau:
            return np.zeros_like(u)
        return (1.0 - tau / nu) * u

    def subgradient_distance(self, grad, x):
        grad = np.asarray(grad, dtype=np.float64)
        nx = np.linalg.norm(x)
        if nx > 0:
            return float(np.linalg.norm(grad + self.weight * np.asarray(x) / nx))
        return max(float(np.linalg.norm(grad)) - self.weight, 0.0)

    def __repr__(self):
        return f"Norm2(weight={self.weight!r})"


def l1_prox(lam, u, t):
    return L1(lam).prox(u, t)


def box_prox(lower, upper, u, t=1.0):
    return Box(lower, upper).prox(u, t)


def reg_value(g: Regularizer, x) -> float:
    return g.value(x)
