"""Objective, prox-gradient mapping and the quadratic subproblem model.

The prox-gradient mapping uses unit scale throughout:
``G(x) = x - prox_g(x - grad f(x))``.  ``G(x) = 0`` exactly on the solution
set, and ``||G||`` is the stopping measure for every solver in the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import HessianRep, hessian_apply
from .losses import SmoothLoss
from .regularizers import Regularizer


class CompositeProblem:
    """``F(x) = f(x) + g(x)``."""

    def __init__(self, loss: SmoothLoss, reg: Regularizer, name: str = "problem"):
        self.loss = loss
        self.reg = reg
        self.name = name

    @property
    def n(self) -> int:
        return self.loss.n

    @cached_property
    def lipschitz(self) -> float:
        return self.loss.lipschitz_gradient()

    def objective(self, x) -> float:
        return objective(self, x)

    def prox_gradient_map(self, x, grad=None) -> np.ndarray:
        return prox_gradient_map(self, x, grad)

    def __repr__(self):
        return f"CompositeProblem({self.name!r}, n={self.n}, reg={self.reg!r})"


def objective(problem: CompositeProblem, x) -> float:
    gx = problem.reg.value(x)
    if gx == np.inf:
        return gx
    return problem.loss.value(x) + gx


def prox_gradient_map(problem: CompositeProblem, x, grad=None) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if grad is None:
        grad = problem.loss.gradient(x)
    return x - problem.reg.prox(x - grad, 1.0)


@dataclass(frozen=True)
class SubproblemModel:
    """``q(x) = f_k + <grad_k, x - x_k> + 0.5 (x - x_k)^T H (x - x_k) + g(x)``."""

    x_k: np.ndarray
    grad_k: np.ndarray
    H: HessianRep
    f_k: float
    reg: Regularizer

    @cached_property
    def g_k(self) -> float:
        return self.reg.value(self.x_k)

    @property
    def n(self) -> int:
        return self.x_k.shape[0]

    def smooth_gradient(self, x) -> np.ndarray:
        return self.grad_k + hessian_apply(self.H, np.asarray(x) - self.x_k)

    def value(self, x) -> float:
        return subproblem_value(self, x)

    def decrease(self, x) -> float:
        """``q(x_k) - q(x)``, computed without the common ``f_k`` term."""
        d = np.asarray(x, dtype=np.float64) - self.x_k
        gx = self.reg.value(x)
        if gx == np.inf:
            return -np.inf
        return -(float(self.grad_k @ d) + 0.5 * float(d @ hessian_apply(self.H, d)) + gx - self.g_k)

    def residual(self, x) -> np.ndarray:
        return subproblem_residual(self, x)


def build_model(problem: CompositeProblem, x_k, alpha: float, f_k=None, grad_k=None) -> SubproblemModel:
    """Model at ``x_k`` with ``H = hess f(x_k) + alpha*I``."""
    x_k = np.asarray(x_k, dtype=np.float64)
    if f_k is None or grad_k is None:
        f_k, grad_k = problem.loss.value_and_gradient(x_k)
    H = problem.loss.hessian(x_k).with_alpha(alpha)
    return SubproblemModel(x_k, grad_k, H, f_k, problem.reg)


def subproblem_value(model: SubproblemModel, x) -> float:
    d = np.asarray(x, dtype=np.float64) - model.x_k
    return (
        model.f_k
        + float(model.grad_k @ d)
        + 0.5 * float(d @ hessian_apply(model.H, d))
        + model.reg.value(x)
    )


def subproblem_residual(model: SubproblemModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x - model.reg.prox(x - model.smooth_gradient(x), 1.0)
