"""Bundled problem instances, several with a known solution set."""
from __future__ import annotations

import numpy as np

from .data_io import Dataset, generate_synthetic_logistic, normalize_rows
from .diagnostics import AffineSet, Ray, Singleton
from .losses import LeastSquaresLoss, LinearLoss, LogisticLoss
from .regularizers import L1, Norm2, Zero
from .residuals import CompositeProblem


def logistic_problem(dataset: Dataset, lam: float) -> CompositeProblem:
    """``l1``-regularized logistic regression on ``dataset``."""
    return CompositeProblem(LogisticLoss(dataset.features, dataset.labels), L1(lam),
                            name=f"{dataset.name}-lam{lam:g}")


def synthetic_logistic_problem(N: int = 200, n: int = 50, seed: int = 7, lam: float = 1e-3,
                               **kwargs) -> CompositeProblem:
    """Row-normalized synthetic logistic instance (default: the benchmark instance)."""
    data = normalize_rows(generate_synthetic_logistic(N, n, seed=seed, **kwargs))
    return logistic_problem(data, lam)


def norm_ray_problem(n: int = 5, seed: int = 0):
    """``<c, x> + ||x||`` with a seeded unit ``c``.

    Optimal value 0, attained on the ray ``{-s c : s >= 0}``.  Returns
    ``(problem, c, solution_set)``.
    """
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(n)
    c /= np.linalg.norm(c)
    problem = CompositeProblem(LinearLoss(c), Norm2(1.0), name=f"norm-ray-n{n}")
    return problem, c, Ray(c)


def ray_error_bound_sequence(c, count: int = 8, seed: int = 0, decay: float = np.sqrt(10.0)):
    """Points ``x_k = -s_k c_k`` with unit ``c_k -> c`` and ``s_k = 1/sqrt(1 - <c, c_k>)``.

    Along this sequence ``F(x_k) -> 0`` and ``||G(x_k)|| -> 0`` while the
    distance to the solution ray stays bounded away from zero, so the ratio
    ``dist / ||G||`` is unbounded.
    """
    c = np.asarray(c, dtype=np.float64)
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(c.shape[0])
    w -= (w @ c) * c
    w /= np.linalg.norm(w)
    points = []
    for k in range(1, count + 1):
        eps = decay ** (-k)
        ck = c + eps * w
        ck /= np.linalg.norm(ck)
        # 1 - <c, c_k> computed without cancellation
        gap = eps * eps / (np.sqrt(1.0 + eps * eps) * (np.sqrt(1.0 + eps * eps) + 1.0))
        points.append(-ck / np.sqrt(gap))
    return points


def rank_deficient_least_squares():
    """``0.5 (x1 + x2 - 2)^2``: solution set is the line ``x1 + x2 = 2``."""
    A = np.array([[1.0, 1.0]])
    rhs = np.array([2.0])
    problem = CompositeProblem(LeastSquaresLoss(A, rhs), Zero(), name="rank-deficient-ls")
    Z = np.array([[1.0], [-1.0]]) / np.sqrt(2.0)
    return problem, AffineSet(np.array([1.0, 1.0]), Z)


def shifted_quadratic(z):
    """``0.5 ||x - z||^2`` with no regularizer; solution ``z``."""
    z = np.asarray(z, dtype=np.float64)
    problem = CompositeProblem(LeastSquaresLoss(np.eye(z.shape[0]), z), Zero(), name="shifted-quadratic")
    return problem, Singleton(z)


def lasso_1d(a: float = 2.0, b: float = 3.0, lam: float = 1.0):
    """``0.5 (a x - b)^2 + lam |x|`` with closed-form solution."""
    problem = CompositeProblem(LeastSquaresLoss([[a]], [b]), L1(lam), name="lasso-1d")
    xstar = np.sign(a * b) * max(abs(a * b) - lam, 0.0) / (a * a)
    return problem, Singleton(np.array([xstar]))


BUNDLED = {
    "rank-deficient-ls": rank_deficient_least_squares,
    "norm-ray": norm_ray_problem,
    "shifted-quadratic": lambda: shifted_quadratic([1.0, -2.0, 0.5]),
    "lasso-1d": lasso_1d,
}


def bundled_problem(name: str):
    """``(problem, solution_set)`` for a bundled instance with known solutions."""
    try:
        made = BUNDLED[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(BUNDLED)}") from None
    if len(made) == 3:
        problem, _, desc = made
        return problem, desc
    return made
