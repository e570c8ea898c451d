"""Proximal gradient baseline, stopped on the same unit-scale ``||G||`` rule."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .residuals import CompositeProblem
from .solver import IterationRecord, SolveReport, Status


@dataclass
class PgmConfig:
    step: Optional[float] = None  # None: 1 / L1
    tol: float = 1e-8
    max_iter: int = 100_000

    def __post_init__(self):
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


def pgm_solve(problem: CompositeProblem, x0=None, cfg: Optional[PgmConfig] = None) -> SolveReport:
    cfg = cfg or PgmConfig()
    step = cfg.step
    if step is None:
        L1 = problem.lipschitz
        if L1 <= 0:
            raise ValueError("loss has no curvature; pass an explicit step")
        step = 1.0 / L1
    x = np.zeros(problem.n) if x0 is None else np.array(x0, dtype=np.float64)
    start = time.perf_counter()
    trace = []
    status = Status.MAX_OUTER
    f, grad = problem.loss.value_and_gradient(x)
    F = f + problem.reg.value(x)
    for k in range(cfg.max_iter + 1):
        g_norm = float(np.linalg.norm(problem.prox_gradient_map(x, grad)))
        if g_norm <= cfg.tol:
            status = Status.CONVERGED
            break
        if k == cfg.max_iter:
            break
        x_next = problem.reg.prox(x - step * grad, step)
        f, grad = problem.loss.value_and_gradient(x_next)
        F_next = f + problem.reg.value(x_next)
        trace.append(IterationRecord(
            k=k, F=F, g_norm=g_norm, alpha=0.0, eta=0.0, inner_iters=0, branch="pgm",
            t=step, m=0, theta=math.nan, d_norm=float(np.linalg.norm(x_next - x)), F_next=F_next,
        ))
        x, F = x_next, F_next
    return SolveReport(status, x, trace, time.perf_counter() - start, F, g_norm)


def pgm_fixed_point_residual(problem: CompositeProblem, x, step: float) -> np.ndarray:
    """``x - prox_{step g}(x - step grad f(x))``."""
    x = np.asarray(x, dtype=np.float64)
    return x - problem.reg.prox(x - step * problem.loss.gradient(x), step)
