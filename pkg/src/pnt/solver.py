"""Proximal Newton-type outer iteration with hybrid unit-step acceptance.

Each iteration builds ``H_k = hess f(x_k) + alpha_k I`` with
``alpha_k = min(alpha_bar, c * ||G(x_k)||**rho)``, solves the model inexactly,
and either takes the full step (when ``||G(x_hat)||`` has dropped below
``sigma`` times the running reference value and ``F(x_hat) <= C``) or
backtracks along ``d = x_hat - x_k`` until

    F(x_k + gamma^m d) <= F(x_k) - theta * alpha_k * gamma^m * ||d||^2.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Optional

import numpy as np

from .residuals import CompositeProblem, build_model, objective
from .subsolver import DEFAULT_MAX_INNER, solve_subproblem

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("k", "F", "g_norm", "alpha", "eta", "inner_iters", "branch", "t", "m", "theta")


class Status(str, Enum):
    CONVERGED = "Converged"
    MAX_OUTER = "MaxOuterReached"
    INNER_FAILURE = "InnerFailure"
    LINE_SEARCH_FAILURE = "LineSearchFailure"


class LineSearchFailure(RuntimeError):
    pass


class InnerFailure(RuntimeError):
    pass


@dataclass
class SolverConfig:
    theta: float = 0.1
    sigma: float = 0.5
    gamma: float = 0.5
    C: Optional[float] = None
    alpha_bar: float = 1e-4
    c_alpha: float = 1e-8
    rho: float = 1.0
    nu: float = 0.9
    varrho: Optional[float] = None  # None means "same as rho"
    tol: float = 1e-8
    max_outer: int = 500
    max_inner: int = DEFAULT_MAX_INNER
    max_backtracks: int = 60

    def __post_init__(self):
        for name in ("theta", "sigma", "gamma"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.alpha_bar <= 0 or self.c_alpha <= 0:
            raise ValueError("alpha_bar and c_alpha must be positive")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")
        if not 0.0 <= self.nu < 1.0:
            raise ValueError("nu must lie in [0, 1)")
        if self.varrho is None:
            self.varrho = self.rho
        if self.varrho <= 0:
            raise ValueError("varrho must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_outer < 0 or self.max_inner < 1 or self.max_backtracks < 0:
            raise ValueError("iteration caps must be nonnegative (max_inner >= 1)")

    def bound_for(self, F0: float) -> float:
        """Objective ceiling ``C``; defaults to ``2 F(x0)`` (or ``F(x0) + 1``)."""
        if self.C is not None:
            return self.C
        return 2.0 * F0 if F0 > 0 else F0 + 1.0


@dataclass
class IterationRecord:
    k: int
    F: float
    g_norm: float
    alpha: float
    eta: float
    inner_iters: int
    branch: str
    t: float
    m: int
    theta: float
    # certificates, not exported to CSV
    residual_norm: float = math.nan
    q_drop: float = math.nan
    d_norm: float = math.nan
    F_next: float = math.nan
    inner_converged: bool = True

    def row(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in TRACE_COLUMNS]


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


@dataclass
class SolveReport:
    status: Status
    x: np.ndarray
    trace: list[IterationRecord]
    wall_time: float
    F: float
    g_norm: float
    C: float = math.nan
    message: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def outer_iters(self) -> int:
        return len(self.trace)

    @property
    def inner_total(self) -> int:
        return sum(r.inner_iters for r in self.trace)

    def residuals(self) -> np.ndarray:
        """``||G(x_k)||`` for k = 0..K, the final iterate included."""
        return np.array([r.g_norm for r in self.trace] + [self.g_norm])

    def to_csv(self, path) -> None:
        write_trace_csv(self, path)


def write_trace_csv(report: SolveReport, path) -> None:
    """Per-iteration rows plus one ``stop`` row describing the final iterate."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for rec in report.trace:
            w.writerow(rec.row())
        last_theta = report.trace[-1].theta if report.trace else math.nan
        w.writerow([len(report.trace), _fmt(report.F), _fmt(report.g_norm),
                    "", "", 0, "stop", "", "", _fmt(last_theta)])


def read_trace_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def choose_alpha(g_norm: float, cfg: SolverConfig) -> float:
    if g_norm < 0:
        raise ValueError("g_norm must be nonnegative")
    return min(cfg.alpha_bar, cfg.c_alpha * g_norm**cfg.rho)


def choose_eta(g_norm: float, cfg: SolverConfig) -> float:
    if g_norm < 0:
        raise ValueError("g_norm must be nonnegative")
    return cfg.nu * min(1.0, g_norm**cfg.varrho)


def line_search(problem: CompositeProblem, x_k, d_k, alpha_k: float, cfg: SolverConfig,
                F_k: Optional[float] = None) -> tuple[float, int, float]:
    """Backtrack along ``d_k``; returns ``(t, m, F(x_k + t d_k))``."""
    x_k = np.asarray(x_k, dtype=np.float64)
    d_k = np.asarray(d_k, dtype=np.float64)
    if F_k is None:
        F_k = objective(problem, x_k)
    dd = float(d_k @ d_k)
    t = 1.0
    for m in range(cfg.max_backtracks + 1):
        F_new = objective(problem, x_k + t * d_k)
        # inf never passes; NaN comparisons are False as well
        if F_new <= F_k - cfg.theta * alpha_k * t * dd:
            return t, m, F_new
        t *= cfg.gamma
    raise LineSearchFailure(f"no acceptable step after {cfg.max_backtracks} backtracks")


@dataclass
class SolverState:
    x: np.ndarray
    k: int
    theta: float  # reference residual for unit-step acceptance; nan before k = 1
    F: float
    grad: np.ndarray
    g_norm: float
    C: float


def initial_state(problem: CompositeProblem, x0, cfg: SolverConfig) -> SolverState:
    x0 = np.array(x0, dtype=np.float64)
    f0, grad0 = problem.loss.value_and_gradient(x0)
    F0 = f0 + problem.reg.value(x0)
    if not math.isfinite(F0):
        raise ValueError("F(x0) must be finite")
    C = cfg.bound_for(F0)
    if not C > F0:
        raise ValueError(f"C = {C} must exceed F(x0) = {F0}")
    g_norm = float(np.linalg.norm(problem.prox_gradient_map(x0, grad0)))
    return SolverState(x0, 0, math.nan, F0, grad0, g_norm, C)


def step(problem: CompositeProblem, state: SolverState, cfg: SolverConfig):
    """One outer iteration; returns ``(new_state, record)``."""
    x = state.x
    f_k = state.F - problem.reg.value(x)
    alpha = choose_alpha(state.g_norm, cfg)
    eta = choose_eta(state.g_norm, cfg)
    model = build_model(problem, x, alpha, f_k, state.grad)
    inner = solve_subproblem(model, state.g_norm, eta, cfg.max_inner)
    if not inner.converged:
        if inner.q_drop < 0:
            raise InnerFailure("inner solver made no progress on the model")
        logger.debug("k=%d: inner solver stopped at residual %.3e (target %.3e)",
                     state.k, inner.residual_norm, eta * state.g_norm)
    x_hat = inner.x_hat
    d = x_hat - x
    d_norm = float(np.linalg.norm(d))
    if d_norm == 0.0:
        raise InnerFailure("zero search direction at a non-stationary point")

    f_hat, grad_hat = problem.loss.value_and_gradient(x_hat)
    F_hat = f_hat + problem.reg.value(x_hat)
    g_hat = math.nan
    if state.k == 0:
        new_theta = state.g_norm
        unit = False
    else:
        g_hat = float(np.linalg.norm(problem.prox_gradient_map(x_hat, grad_hat)))
        unit = g_hat <= cfg.sigma * state.theta and F_hat <= state.C
        new_theta = g_hat if unit else state.theta

    if unit:
        t, m, F_next = 1.0, 0, F_hat
        branch = "unit_step"
    else:
        t, m, F_next = line_search(problem, x, d, alpha, cfg, state.F)
        branch = "line_search"

    if t == 1.0:
        x_next, grad_next = x_hat, grad_hat
        if math.isnan(g_hat):
            g_hat = float(np.linalg.norm(problem.prox_gradient_map(x_hat, grad_hat)))
        g_next = g_hat
    else:
        x_next = x + t * d
        grad_next = problem.loss.gradient(x_next)
        g_next = float(np.linalg.norm(problem.prox_gradient_map(x_next, grad_next)))

    record = IterationRecord(
        k=state.k, F=state.F, g_norm=state.g_norm, alpha=alpha, eta=eta,
        inner_iters=inner.inner_iters, branch=branch, t=t, m=m, theta=new_theta,
        residual_norm=inner.residual_norm, q_drop=inner.q_drop, d_norm=d_norm,
        F_next=F_next, inner_converged=inner.converged,
    )
    new_state = SolverState(x_next, state.k + 1, new_theta, F_next, grad_next, g_next, state.C)
    return new_state, record


def solve(problem: CompositeProblem, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    cfg = cfg or SolverConfig()
    if x0 is None:
        x0 = np.zeros(problem.n)
    start = time.perf_counter()
    state = initial_state(problem, x0, cfg)
    trace: list[IterationRecord] = []
    status, message = Status.MAX_OUTER, ""
    while True:
        if state.g_norm <= cfg.tol:
            status = Status.CONVERGED
            break
        if state.k >= cfg.max_outer:
            break
        try:
            state, record = step(problem, state, cfg)
        except InnerFailure as exc:
            status, message = Status.INNER_FAILURE, str(exc)
            break
        except LineSearchFailure as exc:
            status, message = Status.LINE_SEARCH_FAILURE, str(exc)
            break
        trace.append(record)
        logger.debug("k=%d F=%.12g |G|=%.3e branch=%s t=%g inner=%d", record.k, record.F,
                     record.g_norm, record.branch, record.t, record.inner_iters)
    return SolveReport(status, state.x, trace, time.perf_counter() - start,
                       state.F, state.g_norm, state.C, message)


def config_fields() -> list[str]:
    return [f.name for f in fields(SolverConfig)]
