"""Empirical checks of convergence orders and residual/distance bounds."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

ASYMPTOTIC_THRESHOLD = 1e-2
# residuals this small are round-off in ||G|| and carry no rate information
NOISE_FLOOR = 100 * np.finfo(np.float64).eps


class DiagnosticError(ValueError):
    pass


# ---------------------------------------------------------------- solution sets

@dataclass(frozen=True)
class Singleton:
    point: np.ndarray

    def distance(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x) - self.point))

    def sample(self, rng) -> np.ndarray:
        return np.array(self.point, dtype=np.float64)


@dataclass(frozen=True)
class AffineSet:
    """``{p + Z w}`` with orthonormal columns ``Z``."""

    particular: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        Z = np.atleast_2d(np.asarray(self.basis, dtype=np.float64))
        if Z.shape[0] != self.particular.shape[0]:
            Z = Z.T
        if not np.allclose(Z.T @ Z, np.eye(Z.shape[1]), atol=1e-10):
            raise ValueError("basis columns must be orthonormal")
        object.__setattr__(self, "basis", Z)

    def distance(self, x) -> float:
        r = np.asarray(x, dtype=np.float64) - self.particular
        return float(np.linalg.norm(r - self.basis @ (self.basis.T @ r)))

    def sample(self, rng, spread: float = 3.0) -> np.ndarray:
        return self.particular + self.basis @ rng.uniform(-spread, spread, self.basis.shape[1])


@dataclass(frozen=True)
class Ray:
    """``{-s u : s >= 0}`` for a unit direction ``u``."""

    direction: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.direction, dtype=np.float64)
        if abs(np.linalg.norm(u) - 1.0) > 1e-10:
            raise ValueError("ray direction must be a unit vector")
        object.__setattr__(self, "direction", u)

    def distance(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        s = float(x @ -self.direction)
        if s <= 0.0:
            return float(np.linalg.norm(x))
        return float(np.linalg.norm(x + s * self.direction))

    def sample(self, rng, spread: float = 5.0) -> np.ndarray:
        return -rng.uniform(0.0, spread) * self.direction


SolutionSet = Union[Singleton, AffineSet, Ray]


def distance_to_solution_set(x, desc: SolutionSet) -> float:
    return desc.distance(x)


# ---------------------------------------------------------------- rate fitting

@dataclass(frozen=True)
class RateFit:
    order: float
    log_constant: float
    r_squared: float
    window: tuple[int, int]  # half-open index range into the residual sequence


def _decreasing_suffix(r: np.ndarray) -> int:
    start = len(r) - 1
    while start > 0 and r[start - 1] > r[start]:
        start -= 1
    return start


def select_rate_window(residuals, threshold: float = ASYMPTOTIC_THRESHOLD,
                       min_points: int = 4, min_decades: float = 3.0,
                       floor: float = NOISE_FLOOR) -> tuple[int, int]:
    """Longest strictly decreasing suffix, trimmed to ``r <= threshold``.

    Trailing values at or below ``floor`` (including zeros) are dropped first.
    The threshold trim is skipped when it would leave fewer than
    ``min_points`` values or less than ``min_decades`` of span.
    """
    r = np.asarray(residuals, dtype=np.float64)
    stop = len(r)
    while stop > 0 and not r[stop - 1] > floor:
        stop -= 1
    r = r[:stop]
    if stop == 0:
        raise DiagnosticError("no positive residuals")
    start = _decreasing_suffix(r)

    def ok(lo):
        seg = r[lo:stop]
        return len(seg) >= min_points and math.log10(seg[0] / seg[-1]) >= min_decades - 1e-12

    trimmed = start
    while trimmed < stop and r[trimmed] > threshold:
        trimmed += 1
    if ok(trimmed):
        return trimmed, stop
    if ok(start):
        return start, stop
    seg = r[start:stop]
    span = math.log10(seg[0] / seg[-1]) if len(seg) > 1 else 0.0
    raise DiagnosticError(
        f"decreasing window has {len(seg)} residuals spanning {span:.2f} decades; "
        f"need {min_points} spanning {min_decades}"
    )


def fit_convergence_order(residuals: Sequence[float], window: Optional[tuple[int, int]] = None,
                          **window_kw) -> RateFit:
    """Least-squares fit of ``log r[k+1] = p log r[k] + c`` over the asymptotic window."""
    r = np.asarray(residuals, dtype=np.float64)
    if window is None:
        window = select_rate_window(r, **window_kw)
    lo, hi = window
    seg = r[lo:hi]
    if len(seg) < 3 or np.any(seg <= 0) or np.any(np.diff(seg) >= 0):
        raise DiagnosticError("window must hold at least 3 strictly decreasing positive residuals")
    X = np.log(seg[:-1])
    Y = np.log(seg[1:])
    design = np.column_stack([X, np.ones_like(X)])
    (p, c), *_ = np.linalg.lstsq(design, Y, rcond=None)
    fitted = design @ np.array([p, c])
    ss_res = float(np.sum((Y - fitted) ** 2))
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(p), float(c), r2, (int(lo), int(hi)))


# ---------------------------------------------------------------- bound scans

@dataclass
class BoundScan:
    problem_id: str
    samples: int
    lipschitz: float
    max_ratio: dict = field(default_factory=dict)  # bound name -> max lhs/rhs
    violations: dict = field(default_factory=dict)  # bound name -> count above 1 + slack
    fitted_kappa: float = math.nan  # max dist / ||G|| over the samples (q = 1)
    witness_ratios: list = field(default_factory=list)

    @property
    def hard_violations(self) -> int:
        return sum(self.violations.values())

    def rows(self) -> list[dict]:
        out = []
        for name, ratio in self.max_ratio.items():
            out.append(dict(problem_id=self.problem_id, bound_name=name, max_ratio=ratio,
                            fitted_kappa=self.fitted_kappa, fitted_p=math.nan, r_squared=math.nan))
        if self.witness_ratios:
            out.append(dict(problem_id=self.problem_id, bound_name="error_bound_ratio_growth",
                            max_ratio=self.witness_ratios[-1], fitted_kappa=self.fitted_kappa,
                            fitted_p=math.nan, r_squared=math.nan))
        return out


HARD_SLACK = 1e-8


def scan_proposition_bounds(problem, desc: SolutionSet, sample_count: int = 500, seed: int = 0,
                            witness=None) -> BoundScan:
    """Sample points near the solution set and evaluate the residual bounds.

    Hard bounds (ratios must stay <= 1):

    * ``G_lipschitz``: ``||G(x) - G(y)|| <= (2 + L1) ||x - y||``
    * ``G_by_distance``: ``||G(x)|| <= (2 + L1) dist(x, X*)``
    * ``G_by_subgradient``: ``||G(x)|| <= dist(0, grad f(x) + dg(x))`` when the
      regularizer provides the subgradient distance

    The subregularity constant ``dist / ||G||`` is fitted, not asserted.  Points
    in ``witness`` get their ``dist / ||G||`` ratio recorded in order.
    """
    rng = np.random.default_rng(seed)
    L1 = problem.lipschitz
    factor = 2.0 + L1
    ratios = {"G_lipschitz": [], "G_by_distance": []}
    sub_ratios = []
    kappa = 0.0
    for _ in range(sample_count):
        base = desc.sample(rng)
        scale = 10.0 ** rng.uniform(-3, 0.5)
        x = base + scale * rng.standard_normal(problem.n)
        y = x + 10.0 ** rng.uniform(-4, 0.5) * rng.standard_normal(problem.n)
        gx_grad = problem.loss.gradient(x)
        Gx = problem.prox_gradient_map(x, gx_grad)
        Gy = problem.prox_gradient_map(y)
        nGx = float(np.linalg.norm(Gx))
        dxy = float(np.linalg.norm(x - y))
        if dxy > 0:
            ratios["G_lipschitz"].append(float(np.linalg.norm(Gx - Gy)) / (factor * dxy))
        dist = desc.distance(x)
        if dist > 0:
            ratios["G_by_distance"].append(nGx / (factor * dist))
        elif nGx > 0:
            ratios["G_by_distance"].append(math.inf)
        try:
            sd = problem.reg.subgradient_distance(gx_grad, x)
        except NotImplementedError:
            sd = None
        if sd is not None:
            sub_ratios.append(nGx / sd if sd > 0 else (0.0 if nGx == 0 else math.inf))
        if nGx > 0:
            kappa = max(kappa, dist / nGx)
    if sub_ratios:
        ratios["G_by_subgradient"] = sub_ratios
    scan = BoundScan(problem.name, sample_count, L1)
    for name, vals in ratios.items():
        arr = np.asarray(vals) if vals else np.zeros(1)
        scan.max_ratio[name] = float(arr.max())
        scan.violations[name] = int(np.sum(arr > 1.0 + HARD_SLACK))
    scan.fitted_kappa = kappa
    if witness is not None:
        for x in witness:
            g = float(np.linalg.norm(problem.prox_gradient_map(x)))
            scan.witness_ratios.append(desc.distance(x) / g if g > 0 else math.inf)
    return scan


REPORT_COLUMNS = ("problem_id", "bound_name", "max_ratio", "fitted_kappa", "fitted_p", "r_squared")


def write_report_csv(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: (format(v, ".17g") if isinstance(v, float) else v) for k, v in row.items()})


def rate_row(problem_id: str, fit: RateFit) -> dict:
    return dict(problem_id=problem_id, bound_name="convergence_order", max_ratio=math.nan,
                fitted_kappa=math.nan, fitted_p=fit.order, r_squared=fit.r_squared)


# ---------------------------------------------------------------- trace certificates

def check_trace_certificates(report, cfg, lipschitz: float, abs_tol: float = 1e-12) -> list[str]:
    """Per-iteration checks of a proximal Newton trace; returns violation messages.

    Inexactness, sufficient decrease on backtracking rows, the step-size floor
    ``min(1, gamma (1 - theta) alpha / L1)``, the reference residual being
    nonincreasing, and every accepted objective staying below ``C``.
    """
    bad = []
    prev_theta = math.inf
    for rec in report.trace:
        k = rec.k
        if rec.residual_norm > rec.eta * rec.g_norm + abs_tol:
            bad.append(f"k={k}: inner residual {rec.residual_norm:.3e} > eta*|G| {rec.eta * rec.g_norm:.3e}")
        if rec.q_drop < -abs_tol:
            bad.append(f"k={k}: model increased by {-rec.q_drop:.3e}")
        if rec.branch == "line_search":
            rhs = rec.F - cfg.theta * rec.alpha * rec.t * rec.d_norm**2
            if rec.F_next > rhs + abs_tol * max(1.0, abs(rec.F)):
                bad.append(f"k={k}: sufficient decrease fails ({rec.F_next!r} > {rhs!r})")
            floor = 1.0 if lipschitz == 0 else min(1.0, cfg.gamma * (1 - cfg.theta) * rec.alpha / lipschitz)
            if rec.t < floor * (1 - 1e-6):
                bad.append(f"k={k}: step {rec.t:.3e} below floor {floor:.3e}")
        elif rec.t != 1.0:
            bad.append(f"k={k}: unit-step branch with t={rec.t}")
        if not rec.theta <= prev_theta:
            bad.append(f"k={k}: reference residual increased to {rec.theta:.3e}")
        prev_theta = rec.theta
        if not rec.F_next <= report.C:
            bad.append(f"k={k}: F={rec.F_next!r} exceeds C={report.C!r}")
    return bad
