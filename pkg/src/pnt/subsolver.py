"""Inexact solver for the quadratic subproblem.

Separable regularizers use cyclic coordinate minimization (ascending index,
compiled with numba); anything else falls back to monotone proximal-gradient
steps.  Both stop at the first iterate with

    ||r(x_hat)|| <= eta * ||G(x_k)||   and   q(x_hat) <= q(x_k),

checked once per sweep (or step), starting from ``x_hat = x_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .linalg import DenseHessian, StructuredHessian, curvature_norm
from .residuals import SubproblemModel, subproblem_residual

DEFAULT_MAX_INNER = 10_000
# power iteration underestimates ||B||; keep the fallback step strictly safe
_STEP_SAFETY = 1.01


class SubproblemError(RuntimeError):
    pass


@dataclass
class InnerResult:
    x_hat: np.ndarray
    inner_iters: int
    residual_norm: float
    q_drop: float
    converged: bool
    q_history: list = field(default_factory=list, repr=False)


@numba.njit(cache=True)
def _cd_sweep_structured(indptr, indices, data, d, scale, alpha, grad_k, x_k, x, v,
                         hdiag, weight, lower, upper):
    n = x.shape[0]
    biggest = 0.0
    for j in range(n):
        hjj = hdiag[j]
        if hjj <= 0.0:
            continue
        acc = 0.0
        for p in range(indptr[j], indptr[j + 1]):
            i = indices[p]
            acc += data[p] * d[i] * v[i]
        partial = grad_k[j] + scale * acc + alpha * (x[j] - x_k[j])
        u = x[j] - partial / hjj
        tau = weight[j] / hjj
        if u > tau:
            new = u - tau
        elif u < -tau:
            new = u + tau
        else:
            new = 0.0
        if new < lower[j]:
            new = lower[j]
        elif new > upper[j]:
            new = upper[j]
        delta = new - x[j]
        if delta != 0.0:
            x[j] = new
            for p in range(indptr[j], indptr[j + 1]):
                v[indices[p]] += delta * data[p]
            if abs(delta) > biggest:
                biggest = abs(delta)
    return biggest


@numba.njit(cache=True)
def _cd_sweep_dense(B, alpha, grad_k, x_k, x, s, hdiag, weight, lower, upper):
    n = x.shape[0]
    biggest = 0.0
    for j in range(n):
        hjj = hdiag[j]
        if hjj <= 0.0:
            continue
        partial = grad_k[j] + s[j] + alpha * (x[j] - x_k[j])
        u = x[j] - partial / hjj
        tau = weight[j] / hjj
        if u > tau:
            new = u - tau
        elif u < -tau:
            new = u + tau
        else:
            new = 0.0
        if new < lower[j]:
            new = lower[j]
        elif new > upper[j]:
            new = upper[j]
        delta = new - x[j]
        if delta != 0.0:
            x[j] = new
            for i in range(n):
                s[i] += delta * B[j, i]
            if abs(delta) > biggest:
                biggest = abs(delta)
    return biggest


def _coordinate_sweeper(model: SubproblemModel):
    """Return ``sweep(x) -> max |coordinate change|`` updating ``x`` in place."""
    H = model.H
    weight, lower, upper = model.reg.cd_params(model.n)
    hdiag = H.diag()
    x_k, grad_k = model.x_k, model.grad_k
    if isinstance(H, StructuredHessian):
        C = H.csc()
        A = H.A

        def sweep(x):
            v = np.asarray(A @ (x - x_k), dtype=np.float64).ravel()
            return _cd_sweep_structured(C.indptr, C.indices, C.data, H.d, H.scale, H.alpha,
                                        grad_k, x_k, x, v, hdiag, weight, lower, upper)
    elif isinstance(H, DenseHessian):
        B = np.ascontiguousarray(H.B)

        def sweep(x):
            s = B @ (x - x_k)
            return _cd_sweep_dense(B, H.alpha, grad_k, x_k, x, s, hdiag, weight, lower, upper)
    else:
        raise TypeError(f"unsupported Hessian representation {type(H).__name__}")
    return sweep


def _prox_gradient_stepper(model: SubproblemModel):
    lipschitz = _STEP_SAFETY * curvature_norm(model.H).value + model.H.alpha
    if lipschitz <= 0:
        raise SubproblemError("model has no curvature; the subproblem is unbounded or degenerate")
    step = 1.0 / lipschitz

    def sweep(x):
        new = model.reg.prox(x - step * model.smooth_gradient(x), step)
        biggest = float(np.max(np.abs(new - x))) if x.size else 0.0
        x[:] = new
        return biggest
    return sweep


def _minimize(model: SubproblemModel, target: float, max_inner: int) -> InnerResult:
    if max_inner < 1:
        raise ValueError("max_inner must be at least 1")
    if model.reg.separable:
        sweep = _coordinate_sweeper(model)
    else:
        sweep = _prox_gradient_stepper(model)

    x = model.x_k.copy()
    res = float(np.linalg.norm(subproblem_residual(model, x)))
    q_drop = 0.0
    history = [q_drop]
    best = (res, x.copy(), q_drop, 0)
    sweeps = 0
    while True:
        if res <= target and q_drop >= 0.0:
            return InnerResult(x, sweeps, res, q_drop, True, history)
        if sweeps >= max_inner:
            break
        moved = sweep(x)
        sweeps += 1
        res = float(np.linalg.norm(subproblem_residual(model, x)))
        q_drop = model.decrease(x)
        history.append(q_drop)
        if q_drop >= 0.0 and res < best[0]:
            best = (res, x.copy(), q_drop, sweeps)
        if moved == 0.0 and not (res <= target and q_drop >= 0.0):
            # exact fixed point of the sweep: further sweeps cannot help
            break
    res, x, q_drop, _ = best
    return InnerResult(x, sweeps, res, q_drop, False, history)


def solve_subproblem(model: SubproblemModel, g_norm_k: float, eta_k: float,
                     max_inner: int = DEFAULT_MAX_INNER) -> InnerResult:
    """Approximately minimize the model to relative accuracy ``eta_k``."""
    if not 0.0 <= eta_k < 1.0:
        raise ValueError("eta_k must lie in [0, 1)")
    return _minimize(model, eta_k * g_norm_k, max_inner)


def exact_subproblem_oracle(model: SubproblemModel, tol: float, max_inner: int = 200_000) -> np.ndarray:
    """High-accuracy minimizer with ``||r(x)|| <= tol``; raises if unreachable."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    out = _minimize(model, tol, max_inner)
    if not out.converged:
        raise SubproblemError(
            f"residual {out.residual_norm:.3e} above {tol:.1e} after {out.inner_iters} sweeps"
        )
    return out.x_hat
