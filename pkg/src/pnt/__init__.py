"""Inexact proximal Newton-type solver for composite convex problems."""
from .residuals import CompositeProblem, objective, prox_gradient_map
from .solver import SolverConfig, SolveReport, Status, solve
from .baselines import PgmConfig, pgm_solve

__all__ = [
    "CompositeProblem",
    "objective",
    "prox_gradient_map",
    "SolverConfig",
    "SolveReport",
    "Status",
    "solve",
    "PgmConfig",
    "pgm_solve",
]
