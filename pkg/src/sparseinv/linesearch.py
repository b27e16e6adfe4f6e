"""Armijo backtracking with positive-definiteness enforcement.

Step sizes 1, beta, beta^2, ... are tried until X + alpha * D is positive
definite and the objective satisfies the sufficient-decrease condition
f(X + alpha D) <= f(X) + alpha * sigma * delta, where delta combines the
directional derivative of the smooth part with the exact penalty change at
a full step. A failed Cholesky counts as an infinite objective value, so
positive definiteness never needs a separate check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import CholFactor, NotPositiveDefinite, cholesky, trace_product
from .objective import IterateState, Problem, penalty_value, smooth_value


class LineSearchFailed(Exception):
    """No acceptable step within the backtracking budget.

    Signals a non-descent direction (delta >= 0) or numerical breakdown.
    The solver attaches its trace to the exception before propagating.
    """

    def __init__(self, message: str, delta: float, backtracks: int):
        super().__init__(message)
        self.delta = delta
        self.backtracks = backtracks
        self.trace = None


@dataclass(frozen=True)
class LineSearchConfig:
    sigma: float = 0.25
    beta: float = 0.5
    max_backtracks: int = 60

    def __post_init__(self):
        if not 0.0 < self.sigma < 0.5:
            raise ValueError("sigma must lie in (0, 0.5)")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be positive")


@dataclass(frozen=True)
class StepResult:
    """An accepted step: alpha is a power of beta and X_next = X + alpha*D."""

    alpha: float
    X_next: np.ndarray
    factor_next: CholFactor
    f_next: float
    delta: float
    backtracks: int


def compute_delta(prob: Problem, iterate: IterateState, D: np.ndarray) -> float:
    """Sufficient-decrease measure: tr(grad^T D) + penalty(X+D) - penalty(X).

    Negative for any nonzero minimizer of the penalized quadratic model.
    """
    return (
        trace_product(iterate.grad, D)
        + penalty_value(prob, iterate.X + D)
        - iterate.penalty_val
    )


def armijo_search(
    prob: Problem,
    iterate: IterateState,
    D: np.ndarray,
    cfg: LineSearchConfig = LineSearchConfig(),
) -> StepResult:
    """Backtrack from alpha = 1 until the Armijo condition holds.

    Each trial performs exactly one Cholesky factorization, which doubles as
    the positive-definiteness check and is returned with the accepted step so
    the caller can reuse it for the next inverse.

    Raises
    ------
    LineSearchFailed
        If no step size beta^k with k <= max_backtracks is acceptable.
    """
    delta = compute_delta(prob, iterate, D)
    alpha = 1.0
    for k in range(cfg.max_backtracks + 1):
        X_trial = iterate.X + alpha * D
        try:
            factor = cholesky(X_trial)
        except NotPositiveDefinite:
            alpha *= cfg.beta
            continue
        f_trial = smooth_value(prob, X_trial, factor) + penalty_value(prob, X_trial)
        if f_trial <= iterate.f_val + alpha * cfg.sigma * delta:
            return StepResult(
                alpha=alpha,
                X_next=X_trial,
                factor_next=factor,
                f_next=f_trial,
                delta=delta,
                backtracks=k,
            )
        alpha *= cfg.beta
    raise LineSearchFailed(
        f"no acceptable step after {cfg.max_backtracks + 1} trials "
        f"(delta={delta:.3e})",
        delta=delta,
        backtracks=cfg.max_backtracks + 1,
    )
