"""Outer solver loops for the penalized inverse covariance problem.

solve_newton runs the proximal Newton iteration: invert the current iterate,
partition variables into free and fixed sets, approximate the Newton
direction by coordinate descent over the free set with an adaptive sweep
budget, and take an Armijo-backtracked step. When the thresholded covariance
graph splits into several connected components the problem decomposes and
each block is solved independently.

solve_reference is a deliberately simple composite (proximal) gradient
method used as an in-repo correctness oracle: it converges linearly and
shares the stopping criterion, so the two solvers cross-validate each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from .activeset import BlockStructure, partition, threshold_pattern
from .direction import DirectionState, _soft_threshold_array, diagonal_direction, run_sweeps
from .linalg import NotPositiveDefinite, cholesky, inverse_from_factor, logdet, trace_product
from .linesearch import LineSearchConfig, LineSearchFailed, armijo_search
from .objective import (
    IterateState,
    Problem,
    make_iterate,
    min_norm_subgradient,
    objective_value,
    penalty_value,
    smooth_value,
)

__all__ = [
    "SolverConfig",
    "SolverTrace",
    "Solution",
    "solve_newton",
    "solve_reference",
    "duality_gap",
]


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for solve_newton.

    outer_tol applies to the elementwise l1 norm of the minimum-norm
    subgradient, normalized by max(1, penalty(X)) to make it scale free.
    The inner sweep budget at outer iteration t (0-based) is
    max(inner_min_sweeps, ceil(inner_schedule_rate * (t + 1))); the default
    rate 1/3 grows the budget as the iterate approaches the optimum, and
    fixed budgets are expressed with a tiny rate plus inner_min_sweeps.
    """

    line_search: LineSearchConfig = field(default_factory=LineSearchConfig)
    outer_tol: float = 1e-8
    max_outer: int = 200
    inner_schedule_rate: float = 1.0 / 3.0
    inner_min_sweeps: int = 1
    seed: int = 0
    use_block_decomposition: bool = True
    coordinate_permutation: bool = False

    def __post_init__(self):
        if self.outer_tol <= 0:
            raise ValueError("outer_tol must be positive")
        if self.inner_schedule_rate <= 0:
            raise ValueError("inner_schedule_rate must be positive")
        if self.inner_min_sweeps < 1:
            raise ValueError("inner_min_sweeps must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be positive")


@dataclass
class SolverTrace:
    """Per-outer-iteration history, one list entry per accepted step."""

    f: list[float] = field(default_factory=list)
    delta: list[float] = field(default_factory=list)
    alpha: list[float] = field(default_factory=list)
    free_size: list[int] = field(default_factory=list)
    sweeps: list[int] = field(default_factory=list)
    backtracks: list[int] = field(default_factory=list)
    subgrad: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)

    def append(self, f, delta, alpha, free_size, sweeps, backtracks, subgrad, seconds):
        self.f.append(float(f))
        self.delta.append(float(delta))
        self.alpha.append(float(alpha))
        self.free_size.append(int(free_size))
        self.sweeps.append(int(sweeps))
        self.backtracks.append(int(backtracks))
        self.subgrad.append(float(subgrad))
        self.seconds.append(float(seconds))

    def __len__(self) -> int:
        return len(self.f)


@dataclass(frozen=True)
class Solution:
    X: np.ndarray
    W: np.ndarray
    f_opt: float
    converged: bool
    iterations: int
    trace: SolverTrace


def stop_norm(prob: Problem, iterate: IterateState) -> float:
    """l1 norm of the minimum-norm subgradient over max(1, penalty(X))."""
    sub = min_norm_subgradient(prob, iterate.X, iterate.grad)
    return float(np.abs(sub).sum()) / max(1.0, iterate.penalty_val)


def _is_diagonal(X: np.ndarray) -> bool:
    return np.count_nonzero(X) == np.count_nonzero(np.diagonal(X))


def _initial_iterate(prob: Problem, X0: np.ndarray | None) -> np.ndarray:
    if X0 is None:
        return np.eye(prob.p)
    X0 = np.array(X0, dtype=np.float64)
    if X0.shape != (prob.p, prob.p):
        raise ValueError(f"X0 has shape {X0.shape}, expected {(prob.p, prob.p)}")
    return X0


def _solve_single(prob, X0, cfg, callback) -> Solution:
    t_start = perf_counter()
    X = _initial_iterate(prob, X0)
    factor = cholesky(X)
    rng = np.random.default_rng(cfg.seed) if cfg.coordinate_permutation else None
    trace = SolverTrace()

    it = make_iterate(prob, X, factor)
    sn = stop_norm(prob, it)
    converged = sn <= cfg.outer_tol

    while not converged and len(trace) < cfg.max_outer:
        t = len(trace)
        part = partition(it.X, it.grad, prob.Lam)
        budget = max(cfg.inner_min_sweeps, math.ceil(cfg.inner_schedule_rate * (t + 1)))
        if _is_diagonal(it.X):
            D = diagonal_direction(prob, it.X, it.W)
            sweeps_done = 1
        else:
            state = DirectionState.zeros(prob.p)
            pairs = [(int(i), int(j)) for i, j in part.free]
            sweeps_done = run_sweeps(
                state, it.X, it.W, prob.S, prob.Lam, pairs, budget, rng
            )
            D = state.D
        if not D.any():
            break  # free set is stationary to machine precision
        try:
            step = armijo_search(prob, it, D, cfg.line_search)
        except LineSearchFailed as err:
            err.trace = trace
            raise
        X = step.X_next
        factor = step.factor_next
        it = make_iterate(prob, X, factor)
        trace.append(
            f=step.f_next,
            delta=step.delta,
            alpha=step.alpha,
            free_size=part.free.shape[0],
            sweeps=sweeps_done,
            backtracks=step.backtracks,
            subgrad=sn,
            seconds=perf_counter() - t_start,
        )
        if callback is not None:
            callback(t, X)
        sn = stop_norm(prob, it)
        converged = sn <= cfg.outer_tol

    return Solution(
        X=X,
        W=it.W,
        f_opt=it.f_val,
        converged=converged,
        iterations=len(trace),
        trace=trace,
    )


def _merge_block_traces(solutions: list[Solution]) -> SolverTrace:
    # Lockstep view of independently solved blocks: converged blocks
    # contribute their final objective, active blocks their step records.
    merged = SolverTrace()
    total = max((len(s.trace) for s in solutions), default=0)
    for t in range(total):
        f = 0.0
        secs = 0.0
        delta = 0.0
        alphas = []
        free = 0
        sweeps = 0
        backtracks = 0
        sub = 0.0
        for s in solutions:
            tr = s.trace
            n = len(tr)
            if n == 0:
                f += s.f_opt
                continue
            k = min(t, n - 1)
            f += tr.f[k]
            secs += tr.seconds[k]
            if t < n:
                delta += tr.delta[t]
                alphas.append(tr.alpha[t])
                free += tr.free_size[t]
                sweeps = max(sweeps, tr.sweeps[t])
                backtracks += tr.backtracks[t]
                sub = max(sub, tr.subgrad[t])
        merged.append(
            f=f,
            delta=delta,
            alpha=min(alphas),
            free_size=free,
            sweeps=sweeps,
            backtracks=backtracks,
            subgrad=sub,
            seconds=secs,
        )
    return merged


def _solve_blockwise(prob, X0, cfg, callback, structure: BlockStructure) -> Solution:
    p = prob.p
    X0_full = _initial_iterate(prob, X0)
    X_full = np.zeros((p, p))
    W_full = np.zeros((p, p))
    live = X_full.copy() if callback is not None else None

    solutions = []
    for block in structure.blocks:
        ix = np.ix_(block, block)
        sub_prob = Problem(prob.S[ix], prob.Lam[ix])
        sub_cb = None
        if callback is not None:
            for other in structure.blocks:
                oix = np.ix_(other, other)
                live[oix] = X0_full[oix]

            def sub_cb(t, Xb, ix=ix):
                live[ix] = Xb
                callback(t, live.copy())

        sol = _solve_single(sub_prob, X0_full[ix], cfg, sub_cb)
        solutions.append(sol)
        X_full[ix] = sol.X
        W_full[ix] = sol.W
        if live is not None:
            live[ix] = sol.X

    return Solution(
        X=X_full,
        W=W_full,
        f_opt=sum(s.f_opt for s in solutions),
        converged=all(s.converged for s in solutions),
        iterations=max((s.iterations for s in solutions), default=0),
        trace=_merge_block_traces(solutions),
    )


def solve_newton(
    prob: Problem,
    X0: np.ndarray | None = None,
    config: SolverConfig | None = None,
    callback=None,
) -> Solution:
    """Solve the penalized inverse covariance problem by proximal Newton.

    Parameters
    ----------
    prob : Problem
        Sample covariance and penalty weights.
    X0 : ndarray or None
        Positive definite starting point; the identity when omitted. A first
        diagonal iterate is exploited through the closed-form direction.
    config : SolverConfig or None
        Solver settings; defaults throughout when omitted.
    callback : callable or None
        Called as callback(t, X) after each accepted outer step with the
        current full-size iterate. With block decomposition active, t counts
        iterations within the block being solved.

    Returns
    -------
    Solution
        Final iterate X, its inverse W, objective value, convergence flag,
        iteration count, and the per-iteration trace.

    Raises
    ------
    NotPositiveDefinite
        If X0 is not positive definite.
    LineSearchFailed
        If backtracking cannot find an acceptable step; the solver trace so
        far is attached to the exception.
    """
    cfg = config if config is not None else SolverConfig()
    if cfg.use_block_decomposition:
        structure = threshold_pattern(prob.S, prob.Lam)
        if structure.n_blocks > 1:
            return _solve_blockwise(prob, X0, cfg, callback, structure)
    return _solve_single(prob, X0, cfg, callback)


def solve_reference(
    prob: Problem,
    X0: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iter: int = 100000,
) -> Solution:
    """First-order oracle: composite gradient descent with backtracking.

    Each iteration soft-thresholds a gradient step and halves the step size
    until the trial iterate is positive definite and satisfies the standard
    quadratic upper-bound decrease test, which enforces a monotone objective.
    Uses the same normalized subgradient stopping rule as solve_newton.
    Slow but simple: serves as an independent correctness check.
    """
    t_start = perf_counter()
    X = _initial_iterate(prob, X0)
    factor = cholesky(X)
    trace = SolverTrace()
    eta = 1.0 / max(float(np.abs(prob.S).max()), 1e-12)

    it = make_iterate(prob, X, factor)
    sn = stop_norm(prob, it)
    converged = sn <= tol

    while not converged and len(trace) < max_iter:
        backtracks = 0
        while True:
            X_new = _soft_threshold_array(it.X - eta * it.grad, eta * prob.Lam)
            try:
                factor_new = cholesky(X_new)
            except NotPositiveDefinite:
                eta *= 0.5
                backtracks += 1
            else:
                g_new = smooth_value(prob, X_new, factor_new)
                diff = X_new - it.X
                bound = (
                    it.smooth_val
                    + trace_product(it.grad, diff)
                    + float(np.sum(diff * diff)) / (2.0 * eta)
                )
                # tiny slack absorbs round-off once diff is at noise level
                if g_new <= bound + 1e-12 * abs(it.smooth_val):
                    break
                eta *= 0.5
                backtracks += 1
            if eta < 1e-30:
                err = LineSearchFailed(
                    "reference solver step size underflow", delta=0.0, backtracks=backtracks
                )
                err.trace = trace
                raise err
        f_prev = it.f_val
        it = make_iterate(prob, X_new, factor_new)
        nnz_upper = int(np.count_nonzero(np.triu(it.X)))
        trace.append(
            f=it.f_val,
            delta=it.f_val - f_prev,
            alpha=eta,
            free_size=nnz_upper,
            sweeps=0,
            backtracks=backtracks,
            subgrad=sn,
            seconds=perf_counter() - t_start,
        )
        eta *= 1.2
        sn = stop_norm(prob, it)
        converged = sn <= tol

    return Solution(
        X=it.X,
        W=it.W,
        f_opt=it.f_val,
        converged=converged,
        iterations=len(trace),
        trace=trace,
    )


def duality_gap(prob: Problem, X: np.ndarray, W: np.ndarray) -> float | None:
    """Duality gap at X from the entrywise projection of W onto the dual box.

    W is clipped into [S - Lam, S + Lam]; if the projected matrix is
    positive definite the gap f(X) - logdet(W_proj) - p is returned, which
    is nonnegative up to round-off. Returns None when the projection is not
    positive definite (no certificate available at this X).
    """
    W_proj = np.clip(W, prob.S - prob.Lam, prob.S + prob.Lam)
    try:
        factor_proj = cholesky(W_proj)
    except NotPositiveDefinite:
        return None
    f_val = objective_value(prob, X, cholesky(X))
    return f_val - logdet(factor_proj) - prob.p
