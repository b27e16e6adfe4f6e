"""Newton direction by coordinate descent over the free set.

The direction D minimizes the penalized quadratic model of the objective
around the current iterate. One coordinate update touches the symmetric pair
(i, j) and costs O(p): the quadratic coefficient uses only entries of W,
and the linear coefficient needs row i of W dotted with column j of the
cache U, which is kept equal to D @ W throughout. Each accepted update
adjusts two rows of U (one when i == j), so the cache never has to be
rebuilt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objective import IterateState, Problem


def soft_threshold(z: float, r: float) -> float:
    """sign(z) * max(|z| - r, 0) for r >= 0."""
    if z > r:
        return z - r
    if z < -r:
        return z + r
    return 0.0


def _soft_threshold_array(Z: np.ndarray, R: np.ndarray) -> np.ndarray:
    return np.sign(Z) * np.maximum(np.abs(Z) - R, 0.0)


@dataclass
class DirectionState:
    """Direction accumulator D with the companion cache U = D @ W.

    D stays symmetric; U is a full nonsymmetric matrix (D @ W is not
    symmetric in general). Coordinate updates mutate both in place, so a
    state must not be shared across threads.
    """

    D: np.ndarray
    U: np.ndarray
    sweep_count: int = 0

    @classmethod
    def zeros(cls, p: int) -> "DirectionState":
        return cls(D=np.zeros((p, p)), U=np.zeros((p, p)))


def coord_update(
    state: DirectionState,
    i: int,
    j: int,
    X: np.ndarray,
    W: np.ndarray,
    S: np.ndarray,
    Lam: np.ndarray,
) -> float:
    """Exact single-coordinate minimization of the quadratic model at (i, j).

    Solves the one-variable problem in mu for the symmetric perturbation of
    D at (i, j) and (j, i), applies it to D, and updates rows i and j of the
    cache U (only row i when i == j). Requires i <= j and the cache
    invariant U == D @ W on entry. Returns the applied mu, which is exactly
    zero whenever the coordinate is already optimal.
    """
    D = state.D
    U = state.U
    if i == j:
        w_ii = W[i, i]
        a = w_ii * w_ii
        b = S[i, i] - w_ii + np.dot(W[i], U[:, i])
        c = X[i, i] + D[i, i]
        mu = -c + soft_threshold(c - b / a, Lam[i, i] / a)
        if mu != 0.0:
            D[i, i] += mu
            U[i] += mu * W[i]
    else:
        w_ij = W[i, j]
        a = w_ij * w_ij + W[i, i] * W[j, j]
        b = S[i, j] - w_ij + np.dot(W[i], U[:, j])
        c = X[i, j] + D[i, j]
        mu = -c + soft_threshold(c - b / a, Lam[i, j] / a)
        if mu != 0.0:
            d_new = D[i, j] + mu
            D[i, j] = d_new
            D[j, i] = d_new
            U[i] += mu * W[j]
            U[j] += mu * W[i]
    return float(mu)


def run_sweeps(
    state: DirectionState,
    X: np.ndarray,
    W: np.ndarray,
    S: np.ndarray,
    Lam: np.ndarray,
    pairs: list[tuple[int, int]],
    max_sweeps: int,
    rng: np.random.Generator | None = None,
    stagnation_ratio: float = 1e-4,
) -> int:
    """Run up to max_sweeps full passes of coord_update over pairs.

    Pairs are visited in the given order, or in a fresh uniform permutation
    per sweep when rng is supplied. Stops early once the largest |mu| seen
    in a sweep drops to stagnation_ratio times the largest entry of D.
    Returns the number of sweeps performed.
    """
    n = len(pairs)
    done = 0
    if n == 0:
        return done
    for _ in range(max_sweeps):
        order = rng.permutation(n).tolist() if rng is not None else range(n)
        biggest = 0.0
        for k in order:
            i, j = pairs[k]
            mu = coord_update(state, i, j, X, W, S, Lam)
            if mu < 0.0:
                mu = -mu
            if mu > biggest:
                biggest = mu
        done += 1
        state.sweep_count += 1
        if biggest <= stagnation_ratio * float(np.max(np.abs(state.D))):
            break
    return done


def newton_direction(
    prob: Problem,
    iterate: IterateState,
    free_set: np.ndarray,
    sweeps: int,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Newton direction restricted to free_set, from coordinate descent.

    free_set is an array of index pairs with i <= j; entries outside it are
    never touched and remain exactly zero. An empty free_set yields the zero
    matrix.
    """
    state = DirectionState.zeros(prob.p)
    pairs = [(int(i), int(j)) for i, j in free_set]
    run_sweeps(state, iterate.X, iterate.W, prob.S, prob.Lam, pairs, sweeps, rng)
    return state.D


def diagonal_direction(prob: Problem, X: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Closed-form Newton direction when the iterate X is diagonal.

    With X (hence W) diagonal the quadratic model separates per coordinate,
    so a single exact pass suffices and costs O(p^2) in total. Equals one
    row-major pass of coord_update from the zero direction.
    """
    w = np.diagonal(W)
    denom = np.outer(w, w)
    D = _soft_threshold_array(-prob.S / denom, prob.Lam / denom)
    x = np.diagonal(X)
    s = np.diagonal(prob.S)
    lam = np.diagonal(prob.Lam)
    w2 = w * w
    diag = -x + _soft_threshold_array(x - (s - w) / w2, lam / w2)
    np.fill_diagonal(D, diag)
    return D
