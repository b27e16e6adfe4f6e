"""Penalized Gaussian maximum-likelihood objective.

The objective is f(X) = smooth(X) + penalty(X) over positive definite X,
where smooth(X) = -logdet(X) + tr(S X) is the (scaled, shifted) Gaussian
negative log-likelihood for a sample covariance S, and
penalty(X) = sum_ij lam_ij |X_ij| is a weighted elementwise l1 term summed
over all ordered index pairs (both triangles).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import CholFactor, cholesky, inverse_from_factor, logdet, symmetrize, trace_product


def uniform_penalty(p: int, lam: float) -> np.ndarray:
    """Constant penalty weight lam on every entry, diagonal included."""
    return np.full((p, p), float(lam))


def offdiag_penalty(p: int, lam: float) -> np.ndarray:
    """Penalty weight lam off the diagonal, zero on it (the common variant)."""
    Lam = np.full((p, p), float(lam))
    np.fill_diagonal(Lam, 0.0)
    return Lam


def _check_symmetric(A: np.ndarray, name: str) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=1e-10, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")
    return symmetrize(A)


@dataclass(frozen=True)
class Problem:
    """Sample covariance plus symmetric nonnegative penalty weights.

    Parameters
    ----------
    S : ndarray of shape (p, p)
        Sample covariance matrix. Positive semi-definiteness is not enforced
        (real sample covariances may be rank deficient); negative diagonal
        entries only trigger a warning.
    Lam : ndarray of shape (p, p)
        Elementwise penalty weights. Entries must be nonnegative; zero
        off-diagonal weights are allowed but void the uniqueness guarantee
        for the minimizer, so they raise a warning.
    """

    S: np.ndarray
    Lam: np.ndarray

    def __post_init__(self):
        S = _check_symmetric(self.S, "S")
        Lam = _check_symmetric(self.Lam, "Lam")
        if S.shape != Lam.shape:
            raise ValueError(f"S and Lam shapes differ: {S.shape} vs {Lam.shape}")
        if np.any(Lam < 0):
            raise ValueError("penalty weights must be nonnegative")
        p = S.shape[0]
        off = ~np.eye(p, dtype=bool)
        if p > 1 and np.any(Lam[off] == 0):
            warnings.warn(
                "some off-diagonal penalty weights are zero; the minimizer "
                "may not be unique",
                stacklevel=2,
            )
        if np.any(np.diagonal(S) < 0):
            warnings.warn("S has negative diagonal entries", stacklevel=2)
        S.flags.writeable = False
        Lam.flags.writeable = False
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "Lam", Lam)

    @property
    def p(self) -> int:
        return self.S.shape[0]


def smooth_value(prob: Problem, X: np.ndarray, F: CholFactor) -> float:
    """-logdet(X) + tr(S X), with the log-determinant read off the factor."""
    return -logdet(F) + trace_product(prob.S, X)


def penalty_value(prob: Problem, X: np.ndarray) -> float:
    """Weighted l1 norm sum_ij lam_ij |X_ij| over all ordered pairs."""
    return float(np.sum(prob.Lam * np.abs(X)))


def objective_value(prob: Problem, X: np.ndarray, F: CholFactor) -> float:
    return smooth_value(prob, X, F) + penalty_value(prob, X)


def smooth_gradient(prob: Problem, W: np.ndarray) -> np.ndarray:
    """Gradient S - W of the smooth part, where W is the inverse iterate."""
    return prob.S - W


def min_norm_subgradient(prob: Problem, X: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Minimum-norm element of the subdifferential of the full objective.

    Entrywise: grad + lam where X > 0, grad - lam where X < 0, and the
    soft-thresholded gradient sign(grad) * max(|grad| - lam, 0) where X == 0.
    The result is the all-zero matrix exactly at minimizers.
    """
    Lam = prob.Lam
    shrunk = np.sign(grad) * np.maximum(np.abs(grad) - Lam, 0.0)
    return np.where(X > 0, grad + Lam, np.where(X < 0, grad - Lam, shrunk))


@dataclass(frozen=True)
class IterateState:
    """A positive definite iterate with its derived quantities.

    Holds X, its inverse W, the Cholesky factor of X, the objective value
    split into smooth and penalty parts, and the smooth gradient S - W.
    """

    X: np.ndarray
    W: np.ndarray
    factor: CholFactor
    f_val: float
    smooth_val: float
    penalty_val: float
    grad: np.ndarray


def make_iterate(prob: Problem, X: np.ndarray, factor: CholFactor | None = None) -> IterateState:
    """Evaluate the objective at X, factorizing unless a factor is supplied."""
    if factor is None:
        factor = cholesky(X)
    W = inverse_from_factor(factor)
    g = smooth_value(prob, X, factor)
    h = penalty_value(prob, X)
    return IterateState(
        X=X,
        W=W,
        factor=factor,
        f_val=g + h,
        smooth_val=g,
        penalty_val=h,
        grad=smooth_gradient(prob, W),
    )
