"""Dense symmetric linear algebra kernels.

Cholesky factorization with positive-definiteness detection, log-determinant,
inverse-from-factor, and trace products. These are the primitives every other
module builds on; all matrices are dense float64 arrays with both triangles
materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dpotrf, dpotri


class NotPositiveDefinite(Exception):
    """Cholesky factorization hit a non-positive pivot.

    Attributes
    ----------
    pivot : int
        0-based index of the first failing pivot.
    """

    def __init__(self, pivot: int):
        super().__init__(f"matrix is not positive definite (pivot {pivot})")
        self.pivot = pivot


@dataclass(frozen=True)
class CholFactor:
    """Lower-triangular factor L with L @ L.T equal to the factored matrix."""

    L: np.ndarray
    p: int


def symmetrize(A: np.ndarray) -> np.ndarray:
    """(A + A.T) / 2, exactly symmetric in floating point."""
    return (A + A.T) / 2.0


def cholesky(A: np.ndarray) -> CholFactor:
    """Factor a symmetric positive definite matrix as L @ L.T.

    Raises NotPositiveDefinite carrying the index of the failing pivot when a
    non-positive pivot is met; no partial factor is returned and no diagonal
    perturbation is applied (backtracking line searches are the designated
    recovery mechanism).
    """
    A = np.ascontiguousarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    c, info = dpotrf(A, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefinite(info - 1)
    if info < 0:
        raise ValueError(f"illegal value in argument {-info} of dpotrf")
    return CholFactor(L=c, p=A.shape[0])


def logdet(F: CholFactor) -> float:
    """Log-determinant of the factored matrix: 2 * sum(log diag(L))."""
    return 2.0 * float(np.sum(np.log(np.diagonal(F.L))))


def inverse_from_factor(F: CholFactor) -> np.ndarray:
    """Invert the factored matrix reusing its Cholesky factor.

    The inverse is assembled from the computed lower triangle so the result
    is exactly symmetric, as downstream update formulas assume.
    """
    inv, info = dpotri(F.L, lower=1)
    if info != 0:
        raise ValueError(f"dpotri failed with info={info}")
    lower = np.tril(inv)
    return lower + np.tril(inv, -1).T


def trace_product(A: np.ndarray, B: np.ndarray) -> float:
    """tr(A @ B) for symmetric A, B, computed as the elementwise sum."""
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.sum(A * B))
