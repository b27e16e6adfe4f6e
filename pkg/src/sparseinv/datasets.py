"""Synthetic Gaussian Markov random field generators and sampling.

Two ground-truth precision families: a chain graph (tridiagonal, 1.25 on the
diagonal and -0.5 off it) and random sparsity patterns built from a sparse
+/-1 matrix U as U^T U plus a Gershgorin diagonal shift. Sampling draws
standard normals through the Cholesky factor of the implied covariance.

Randomness comes from numpy's PCG64 generator (numpy.random.default_rng);
normal variates use Generator.standard_normal (ziggurat). Both are recorded
in run manifests so outputs are reproducible bit for bit per platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import cholesky, inverse_from_factor, symmetrize

PRNG_NAME = "numpy-pcg64"
NORMAL_METHOD = "standard_normal-ziggurat"


@dataclass(frozen=True)
class Dataset:
    """Sample matrix with one observation per row."""

    Y: np.ndarray

    @property
    def n(self) -> int:
        return self.Y.shape[0]

    @property
    def p(self) -> int:
        return self.Y.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """A positive definite precision matrix and its exact nonzero pattern."""

    precision: np.ndarray
    pattern: np.ndarray  # boolean mask, pattern == (precision != 0)


def sample_covariance(data: Dataset) -> np.ndarray:
    """Covariance with 1/(n-1) scaling around the 1/n sample mean."""
    n = data.n
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    centered = data.Y - data.Y.mean(axis=0)
    return symmetrize(centered.T @ centered / (n - 1))


def chain_precision(p: int) -> GroundTruth:
    """Tridiagonal chain-graph precision: diagonal 1.25, off-diagonal -0.5."""
    if p < 2:
        raise ValueError("chain graphs need p >= 2")
    precision = np.diag(np.full(p, 1.25))
    off = np.full(p - 1, -0.5)
    precision += np.diag(off, 1) + np.diag(off, -1)
    return GroundTruth(precision=precision, pattern=precision != 0)


def random_precision(p: int, target_nnz: int | None = None, seed: int = 0) -> GroundTruth:
    """Random sparsity pattern with roughly target_nnz nonzeros (default 10p).

    A sparse matrix U with +/-1 entries at uniformly random positions is
    squared into U^T U, and a diagonal shift of one plus the magnitude of
    the smallest Gershgorin lower bound makes the result positive definite.
    The density of U is calibrated by retrying until the off-diagonal count
    lands near the target; the whole procedure is deterministic per seed.
    """
    if target_nnz is None:
        target_nnz = 10 * p
    if target_nnz < p:
        raise ValueError(f"target_nnz={target_nnz} cannot be below p={p}")
    if target_nnz > p * p:
        raise ValueError(f"target_nnz={target_nnz} exceeds p^2={p * p}")
    rng = np.random.default_rng(seed)
    off_target = max(target_nnz - p, 1)

    m = max(p, int(round(math.sqrt(off_target * p))))
    best = None
    best_err = None
    for _ in range(12):
        m = min(max(m, 1), p * p)
        flat = rng.choice(p * p, size=m, replace=False)
        U = np.zeros(p * p)
        U[flat] = rng.choice([-1.0, 1.0], size=m)
        U = U.reshape(p, p)
        A = symmetrize(U.T @ U)  # integer-valued, so zeros are exact
        off_count = int(np.count_nonzero(A) - np.count_nonzero(np.diagonal(A)))
        err = abs(off_count - off_target)
        if best_err is None or err < best_err:
            best, best_err = A, err
        if off_count > 0 and err <= 0.1 * off_target:
            break
        scale = math.sqrt(off_target / max(off_count, 1))
        m = int(round(m * min(max(scale, 0.5), 2.0)))

    A = best
    radii = np.abs(A).sum(axis=1) - np.abs(np.diagonal(A))
    gersh = float(np.min(np.diagonal(A) - radii))
    A = A + (abs(gersh) + 1.0) * np.eye(p)
    cholesky(A)  # certify positive definiteness
    return GroundTruth(precision=A, pattern=A != 0)


def sample_gaussian(truth: GroundTruth, n: int, seed: int = 0) -> Dataset:
    """Draw n zero-mean samples with covariance inverse(truth.precision)."""
    sigma = inverse_from_factor(cholesky(truth.precision))
    L = cholesky(sigma).L
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, truth.precision.shape[0]))
    return Dataset(Y=Z @ L.T)
