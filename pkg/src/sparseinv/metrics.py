"""Structure-recovery and convergence metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import GroundTruth


@dataclass(frozen=True)
class RecoveryReport:
    tpr: float
    fpr: float
    nnz_estimate: int
    nnz_truth: int
    threshold: float


def recovery(
    estimate: np.ndarray,
    truth: GroundTruth,
    threshold: float = 1e-6,
    include_diagonal: bool = True,
) -> RecoveryReport:
    """True/false positive rates of the recovered nonzero pattern.

    An entry is predicted nonzero when its magnitude exceeds threshold
    (pattern membership, so signs are irrelevant). Rates are counted over
    all ordered index pairs, optionally excluding the diagonal. Empty
    denominators yield a rate of 0.
    """
    if estimate.shape != truth.precision.shape:
        raise ValueError(
            f"dimension mismatch: {estimate.shape} vs {truth.precision.shape}"
        )
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    sel = np.ones(estimate.shape, dtype=bool)
    if not include_diagonal:
        np.fill_diagonal(sel, False)
    pred = (np.abs(estimate) > threshold) & sel
    true_mask = truth.pattern & sel
    n_true = int(np.count_nonzero(true_mask))
    n_false = int(np.count_nonzero(sel & ~true_mask))
    tp = int(np.count_nonzero(pred & true_mask))
    fp = int(np.count_nonzero(pred & ~true_mask))
    return RecoveryReport(
        tpr=tp / n_true if n_true else 0.0,
        fpr=fp / n_false if n_false else 0.0,
        nnz_estimate=int(np.count_nonzero(pred)),
        nnz_truth=n_true,
        threshold=float(threshold),
    )


def relative_error(f_t: float, f_star: float) -> float:
    """(f_t - f_star) / |f_star|; raises when f_star is zero."""
    if f_star == 0:
        raise ValueError("relative error undefined for f_star == 0")
    return (f_t - f_star) / abs(f_star)
