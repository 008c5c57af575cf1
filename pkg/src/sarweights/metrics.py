"""Evaluation and convergence diagnostics.

Adjacency accuracy and parameter RMSEs follow the Monte Carlo study's
definitions (per-draw accuracy averaged over draws and replications; RMSE of
the posterior mean per replication, averaged over replications).  Geweke's
convergence score compares early and late chain segments with batch-means
variance estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, EmptyChainError, TooFewDrawsError
from .sampler import ChainOutput


@dataclass
class McResult:
    """Aggregated Monte Carlo metrics for one (cell, variant) combination."""

    rmse_beta: float
    rmse_rho: float
    accuracy_omega: float
    replications: list = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.accuracy_omega <= 1.0:
            raise DimensionMismatchError("accuracy must lie in [0, 1]")
        if self.rmse_beta < 0 or self.rmse_rho < 0:
            raise DimensionMismatchError("RMSEs must be nonnegative")


def accuracy(omega_draws: np.ndarray, omega_true: np.ndarray, free_mask: np.ndarray) -> float:
    """Mean over draws of the fraction of free entries matching the truth.

    ``omega_draws`` is a (draws, N, N) stack; ``free_mask`` marks the
    entries that were actually estimated.
    """
    draws = np.asarray(omega_draws)
    truth = np.asarray(omega_true)
    mask = np.asarray(free_mask, dtype=bool)
    if draws.ndim != 3 or draws.shape[1:] != truth.shape or truth.shape != mask.shape:
        raise DimensionMismatchError(
            f"draws {draws.shape}, truth {truth.shape}, mask {mask.shape} disagree"
        )
    if not mask.any():
        raise DimensionMismatchError("free mask is empty")
    matches = draws[:, mask] == truth[mask]
    return float(matches.mean())


def accuracy_from_counts(
    inclusion_counts: np.ndarray,
    draw_count: int,
    omega_true: np.ndarray,
    free_mask: np.ndarray,
) -> float:
    """Same average as ``accuracy`` computed from inclusion counts alone.

    The per-draw match count at a free entry is the inclusion count where
    the truth is 1 and draws - count where it is 0, so the average needs no
    per-draw storage.
    """
    counts = np.asarray(inclusion_counts)
    truth = np.asarray(omega_true)
    mask = np.asarray(free_mask, dtype=bool)
    if counts.shape != truth.shape or truth.shape != mask.shape:
        raise DimensionMismatchError("counts, truth, and mask shapes disagree")
    if draw_count <= 0:
        raise EmptyChainError("no retained draws")
    c = counts[mask]
    t = truth[mask]
    matched = np.where(t == 1, c, draw_count - c)
    return float(matched.sum() / (draw_count * c.shape[0]))


def rmse(estimates, truth) -> float:
    """Root mean squared error, averaged over replications.

    With a scalar ``truth``, a 1-D ``estimates`` array is read as one
    estimate per replication.  With a vector ``truth`` of length k,
    ``estimates`` is one replication of length k or a (replications, k)
    array; the per-replication RMSE is computed across the k components and
    then averaged.
    """
    est = np.asarray(estimates, dtype=float)
    tr = np.asarray(truth, dtype=float)
    if tr.ndim == 0:
        est = est.reshape(-1, 1)
        tr = tr.reshape(1)
    elif est.ndim == 1:
        est = est.reshape(1, -1)
    if est.ndim != 2 or est.shape[1] != tr.shape[0]:
        raise DimensionMismatchError(
            f"estimates {np.asarray(estimates).shape} do not match truth {tr.shape}"
        )
    per_rep = np.sqrt(((est - tr[None, :]) ** 2).mean(axis=1))
    return float(per_rep.mean())


def inclusion_matrix(chain: ChainOutput) -> np.ndarray:
    """Posterior inclusion probabilities: counts / retained draws."""
    if chain.draw_count == 0:
        raise EmptyChainError("no retained draws")
    return chain.inclusion_counts / chain.draw_count


def avg_neighbours(inclusion: np.ndarray) -> float:
    """Average row sum of the inclusion-probability matrix."""
    inclusion = np.asarray(inclusion)
    return float(inclusion.sum(axis=1).mean())


def _batch_means_variance(segment: np.ndarray) -> float:
    """Variance of the segment mean from sqrt(L) batch means."""
    length = segment.shape[0]
    nbatch = min(length, max(2, int(math.isqrt(length))))
    width = length // nbatch
    means = segment[: nbatch * width].reshape(nbatch, width).mean(axis=1)
    return float(means.var(ddof=1) / nbatch)


def geweke_z(draws: np.ndarray, first_frac: float = 0.1, last_frac: float = 0.5) -> float:
    """Geweke convergence score for one scalar chain.

    z = (mean of the first fraction - mean of the last fraction) divided by
    the square root of the summed variances of the two segment means, each
    estimated by batch means to absorb autocorrelation.
    """
    x = np.asarray(draws, dtype=float).ravel()
    if x.shape[0] < 20:
        raise TooFewDrawsError(f"need at least 20 draws, got {x.shape[0]}")
    n_first = max(2, int(x.shape[0] * first_frac))
    n_last = max(2, int(x.shape[0] * last_frac))
    first = x[:n_first]
    last = x[-n_last:]
    var_sum = _batch_means_variance(first) + _batch_means_variance(last)
    if var_sum == 0.0:
        return 0.0
    return float((first.mean() - last.mean()) / math.sqrt(var_sum))
