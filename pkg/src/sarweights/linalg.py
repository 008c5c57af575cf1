"""Dense kernel for A = I - rho*W: exact and rank-one-updated determinants/inverses.

A Gibbs sweep over the adjacency matrix edits one row of A at a time (two for
symmetric updates).  Each edit is a rank-one modification A + nu_i delta_i',
so the log-determinant follows from the matrix determinant lemma and the
inverse from the Sherman-Morrison formula.  Floating-point drift from long
runs of updates is bounded by an exact refactorization every
``refresh_interval`` edits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveDeterminantError, SingularMatrixError

DET_FLOOR = 1e-12


@dataclass
class SpatialSystemState:
    """Cached (A, A^-1, log det A) kept consistent under rank-one row edits.

    Owned by exactly one chain at a time; queries and updates are not
    synchronized.  ``update_count`` counts Sherman-Morrison edits since the
    last exact refactorization.
    """

    a: np.ndarray
    a_inv: np.ndarray
    log_det: float
    update_count: int = 0
    refresh_interval: int = 64

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def copy(self) -> "SpatialSystemState":
        return SpatialSystemState(
            self.a.copy(), self.a_inv.copy(), self.log_det,
            self.update_count, self.refresh_interval,
        )

    def max_identity_deviation(self) -> float:
        """Max-abs entry of A @ A^-1 - I; the reconstruction drift measure."""
        resid = self.a @ self.a_inv
        resid[np.diag_indices_from(resid)] -= 1.0
        return float(np.abs(resid).max())


def exact_factorize(a: np.ndarray, refresh_interval: int = 64) -> SpatialSystemState:
    """Build a state from scratch with an exact log-determinant and inverse.

    Raises
    ------
    SingularMatrixError
        If det(a) <= 0 or |det(a)| < 1e-12.  States with non-positive
        determinant are unrepresentable; proposals that would create them
        must be rejected upstream.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    sign, logabsdet = np.linalg.slogdet(a)
    if sign <= 0 or logabsdet < math.log(DET_FLOOR):
        raise SingularMatrixError(
            f"determinant {sign * math.exp(logabsdet):.3e} is not positive"
        )
    return SpatialSystemState(
        a=a.copy(),
        a_inv=np.linalg.inv(a),
        log_det=float(logabsdet),
        update_count=0,
        refresh_interval=refresh_interval,
    )


def _det_factor(state: SpatialSystemState, i: int, delta: np.ndarray) -> float:
    # 1 + delta' A^-1 nu_i, i.e. 1 + delta . (i-th column of A^-1)
    return 1.0 + float(delta @ state.a_inv[:, i])


def rank_one_determinant(state: SpatialSystemState, i: int, delta: np.ndarray) -> float:
    """Log-determinant of A with ``delta`` added to row ``i``; pure query.

    Matrix determinant lemma: |A + nu_i delta'| = (1 + delta' A^-1 nu_i) |A|.

    Raises
    ------
    NonPositiveDeterminantError
        If the update factor is <= 0, signalling that the proposed edit
        must be rejected.
    """
    factor = _det_factor(state, i, delta)
    if factor <= 0.0:
        raise NonPositiveDeterminantError(
            f"row-{i} edit gives determinant factor {factor:.3e}"
        )
    return math.log(factor) + state.log_det


def rank_one_pair_determinant(
    state: SpatialSystemState,
    i: int,
    delta_i: np.ndarray,
    j: int,
    delta_j: np.ndarray,
) -> float:
    """Log-determinant after editing rows ``i`` and ``j``; pure query.

    Two-step iterated form of the determinant lemma: the second factor is
    evaluated against the once-updated inverse, written out so that no
    intermediate inverse has to be materialized:

        f1 = 1 + delta_i' A^-1 nu_i
        f2 = 1 + delta_j' A1^-1 nu_j
           = 1 + d_jj - d_ji * d_ij / f1,   d_ab = delta_a' A^-1 nu_b

    Raises NonPositiveDeterminantError if either step fails.
    """
    a_inv = state.a_inv
    d_ii = float(delta_i @ a_inv[:, i])
    f1 = 1.0 + d_ii
    if f1 <= 0.0:
        raise NonPositiveDeterminantError(
            f"row-{i} edit gives determinant factor {f1:.3e}"
        )
    d_jj = float(delta_j @ a_inv[:, j])
    d_ji = float(delta_j @ a_inv[:, i])
    d_ij = float(delta_i @ a_inv[:, j])
    f2 = 1.0 + d_jj - d_ji * d_ij / f1
    if f2 <= 0.0:
        raise NonPositiveDeterminantError(
            f"row-{j} edit gives determinant factor {f2:.3e}"
        )
    return math.log(f1) + math.log(f2) + state.log_det


def rank_one_apply(
    state: SpatialSystemState,
    i: int,
    delta: np.ndarray,
    factor: float | None = None,
) -> SpatialSystemState:
    """Commit a row edit: update A, its inverse, and the log-determinant.

    The inverse follows the Sherman-Morrison formula,

        (A + nu_i delta')^-1 = A^-1 - (A^-1 nu_i)(delta' A^-1) / (1 + delta' A^-1 nu_i),

    and the log-determinant the matrix determinant lemma.  Once
    ``refresh_interval`` consecutive rank-one updates have accumulated, the
    edit is instead followed by an exact refactorization to cancel drift.
    The state is modified in place and returned.

    ``factor`` lets a caller that already evaluated the determinant factor
    (via ``rank_one_determinant``) skip its recomputation.
    """
    if factor is None:
        factor = _det_factor(state, i, delta)
    if factor <= 0.0:
        raise NonPositiveDeterminantError(
            f"row-{i} edit gives determinant factor {factor:.3e}"
        )
    state.a[i, :] += delta
    if state.update_count + 1 > state.refresh_interval:
        fresh = exact_factorize(state.a, state.refresh_interval)
        state.a_inv = fresh.a_inv
        state.log_det = fresh.log_det
        state.update_count = 0
        return state
    col = state.a_inv[:, i].copy()
    row_vec = delta @ state.a_inv
    row_vec /= factor
    state.a_inv -= col[:, None] * row_vec[None, :]
    state.log_det += math.log(factor)
    state.update_count += 1
    return state
