"""SAR panel data model: stacking, row-standardization, design matrix, likelihood.

Panel observations are stacked unit-major within period (all units for the
first period, then the second, ...), so the full-system matrix factors as
S = I_T kron (I_N - rho*W) and |S| = |I_N - rho*W|^T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InconsistentStateError, RankDeficientError, ValidationError
from .linalg import SpatialSystemState, exact_factorize

CACHE_TOL = 1e-8


@dataclass
class AdjacencyMatrix:
    """Binary neighbour indicator matrix with zero diagonal."""

    omega: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        self.omega = np.asarray(self.omega)
        if self.omega.ndim != 2 or self.omega.shape[0] != self.omega.shape[1]:
            raise ValidationError("omega must be square", field="omega")
        if not np.isin(self.omega, (0, 1)).all():
            raise ValidationError("omega entries must be 0 or 1", field="omega")
        if np.diagonal(self.omega).any():
            raise ValidationError("omega diagonal must be zero", field="omega")
        if self.symmetric and not np.array_equal(self.omega, self.omega.T):
            raise ValidationError("omega flagged symmetric but is not", field="omega")
        self.omega = self.omega.astype(np.int64)

    @property
    def n(self) -> int:
        return self.omega.shape[0]

    def copy(self) -> "AdjacencyMatrix":
        return AdjacencyMatrix(self.omega.copy(), self.symmetric)


@dataclass
class WeightMatrix:
    """Nonnegative spatial weights; rows sum to one (or zero) when standardized."""

    w: np.ndarray
    row_standardized: bool = True

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if (self.w < 0).any():
            raise ValidationError("weights must be nonnegative", field="w")
        if np.diagonal(self.w).any():
            raise ValidationError("weight diagonal must be zero", field="w")
        if self.row_standardized:
            sums = self.w.sum(axis=1)
            ok = np.isclose(sums, 1.0, atol=1e-10) | (sums == 0.0)
            if not ok.all():
                raise ValidationError("rows must sum to 1 or be all zero", field="w")

    @property
    def n(self) -> int:
        return self.w.shape[0]


@dataclass
class ModelSpec:
    """Which variant of the panel model is being estimated.

    ``lag_offset`` r selects the spatial term: r = 0 uses the contemporaneous
    lag W y_t (full likelihood with determinant), r > 0 uses the temporal lag
    W y_{t-r} (no determinant term; requires ``y_lag`` in the panel).
    """

    lag_offset: int = 0
    row_standardize: bool = True
    symmetric_omega: bool = False
    unit_fixed_effects: bool = True
    time_fixed_effects: bool = True

    def __post_init__(self):
        if self.lag_offset < 0:
            raise ValidationError("lag_offset must be >= 0", field="lag_offset")


@dataclass
class PanelData:
    """Stacked dependent vector and design matrix for a balanced N x T panel."""

    n: int
    t: int
    y: np.ndarray
    x: np.ndarray
    y_lag: Optional[np.ndarray] = None
    unit_ids: Optional[list] = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float).ravel()
        self.x = np.ascontiguousarray(self.x, dtype=float)
        nt = self.n * self.t
        if self.y.shape[0] != nt:
            raise ValidationError(f"y has {self.y.shape[0]} rows, expected {nt}", field="y")
        if self.x.shape[0] != nt:
            raise ValidationError(f"x has {self.x.shape[0]} rows, expected {nt}", field="x")
        if self.y_lag is not None:
            self.y_lag = np.asarray(self.y_lag, dtype=float).ravel()
            if self.y_lag.shape[0] != nt:
                raise ValidationError("y_lag length must equal n*t", field="y_lag")

    @property
    def q(self) -> int:
        return self.x.shape[1]

    @property
    def nt(self) -> int:
        return self.n * self.t

    def y_matrix(self) -> np.ndarray:
        """Dependent variable as a (T, N) matrix, rows indexed by period."""
        return self.y.reshape(self.t, self.n)

    def y_lag_matrix(self) -> np.ndarray:
        if self.y_lag is None:
            raise ValidationError("panel has no temporal lag column", field="y_lag")
        return self.y_lag.reshape(self.t, self.n)


@dataclass
class ParameterState:
    """Current draw of all model parameters plus the cached system state."""

    beta: np.ndarray
    sigma2: float
    rho: float
    omega: AdjacencyMatrix
    system: Optional[SpatialSystemState] = None

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=float).ravel()
        if self.sigma2 <= 0:
            raise ValidationError("sigma2 must be positive", field="sigma2")
        # rho = 0 is admitted for likelihood evaluation at the boundary; the
        # prior support and every sampled value stay inside (0, 1)
        if not 0.0 <= self.rho < 1.0:
            raise ValidationError("rho must lie in [0, 1)", field="rho")


def row_standardize(omega: AdjacencyMatrix, enabled: bool = True) -> WeightMatrix:
    """Divide each row of omega by its row sum; all-zero rows stay zero.

    With ``enabled=False`` the adjacency matrix is passed through unchanged
    (cast to float), for model variants without row-standardization.
    """
    om = omega.omega.astype(float)
    if not enabled:
        return WeightMatrix(om, row_standardized=False)
    sums = om.sum(axis=1)
    scale = np.where(sums > 0, sums, 1.0)
    return WeightMatrix(om / scale[:, None], row_standardized=True)


def standardize_row(row: np.ndarray) -> np.ndarray:
    """Row-standardize a single adjacency row (float output, zero row allowed)."""
    s = row.sum()
    if s > 0:
        return row / s
    return np.zeros_like(row, dtype=float)


def build_design(
    raw_covariates: np.ndarray,
    y: np.ndarray,
    n: int,
    t: int,
    spec: ModelSpec,
    y_lag: Optional[np.ndarray] = None,
    unit_ids: Optional[list] = None,
) -> PanelData:
    """Assemble the stacked design matrix with fixed-effect dummy blocks.

    Column order: raw covariates (input order), then N unit dummies, then
    T-1 time dummies with the first period as reference.  No intercept
    column is added; the unit dummies absorb it.

    Raises
    ------
    RankDeficientError
        If the assembled matrix is collinear.
    """
    raw = np.asarray(raw_covariates, dtype=float)
    if raw.ndim == 1:
        raw = raw[:, None]
    nt = n * t
    if raw.shape[0] != nt:
        raise ValidationError(f"covariates have {raw.shape[0]} rows, expected {nt}",
                              field="raw_covariates")
    blocks = [raw]
    if spec.unit_fixed_effects:
        unit_dummies = np.tile(np.eye(n), (t, 1))
        blocks.append(unit_dummies)
    if spec.time_fixed_effects and t > 1:
        time_dummies = np.zeros((nt, t - 1))
        for period in range(1, t):
            time_dummies[period * n:(period + 1) * n, period - 1] = 1.0
        blocks.append(time_dummies)
    x = np.hstack(blocks)
    if np.linalg.matrix_rank(x) < x.shape[1]:
        raise RankDeficientError(
            f"design matrix is collinear (rank < {x.shape[1]} columns)"
        )
    return PanelData(n=n, t=t, y=y, x=x, y_lag=y_lag, unit_ids=unit_ids)


def build_system(
    omega: AdjacencyMatrix,
    rho: float,
    spec: ModelSpec,
    refresh_interval: int = 64,
) -> SpatialSystemState:
    """Factorize A = I - rho * f(omega) exactly for the current parameters."""
    w = row_standardize(omega, enabled=spec.row_standardize).w
    a = np.eye(omega.n) - rho * w
    return exact_factorize(a, refresh_interval)


def _check_system(params: ParameterState, spec: ModelSpec) -> SpatialSystemState:
    if params.system is None:
        raise InconsistentStateError("no cached system state for the r = 0 path")
    w = row_standardize(params.omega, enabled=spec.row_standardize).w
    a = np.eye(params.omega.n) - params.rho * w
    if np.abs(a - params.system.a).max() > CACHE_TOL:
        raise InconsistentStateError("cached A does not match (rho, W)")
    return params.system


def log_likelihood(params: ParameterState, data: PanelData, spec: ModelSpec) -> float:
    """Gaussian log-likelihood of the stacked panel.

    r = 0:  -(NT/2) log(2 pi sigma^2) + T log|A| - e'e / (2 sigma^2)
            with e = S Y - X beta and |S| = |A|^T.
    r > 0:  same without the determinant term, with
            e = Y - rho (I_T kron W) Y_lag - X beta.
    """
    nt = data.nt
    xb = data.x @ params.beta
    if spec.lag_offset == 0:
        system = _check_system(params, spec)
        sy = (data.y_matrix() @ system.a.T).ravel()
        resid = sy - xb
        det_term = data.t * system.log_det
    else:
        w = row_standardize(params.omega, enabled=spec.row_standardize).w
        wyl = (data.y_lag_matrix() @ w.T).ravel()
        resid = data.y - params.rho * wyl - xb
        det_term = 0.0
    return (
        -0.5 * nt * math.log(2.0 * math.pi * params.sigma2)
        + det_term
        - float(resid @ resid) / (2.0 * params.sigma2)
    )
