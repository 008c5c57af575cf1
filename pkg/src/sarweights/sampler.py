"""Gibbs sampler for the SAR panel model with an estimated adjacency matrix.

One iteration updates beta (Gaussian), sigma^2 (inverse gamma), rho
(griddy-Gibbs over its open-(0,1) grid), and then sweeps every free
adjacency entry once in a fresh random order, drawing each from its
Bernoulli conditional.  The contemporaneous-lag path (r = 0) tracks the
determinant and inverse of A = I - rho*W through rank-one updates; the
temporal-lag path (r > 0) needs no determinant and only residual updates.

A ``ChainWorkspace`` owns all mutable state for one chain (single-writer):
the parameter draw, the weight matrix, cached residuals, and the rank-one
system state.  Multiple chains run in parallel only as separate workspaces
with independently seeded generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg as sla
from scipy import stats
from scipy.sparse.csgraph import connected_components

from . import linalg
from .errors import (
    DegeneratePosteriorError,
    NonPositiveDeterminantError,
    NumericalFailureError,
    SingularMatrixError,
    ValidationError,
)
from .model import (
    AdjacencyMatrix,
    ModelSpec,
    PanelData,
    ParameterState,
    build_system,
    row_standardize,
)
from .priors import FIXED, PriorSpec, draw_from_priors, sparsity_log_odds

W2_PROP_TOL = 1e-12


@dataclass
class SamplerConfig:
    """Chain-length and numerical knobs for one MCMC run.

    ``residual_half_factor`` switches the sigma^2 update's residual term
    from the printed form b + e'e to the conventional conjugate b + e'e/2.
    ``prior_only`` disables the likelihood (and the rejection checks, which
    are likelihood-side constraints) so the adjacency sweep samples from the
    prior alone; used for validating the prior machinery.
    """

    n_draws: int = 5000
    n_burnin: int = 2500
    rho_grid_size: int = 200
    seed: int = 0
    refresh_interval: int = 64
    thin: int = 1
    residual_half_factor: bool = False
    prior_only: bool = False
    init_omega_from_prior: bool = False

    def __post_init__(self):
        if self.n_draws < 0:
            raise ValidationError("n_draws must be >= 0", field="n_draws")
        if self.n_burnin < 0:
            raise ValidationError("n_burnin must be >= 0", field="n_burnin")
        if self.rho_grid_size < 10:
            raise ValidationError("rho_grid_size must be >= 10", field="rho_grid_size")
        if self.thin < 1:
            raise ValidationError("thin must be >= 1", field="thin")
        if self.refresh_interval < 1:
            raise ValidationError("refresh_interval must be >= 1", field="refresh_interval")


@dataclass
class ChainOutput:
    """Retained draws plus accumulated inclusion counts and rejection tallies."""

    beta_draws: np.ndarray
    sigma2_draws: np.ndarray
    rho_draws: np.ndarray
    inclusion_counts: np.ndarray
    omega_last: np.ndarray
    draw_count: int
    det_rejections: int = 0
    ident_rejections: int = 0
    proposal_count: int = 0


def _w2diag_ok(d: np.ndarray) -> bool:
    # Fails identification iff diag(W^2) is a nonzero constant vector; the
    # zero vector (empty W, the non-spatial model) passes.
    m = d.max()
    if m <= 0.0:
        return True
    return (m - d.min()) > W2_PROP_TOL * m


def _w2diag_ok_fast(d: np.ndarray) -> bool:
    # Cheap probe for the common case: two entries that differ by more than
    # the proportionality tolerance settle the check without a full scan
    # (entries are nonnegative, so |d0| + |d1| <= 2 max(d)).
    d0 = d[0]
    d1 = d[1]
    if abs(d0 - d1) > W2_PROP_TOL * (abs(d0) + abs(d1)):
        return True
    return _w2diag_ok(d)


def identification_check(
    omega: AdjacencyMatrix,
    rho_positive_support: bool = True,
    row_standardized: bool = True,
) -> bool:
    """Runtime identification predicate for a candidate adjacency matrix.

    Fails when the main diagonal of W^2 is proportional to a vector of ones
    (the fully connected matrix being the canonical offender).  When rho is
    not restricted to positive support, a strongly connected network is
    additionally required.  Returns True when the candidate passes.
    """
    w = row_standardize(omega, enabled=row_standardized).w
    if not _w2diag_ok(np.einsum("ij,ji->i", w, w)):
        return False
    if not rho_positive_support:
        if omega.n > 1:
            ncomp = connected_components(
                w > 0, directed=True, connection="strong", return_labels=False
            )
            if ncomp != 1:
                return False
    return True


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


class ChainWorkspace:
    """All mutable state owned by one chain, with incremental caches.

    Caches kept consistent across adjacency flips: the weight matrix ``W``,
    integer adjacency row counts, the per-period residual matrix ``E``
    (T x N), its squared sum ``ess``, diag(W^2) for the identification
    check, and (r > 0 only) the spatial lag ``WYlag``.  Residual caches are
    rebuilt exactly after every beta and rho update, so incremental drift
    never survives an iteration.
    """

    def __init__(
        self,
        params: ParameterState,
        data: PanelData,
        spec: ModelSpec,
        priors: PriorSpec,
        config: SamplerConfig,
    ):
        if priors.omega.n != params.omega.n or params.omega.n != data.n:
            raise ValidationError("omega, prior, and panel dimensions disagree", field="n")
        if params.beta.shape[0] != data.q:
            raise ValidationError("beta length must equal the design column count", field="beta")
        if spec.lag_offset > 0 and data.y_lag is None:
            raise ValidationError("lag_offset > 0 requires y_lag in the panel", field="y_lag")
        if spec.symmetric_omega and not params.omega.symmetric:
            raise ValidationError("spec requires a symmetric omega", field="symmetric_omega")
        self.params = params
        self.data = data
        self.spec = spec
        self.priors = priors
        self.config = config
        self.n = data.n
        self.t = data.t
        self.Y_mat = np.ascontiguousarray(data.y_matrix())
        self.xtx = data.x.T @ data.x
        self.omega_f = params.omega.omega.astype(float)
        self.row_counts = params.omega.omega.sum(axis=1)
        self.W = row_standardize(params.omega, enabled=spec.row_standardize).w
        if spec.lag_offset == 0:
            self.Ylag_mat = None
            self.WYlag = None
            if params.system is None:
                params.system = build_system(
                    params.omega, params.rho, spec, config.refresh_interval
                )
        else:
            self.Ylag_mat = np.ascontiguousarray(data.y_lag_matrix())
            self.WYlag = self.Ylag_mat @ self.W.T
            params.system = None
        self.w2diag = np.einsum("ij,ji->i", self.W, self.W)
        self._build_free_pairs()
        self.det_rejections = 0
        self.ident_rejections = 0
        self.proposal_count = 0
        # scratch buffers for the sweep's per-entry candidate quantities
        n = self.n
        self._wi_buf = np.empty(n)
        self._wj_buf = np.empty(n)
        self._dwi_buf = np.empty(n)
        self._dwj_buf = np.empty(n)
        self._di_buf = np.empty(n)
        self._dj_buf = np.empty(n)
        self._w2_buf = np.empty(n)
        self._resid_i = np.empty(self.t)
        self._resid_j = np.empty(self.t)
        self.refresh_xb()

    def _build_free_pairs(self):
        p = self.priors.omega.p_under
        pinned = (p == 0.0) | (p == 1.0)
        if self.spec.symmetric_omega:
            pair_pinned = pinned | pinned.T
            iu, ju = np.triu_indices(self.n, k=1)
            keep = ~pair_pinned[iu, ju]
            self.free_i = iu[keep]
            self.free_j = ju[keep]
        else:
            offdiag = ~np.eye(self.n, dtype=bool)
            keep = offdiag & ~pinned
            self.free_i, self.free_j = np.nonzero(keep)

    def refresh_xb(self):
        """Recompute X*beta and the residual caches after a beta change."""
        self.xb_mat = (self.data.x @ self.params.beta).reshape(self.t, self.n)
        self.refresh_resid()

    def refresh_resid(self):
        """Recompute the residual matrix E and e'e exactly."""
        if self.spec.lag_offset == 0:
            e = self.Y_mat @ self.params.system.a.T - self.xb_mat
        else:
            e = self.Y_mat - self.params.rho * self.WYlag - self.xb_mat
        self.E = np.ascontiguousarray(e)
        self.ess = float(np.vdot(self.E, self.E))


def initial_state(
    data: PanelData,
    spec: ModelSpec,
    priors: PriorSpec,
    config: SamplerConfig,
    rng: np.random.Generator,
) -> ParameterState:
    """Starting values: beta/sigma2/rho from their priors, omega from the masks.

    The adjacency matrix starts empty apart from hard-included entries
    (guaranteeing det(A) > 0 at the first iteration); with
    ``init_omega_from_prior`` it is instead drawn from the omega prior,
    falling back to the mask-only start when that draw is unusable.
    """
    beta, sigma2, rho = draw_from_priors(data.q, priors.params, rng)
    omega_mat = _hard_omega(priors, spec)
    if config.init_omega_from_prior:
        cand = _draw_omega_from_prior(priors, spec, rng)
        adj = AdjacencyMatrix(cand, symmetric=spec.symmetric_omega)
        usable = identification_check(adj, row_standardized=spec.row_standardize)
        if usable and spec.lag_offset == 0:
            try:
                build_system(adj, rho, spec, config.refresh_interval)
            except SingularMatrixError:
                usable = False
        if usable:
            omega_mat = cand
    omega = AdjacencyMatrix(omega_mat, symmetric=spec.symmetric_omega)
    system = None
    if spec.lag_offset == 0:
        system = build_system(omega, rho, spec, config.refresh_interval)
    return ParameterState(beta=beta, sigma2=sigma2, rho=rho, omega=omega, system=system)


def _hard_omega(priors: PriorSpec, spec: ModelSpec) -> np.ndarray:
    p = priors.omega.p_under
    include = p == 1.0
    if spec.symmetric_omega:
        if ((p == 1.0) & (p.T == 0.0)).any():
            raise ValidationError(
                "conflicting hard masks under a symmetric omega", field="p_under"
            )
        include = include | include.T
    return include.astype(np.int64)


def _draw_omega_from_prior(
    priors: PriorSpec, spec: ModelSpec, rng: np.random.Generator
) -> np.ndarray:
    prior = priors.omega
    n = prior.n
    p = prior.p_under
    if prior.family == FIXED:
        probs = p
    else:
        # hierarchical draw: one inclusion probability per row
        u = rng.beta(prior.a_omega, prior.b_omega, size=n)
        probs = np.repeat(u[:, None], n, axis=1)
    draw = (rng.random((n, n)) < probs).astype(np.int64)
    draw[p == 0.0] = 0
    draw[p == 1.0] = 1
    np.fill_diagonal(draw, 0)
    if spec.symmetric_omega:
        upper = np.triu(draw, k=1)
        draw = upper + upper.T
        hard = _hard_omega(priors, spec)
        draw = np.maximum(draw, hard)
        draw[(p == 0.0) | (p.T == 0.0)] = 0
    return draw


def sample_beta(ws: ChainWorkspace, rng: np.random.Generator) -> np.ndarray:
    """Draw beta from its Gaussian conditional and refresh the residual cache.

    Posterior covariance (sigma^-2 X'X + V^-1)^-1 and mean
    sigma^-2 Vbar X'(S Y) (r = 0) or sigma^-2 Vbar X'(Y - rho (I kron W) Y_lag).
    """
    sigma2 = ws.params.sigma2
    v = ws.priors.params.beta_variance_vector(ws.data.q)
    prec = ws.xtx / sigma2
    prec[np.diag_indices_from(prec)] += 1.0 / v
    try:
        chol = np.linalg.cholesky(prec)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError("beta posterior precision is not positive definite") from exc
    target = (ws.E + ws.xb_mat).ravel()
    rhs = ws.data.x.T @ target / sigma2
    mean = sla.cho_solve((chol, True), rhs)
    z = rng.standard_normal(ws.data.q)
    draw = mean + sla.solve_triangular(chol, z, trans="T", lower=True)
    ws.params.beta = draw
    ws.refresh_xb()
    return draw


def sample_sigma2(ws: ChainWorkspace, rng: np.random.Generator) -> float:
    """Draw sigma^2 from its inverse-gamma conditional.

    Shape a + NT/2; rate b + e'e as printed (or b + e'e/2 with
    ``residual_half_factor``).
    """
    pp = ws.priors.params
    shape = pp.sigma2_shape + 0.5 * ws.data.nt
    quad = 0.5 * ws.ess if ws.config.residual_half_factor else ws.ess
    rate = pp.sigma2_rate + quad
    draw = 1.0 / rng.gamma(shape, 1.0 / rate)
    ws.params.sigma2 = float(draw)
    return ws.params.sigma2


def _grid_log_dets(w: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """log|I - rho*W| on the grid via the eigenvalues of W; -inf where det <= 0.

    det(I - rho W) = prod_k (1 - rho lambda_k) exactly, so one O(N^3)
    eigendecomposition prices every grid point at O(N).  Complex pairs
    cancel in the imaginary part; a surviving imaginary part of +-pi flags
    a negative determinant (possible only without row-standardization).
    """
    eigs = np.linalg.eigvals(w)
    factors = 1.0 - grid[:, None] * eigs[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(factors.astype(complex)).sum(axis=1)
    out = np.where(np.cos(logs.imag) > 0.99, logs.real, -np.inf)
    out[np.isnan(out)] = -np.inf
    return out


def sample_rho_griddy(ws: ChainWorkspace, rng: np.random.Generator) -> float:
    """Griddy-Gibbs draw of rho on an open uniform grid over (0, 1).

    The conditional log-density log p(rho) + T log|I - rho W| - e'e/(2 sigma^2)
    is evaluated at grid midpoints (k - 1/2)/G, normalized by log-sum-exp,
    and inverted through the discrete CDF with uniform jitter inside the
    selected cell.  For r = 0 the system state is refactorized exactly once
    at the accepted rho (grid evaluation prices the determinant through the
    eigenvalues of W, which an adjacency flip would invalidate).
    """
    cfg = ws.config
    g = cfg.rho_grid_size
    grid = (np.arange(g) + 0.5) / g
    pp = ws.priors.params
    lp = stats.beta.logpdf(grid, pp.rho_shape1, pp.rho_shape2)
    resid0 = ws.Y_mat - ws.xb_mat
    sigma2 = ws.params.sigma2
    if ws.spec.lag_offset == 0:
        wy = ws.Y_mat @ ws.W.T
        c0 = float(np.vdot(resid0, resid0))
        c1 = float(np.vdot(resid0, wy))
        c2 = float(np.vdot(wy, wy))
        lp = lp + ws.t * _grid_log_dets(ws.W, grid)
    else:
        wyl = ws.WYlag
        c0 = float(np.vdot(resid0, resid0))
        c1 = float(np.vdot(resid0, wyl))
        c2 = float(np.vdot(wyl, wyl))
    lp = lp - (c0 - 2.0 * grid * c1 + grid * grid * c2) / (2.0 * sigma2)
    finite = np.isfinite(lp)
    if not finite.any():
        raise DegeneratePosteriorError("every rho grid point has zero density")
    shifted = lp - lp[finite].max()
    probs = np.where(finite, np.exp(shifted), 0.0)
    cum = np.cumsum(probs)
    cum /= cum[-1]
    cell = int(np.searchsorted(cum, rng.random()))
    cell = min(cell, g - 1)
    rho = (cell + rng.random()) / g
    rho = min(max(rho, 1e-12), 1.0 - 1e-12)
    if ws.spec.lag_offset == 0:
        try:
            ws.params.system = _refactorize_at(ws, rho)
        except SingularMatrixError:
            # jitter crossed a determinant root inside the cell (only possible
            # without row-standardization); the midpoint was checked valid
            rho = grid[cell]
            ws.params.system = _refactorize_at(ws, rho)
    ws.params.rho = float(rho)
    ws.refresh_resid()
    return ws.params.rho


def _refactorize_at(ws: ChainWorkspace, rho: float) -> linalg.SpatialSystemState:
    a = -rho * ws.W
    a[np.diag_indices_from(a)] += 1.0
    return linalg.exact_factorize(a, ws.config.refresh_interval)


def _candidate_row(ws: ChainWorkspace, row: int, col: int, value: int, count: int,
                   out: np.ndarray) -> np.ndarray:
    if ws.spec.row_standardize:
        if count > 0:
            np.multiply(ws.omega_f[row], 1.0 / count, out=out)
            out[col] = value / count
        else:
            out[:] = 0.0
    else:
        out[:] = ws.omega_f[row]
        out[col] = value
    return out


def sample_omega_entry(
    ws: ChainWorkspace, i: int, j: int, rng: np.random.Generator
) -> Optional[float]:
    """Gibbs update of omega_ij (and omega_ji when symmetric).

    Computes the Bernoulli inclusion probability from the prior odds and the
    likelihood of the flipped state, obtained through rank-one determinant
    and residual updates (only the flip needs computing; the current state's
    quantities are already cached).  Draws the new value and commits the
    flip if it differs.  Returns the inclusion probability used, or None
    when the flip proposal was rejected by the determinant-positivity or
    identification check (the entry then keeps its current value; rejections
    are tallied on the workspace).
    """
    prior = ws.priors.omega
    sym = ws.spec.symmetric_omega
    p_ij = prior.p_under[i, j]
    if sym:
        p_ji = prior.p_under[j, i]
        if p_ij in (0.0, 1.0) or p_ji in (0.0, 1.0):
            return 1.0 if (p_ij == 1.0 or p_ji == 1.0) else 0.0
    elif p_ij == 0.0 or p_ij == 1.0:
        return float(p_ij)

    ws.proposal_count += 1
    omega = ws.params.omega.omega
    cur = int(omega[i, j])
    prop = 1 - cur

    if prior.family == FIXED:
        prior_odds = math.log(p_ij) - math.log1p(-p_ij)
    else:
        prior_odds = sparsity_log_odds(int(ws.row_counts[i]) - cur, ws.n, prior)

    if ws.config.prior_only:
        p1 = _sigmoid(prior_odds)
        new = 1 if rng.random() < p1 else 0
        if new != cur:
            omega[i, j] = new
            ws.omega_f[i, j] = new
            ws.row_counts[i] += prop - cur
            if sym:
                omega[j, i] = new
                ws.omega_f[j, i] = new
                ws.row_counts[j] += prop - cur
        return p1

    rho = ws.params.rho
    W = ws.W
    lag0 = ws.spec.lag_offset == 0

    cnt_i = int(ws.row_counts[i]) + (prop - cur)
    w_new_i = _candidate_row(ws, i, j, prop, cnt_i, ws._wi_buf)
    dw_i = np.subtract(w_new_i, W[i], out=ws._dwi_buf)
    if sym:
        cnt_j = int(ws.row_counts[j]) + (prop - cur)
        w_new_j = _candidate_row(ws, j, i, prop, cnt_j, ws._wj_buf)
        dw_j = np.subtract(w_new_j, W[j], out=ws._dwj_buf)

    # determinant of the flipped state (r = 0 only)
    if lag0:
        system = ws.params.system
        delta_i = np.multiply(dw_i, -rho, out=ws._di_buf)
        try:
            if sym:
                delta_j = np.multiply(dw_j, -rho, out=ws._dj_buf)
                log_det_flip = linalg.rank_one_pair_determinant(
                    system, i, delta_i, j, delta_j
                )
            else:
                log_det_flip = linalg.rank_one_determinant(system, i, delta_i)
        except NonPositiveDeterminantError:
            ws.det_rejections += 1
            return None

    # identification check on the flipped W, via incremental diag(W^2)
    col_i = W[:, i]
    cand_w2 = np.multiply(col_i, dw_i, out=ws._w2_buf)
    if sym:
        col_j = W[:, j]
        cand_w2 += col_j * dw_j
        cand_w2 += ws.w2diag
        new_col_i = col_i.copy()
        new_col_i[j] = w_new_j[i]
        new_col_j = col_j.copy()
        new_col_j[i] = w_new_i[j]
        cand_w2[i] = w_new_i @ new_col_i
        cand_w2[j] = w_new_j @ new_col_j
    else:
        cand_w2 += ws.w2diag
        cand_w2[i] = w_new_i @ col_i
    if not _w2diag_ok_fast(cand_w2):
        ws.ident_rejections += 1
        return None

    # residual sum of the flipped state: only columns i (and j) of E change
    E = ws.E
    if lag0:
        d_i = np.matmul(ws.Y_mat, delta_i, out=ws._resid_i)
    else:
        dcol_i = ws.Ylag_mat @ dw_i
        d_i = np.multiply(dcol_i, -rho, out=ws._resid_i)
    ess_flip = ws.ess + 2.0 * float(E[:, i] @ d_i) + float(d_i @ d_i)
    if sym:
        if lag0:
            d_j = np.matmul(ws.Y_mat, delta_j, out=ws._resid_j)
        else:
            dcol_j = ws.Ylag_mat @ dw_j
            d_j = np.multiply(dcol_j, -rho, out=ws._resid_j)
        ess_flip += 2.0 * float(E[:, j] @ d_j) + float(d_j @ d_j)

    if cur == 1:
        ess1, ess0 = ws.ess, ess_flip
        det_term = ws.t * (system.log_det - log_det_flip) if lag0 else 0.0
    else:
        ess1, ess0 = ess_flip, ws.ess
        det_term = ws.t * (log_det_flip - system.log_det) if lag0 else 0.0
    log_odds = prior_odds + det_term - (ess1 - ess0) / (2.0 * ws.params.sigma2)
    p1 = _sigmoid(log_odds)

    new = 1 if rng.random() < p1 else 0
    if new == cur:
        return p1

    # commit the flip
    if lag0:
        if sym:
            linalg.rank_one_apply(system, i, delta_i)
            try:
                linalg.rank_one_apply(system, j, delta_j)
            except NonPositiveDeterminantError:
                # round-off disagreement with the pair query at a near-zero
                # factor; undo row i and reject
                linalg.rank_one_apply(system, i, -delta_i)
                ws.det_rejections += 1
                return None
        else:
            # the factor was validated by rank_one_determinant above
            factor = math.exp(log_det_flip - system.log_det)
            linalg.rank_one_apply(system, i, delta_i, factor=factor)
    omega[i, j] = new
    ws.omega_f[i, j] = new
    ws.row_counts[i] = cnt_i
    W[i] = w_new_i
    if sym:
        omega[j, i] = new
        ws.omega_f[j, i] = new
        ws.row_counts[j] = cnt_j
        W[j] = w_new_j
    if lag0:
        E[:, i] += d_i
        if sym:
            E[:, j] += d_j
    else:
        ws.WYlag[:, i] += dcol_i
        E[:, i] += d_i
        if sym:
            ws.WYlag[:, j] += dcol_j
            E[:, j] += d_j
    ws.ess = ess_flip
    np.copyto(ws.w2diag, cand_w2)
    return p1


def sweep_omega(ws: ChainWorkspace, rng: np.random.Generator) -> None:
    """Visit every free entry (free pair when symmetric) once, in random order.

    Raises NumericalFailureError when more than half of one sweep's
    determinant proposals fail, which signals a pathological configuration.
    """
    nfree = ws.free_i.shape[0]
    if nfree == 0:
        return
    det_before = ws.det_rejections
    order = rng.permutation(nfree)
    free_i = ws.free_i
    free_j = ws.free_j
    for idx in order:
        sample_omega_entry(ws, int(free_i[idx]), int(free_j[idx]), rng)
    if ws.spec.lag_offset == 0 and not ws.config.prior_only:
        failed = ws.det_rejections - det_before
        if 2 * failed > nfree:
            raise NumericalFailureError(
                f"{failed} of {nfree} determinant proposals failed in one sweep"
            )


def run_chain(
    data: PanelData,
    spec: ModelSpec,
    priors: PriorSpec,
    config: SamplerConfig,
) -> ChainOutput:
    """Run one full MCMC chain and return its retained draws.

    Iterations update beta, sigma^2, rho, then sweep the adjacency matrix;
    the first ``n_burnin`` iterations are discarded and every ``thin``-th of
    the rest is retained until ``n_draws`` draws are stored.  Deterministic
    for a fixed seed.
    """
    rng = np.random.default_rng(config.seed)
    params = initial_state(data, spec, priors, config, rng)
    n = data.n
    if config.n_draws == 0:
        return ChainOutput(
            beta_draws=np.empty((0, data.q)),
            sigma2_draws=np.empty(0),
            rho_draws=np.empty(0),
            inclusion_counts=np.zeros((n, n), dtype=np.int64),
            omega_last=params.omega.omega.copy(),
            draw_count=0,
        )
    ws = ChainWorkspace(params, data, spec, priors, config)
    n_draws = config.n_draws
    beta_draws = np.empty((n_draws, data.q))
    sigma2_draws = np.empty(n_draws)
    rho_draws = np.empty(n_draws)
    inclusion = np.zeros((n, n), dtype=np.int64)
    retained = 0
    iteration = 0
    while retained < n_draws:
        if not config.prior_only:
            sample_beta(ws, rng)
            sample_sigma2(ws, rng)
            sample_rho_griddy(ws, rng)
        sweep_omega(ws, rng)
        if iteration >= config.n_burnin and (iteration - config.n_burnin) % config.thin == 0:
            beta_draws[retained] = ws.params.beta
            sigma2_draws[retained] = ws.params.sigma2
            rho_draws[retained] = ws.params.rho
            inclusion += ws.params.omega.omega
            retained += 1
        iteration += 1
    return ChainOutput(
        beta_draws=beta_draws,
        sigma2_draws=sigma2_draws,
        rho_draws=rho_draws,
        inclusion_counts=inclusion,
        omega_last=ws.params.omega.omega.copy(),
        draw_count=n_draws,
        det_rejections=ws.det_rejections,
        ident_rejections=ws.ident_rejections,
        proposal_count=ws.proposal_count,
    )
