"""Prior configuration and log-density evaluation.

Two families of priors on the adjacency indicators: fixed Bernoulli inclusion
probabilities, and a hierarchical (beta-binomial) family that places its mass
on each row's neighbour count and thereby promotes sparsity.  Entries of the
inclusion-probability matrix equal to exactly 0 or 1 act as hard exclusion /
inclusion masks under both families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from .errors import InvalidAnchorError, OutOfSupportError, ValidationError

FIXED = "fixed"
SPARSITY = "sparsity"


@dataclass
class OmegaPrior:
    """Prior on the binary adjacency entries.

    ``p_under`` holds prior inclusion probabilities.  For the fixed family
    the off-diagonal values are used directly; for the sparsity family only
    the hard-mask entries (exactly 0 or 1) matter and the prior on the free
    entries comes from the row-count hyperparameters ``a_omega``/``b_omega``.
    """

    family: str
    p_under: np.ndarray
    a_omega: float = 1.0
    b_omega: float = 1.0

    def __post_init__(self):
        if self.family not in (FIXED, SPARSITY):
            raise ValidationError(f"unknown prior family {self.family!r}", field="family")
        self.p_under = np.asarray(self.p_under, dtype=float)
        if self.p_under.ndim != 2 or self.p_under.shape[0] != self.p_under.shape[1]:
            raise ValidationError("p_under must be square", field="p_under")
        if ((self.p_under < 0) | (self.p_under > 1)).any():
            raise ValidationError("p_under entries must lie in [0, 1]", field="p_under")
        if np.diagonal(self.p_under).any():
            raise ValidationError("p_under diagonal must be zero", field="p_under")
        if self.a_omega <= 0 or self.b_omega <= 0:
            raise ValidationError("a_omega and b_omega must be positive", field="a_omega")

    @property
    def n(self) -> int:
        return self.p_under.shape[0]

    def hard_mask(self) -> np.ndarray:
        """Boolean matrix of entries pinned to 0 or 1 (diagonal always pinned)."""
        pinned = (self.p_under == 0.0) | (self.p_under == 1.0)
        pinned[np.diag_indices(self.n)] = True
        return pinned

    def hard_values(self) -> np.ndarray:
        """Adjacency entries implied by the hard masks (0 elsewhere)."""
        return (self.p_under == 1.0).astype(np.int64)

    @classmethod
    def fixed(cls, n: int, p: float = 0.5, p_matrix: Optional[np.ndarray] = None) -> "OmegaPrior":
        """Fixed Bernoulli prior; scalar ``p`` fills every off-diagonal entry."""
        if p_matrix is not None:
            return cls(FIXED, np.asarray(p_matrix, dtype=float))
        mat = np.full((n, n), float(p))
        np.fill_diagonal(mat, 0.0)
        return cls(FIXED, mat)

    @classmethod
    def sparsity(
        cls,
        n: int,
        a_omega: float = 1.0,
        b_omega: float = 1.0,
        p_matrix: Optional[np.ndarray] = None,
    ) -> "OmegaPrior":
        """Beta-binomial row-count prior; a = b = 1 is uniform over counts.

        ``p_matrix`` may carry hard 0/1 masks; other entries are ignored.
        """
        if p_matrix is None:
            p_matrix = np.full((n, n), 0.5)
            np.fill_diagonal(p_matrix, 0.0)
        return cls(SPARSITY, np.asarray(p_matrix, dtype=float), a_omega, b_omega)


def anchor_sparsity(m_under: float, n: int) -> OmegaPrior:
    """Sparsity prior anchored at an expected neighbour count of ``m_under``.

    Fixes a = 1 and sets b = ((n - 1) - m) / m so the prior mean row count
    equals ``m_under``.
    """
    if not 0 < m_under < n - 1:
        raise InvalidAnchorError(
            f"expected neighbour count {m_under} outside (0, {n - 1})"
        )
    b = ((n - 1) - m_under) / m_under
    return OmegaPrior.sparsity(n, a_omega=1.0, b_omega=b)


@dataclass
class ParamPriors:
    """Hyperparameters for beta, sigma^2, and rho.

    The Gaussian prior on beta is mean-zero with a diagonal covariance;
    ``beta_variance`` is either a scalar (same variance for every
    coefficient) or a length-q vector.
    """

    beta_variance: float | np.ndarray = 100.0
    sigma2_shape: float = 0.01
    sigma2_rate: float = 0.01
    rho_shape1: float = 1.01
    rho_shape2: float = 1.01

    def __post_init__(self):
        bv = np.asarray(self.beta_variance, dtype=float)
        if (bv <= 0).any():
            raise ValidationError("beta_variance must be positive", field="beta_variance")
        for name in ("sigma2_shape", "sigma2_rate", "rho_shape1", "rho_shape2"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive", field=name)

    def beta_variance_vector(self, q: int) -> np.ndarray:
        bv = np.asarray(self.beta_variance, dtype=float)
        if bv.ndim == 0:
            return np.full(q, float(bv))
        if bv.shape[0] != q:
            raise ValidationError(
                f"beta_variance has {bv.shape[0]} entries, design has {q} columns",
                field="beta_variance",
            )
        return bv


@dataclass
class PriorSpec:
    """Complete prior configuration for one estimation run."""

    omega: OmegaPrior
    params: ParamPriors = field(default_factory=ParamPriors)


def omega_log_prior(
    omega_row: np.ndarray,
    i: int,
    j: int,
    proposed: int,
    prior: OmegaPrior,
) -> float:
    """Log prior weight of setting entry (i, j) to ``proposed``.

    ``omega_row`` is the current row i of the adjacency matrix.  Only
    differences between the two proposals matter, so each family returns an
    unnormalized value: log p or log(1-p) for the fixed family, and
    log Gamma(a + s) + log Gamma(b + (N-1) - s) for the sparsity family,
    where s is the row sum with entry j set to ``proposed``.  Proposals that
    contradict a hard mask return -inf (mask-consistent proposals return 0).
    """
    p_ij = prior.p_under[i, j]
    if p_ij == 0.0:
        return 0.0 if proposed == 0 else -math.inf
    if p_ij == 1.0:
        return 0.0 if proposed == 1 else -math.inf
    if prior.family == FIXED:
        return math.log(p_ij) if proposed == 1 else math.log1p(-p_ij)
    s = int(omega_row.sum()) - int(omega_row[j]) + int(proposed)
    n = prior.n
    return math.lgamma(prior.a_omega + s) + math.lgamma(prior.b_omega + (n - 1) - s)


def sparsity_log_odds(row_sum_excl: int, n: int, prior: OmegaPrior) -> float:
    """Log prior odds of inclusion vs exclusion given the rest of the row.

    ``row_sum_excl`` is the row sum excluding the entry being updated.
    Scalar fast path for the sampler's inner loop; agrees with taking the
    difference of two ``omega_log_prior`` calls.
    """
    a, b = prior.a_omega, prior.b_omega
    s0 = row_sum_excl
    # lgamma(a+s0+1) - lgamma(a+s0) = log(a+s0); the b term analogously.
    return math.log(a + s0) - math.log(b + (n - 1) - s0 - 1)


def log_prior_rho(rho: float, priors: ParamPriors) -> float:
    """Beta log-density on (0, 1)."""
    if not 0.0 < rho < 1.0:
        raise OutOfSupportError(f"rho = {rho} outside (0, 1)")
    return float(stats.beta.logpdf(rho, priors.rho_shape1, priors.rho_shape2))


def log_prior_beta(beta: np.ndarray, priors: ParamPriors) -> float:
    """Mean-zero Gaussian log-density with diagonal covariance."""
    beta = np.asarray(beta, dtype=float).ravel()
    v = priors.beta_variance_vector(beta.shape[0])
    return float(
        -0.5 * (beta.shape[0] * math.log(2.0 * math.pi) + np.log(v).sum()
                + (beta * beta / v).sum())
    )


def log_prior_sigma2(sigma2: float, priors: ParamPriors) -> float:
    """Inverse-gamma log-density, shape/rate convention."""
    if sigma2 <= 0.0:
        raise OutOfSupportError(f"sigma2 = {sigma2} outside (0, inf)")
    a, b = priors.sigma2_shape, priors.sigma2_rate
    return a * math.log(b) - math.lgamma(a) - (a + 1.0) * math.log(sigma2) - b / sigma2


def draw_from_priors(q: int, priors: ParamPriors, rng: np.random.Generator):
    """Initial (beta, sigma2, rho) drawn from their priors.

    Draws are clamped away from the support boundaries: the default
    IG(0.01, 0.01) prior is heavy-tailed enough to overflow a double, and a
    rho of exactly 0 or 1 would be outside the sampler's open grid.
    """
    v = priors.beta_variance_vector(q)
    beta = rng.standard_normal(q) * np.sqrt(v)
    sigma2 = 1.0 / rng.gamma(priors.sigma2_shape, 1.0 / priors.sigma2_rate)
    sigma2 = min(max(sigma2, 1e-12), 1e12)
    rho = rng.beta(priors.rho_shape1, priors.rho_shape2)
    rho = min(max(rho, 1e-9), 1.0 - 1e-9)
    return beta, float(sigma2), float(rho)
