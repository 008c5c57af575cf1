"""Synthetic data generation for the Monte Carlo study.

The benchmark design: a symmetric k-nearest-neighbour adjacency matrix over
random 2-D normal locations, standard-normal covariates and fixed effects,
and the panel solved through the spatial multiplier (I - rho*W)^-1.
Perturbed copies of the true adjacency matrix provide the exogenous-W
baselines with an exact overlap of 1 - fraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg as sla

from .errors import ValidationError
from .model import AdjacencyMatrix, ModelSpec, PanelData, build_design, row_standardize


@dataclass
class DgpConfig:
    """Dimensions and true parameter values of one simulated panel."""

    n: int
    t: int
    rho_true: float
    beta_true: tuple = (-1.0, 1.0)
    sigma2_true: float = 0.5
    k_neighbours: Optional[int] = None
    perturb_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.t < 1:
            raise ValidationError("need n >= 2 and t >= 1", field="n")
        if not 0.0 <= self.rho_true < 1.0:
            raise ValidationError("rho_true must lie in [0, 1)", field="rho_true")
        if self.sigma2_true <= 0:
            raise ValidationError("sigma2_true must be positive", field="sigma2_true")
        if not 0.0 <= self.perturb_fraction < 1.0:
            raise ValidationError("perturb_fraction must lie in [0, 1)", field="perturb_fraction")
        if self.k_neighbours is None:
            self.k_neighbours = max(1, round(self.n / 20))
        if not 0 < self.k_neighbours < self.n:
            raise ValidationError("k_neighbours must lie in (0, n)", field="k_neighbours")


def generate_knn_adjacency(config: DgpConfig, rng: np.random.Generator) -> AdjacencyMatrix:
    """Symmetric k-nearest-neighbour adjacency over random plane locations.

    Locations are i.i.d. standard normal in 2-D; each unit points to its k
    nearest others by Euclidean distance (ties broken by lowest index) and
    the directed graph is symmetrized by union, keeping the matrix binary.
    """
    n, k = config.n, config.k_neighbours
    points = rng.standard_normal((n, 2))
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    omega = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        nearest = np.argsort(dist[i], kind="stable")[:k]
        omega[i, nearest] = 1
    omega = np.maximum(omega, omega.T)
    return AdjacencyMatrix(omega, symmetric=True)


def generate_panel(
    config: DgpConfig,
    omega_true: AdjacencyMatrix,
    rng: np.random.Generator,
    return_components: bool = False,
):
    """Simulate the panel y_t = (I - rho*W)^-1 (mu + tau_t + Z_t b + eps_t).

    Covariates, unit effects, period effects, and innovations are all drawn
    here; the returned panel carries the design matrix with both dummy
    blocks attached.  With ``return_components`` the realized mu, tau, Z,
    eps, and the per-period y matrix are also returned for reconstruction
    checks.
    """
    n, t = config.n, config.t
    beta0 = np.asarray(config.beta_true, dtype=float)
    q0 = beta0.shape[0]
    w = row_standardize(omega_true).w
    z = rng.standard_normal((n * t, q0))
    mu = rng.standard_normal(n)
    tau = rng.standard_normal(t)
    eps = rng.standard_normal((t, n)) * np.sqrt(config.sigma2_true)
    rhs = z.reshape(t, n, q0) @ beta0 + mu[None, :] + tau[:, None] + eps
    a = np.eye(n) - config.rho_true * w
    lu, piv = sla.lu_factor(a)
    y_mat = sla.lu_solve((lu, piv), rhs.T).T
    spec = ModelSpec(lag_offset=0, row_standardize=True,
                     symmetric_omega=omega_true.symmetric)
    panel = build_design(z, y_mat.ravel(), n, t, spec)
    if return_components:
        return panel, {"mu": mu, "tau": tau, "z": z, "eps": eps, "y_mat": y_mat, "w": w}
    return panel


def perturb_adjacency(
    omega_true: AdjacencyMatrix, fraction: float, rng: np.random.Generator
) -> AdjacencyMatrix:
    """Flip exactly round(fraction * free entries) of the adjacency matrix.

    Symmetric inputs flip unordered pairs (both orientations together) so
    the perturbed matrix stays symmetric; the overlap with the input is
    exactly 1 - flips/free by construction.  ``fraction = 0`` returns an
    identical copy.
    """
    om = omega_true.omega.copy()
    n = omega_true.n
    if omega_true.symmetric:
        iu, ju = np.triu_indices(n, k=1)
    else:
        mask = ~np.eye(n, dtype=bool)
        iu, ju = np.nonzero(mask)
    total = iu.shape[0]
    flips = round(fraction * total)
    if fraction > 0 and flips == 0:
        raise ValidationError(
            f"fraction {fraction} selects zero of {total} entries", field="fraction"
        )
    if flips:
        chosen = rng.choice(total, size=flips, replace=False)
        om[iu[chosen], ju[chosen]] ^= 1
        if omega_true.symmetric:
            om[ju[chosen], iu[chosen]] ^= 1
    return AdjacencyMatrix(om, symmetric=omega_true.symmetric)
