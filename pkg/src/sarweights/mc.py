"""Monte Carlo evaluation harness.

Runs replicated simulate-then-estimate experiments over a grid of
(N, T, rho) cells and prior variants, aggregates RMSE(beta), RMSE(rho), and
adjacency accuracy per cell and variant, and emits a wide CSV with one row
per (metric, cell).  Exogenous-W baseline variants estimate a classic SAR
model with every adjacency entry hard-masked to a perturbed copy of the
truth, so their reported accuracy is the construction overlap.

Replications fan out over a process pool; every replication derives its
generators from (master seed, cell index, replication index), so results are
identical regardless of worker scheduling.
"""

from __future__ import annotations

import csv
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .dgp import DgpConfig, generate_knn_adjacency, generate_panel, perturb_adjacency
from .errors import ValidationError
from .metrics import McResult, accuracy_from_counts, rmse
from .model import ModelSpec
from .priors import OmegaPrior, ParamPriors, PriorSpec, anchor_sparsity
from .sampler import SamplerConfig, run_chain

METRIC_NAMES = ("rmse_beta", "rmse_rho", "accuracy")


@dataclass
class McCell:
    n: int
    t: int
    rho: float


@dataclass
class VariantSpec:
    """One estimation setup to run on every replication's data.

    ``family`` is "fixed", "sparsity", or "exogenous".  Sparsity variants
    take explicit (a_omega, b_omega), an expected neighbour count
    ``m_expected``, or ``m_over_n`` resolved against each cell's N.
    Exogenous variants fix the whole adjacency matrix to a perturbed copy of
    the truth with the given ``perturb_fraction``.
    """

    name: str
    family: str
    symmetric: bool = False
    p: float = 0.5
    m_expected: Optional[float] = None
    m_over_n: Optional[float] = None
    a_omega: Optional[float] = None
    b_omega: Optional[float] = None
    perturb_fraction: Optional[float] = None

    def __post_init__(self):
        if self.family not in ("fixed", "sparsity", "exogenous"):
            raise ValidationError(f"unknown variant family {self.family!r}", field="family")
        if self.family == "exogenous" and self.perturb_fraction is None:
            raise ValidationError(
                "exogenous variant needs perturb_fraction", field="perturb_fraction"
            )
        if self.family == "sparsity":
            given = (self.a_omega is not None, self.m_expected is not None,
                     self.m_over_n is not None)
            if not any(given):
                raise ValidationError(
                    "sparsity variant needs a_omega/b_omega, m_expected, or m_over_n",
                    field="variants",
                )

    def build_prior(self, n: int) -> OmegaPrior:
        if self.family == "fixed":
            return OmegaPrior.fixed(n, self.p)
        if self.family == "sparsity":
            if self.a_omega is not None:
                return OmegaPrior.sparsity(n, self.a_omega, self.b_omega or 1.0)
            m = self.m_expected if self.m_expected is not None else self.m_over_n * n
            return anchor_sparsity(m, n)
        raise ValidationError("exogenous priors are built per replication", field="family")


@dataclass
class McConfig:
    cells: list
    replications: int
    variants: list
    perturb_fractions: tuple = ()
    draws: int = 1000
    burnin: int = 500
    rho_grid_size: int = 200
    seed: int = 0
    threads: int = 1
    residual_half_factor: bool = False
    max_failure_rate: float = 0.10

    def __post_init__(self):
        if self.replications < 1:
            raise ValidationError("replications must be >= 1", field="replications")
        if self.threads < 0:
            raise ValidationError("threads must be >= 0", field="threads")
        self.cells = [c if isinstance(c, McCell) else McCell(**c) for c in self.cells]
        self.variants = [
            v if isinstance(v, VariantSpec) else VariantSpec(**v) for v in self.variants
        ]
        for frac in self.perturb_fractions:
            self.variants.append(
                VariantSpec(
                    name=f"exogenous_{1.0 - frac:g}",
                    family="exogenous",
                    perturb_fraction=frac,
                )
            )


@dataclass
class CellResult:
    cell: McCell
    results: dict        # variant name -> McResult
    failures: int
    aborted: bool = False


def _chain_seed(seq: np.random.SeedSequence) -> int:
    return int(seq.generate_state(1, np.uint64)[0])


def _run_replication(config: McConfig, cell_index: int, rep: int) -> dict:
    """Simulate one panel and estimate it under every variant."""
    cell = config.cells[cell_index]
    root = np.random.SeedSequence((config.seed, cell_index, rep))
    children = root.spawn(len(config.variants) + 1)
    data_rng = np.random.default_rng(children[0])
    dgp_cfg = DgpConfig(n=cell.n, t=cell.t, rho_true=cell.rho)
    omega_true = generate_knn_adjacency(dgp_cfg, data_rng)
    panel = generate_panel(dgp_cfg, omega_true, data_rng)
    truth_beta = np.asarray(dgp_cfg.beta_true, dtype=float)
    q0 = truth_beta.shape[0]
    offdiag = ~np.eye(cell.n, dtype=bool)

    out = {}
    for vi, variant in enumerate(config.variants):
        rng_v = np.random.default_rng(children[vi + 1])
        if variant.family == "exogenous":
            perturbed = perturb_adjacency(omega_true, variant.perturb_fraction, rng_v)
            prior = OmegaPrior.fixed(cell.n, p_matrix=perturbed.omega.astype(float))
            spec = ModelSpec(lag_offset=0, symmetric_omega=False)
            free_mask = offdiag  # nothing estimated; report the overlap itself
        else:
            prior = variant.build_prior(cell.n)
            spec = ModelSpec(lag_offset=0, symmetric_omega=variant.symmetric)
            free_mask = offdiag & ~prior.hard_mask()
        sampler_cfg = SamplerConfig(
            n_draws=config.draws,
            n_burnin=config.burnin,
            rho_grid_size=config.rho_grid_size,
            seed=_chain_seed(children[vi + 1]),
            residual_half_factor=config.residual_half_factor,
        )
        chain = run_chain(panel, spec, PriorSpec(omega=prior), sampler_cfg)
        beta_hat = chain.beta_draws.mean(axis=0)[:q0]
        rho_hat = float(chain.rho_draws.mean())
        out[variant.name] = {
            "rmse_beta": rmse(beta_hat, truth_beta),
            "rmse_rho": rmse(rho_hat, cell.rho),
            "accuracy": accuracy_from_counts(
                chain.inclusion_counts, chain.draw_count, omega_true.omega, free_mask
            ),
        }
    return out


def _worker(args) -> dict:
    config, cell_index, rep = args
    try:
        return {"rep": rep, "ok": True, "variants": _run_replication(config, cell_index, rep)}
    except Exception:
        return {"rep": rep, "ok": False, "error": traceback.format_exc(limit=5)}


def run_mc_study(config: McConfig) -> list:
    """Run every cell of the study; returns a list of CellResult.

    Failed replications are recorded and excluded from the averages; a cell
    whose failure rate exceeds ``max_failure_rate`` is marked aborted and
    its metrics are NaN.
    """
    results = []
    for cell_index, cell in enumerate(config.cells):
        tasks = [(config, cell_index, rep) for rep in range(config.replications)]
        if config.threads == 1:
            reports = [_worker(task) for task in tasks]
        else:
            workers = config.threads or None
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(_worker, tasks))
        reports.sort(key=lambda r: r["rep"])
        good = [r for r in reports if r["ok"]]
        failures = len(reports) - len(good)
        aborted = failures > config.max_failure_rate * config.replications
        per_variant = {}
        for variant in config.variants:
            if aborted or not good:
                per_variant[variant.name] = None
                continue
            reps = [r["variants"][variant.name] for r in good]
            per_variant[variant.name] = McResult(
                rmse_beta=float(np.mean([r["rmse_beta"] for r in reps])),
                rmse_rho=float(np.mean([r["rmse_rho"] for r in reps])),
                accuracy_omega=float(np.mean([r["accuracy"] for r in reps])),
                replications=reps,
            )
        results.append(
            CellResult(cell=cell, results=per_variant, failures=failures, aborted=aborted)
        )
    return results


def write_mc_table(results: list, config: McConfig, path) -> None:
    """Wide CSV: one row per (metric, cell), one column per variant."""
    names = [v.name for v in config.variants]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "n", "t", "rho"] + names + ["replications", "failures"])
        for metric in METRIC_NAMES:
            key = "accuracy_omega" if metric == "accuracy" else metric
            for cr in results:
                row = [metric, str(cr.cell.n), str(cr.cell.t), repr(cr.cell.rho)]
                for name in names:
                    res = cr.results.get(name)
                    row.append("nan" if res is None else repr(getattr(res, key)))
                row.extend([str(config.replications - cr.failures), str(cr.failures)])
                writer.writerow(row)


def write_mc_replications(results: list, config: McConfig, path) -> None:
    """Long CSV with one row per (cell, variant, replication)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "t", "rho", "variant", "replication",
                         "rmse_beta", "rmse_rho", "accuracy"])
        for cr in results:
            for name, res in cr.results.items():
                if res is None:
                    continue
                for rep_idx, rep in enumerate(res.replications):
                    writer.writerow([
                        str(cr.cell.n), str(cr.cell.t), repr(cr.cell.rho), name,
                        str(rep_idx), repr(rep["rmse_beta"]), repr(rep["rmse_rho"]),
                        repr(rep["accuracy"]),
                    ])
