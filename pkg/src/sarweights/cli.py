"""Command-line frontend.

Subcommands: ``estimate`` (fit a panel and write all outputs),
``simulate`` (write a synthetic panel and its true adjacency matrix),
``mc-study`` (replicated simulation study), and ``heatmap`` (render an
inclusion-probability CSV as SVG).  Everything but paths, the seed, and the
thread count lives in a JSON config file.

Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O
error.  Failures print a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io as panel_io
from .dgp import DgpConfig, generate_knn_adjacency, generate_panel
from .errors import (
    DegeneratePosteriorError,
    DimensionMismatchError,
    EmptyChainError,
    InvalidAnchorError,
    MissingLagError,
    NonPositiveDeterminantError,
    NumericalFailureError,
    PanelParseError,
    RankDeficientError,
    SarweightsError,
    SingularMatrixError,
    TooFewDrawsError,
    UnbalancedPanelError,
    ValidationError,
)
from .mc import McConfig, run_mc_study, write_mc_replications, write_mc_table
from .metrics import inclusion_matrix
from .model import ModelSpec
from .priors import OmegaPrior, ParamPriors, PriorSpec, anchor_sparsity
from .sampler import SamplerConfig, run_chain

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_VALIDATION_ERRORS = (
    ValidationError,
    InvalidAnchorError,
    RankDeficientError,
    UnbalancedPanelError,
    MissingLagError,
    PanelParseError,
    DimensionMismatchError,
    EmptyChainError,
    TooFewDrawsError,
)
_NUMERICAL_ERRORS = (
    NumericalFailureError,
    SingularMatrixError,
    NonPositiveDeterminantError,
    DegeneratePosteriorError,
)


def _load_config(path) -> dict:
    if path is None:
        raise ValidationError("--config is required for this command", field="config")
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}", field="config") from None


def _get(cfg: dict, block: str, key: str, default=None, required=False):
    section = cfg.get(block, {})
    if key not in section:
        if required:
            raise ValidationError(f"missing config field {block}.{key}", field=f"{block}.{key}")
        return default
    return section[key]


def _model_spec(cfg: dict) -> ModelSpec:
    block = cfg.get("model", {})
    try:
        return ModelSpec(
            lag_offset=int(block.get("lag_offset", 0)),
            row_standardize=bool(block.get("row_standardize", True)),
            symmetric_omega=bool(block.get("symmetric", False)),
            unit_fixed_effects=bool(block.get("unit_fixed_effects", True)),
            time_fixed_effects=bool(block.get("time_fixed_effects", True)),
        )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad model block: {exc}", field="model") from None


def _omega_prior(cfg: dict, n: int) -> OmegaPrior:
    block = cfg.get("priors", {}).get("omega", {})
    family = block.get("family", "fixed")
    p_matrix = block.get("p_matrix")
    if isinstance(p_matrix, str):
        p_matrix, _ = panel_io.read_matrix_csv(p_matrix)
    elif p_matrix is not None:
        p_matrix = np.asarray(p_matrix, dtype=float)
    if p_matrix is not None and p_matrix.shape != (n, n):
        raise ValidationError(
            f"p_matrix has shape {p_matrix.shape}, panel has {n} units",
            field="priors.omega.p_matrix",
        )
    if family == "fixed":
        return OmegaPrior.fixed(n, float(block.get("p", 0.5)), p_matrix=p_matrix)
    if family == "sparsity":
        if "m_expected" in block:
            prior = anchor_sparsity(float(block["m_expected"]), n)
            if p_matrix is not None:
                prior = OmegaPrior.sparsity(n, prior.a_omega, prior.b_omega, p_matrix=p_matrix)
            return prior
        return OmegaPrior.sparsity(
            n,
            float(block.get("a_omega", 1.0)),
            float(block.get("b_omega", 1.0)),
            p_matrix=p_matrix,
        )
    raise ValidationError(f"unknown omega prior family {family!r}", field="priors.omega.family")


def _param_priors(cfg: dict) -> ParamPriors:
    block = cfg.get("priors", {})
    bv = block.get("beta_variance", 100.0)
    if isinstance(bv, list):
        bv = np.asarray(bv, dtype=float)
    return ParamPriors(
        beta_variance=bv,
        sigma2_shape=float(block.get("sigma2_shape", 0.01)),
        sigma2_rate=float(block.get("sigma2_rate", 0.01)),
        rho_shape1=float(block.get("rho_shape1", 1.01)),
        rho_shape2=float(block.get("rho_shape2", 1.01)),
    )


def _sampler_config(cfg: dict, seed_override) -> SamplerConfig:
    block = cfg.get("sampler", {})
    seed = seed_override if seed_override is not None else block.get("seed", 0)
    return SamplerConfig(
        n_draws=int(block.get("n_draws", 5000)),
        n_burnin=int(block.get("n_burnin", 2500)),
        rho_grid_size=int(block.get("rho_grid_size", 200)),
        seed=int(seed),
        refresh_interval=int(block.get("refresh_interval", 64)),
        thin=int(block.get("thin", 1)),
        residual_half_factor=bool(block.get("residual_half_factor", False)),
        init_omega_from_prior=bool(block.get("init_omega_from_prior", False)),
    )


def cmd_estimate(args) -> int:
    cfg = _load_config(args.config)
    spec = _model_spec(cfg)
    panel_path = args.panel or _get(cfg, "io", "panel", required=True)
    out_dir = Path(args.out or _get(cfg, "io", "out_dir", default="out"))
    data = panel_io.read_panel(panel_path, spec)
    priors = PriorSpec(omega=_omega_prior(cfg, data.n), params=_param_priors(cfg))
    sampler_cfg = _sampler_config(cfg, args.seed)
    start = time.monotonic()
    chain = run_chain(data, spec, priors, sampler_cfg)
    elapsed = time.monotonic() - start
    metrics = {
        "unit_ids": data.unit_ids,
        "config": cfg,
        "seed": sampler_cfg.seed,
        "elapsed_seconds": elapsed,
    }
    paths = panel_io.write_outputs(chain, metrics, out_dir)
    labels = data.unit_ids or [f"u{i}" for i in range(data.n)]
    if chain.draw_count > 0:
        inclusion = inclusion_matrix(chain)
    else:
        inclusion = np.zeros((data.n, data.n))
    panel_io.render_heatmap(inclusion, labels, out_dir / "heatmap.svg")
    print(f"wrote {len(paths) + 1} files to {out_dir}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    block = cfg.get("dgp", {})
    if args.seed is not None:
        block = dict(block, seed=args.seed)
    try:
        dgp_cfg = DgpConfig(**block)
    except TypeError as exc:
        raise ValidationError(f"bad dgp block: {exc}", field="dgp") from None
    out_dir = Path(args.out or _get(cfg, "io", "out_dir", default="out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(dgp_cfg.seed)
    omega_true = generate_knn_adjacency(dgp_cfg, rng)
    panel, parts = generate_panel(dgp_cfg, omega_true, rng, return_components=True)
    panel_io.write_panel_csv(panel.y, parts["z"], dgp_cfg.n, dgp_cfg.t, out_dir / "panel.csv")
    labels = [f"u{i}" for i in range(dgp_cfg.n)]
    panel_io.write_matrix_csv(omega_true.omega, labels, out_dir / "omega_true.csv", integer=True)
    print(f"wrote panel.csv and omega_true.csv to {out_dir}")
    return 0


def cmd_mc_study(args) -> int:
    cfg = _load_config(args.config)
    block = cfg.get("mc")
    if block is None:
        raise ValidationError("missing config block 'mc'", field="mc")
    block = dict(block)
    if args.seed is not None:
        block["seed"] = args.seed
    if args.threads is not None:
        block["threads"] = args.threads
    try:
        mc_cfg = McConfig(**block)
    except TypeError as exc:
        raise ValidationError(f"bad mc block: {exc}", field="mc") from None
    out_dir = Path(args.out or _get(cfg, "io", "out_dir", default="out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    results = run_mc_study(mc_cfg)
    write_mc_table(results, mc_cfg, out_dir / "mc_table.csv")
    write_mc_replications(results, mc_cfg, out_dir / "mc_replications.csv")
    aborted = sum(1 for r in results if r.aborted)
    print(f"wrote mc_table.csv ({len(results)} cells, {aborted} aborted) to {out_dir}")
    return 0


def cmd_heatmap(args) -> int:
    inclusion, labels = panel_io.read_matrix_csv(args.inclusion)
    if args.ordering:
        with open(args.ordering) as fh:
            wanted = [line.strip() for line in fh if line.strip()]
        missing = [u for u in wanted if u not in labels]
        if missing:
            raise ValidationError(f"ordering names unknown units {missing}", field="ordering")
        idx = [labels.index(u) for u in wanted]
        inclusion = inclusion[np.ix_(idx, idx)]
        labels = wanted
    out_dir = Path(args.out or "out")
    out_dir.mkdir(parents=True, exist_ok=True)
    panel_io.render_heatmap(inclusion, labels, out_dir / "heatmap.svg")
    print(f"wrote heatmap.svg to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker processes for mc-study")
    parser = argparse.ArgumentParser(
        prog="sarweights",
        description="Bayesian estimation of spatial adjacency matrices in SAR panels",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_est = sub.add_parser("estimate", parents=[common], help="estimate a panel model")
    p_est.add_argument("panel", nargs="?", help="panel CSV (default: io.panel from config)")
    p_est.set_defaults(func=cmd_estimate)
    p_sim = sub.add_parser("simulate", parents=[common], help="write a synthetic panel")
    p_sim.set_defaults(func=cmd_simulate)
    p_mc = sub.add_parser("mc-study", parents=[common], help="run the Monte Carlo study")
    p_mc.set_defaults(func=cmd_mc_study)
    p_heat = sub.add_parser("heatmap", parents=[common], help="render an inclusion CSV")
    p_heat.add_argument("inclusion", help="inclusion-probability CSV")
    p_heat.add_argument("ordering", nargs="?", help="optional unit-order file")
    p_heat.set_defaults(func=cmd_heatmap)
    return parser


def _fail(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    field = getattr(exc, "field", None)
    if field:
        payload["field"] = field
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        return _fail(exc, EXIT_VALIDATION)
    except _NUMERICAL_ERRORS as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except OSError as exc:
        return _fail(exc, EXIT_IO)
    except SarweightsError as exc:
        return _fail(exc, EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())
