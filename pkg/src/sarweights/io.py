"""File formats: panel CSV ingestion, result outputs, SVG inclusion heatmaps.

Panel files are long-format CSV with required columns ``unit_id``,
``time_id``, ``y``; every other column is a covariate in file order.  All
outputs are deterministic byte-for-byte functions of their inputs (except
the wall-clock field in summary.json when the caller supplies one).
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatchError,
    MissingLagError,
    PanelParseError,
    UnbalancedPanelError,
)
from .metrics import avg_neighbours, geweke_z, inclusion_matrix
from .model import ModelSpec, PanelData, build_design
from .sampler import ChainOutput

REQUIRED_COLUMNS = ("unit_id", "time_id", "y")


def read_panel(path, spec: ModelSpec) -> PanelData:
    """Load a balanced long-format panel and assemble its design matrix.

    Units are ordered by first appearance, times sorted ascending.  With a
    temporal lag r > 0 the first r periods are consumed as lag values: the
    dependent sample starts at the (r+1)-th period and ``y_lag`` holds the
    value r positions earlier, so the retained panel has T = T0 - r periods.

    Raises
    ------
    PanelParseError
        Malformed header or cell (carries row/column location).
    UnbalancedPanelError
        Duplicate or missing (unit, time) combinations.
    MissingLagError
        Fewer than r + 1 periods in the file.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise PanelParseError("empty panel file", row=1)
    header = [h.strip() for h in rows[0]]
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise PanelParseError(f"missing required column {col!r}", row=1, column=col)
    idx_unit = header.index("unit_id")
    idx_time = header.index("time_id")
    idx_y = header.index("y")
    covariate_cols = [
        (pos, name)
        for pos, name in enumerate(header)
        if pos not in (idx_unit, idx_time, idx_y)
    ]

    units: list = []
    records: dict = {}
    times_seen: set = set()
    for rownum, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise PanelParseError(
                f"expected {len(header)} cells, found {len(row)}", row=rownum
            )
        unit = row[idx_unit].strip()
        try:
            time = int(row[idx_time])
        except ValueError:
            raise PanelParseError(
                f"time_id {row[idx_time]!r} is not an integer", row=rownum, column="time_id"
            ) from None
        try:
            yval = float(row[idx_y])
            covs = [float(row[pos]) for pos, _ in covariate_cols]
        except ValueError as exc:
            raise PanelParseError(str(exc), row=rownum) from None
        if unit not in units:
            units.append(unit)
        key = (unit, time)
        if key in records:
            raise UnbalancedPanelError(f"duplicate row for unit {unit!r}, time {time}")
        records[key] = (yval, covs)
        times_seen.add(time)

    times = sorted(times_seen)
    n, t0 = len(units), len(times)
    if n == 0:
        raise PanelParseError("panel has no data rows", row=2)
    if len(records) != n * t0:
        raise UnbalancedPanelError(
            f"panel has {len(records)} rows but {n} units x {t0} times"
        )

    r = spec.lag_offset
    if t0 - r < 1:
        raise MissingLagError(f"lag of {r} periods leaves none of the {t0} periods usable")
    kept = times[r:]
    t = len(kept)
    y = np.empty(n * t)
    y_lag = np.empty(n * t) if r > 0 else None
    raw = np.empty((n * t, len(covariate_cols)))
    for ti, time in enumerate(kept):
        for ui, unit in enumerate(units):
            pos = ti * n + ui
            yval, covs = records[(unit, time)]
            y[pos] = yval
            raw[pos] = covs
            if r > 0:
                y_lag[pos] = records[(unit, times[ti])][0]  # kept[ti] is times[ti + r]
    return build_design(raw, y, n, t, spec, y_lag=y_lag, unit_ids=list(units))


def _fmt(value) -> str:
    # repr round-trips doubles exactly, keeping CSV output deterministic
    return repr(float(value))


def write_matrix_csv(matrix: np.ndarray, labels: list, path, integer: bool = False) -> None:
    """N x N matrix with unit-id row/column headers."""
    matrix = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["unit"] + list(labels))
        for i, label in enumerate(labels):
            row = [str(int(v)) if integer else _fmt(v) for v in matrix[i]]
            writer.writerow([label] + row)


def read_matrix_csv(path):
    """Parse a matrix written by ``write_matrix_csv``; returns (matrix, labels)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise PanelParseError("empty matrix file", row=1)
    labels = rows[0][1:]
    n = len(labels)
    if len(rows) - 1 != n:
        raise DimensionMismatchError(f"{len(rows) - 1} data rows for {n} columns")
    matrix = np.empty((n, n))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise PanelParseError(f"expected {n + 1} cells", row=i)
        try:
            matrix[i - 2] = [float(v) for v in row[1:]]
        except ValueError as exc:
            raise PanelParseError(str(exc), row=i) from None
    return matrix, labels


def write_outputs(chain: ChainOutput, metrics: dict, out_dir) -> dict:
    """Write summary.json, trace.csv, inclusion.csv, and omega_last.csv.

    ``metrics`` entries (config echo, seed, timings, ...) are merged into
    summary.json verbatim.  Returns the mapping of logical name to path.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = chain.inclusion_counts.shape[0]
    labels = metrics.get("unit_ids") or [f"u{i}" for i in range(n)]

    q = chain.beta_draws.shape[1]
    summary = {
        "draw_count": chain.draw_count,
        "rejections": {
            "determinant": chain.det_rejections,
            "identification": chain.ident_rejections,
            "proposals": chain.proposal_count,
        },
    }
    if chain.draw_count > 0:
        scalars = {"sigma2": chain.sigma2_draws, "rho": chain.rho_draws}
        summary["parameters"] = {
            "beta": {
                "mean": [float(m) for m in chain.beta_draws.mean(axis=0)],
                "std": [float(s) for s in chain.beta_draws.std(axis=0)],
            },
            "sigma2": {
                "mean": float(chain.sigma2_draws.mean()),
                "std": float(chain.sigma2_draws.std()),
            },
            "rho": {
                "mean": float(chain.rho_draws.mean()),
                "std": float(chain.rho_draws.std()),
            },
        }
        summary["avg_neighbours"] = avg_neighbours(inclusion_matrix(chain))
        geweke = {}
        for name, draws in scalars.items():
            geweke[name] = _maybe_geweke(draws)
        for k in range(q):
            geweke[f"beta_{k}"] = _maybe_geweke(chain.beta_draws[:, k])
        summary["geweke_z"] = geweke
    else:
        summary["parameters"] = None
        summary["avg_neighbours"] = None
        summary["geweke_z"] = None
    for key, value in metrics.items():
        if key != "unit_ids":
            summary[key] = value

    paths = {
        "summary": out_dir / "summary.json",
        "trace": out_dir / "trace.csv",
        "inclusion": out_dir / "inclusion.csv",
        "omega_last": out_dir / "omega_last.csv",
    }
    with open(paths["summary"], "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(paths["trace"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["draw"] + [f"beta_{k}" for k in range(q)] + ["sigma2", "rho"])
        for d in range(chain.draw_count):
            writer.writerow(
                [str(d)]
                + [_fmt(v) for v in chain.beta_draws[d]]
                + [_fmt(chain.sigma2_draws[d]), _fmt(chain.rho_draws[d])]
            )
    if chain.draw_count > 0:
        write_matrix_csv(inclusion_matrix(chain), labels, paths["inclusion"])
    else:
        write_matrix_csv(np.zeros((n, n)), labels, paths["inclusion"])
    write_matrix_csv(chain.omega_last, labels, paths["omega_last"], integer=True)
    return paths


def _maybe_geweke(draws: np.ndarray):
    try:
        return geweke_z(draws)
    except Exception:
        return None


CELL = 16
LABEL_SPACE = 56


def render_heatmap(inclusion: np.ndarray, labels: list, path) -> None:
    """Three-bucket SVG grid of posterior inclusion probabilities.

    White below 0.50, grey (#808080) from 0.50 to 0.75, black above 0.75.
    Rows are the predicted units, columns the predicting units.  Output
    bytes are a pure function of the inputs.
    """
    inclusion = np.asarray(inclusion)
    if inclusion.ndim != 2 or inclusion.shape[0] != inclusion.shape[1]:
        raise DimensionMismatchError(f"inclusion matrix has shape {inclusion.shape}")
    n = inclusion.shape[0]
    if len(labels) != n:
        raise DimensionMismatchError(f"{len(labels)} labels for a {n}x{n} matrix")
    width = LABEL_SPACE + n * CELL + 8
    height = LABEL_SPACE + n * CELL + 8
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<style>text{font-family:monospace;font-size:9px;}</style>',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for j, label in enumerate(labels):
        x = LABEL_SPACE + j * CELL + CELL // 2
        parts.append(
            f'<text x="{x}" y="{LABEL_SPACE - 4}" '
            f'transform="rotate(-90 {x} {LABEL_SPACE - 4})">{_esc(label)}</text>'
        )
    for i, label in enumerate(labels):
        y = LABEL_SPACE + i * CELL + CELL - 5
        parts.append(f'<text x="2" y="{y}">{_esc(label)}</text>')
    for i in range(n):
        for j in range(n):
            p = inclusion[i, j]
            if p > 0.75:
                fill = "#000000"
            elif p >= 0.50:
                fill = "#808080"
            else:
                fill = "#ffffff"
            x = LABEL_SPACE + j * CELL
            y = LABEL_SPACE + i * CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                f'fill="{fill}" stroke="#c0c0c0" stroke-width="0.5"/>'
            )
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")


def _esc(text) -> str:
    return (
        str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def write_panel_csv(panel_y: np.ndarray, covariates: np.ndarray, n: int, t: int, path) -> None:
    """Write a simulated panel in the long CSV format ``read_panel`` accepts."""
    covariates = np.asarray(covariates)
    q0 = covariates.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["unit_id", "time_id", "y"] + [f"z{k + 1}" for k in range(q0)])
        for ti in range(t):
            for ui in range(n):
                pos = ti * n + ui
                writer.writerow(
                    [f"u{ui}", str(ti + 1), _fmt(panel_y[pos])]
                    + [_fmt(v) for v in covariates[pos]]
                )
