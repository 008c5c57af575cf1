import json

import numpy as np
import pytest

from sarweights.cli import main
from sarweights.io import read_matrix_csv


def _write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def _simulate(tmp_path, n=5, t=4, seed=3, rho=0.5):
    out = tmp_path / "sim"
    cfg = _write_config(
        tmp_path,
        {"dgp": {"n": n, "t": t, "rho_true": rho, "seed": seed}},
        name="sim.json",
    )
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    return out / "panel.csv", out / "omega_true.csv"


@pytest.fixture
def estimate_config(tmp_path):
    panel, _ = _simulate(tmp_path)
    return {
        "model": {"lag_offset": 0, "symmetric": False},
        "priors": {"omega": {"family": "fixed", "p": 0.5}},
        "sampler": {"n_draws": 10, "n_burnin": 5, "rho_grid_size": 20, "seed": 11},
        "io": {"panel": str(panel), "out_dir": str(tmp_path / "out")},
    }


class TestSimulate:
    def test_row_count(self, tmp_path):
        panel, omega = _simulate(tmp_path, n=20, t=10)
        lines = panel.read_text().splitlines()
        assert len(lines) == 1 + 200
        mat, _ = read_matrix_csv(omega)
        assert mat.shape == (20, 20)

    def test_seed_determinism(self, tmp_path):
        p1, o1 = _simulate(tmp_path, seed=9)
        cfg = _write_config(
            tmp_path, {"dgp": {"n": 5, "t": 4, "rho_true": 0.5, "seed": 9}}, "sim2.json"
        )
        out2 = tmp_path / "sim2"
        assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        assert p1.read_bytes() == (out2 / "panel.csv").read_bytes()
        assert o1.read_bytes() == (out2 / "omega_true.csv").read_bytes()


class TestEstimate:
    def test_smoke_all_files(self, tmp_path, estimate_config):
        cfg = _write_config(tmp_path, estimate_config)
        assert main(["estimate", "--config", cfg]) == 0
        out = tmp_path / "out"
        for name in ("summary.json", "trace.csv", "inclusion.csv",
                     "omega_last.csv", "heatmap.svg"):
            assert (out / name).exists(), name
        summary = json.loads((out / "summary.json").read_text())
        assert summary["seed"] == 11
        assert summary["draw_count"] == 10

    def test_invalid_config_exit_2(self, tmp_path, estimate_config, capsys):
        estimate_config["sampler"]["n_burnin"] = -1
        cfg = _write_config(tmp_path, estimate_config)
        assert main(["estimate", "--config", cfg]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["field"] == "n_burnin"

    def test_determinism_repeat_run(self, tmp_path, estimate_config):
        cfg_a = dict(estimate_config, io=dict(estimate_config["io"],
                                              out_dir=str(tmp_path / "a")))
        cfg_b = dict(estimate_config, io=dict(estimate_config["io"],
                                              out_dir=str(tmp_path / "b")))
        assert main(["estimate", "--config", _write_config(tmp_path, cfg_a, "a.json")]) == 0
        assert main(["estimate", "--config", _write_config(tmp_path, cfg_b, "b.json")]) == 0
        for name in ("trace.csv", "inclusion.csv", "omega_last.csv", "heatmap.svg"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        sa = json.loads((tmp_path / "a" / "summary.json").read_text())
        sb = json.loads((tmp_path / "b" / "summary.json").read_text())
        sa.pop("elapsed_seconds"), sb.pop("elapsed_seconds")
        sa.pop("config"), sb.pop("config")  # configs differ in out_dir only
        assert sa == sb

    def test_missing_panel_exit_4(self, tmp_path, estimate_config):
        estimate_config["io"]["panel"] = str(tmp_path / "nope.csv")
        cfg = _write_config(tmp_path, estimate_config)
        assert main(["estimate", "--config", cfg]) == 4

    def test_lagged_model_runs(self, tmp_path):
        panel, _ = _simulate(tmp_path, n=4, t=6)
        cfg = _write_config(
            tmp_path,
            {
                "model": {"lag_offset": 1},
                "priors": {"omega": {"family": "sparsity", "a_omega": 1, "b_omega": 1}},
                "sampler": {"n_draws": 8, "n_burnin": 4, "rho_grid_size": 20, "seed": 2},
                "io": {"panel": str(panel), "out_dir": str(tmp_path / "lag_out")},
            },
            name="lag.json",
        )
        assert main(["estimate", "--config", cfg]) == 0


class TestMcStudy:
    def test_single_cell_smoke(self, tmp_path):
        cfg = _write_config(
            tmp_path,
            {
                "mc": {
                    "cells": [{"n": 6, "t": 5, "rho": 0.5}],
                    "replications": 2,
                    "draws": 8,
                    "burnin": 4,
                    "rho_grid_size": 20,
                    "seed": 5,
                    "variants": [
                        {"name": "fixed", "family": "fixed", "p": 0.5},
                        {"name": "sparse", "family": "sparsity", "m_over_n": 0.2},
                    ],
                    "perturb_fractions": [0.2],
                },
                "io": {"out_dir": str(tmp_path / "mc")},
            },
        )
        assert main(["mc-study", "--config", cfg]) == 0
        table = (tmp_path / "mc" / "mc_table.csv").read_text().splitlines()
        assert table[0].split(",")[:4] == ["metric", "n", "t", "rho"]
        assert "exogenous_0.8" in table[0]
        assert len(table) == 1 + 3  # three metrics x one cell
        assert (tmp_path / "mc" / "mc_replications.csv").exists()

    def test_exogenous_accuracy_is_overlap(self, tmp_path):
        # N=25: fraction 0.2 flips exactly 60 of 300 pairs
        cfg = _write_config(
            tmp_path,
            {
                "mc": {
                    "cells": [{"n": 25, "t": 3, "rho": 0.4}],
                    "replications": 1,
                    "draws": 5,
                    "burnin": 2,
                    "rho_grid_size": 20,
                    "seed": 6,
                    "variants": [],
                    "perturb_fractions": [0.2],
                },
                "io": {"out_dir": str(tmp_path / "mc2")},
            },
        )
        assert main(["mc-study", "--config", cfg]) == 0
        rows = (tmp_path / "mc2" / "mc_table.csv").read_text().splitlines()
        accuracy_row = [r for r in rows if r.startswith("accuracy")][0]
        assert float(accuracy_row.split(",")[4]) == pytest.approx(0.8, abs=1e-12)

    def test_missing_block_exit_2(self, tmp_path):
        cfg = _write_config(tmp_path, {"io": {}})
        assert main(["mc-study", "--config", cfg]) == 2


class TestHeatmapCommand:
    def test_wrapper(self, tmp_path, estimate_config):
        cfg = _write_config(tmp_path, estimate_config)
        assert main(["estimate", "--config", cfg]) == 0
        inclusion = tmp_path / "out" / "inclusion.csv"
        assert main(["heatmap", str(inclusion), "--out", str(tmp_path / "h")]) == 0
        assert (tmp_path / "h" / "heatmap.svg").exists()

    def test_ordering(self, tmp_path, estimate_config):
        cfg = _write_config(tmp_path, estimate_config)
        assert main(["estimate", "--config", cfg]) == 0
        inclusion = tmp_path / "out" / "inclusion.csv"
        _, labels = read_matrix_csv(inclusion)
        order_file = tmp_path / "order.txt"
        order_file.write_text("\n".join(reversed(labels)) + "\n")
        assert main(["heatmap", str(inclusion), str(order_file),
                     "--out", str(tmp_path / "h2")]) == 0

    def test_bad_ordering_exit_2(self, tmp_path, estimate_config):
        cfg = _write_config(tmp_path, estimate_config)
        assert main(["estimate", "--config", cfg]) == 0
        inclusion = tmp_path / "out" / "inclusion.csv"
        order_file = tmp_path / "order.txt"
        order_file.write_text("not-a-unit\n")
        assert main(["heatmap", str(inclusion), str(order_file),
                     "--out", str(tmp_path / "h3")]) == 2
