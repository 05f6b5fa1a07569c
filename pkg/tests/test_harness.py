"""Scenario configs, CSV determinism, scenario drivers, figures, and the
command-line entry point."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from topoindex.harness import ScenarioConfig, run_scenario
from topoindex.report import render


class TestScenarioConfig:
    def test_defaults_round_trip(self):
        cfg = ScenarioConfig()
        again = ScenarioConfig.from_mapping(cfg.to_mapping())
        assert again == cfg
        assert again.config_hash() == cfg.config_hash()

    def test_from_file(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text(
            "# comment\n"
            "scenario=bec\n"
            "model.a=1\n"
            "model.W=0.5,1.5\n"
            "geometry.L=12\n"
            "seeds=3,4\n"
            "flavor=z\n"
        )
        cfg = ScenarioConfig.from_file(p)
        assert cfg.scenario == "bec"
        assert cfg.W_values == (0.5, 1.5)
        assert cfg.seeds == (3, 4)

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("scenario=bec\nmodel.mass=1\n")
        with pytest.raises(ValueError, match="unknown config keys"):
            ScenarioConfig.from_file(p)

    def test_malformed_line_rejected(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("scenario bec\n")
        with pytest.raises(ValueError, match="key=value"):
            ScenarioConfig.from_file(p)

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ValueError, match="unknown scenario"):
            ScenarioConfig(scenario="chern-marker")

    def test_g_ramp_must_sit_inside_delta(self):
        with pytest.raises(ValueError, match="ramp"):
            ScenarioConfig(delta=(-0.1, 0.1), g_ramp=(-0.2, 0.2))

    def test_hash_sensitive_to_values(self):
        c1 = ScenarioConfig(seeds=(1,))
        c2 = ScenarioConfig(seeds=(2,))
        assert c1.config_hash() != c2.config_hash()


SMALL = dict(L_values=(12,), seeds=(3,))


class TestDrivers:
    def test_phase_diagram_clean_rows_seed_independent(self, tmp_path):
        cfg = ScenarioConfig(
            scenario="phase-diagram", a_values=(1.0,), W_values=(0.0,),
            L_values=(12,), seeds=(3, 4), flavor="z",
        )
        res = run_scenario(cfg, tmp_path)
        vals = {(r["seed"], r["raw"]) for r in res.rows}
        raws = {raw for _, raw in vals}
        assert len(res.rows) == 2
        assert len(raws) == 1  # no disorder: the seed cannot matter

    def test_bec_bulk_edge_agree_clean(self, tmp_path):
        cfg = ScenarioConfig(scenario="bec", a_values=(1.0,), W_values=(0.0,), **SMALL)
        res = run_scenario(cfg, tmp_path)
        assert all(r["agree"] for r in res.rows)
        assert all(r["bulk_value"] == 1 for r in res.rows)

    def test_homotopy_distances_decrease(self, tmp_path):
        cfg = ScenarioConfig(scenario="homotopy-check", a_values=(1.0,), **SMALL)
        res = run_scenario(cfg, tmp_path)
        dist = {r["N"]: r["sup_distance"] for r in res.rows}
        n_min = res.summary["minimal_N"]
        assert n_min == 15
        assert dist[n_min] < 0.25
        assert all(dist[n] >= 0.25 for n in dist if n < n_min)
        assert all(abs(r["phi_sum"]) <= 1e-12 for r in res.rows)

    def test_outputs_on_disk(self, tmp_path):
        cfg = ScenarioConfig(scenario="phase-diagram", a_values=(1.0,), **SMALL)
        res = run_scenario(cfg, tmp_path)
        csv_path = tmp_path / "phase-diagram.csv"
        summary_path = tmp_path / "summary.json"
        assert csv_path.exists() and summary_path.exists()
        summary = json.loads(summary_path.read_text())
        assert summary["scenario"] == "phase-diagram"
        assert summary["rows"] == len(res.rows)
        assert summary["config_hash"] == cfg.config_hash()

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = ScenarioConfig(
            scenario="phase-diagram", a_values=(1.0,), W_values=(1.0,), **SMALL
        )
        run_scenario(cfg, tmp_path / "r1")
        run_scenario(cfg, tmp_path / "r2")
        b1 = (tmp_path / "r1" / "phase-diagram.csv").read_bytes()
        b2 = (tmp_path / "r2" / "phase-diagram.csv").read_bytes()
        assert b1 == b2

    def test_render_writes_figures(self, tmp_path):
        cfg = ScenarioConfig(scenario="phase-diagram", a_values=(1.0, 3.0), **SMALL)
        res = run_scenario(cfg, tmp_path)
        figures = render(res, tmp_path)
        assert figures
        for name in figures:
            assert (tmp_path / name).exists()


def _run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "topoindex.cli", *args],
        capture_output=True, text=True, cwd=cwd,
    )


class TestCli:
    def test_clean_run_exits_zero(self, tmp_path):
        out = tmp_path / "out"
        r = _run_cli(
            ["phase-diagram", "--size", "12", "--seed", "3", "--out", str(out)], tmp_path
        )
        assert r.returncode == 0, r.stderr
        assert (out / "phase-diagram.csv").exists()
        assert (out / "summary.json").exists()
        figures = json.loads((out / "summary.json").read_text())["figures"]
        assert figures and all((out / f).exists() for f in figures)

    def test_unreliable_rows_exit_one_unless_allowed(self, tmp_path):
        # a very small window makes the trace residual large -> unreliable
        cfg = tmp_path / "run.cfg"
        cfg.write_text("scenario=phase-diagram\nmodel.a=1\ngeometry.L=8\nseeds=3\n")
        r = _run_cli(
            ["phase-diagram", "--config", str(cfg), "--out", str(tmp_path / "o1")], tmp_path
        )
        assert r.returncode == 1
        r2 = _run_cli(
            ["phase-diagram", "--config", str(cfg), "--out", str(tmp_path / "o2"),
             "--allow-unreliable"],
            tmp_path,
        )
        assert r2.returncode == 0

    def test_bad_config_exits_two(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("nonsense.key=1\n")
        r = _run_cli(["phase-diagram", "--config", str(cfg)], tmp_path)
        assert r.returncode == 2

    def test_flavor_flag_overrides(self, tmp_path):
        out = tmp_path / "out"
        r = _run_cli(
            ["phase-diagram", "--size", "12", "--seed", "3", "--flavor", "z2",
             "--out", str(out)],
            tmp_path,
        )
        assert r.returncode == 0, r.stderr
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["flavor"] == "z2"
