"""
Tests for the batch front end and the command-line parser.
"""

import argparse
import csv
import io
import json
import os

import pytest

import main as entry
from src import __version__
from src.cli import (
    EXIT_BAD_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, RunConfig, resolve_config, resolve_set, run,
)
from src.curvature.graph_formula import CurvatureResult
from src.exceptions import InvalidData
from src.geometry.domain import Domain
from src.geometry.sets import EmptySet
from src.persistence import load_json, read_pgm, save_problem


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestRunConfig:
    """Validation of one invocation."""

    @pytest.mark.parametrize("kwargs", [
        {"command": "plot"},
        {"command": "delta"},
        {"command": "curv", "set_name": "annulus", "s": 0.5},
        {"command": "curv", "set_name": "annulus", "set_file": "x.json", "point": [1.0, 0.0], "s": 0.5},
        {"command": "scan", "set_name": "annulus", "point": [1.0, 0.0]},
        {"command": "root", "set_name": "annulus", "point": [1.0, 0.0]},
        {"command": "minimize", "preset": "candy", "s": 0.3},
        {"command": "minimize", "preset": "candy", "output": "r.json"},
        {"command": "sweep", "preset": "candy"},
        {"command": "sweep", "preset": "teapot", "s_grid": [0.5]},
        {"command": "delta", "s": 0.5, "emit": "xml"},
        {"command": "delta", "s": 0.5, "witness_center": [2.0, 0.0]},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(InvalidData):
            RunConfig(**kwargs).validate()

    def test_accepts(self):
        RunConfig("delta", s=0.5).validate()
        RunConfig("alpha", set_name="quadrant").validate()
        RunConfig("sweep", preset="candy", s_grid=[0.4, 0.2]).validate()

    def test_overrides_merge_into_config(self):
        cfg = resolve_config(RunConfig("delta", s=0.5, overrides={"anneal": {"seed": 5}}))
        assert cfg.anneal.seed == 5
        assert cfg.grid.resolution == 16

    def test_config_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"grid": {"resolution": 8}}))
        cfg = resolve_config(RunConfig("delta", s=0.5, config_file=str(path),
                                       overrides={"grid": {"collar_cells": 4}}))
        assert (cfg.grid.resolution, cfg.grid.collar_cells) == (8, 4)

    def test_set_dimension_default(self):
        E = resolve_set(RunConfig("alpha", set_name="halfspace", n=3))
        assert E.dim == 3


class TestRun:
    """Commands end to end."""

    def test_delta_table(self, capsys):
        assert run(RunConfig("delta", n=2, alpha_bar=0.0, s=0.5)) == EXIT_OK
        header, rows = parse_csv(capsys.readouterr().out)
        assert header == ["s", "beta", "delta_s"]
        assert float(rows[0][2]) == pytest.approx(0.6944444444444445, abs=1e-12)

    def test_delta_with_sigma(self, capsys):
        assert run(RunConfig("delta", s_grid=[0.25, 0.5], sigma=0.5)) == EXIT_OK
        header, rows = parse_csv(capsys.readouterr().out)
        assert header[-1] == "delta_sigma"
        assert len(rows) == 2
        assert float(rows[0][3]) == pytest.approx(25.0 / 36.0)

    def test_relative_output_under_output_dir(self, tmp_path):
        rc = RunConfig("delta", s=0.5, output="tables/delta.csv",
                       overrides={"paths": {"output_dir": str(tmp_path)}})
        assert run(rc) == EXIT_OK
        assert (tmp_path / "tables" / "delta.csv").exists()
        assert load_json(str(tmp_path / "tables" / "delta.csv.json"))["command"] == "delta"

    def test_unconverged_root_exit_status(self, capsys, monkeypatch):
        def unsettled(E, p, s, cfg=None, **kwargs):
            return CurvatureResult.build(s, 0.5 - s, 0.0, 1e-9, converged=False)

        monkeypatch.setattr("src.thresholds.checks.curvature_at", unsettled)
        rc = RunConfig("root", set_name="annulus", point=[1.0, 0.0], bracket=(0.1, 0.9))
        assert run(rc) == EXIT_NOT_CONVERGED
        header, rows = parse_csv(capsys.readouterr().out)
        assert rows[0][header.index("retried")] == "true"

    def test_csv_sidecar(self, tmp_path):
        path = str(tmp_path / "delta.csv")
        assert run(RunConfig("delta", s=0.5, output=path, seed=3)) == EXIT_OK
        meta = load_json(path + ".json")
        assert meta["version"] == __version__
        assert meta["command"] == "delta"
        assert meta["seed"] == 3
        assert meta["status"] == EXIT_OK
        assert meta["config"]["anneal"]["seed"] == 2024

    def test_repeat_runs_are_identical(self, tmp_path):
        first, second = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        run(RunConfig("delta", s_grid=[0.1, 0.5, 0.9], output=first))
        run(RunConfig("delta", s_grid=[0.1, 0.5, 0.9], output=second))
        with open(first, "rb") as a, open(second, "rb") as b:
            assert a.read() == b.read()

    def test_json_emit(self, capsys):
        assert run(RunConfig("delta", s=0.5, emit="json")) == EXIT_OK
        document = json.loads(capsys.readouterr().out)
        assert document["header"] == ["s", "beta", "delta_s"]
        assert document["payload"]["omega_n"] == pytest.approx(6.283185307179586)
        assert document["meta"]["run"]["command"] == "delta"

    def test_bad_input(self, capsys):
        assert run(RunConfig("curv", set_name="annulus")) == EXIT_BAD_INPUT
        assert "error:" in capsys.readouterr().err

    def test_unknown_family(self, capsys):
        status = run(RunConfig("curv", set_name="teapot", point=[1.0, 0.0], s=0.5))
        assert status == EXIT_BAD_INPUT

    def test_unknown_override(self):
        assert run(RunConfig("delta", s=0.5, overrides={"grid": {"colour": 1}})) == EXIT_BAD_INPUT

    def test_curvature_point(self, capsys):
        status = run(RunConfig("curv", set_name="quadrant", point=[1.0, 0.0], s=0.5))
        assert status in (EXIT_OK, EXIT_NOT_CONVERGED)
        header, rows = parse_csv(capsys.readouterr().out)
        assert header[:2] == ["s", "value"]
        assert float(rows[0][1]) > 0.0

    def test_minimize_problem_file(self, tmp_path):
        problem = str(tmp_path / "problem.json")
        omega = Domain.box((-1.0, -1.0), (1.0, 1.0))
        save_problem(problem, omega, EmptySet(2), 0.5, 4)
        output = str(tmp_path / "out" / "result.json")
        assert run(RunConfig("minimize", problem_file=problem, output=output)) == EXIT_OK
        data = load_json(output)
        assert data["result"]["solver"] == "exhaustive"
        assert data["result"]["energy"] == pytest.approx(0.0, abs=1e-12)
        assert data["problem"]["cells"] == 16
        grey = read_pgm(os.path.splitext(output)[0] + ".pgm")
        assert grey.shape == (20, 20)
        assert (grey == 255).sum() == 16

    def test_verify_single_criterion(self, capsys):
        assert run(RunConfig("verify", criteria=[15])) == EXIT_OK
        header, rows = parse_csv(capsys.readouterr().out)
        assert header[0] == "criterion"
        assert rows[0][0] == "15" and rows[0][2] == "true"


class TestParser:
    """Argument parsing in main."""

    def test_geometric_s_grid(self):
        args = entry.build_parser().parse_args(["scan", "--s-grid", "geom:0.2,0.5,3"])
        assert args.s_grid == pytest.approx([0.2, 0.1, 0.05])

    def test_list_arguments(self):
        args = entry.build_parser().parse_args(
            ["root", "--point", "1,0", "--bracket", "0.1,0.9", "--s-grid", "0.3,0.6"])
        assert args.point == [1.0, 0.0]
        assert args.bracket == (0.1, 0.9)
        assert args.s_grid == [0.3, 0.6]

    @pytest.mark.parametrize("argv", [
        ["scan", "--s-grid", "geom:0.2,0.5"],
        ["root", "--bracket", "0.1"],
        ["curv", "--point", "a,b"],
        ["teleport"],
    ])
    def test_parse_errors(self, argv):
        with pytest.raises(SystemExit):
            entry.build_parser().parse_args(argv)

    def test_run_config_from_args(self):
        args = entry.build_parser().parse_args([
            "alpha", "--set", "sigma_supergraph", "--param", "k=2", "--param", "n=3",
            "--override", "alpha.acceptance_tol=0.05", "--skip-slow",
        ])
        rc = entry.config_from_args(args)
        assert rc.set_params == {"k": 2, "n": 3}
        assert rc.overrides == {"alpha": {"acceptance_tol": 0.05}}
        assert rc.include_slow is False

    def test_key_values(self):
        assert entry._key_values(["name=annulus", "eps=0.1"]) == {"name": "annulus", "eps": 0.1}
        with pytest.raises(argparse.ArgumentTypeError):
            entry._key_values(["novalue"])
        with pytest.raises(argparse.ArgumentTypeError):
            entry._overrides(["resolution=8"])


class TestMain:
    """The entry point."""

    @pytest.fixture(autouse=True)
    def quiet_logging(self, monkeypatch):
        monkeypatch.setattr(entry, "setup_logging", lambda *args, **kwargs: None)

    def test_delta(self, capsys):
        assert entry.main(["delta", "--n", "2", "--alpha-bar", "0", "--s", "0.5"]) == EXIT_OK
        header, rows = parse_csv(capsys.readouterr().out)
        assert float(rows[0][header.index("delta_s")]) == pytest.approx(0.6944444444444445, abs=1e-12)

    def test_bad_override(self, capsys):
        assert entry.main(["delta", "--s", "0.5", "--override", "resolution=8"]) == EXIT_BAD_INPUT
        assert "error:" in capsys.readouterr().err

    def test_missing_input(self):
        assert entry.main(["root", "--set", "annulus"]) == EXIT_BAD_INPUT
