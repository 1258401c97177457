"""
Tests for artifact persistence.
"""

import json
import os

import numpy as np
import pytest

from src import __version__
from src.exceptions import CorruptedFile, InvalidData, LoadFailed
from src.geometry.catalog import canonical_set
from src.geometry.domain import Domain
from src.geometry.sets import HalfSpace
from src.persistence import (
    csv_text, load_json, load_problem, load_set_spec, metadata, problem_from_dict, read_csv,
    read_pgm, save_json, save_problem, save_set_spec, write_csv, write_pgm,
)


class TestJson:
    """JSON documents."""

    def test_round_trip_with_numpy_values(self, tmp_path):
        path = str(tmp_path / "doc.json")
        save_json({"a": np.float64(1.5), "b": np.arange(3), "c": np.bool_(True), "d": (1, 2)}, path)
        assert load_json(path) == {"a": 1.5, "b": [0, 1, 2], "c": True, "d": [1, 2]}

    def test_creates_parent_directories(self, tmp_path):
        path = str(tmp_path / "deep" / "er" / "doc.json")
        save_json({"x": 1}, path)
        assert os.path.exists(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(LoadFailed):
            load_json(str(tmp_path / "nope.json"))

    def test_corrupted_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(CorruptedFile):
            load_json(str(path))

    def test_metadata(self):
        meta = metadata({"grid": {}}, 7, command="delta")
        assert meta == {"version": __version__, "config": {"grid": {}}, "seed": 7, "command": "delta"}


class TestCsv:
    """CSV tables and sidecars."""

    def test_formatting(self):
        text = csv_text(("s", "value", "ok", "note"), [(0.5, 1 / 3, True, None), (1, 2.0, False, "x")])
        lines = text.splitlines()
        assert lines[0] == "s,value,ok,note"
        assert lines[1] == f"0.5,{repr(1 / 3)},true,"
        assert lines[2] == "1,2.0,false,x"

    def test_write_with_sidecar(self, tmp_path):
        path = str(tmp_path / "table.csv")
        sidecar = write_csv(path, ("s", "delta_s"), [(0.5, 0.6944444444444445)], {"seed": None})
        assert sidecar == path + ".json"
        assert load_json(sidecar) == {"seed": None}
        header, rows = read_csv(path)
        assert header == ["s", "delta_s"]
        assert rows == [["0.5", "0.6944444444444445"]]

    def test_without_metadata(self, tmp_path):
        path = str(tmp_path / "table.csv")
        assert write_csv(path, ("a",), [(1,)]) == ""
        assert not os.path.exists(path + ".json")

    def test_identical_bytes(self, tmp_path):
        rows = [(0.1 * k, np.float64(k) / 7.0) for k in range(5)]
        first, second = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        write_csv(first, ("s", "v"), rows)
        write_csv(second, ("s", "v"), rows)
        with open(first, "rb") as f1, open(second, "rb") as f2:
            assert f1.read() == f2.read()

    def test_read_errors(self, tmp_path):
        with pytest.raises(LoadFailed):
            read_csv(str(tmp_path / "missing.csv"))
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(CorruptedFile):
            read_csv(str(empty))


class TestSetsAndProblems:
    """Set-spec and problem files."""

    def test_set_spec_file(self, tmp_path):
        path = str(tmp_path / "annulus.json")
        E = canonical_set("annulus")
        save_set_spec(E, path)
        loaded = load_set_spec(path)
        assert loaded.to_dict() == E.to_dict()

    def test_problem_round_trip(self, tmp_path):
        path = str(tmp_path / "problem.json")
        omega = Domain.ball((0.0, 0.0), 1.0)
        E0 = HalfSpace((0.0, 1.0), 0.0) - omega.as_set()
        save_problem(path, omega, E0, 0.3, 8, "anneal")
        spec = load_problem(path)
        assert spec.omega.to_dict() == omega.to_dict()
        assert spec.exterior.to_dict() == E0.to_dict()
        assert (spec.s, spec.resolution, spec.solver) == (0.3, 8, "anneal")

    def test_problem_defaults(self):
        omega = Domain.box((-1.0, -1.0), (1.0, 1.0))
        data = {"domain": omega.to_dict(), "exterior": {"type": "empty", "dim": 2}, "s": 0.5}
        spec = problem_from_dict(data)
        assert spec.resolution is None
        assert spec.solver == "auto"

    def test_problem_missing_field(self):
        with pytest.raises(InvalidData):
            problem_from_dict({"s": 0.5})


class TestPgm:
    """Plain grey maps."""

    def test_orientation(self, tmp_path):
        path = str(tmp_path / "grid.pgm")
        grey = np.array([[0, 255], [96, 192]])  # axis 0 is x
        write_pgm(path, grey)
        image = read_pgm(path)
        assert image.tolist() == [[255, 192], [0, 96]]
        with open(path) as f:
            assert f.readline().strip() == "P2"

    def test_one_dimensional(self, tmp_path):
        path = str(tmp_path / "line.pgm")
        write_pgm(path, np.array([0, 96, 255]))
        assert read_pgm(path).tolist() == [[0, 96, 255]]

    def test_not_a_pgm(self, tmp_path):
        path = tmp_path / "x.pgm"
        path.write_text("P5\n1 1\n255\n0\n")
        with pytest.raises(CorruptedFile):
            read_pgm(str(path))

    def test_truncated(self, tmp_path):
        path = tmp_path / "x.pgm"
        path.write_text("P2\n2 2\n255\n0 0 0\n")
        with pytest.raises(CorruptedFile):
            read_pgm(str(path))
