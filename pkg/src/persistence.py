"""Artifact persistence: set-specs, problem/result files, CSV tables and PGM rasters."""

import csv
import io
import json
import logging
import os
from typing import Any, Dict, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from src import __version__
from src.exceptions import CorruptedFile, InvalidData, LoadFailed, SaveFailed
from src.geometry.domain import Domain
from src.geometry.sets import SetSpec, set_from_dict, set_to_dict

logger = logging.getLogger(__name__)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def json_text(data: Dict[str, Any]) -> str:
    return json.dumps(_jsonable(data), indent=2, sort_keys=True, allow_nan=True) + "\n"


def save_json(data: Dict[str, Any], path: str) -> None:
    """Write a JSON document with sorted keys.

    Raises:
        SaveFailed: If the file cannot be written
    """
    try:
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_jsonable(data), f, indent=2, sort_keys=True, allow_nan=True)
            f.write("\n")
        logger.info(f"Wrote {path}")
    except (IOError, OSError, TypeError, ValueError) as e:
        logger.error(f"Failed to write {path}: {e}")
        raise SaveFailed(f"Cannot write to {path}: {str(e)}")


def load_json(path: str) -> Dict[str, Any]:
    """Read a JSON document.

    Raises:
        LoadFailed: If the file is missing or unreadable
        CorruptedFile: If the file is not valid JSON
    """
    if not os.path.exists(path):
        logger.warning(f"File not found: {path}")
        raise LoadFailed(f"{path} does not exist")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        logger.error(f"File corrupted: {e}")
        raise CorruptedFile(path, f"Invalid JSON: {str(e)}")
    except (IOError, OSError) as e:
        logger.error(f"Error loading {path}: {e}")
        raise LoadFailed(f"Cannot load from {path}: {str(e)}")


def metadata(config_dict: Dict[str, Any], seed: Optional[int] = None, **extra) -> Dict[str, Any]:
    """Header every artifact carries: version, resolved config and seed."""
    data = {"version": __version__, "config": config_dict, "seed": seed}
    data.update(extra)
    return data


# ========== Set-specs ==========

def save_set_spec(E: SetSpec, path: str) -> None:
    save_json(set_to_dict(E), path)


def load_set_spec(path: str) -> SetSpec:
    """Read a set-spec JSON file.

    Raises:
        InvalidData: If the document is not a valid set-spec
    """
    return set_from_dict(load_json(path))


# ========== CSV ==========

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
              meta: Optional[Dict[str, Any]] = None) -> str:
    """CSV with an explicit header plus a `<path>.json` sidecar holding `meta`.

    Floats are written with repr, so identical inputs give identical bytes.

    Returns:
        Path of the sidecar (empty when meta is None)
    """
    try:
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(csv_text(header, rows))
        logger.info(f"Wrote {path}")
    except (IOError, OSError) as e:
        logger.error(f"Failed to write {path}: {e}")
        raise SaveFailed(f"Cannot write to {path}: {str(e)}")
    if meta is None:
        return ""
    sidecar = path + ".json"
    save_json(meta, sidecar)
    return sidecar


def read_csv(path: str):
    """(header, rows) of a CSV written by write_csv, values as strings."""
    if not os.path.exists(path):
        raise LoadFailed(f"{path} does not exist")
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise CorruptedFile(path, "empty CSV")
    return rows[0], rows[1:]


# ========== Problems and results ==========

class ProblemFile(NamedTuple):
    omega: Domain
    exterior: SetSpec
    s: float
    resolution: Optional[int]
    solver: str


def problem_to_dict(omega: Domain, exterior: SetSpec, s: float, resolution: Optional[int],
                    solver: str = "auto") -> Dict[str, Any]:
    return {"domain": omega.to_dict(), "exterior": set_to_dict(exterior), "s": s,
            "resolution": resolution, "solver": solver}


def problem_from_dict(data: Dict[str, Any]) -> ProblemFile:
    """Parse {domain, resolution, exterior, s, solver}.

    Raises:
        InvalidData: If a field is missing or malformed
    """
    try:
        omega = Domain.from_dict(data["domain"])
        exterior = set_from_dict(data["exterior"])
        s = float(data["s"])
    except KeyError as e:
        raise InvalidData("problem", f"missing field {e}")
    except (TypeError, ValueError) as e:
        raise InvalidData("problem", str(e))
    resolution = data.get("resolution")
    return ProblemFile(omega, exterior, s, None if resolution is None else int(resolution),
                       str(data.get("solver", "auto")))


def load_problem(path: str) -> ProblemFile:
    return problem_from_dict(load_json(path))


def save_problem(path: str, omega: Domain, exterior: SetSpec, s: float, resolution: Optional[int],
                 solver: str = "auto") -> None:
    save_json(problem_to_dict(omega, exterior, s, resolution, solver), path)


PGM_LEVELS = {"omega_in": 0, "collar_in": 96, "collar_out": 192, "omega_out": 255}


def raster_levels(problem, state) -> np.ndarray:
    """Grey levels of the whole raster: Omega cells and collar, occupied darker."""
    layout = problem.layout
    occ = problem.to_grid(state)
    grey = np.where(occ, PGM_LEVELS["collar_in"], PGM_LEVELS["collar_out"])
    grey = np.where(layout.omega_mask & occ, PGM_LEVELS["omega_in"], grey)
    grey = np.where(layout.omega_mask & ~occ, PGM_LEVELS["omega_out"], grey)
    return grey.astype(int)


def write_pgm(path: str, grey: np.ndarray) -> None:
    """Plain (P2) grey map; axis 0 is x, axis 1 is y, rows printed from the top."""
    grey = np.asarray(grey, dtype=int)
    image = grey[None, :] if grey.ndim == 1 else grey.T[::-1]
    try:
        _ensure_parent(path)
        with open(path, "w", encoding="ascii") as f:
            f.write(f"P2\n{image.shape[1]} {image.shape[0]}\n255\n")
            for row in image:
                f.write(" ".join(str(int(v)) for v in row) + "\n")
        logger.info(f"Wrote {path}")
    except (IOError, OSError) as e:
        logger.error(f"Failed to write {path}: {e}")
        raise SaveFailed(f"Cannot write to {path}: {str(e)}")


def read_pgm(path: str) -> np.ndarray:
    """Grey levels of a P2 file as printed (top row first)."""
    if not os.path.exists(path):
        raise LoadFailed(f"{path} does not exist")
    with open(path, "r", encoding="ascii") as f:
        tokens = f.read().split()
    if not tokens or tokens[0] != "P2":
        raise CorruptedFile(path, "not a plain PGM file")
    width, height = int(tokens[1]), int(tokens[2])
    values = np.array([int(t) for t in tokens[4:4 + width * height]])
    if values.size != width * height:
        raise CorruptedFile(path, "truncated pixel data")
    return values.reshape(height, width)


def save_result(path: str, result, problem, meta: Optional[Dict[str, Any]] = None) -> str:
    """Result JSON at `path` plus the raster dump next to it; returns the PGM path."""
    data = {"result": result.to_dict(), "problem": problem.to_dict()}
    if meta is not None:
        data["meta"] = meta
    save_json(data, path)
    pgm = os.path.splitext(path)[0] + ".pgm"
    write_pgm(pgm, raster_levels(problem, result.state))
    return pgm
