"""CSV/JSON writers with fixed float formatting so reruns are byte-identical."""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .walk import WalkState


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path, header, columns) -> Path:
    """Write equal-length columns under ``header``; '\\n' line endings, 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [np.asarray(c) for c in columns]
    n = {c.shape[0] for c in columns}
    if len(n) != 1:
        raise ValueError(f"columns of {path.name} differ in length: {sorted(n)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*(c.tolist() for c in columns)):
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Path):
        return obj.as_posix()
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return path


def write_state(path, state: WalkState) -> Path:
    """Rows (x, Re a_up, Im a_up, Re a_down, Im a_down)."""
    return write_csv(
        path,
        ["x", "re_up", "im_up", "re_down", "im_down"],
        [state.x, state.up.real, state.up.imag, state.down.real, state.down.imag],
    )


def relpaths(paths, root) -> list[str]:
    return sorted(Path(os.path.relpath(p, root)).as_posix() for p in paths)
