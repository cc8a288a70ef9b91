"""
Experiment configuration: a flat ``key = value`` text file.

Blank lines and lines starting with ``#`` are ignored. Unknown or repeated
keys are errors. Angles accept plain numbers or multiples of pi such as
``pi/4``, ``3*pi/2`` or ``-0.5pi``.

Keys (default in brackets):

    sequence            comma-separated generator names; "all" stands for the
                        four deterministic ones [all]
    mode                spatial | temporal | homogeneous [spatial]
    theta1, theta2      coin angles in radians [pi/4, pi/6]
    steps               number of walk steps T [500]
    lattice_half_width  N; 0 picks the smallest even N >= T+1 [0]
    boundary            periodic | open [periodic]
    initial_spin        up | symmetric | auto; auto is "up" for survival
                        runs and "symmetric" otherwise [auto]
    seed                seed of the random sequence generator [0]
    t_f                 DOS bins have width 2 pi / t_f [500]
    sweep               also run the theta2 sweep in `spread` [false]
    sweep_points        theta2 grid size over [0, 2 pi) [128]
    spectrum_times      temporal product lengths for `spectrum` [30,500]
    extended_steps      step count for rudin-shapiro in `survival`; 0 = steps [0]
    fit_fraction        fraction of the series (from the end) used in fits [0.8]
    tail_fraction       fraction of the echo series used for the tail mean [0.1]
    peaks               rows in the diffraction peak table [10]
    output_dir          where files go unless --out is given [qwalk_output]
    plots               render PNG figures next to the data [true]
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import asdict, dataclass, fields, replace

from .sequences import APERIODIC, KINDS
from .walk import BOUNDARIES, MODES, default_half_width

__all__ = ["ExperimentConfig", "load_config", "parse_angle", "parse_config"]

_PI_EXPR = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?$")


def parse_angle(text: str) -> float:
    s = str(text).strip().lower()
    m = _PI_EXPR.match(s)
    if m:
        coef = m.group(1)
        if coef in ("", "+"):
            k = 1.0
        elif coef == "-":
            k = -1.0
        else:
            k = float(coef)
        value = k * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    else:
        try:
            value = float(s)
        except ValueError:
            raise ValueError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"angle must be finite, got {text!r}")
    return value


def _parse_bool(text: str) -> bool:
    s = text.strip().lower()
    if s in ("true", "yes", "1", "on"):
        return True
    if s in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"cannot parse boolean {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    sequence: str = "all"
    mode: str = "spatial"
    theta1: float = math.pi / 4
    theta2: float = math.pi / 6
    steps: int = 500
    lattice_half_width: int = 0
    boundary: str = "periodic"
    initial_spin: str = "auto"
    seed: int = 0
    t_f: int = 500
    sweep: bool = False
    sweep_points: int = 128
    spectrum_times: str = "30,500"
    extended_steps: int = 0
    fit_fraction: float = 0.8
    tail_fraction: float = 0.1
    peaks: int = 10
    output_dir: str = "qwalk_output"
    plots: bool = True

    def __post_init__(self):
        for kind in self.sequences:
            if kind not in KINDS:
                raise ValueError(f"unknown sequence {kind!r}; expected one of {KINDS} or 'all'")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if self.initial_spin not in ("up", "symmetric", "auto"):
            raise ValueError("initial_spin must be up, symmetric or auto")
        for name in ("theta1", "theta2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.lattice_half_width < 0:
            raise ValueError("lattice_half_width must be >= 0")
        if self.t_f < 2:
            raise ValueError("t_f must be >= 2")
        if self.sweep_points < 1:
            raise ValueError("sweep_points must be >= 1")
        if not 0 < self.fit_fraction <= 1 or not 0 < self.tail_fraction <= 1:
            raise ValueError("fit_fraction and tail_fraction must lie in (0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if any(t < 1 for t in self.times):
            raise ValueError("spectrum_times must be positive integers")

    @property
    def sequences(self) -> tuple[str, ...]:
        out: list[str] = []
        for name in (s.strip() for s in self.sequence.split(",")):
            for kind in (("two-periodic",) + APERIODIC if name == "all" else (name,) if name else ()):
                if kind not in out:
                    out.append(kind)
        return tuple(out)

    @property
    def times(self) -> tuple[int, ...]:
        return tuple(int(t) for t in self.spectrum_times.split(",") if t.strip())

    def half_width(self, steps: int | None = None) -> int:
        if self.lattice_half_width:
            return self.lattice_half_width
        return default_half_width(self.steps if steps is None else steps)

    def spin(self, experiment: str) -> str:
        if self.initial_spin != "auto":
            return self.initial_spin
        return "up" if experiment == "survival" else "symmetric"

    def to_dict(self) -> dict:
        return asdict(self)

    def canonical_text(self) -> str:
        return "".join(f"{k} = {v!r}\n" for k, v in sorted(self.to_dict().items()))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def with_overrides(self, overrides: dict[str, str]) -> "ExperimentConfig":
        return replace(self, **_coerce(overrides))


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(raw: dict[str, str]) -> dict:
    out = {}
    for key, text in raw.items():
        if key not in _TYPES:
            raise ValueError(f"unknown config key {key!r}")
        kind = _TYPES[key]
        try:
            if key in ("theta1", "theta2"):
                out[key] = parse_angle(text)
            elif kind == "int":
                out[key] = int(text, 0)
            elif kind == "float":
                out[key] = float(text)
            elif kind == "bool":
                out[key] = _parse_bool(text)
            else:
                out[key] = text.strip()
        except ValueError as exc:
            raise ValueError(f"bad value for {key!r}: {exc}") from None
    return out


def parse_config(text: str) -> ExperimentConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in raw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return ExperimentConfig(**_coerce(raw))


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
