"""
Discrete-time quantum walk on the finite lattice x = -N..N.

The walker state is a pair of length-L arrays (spin up, spin down), L = 2N+1,
with array index i holding site x = i - N. One step applies the rotation coin
C(theta(x)) at every site, then moves spin-up amplitude to x-1 and spin-down
amplitude to x+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numpy.typing import NDArray

from .sequences import LetterString, generate

__all__ = [
    "BOUNDARIES",
    "MODES",
    "CoinConfig",
    "Trajectory",
    "WalkState",
    "coin_matrix",
    "default_half_width",
    "evolve",
    "initial_state",
    "make_config",
    "rotate_shift",
    "step",
]

BOUNDARIES = ("periodic", "open")
MODES = ("homogeneous", "spatial", "temporal")
RECORDABLE = frozenset({"distribution", "spread", "survival", "states"})


def coin_matrix(theta: float) -> NDArray[np.complex128]:
    """Rotation coin [[cos t, -sin t], [sin t, cos t]]."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"coin angle must be finite, got {theta}")
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def default_half_width(steps: int) -> int:
    """Smallest even N with N >= steps + 1.

    N >= steps + 1 keeps the periodic walk identical to the infinite-lattice
    walk; an even N puts word index N (site x = 0) on an even index, so the
    two-periodic word has letter A at the origin.
    """
    n = steps + 1
    return n + (n % 2)


def _check_boundary(boundary: str) -> None:
    if boundary not in BOUNDARIES:
        raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")


@dataclass
class WalkState:
    up: NDArray[np.complex128]
    down: NDArray[np.complex128]
    N: int

    def __post_init__(self):
        L = 2 * self.N + 1
        self.up = np.asarray(self.up, dtype=np.complex128)
        self.down = np.asarray(self.down, dtype=np.complex128)
        if self.up.shape != (L,) or self.down.shape != (L,):
            raise ValueError(f"amplitude arrays must have shape ({L},) for N={self.N}")

    @property
    def L(self) -> int:
        return 2 * self.N + 1

    @property
    def x(self) -> NDArray[np.int64]:
        return np.arange(-self.N, self.N + 1)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.up) ** 2) + np.sum(np.abs(self.down) ** 2)))

    def copy(self) -> "WalkState":
        return WalkState(self.up.copy(), self.down.copy(), self.N)

    def vector(self) -> NDArray[np.complex128]:
        """Flattened (up block, down block) vector of length 2L."""
        return np.concatenate([self.up, self.down])

    @classmethod
    def from_vector(cls, v, N: int) -> "WalkState":
        L = 2 * N + 1
        v = np.asarray(v, dtype=np.complex128)
        return cls(v[:L].copy(), v[L:].copy(), N)

    def amplitude(self, spin: str, x: int) -> complex:
        arr = self.up if spin == "up" else self.down
        return complex(arr[x + self.N])

    def overlap(self, other: "WalkState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.up, other.up) + np.vdot(self.down, other.down))


def initial_state(N: int, spin: str = "symmetric") -> WalkState:
    """
    Walker localized at x = 0.

    ``spin="up"`` gives |up>; ``spin="symmetric"`` gives (|up> + i|down>)/sqrt(2).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1 (got {N})")
    L = 2 * N + 1
    up = np.zeros(L, dtype=np.complex128)
    down = np.zeros(L, dtype=np.complex128)
    if spin == "up":
        up[N] = 1.0
    elif spin == "symmetric":
        up[N] = 1 / math.sqrt(2)
        down[N] = 1j / math.sqrt(2)
    else:
        raise ValueError(f"spin must be 'up' or 'symmetric', got {spin!r}")
    return WalkState(up, down, N)


def rotate_shift(up, down, cos, sin, boundary: str = "periodic"):
    """
    Apply one coin + shift to raw amplitude arrays.

    The last axis is the lattice; leading axes broadcast, so a batch of walks
    (e.g. a theta sweep) steps together. ``cos``/``sin`` broadcast against the
    amplitudes (scalars for a homogeneous coin).
    """
    a = cos * up - sin * down
    b = sin * up + cos * down
    if boundary == "periodic":
        return np.roll(a, -1, axis=-1), np.roll(b, 1, axis=-1)
    new_up = np.zeros_like(a)
    new_down = np.zeros_like(b)
    new_up[..., :-1] = a[..., 1:]
    new_down[..., 1:] = b[..., :-1]
    return new_up, new_down


def step(state: WalkState, theta_of_x, boundary: str = "periodic") -> WalkState:
    """One walk step with per-site coin angles (scalar = same angle everywhere)."""
    _check_boundary(boundary)
    theta = np.asarray(theta_of_x, dtype=float)
    if theta.ndim and theta.shape != (state.L,):
        raise ValueError(f"coin assignment has {theta.size} sites, lattice has {state.L}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("coin angles must be finite")
    up, down = rotate_shift(state.up, state.down, np.cos(theta), np.sin(theta), boundary)
    return WalkState(up, down, state.N)


@dataclass
class CoinConfig:
    """
    Two coin angles and how they are distributed.

    In spatial mode the word is laid on the lattice with word index i at site
    x = i - N. In temporal mode letter t (0-based) selects the coin of step
    t + 1. Letter A selects ``theta1``, B selects ``theta2``; homogeneous mode
    uses ``theta1`` only.
    """

    theta1: float
    theta2: float
    mode: str = "homogeneous"
    sequence: LetterString | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("theta1", "theta2"):
            if not math.isfinite(float(getattr(self, name))):
                raise ValueError(f"{name} must be finite")
        if self.mode != "homogeneous" and self.sequence is None:
            raise ValueError(f"{self.mode} mode requires a sequence")

    def letter_angles(self, letters: str) -> NDArray[np.float64]:
        codes = np.frombuffer(letters.encode("ascii"), dtype=np.uint8)
        return np.where(codes == ord("A"), float(self.theta1), float(self.theta2))

    def site_angles(self, N: int) -> NDArray[np.float64]:
        """Per-site angles for a spatial config on the lattice of half-width N."""
        L = 2 * N + 1
        if self.mode == "homogeneous":
            return np.full(L, float(self.theta1))
        if self.mode != "spatial":
            raise ValueError("site_angles needs a spatial or homogeneous config")
        if len(self.sequence) != L:
            raise ValueError(f"spatial sequence has length {len(self.sequence)}, lattice needs {L}")
        return self.letter_angles(self.sequence.letters)

    def step_angles(self, steps: int) -> NDArray[np.float64]:
        """Coin angle of each of the first ``steps`` steps for a temporal config."""
        if self.mode == "homogeneous":
            return np.full(steps, float(self.theta1))
        if self.mode != "temporal":
            raise ValueError("step_angles needs a temporal or homogeneous config")
        if len(self.sequence) < steps:
            raise ValueError(f"temporal sequence has length {len(self.sequence)} < {steps} steps")
        return self.letter_angles(self.sequence.letters[:steps])


@dataclass
class Trajectory:
    """Time series recorded by :func:`evolve`; index t runs over 0..steps."""

    N: int
    steps: int
    final: WalkState
    t: NDArray[np.int64]
    mean: NDArray[np.float64] | None = None
    variance: NDArray[np.float64] | None = None
    nu: NDArray[np.complex128] | None = None
    distributions: NDArray[np.float64] | None = None
    states: list[WalkState] | None = field(default=None, repr=False)

    @property
    def sigma(self) -> NDArray[np.float64] | None:
        if self.variance is None:
            return None
        return np.sqrt(np.maximum(self.variance, 0.0))


def evolve(
    config: CoinConfig,
    N: int,
    steps: int,
    boundary: str = "periodic",
    initial: WalkState | None = None,
    record: Iterable[str] = ("spread", "survival"),
) -> Trajectory:
    """
    Evolve ``initial`` (default: symmetric spin at x = 0) for ``steps`` steps.

    ``record`` picks what is stored at every t = 0..steps: ``"spread"`` (mean and
    variance of x), ``"survival"`` (nu(t) = <psi(0)|psi(t)>), ``"distribution"``
    (p_x(t)) and ``"states"`` (full state history).
    """
    _check_boundary(boundary)
    if steps < 1:
        raise ValueError(f"steps must be >= 1 (got {steps})")
    record = set(record)
    unknown = record - RECORDABLE
    if unknown:
        raise ValueError(f"unknown record keys {sorted(unknown)}")
    if initial is None:
        initial = initial_state(N)
    if initial.N != N:
        raise ValueError(f"initial state has N={initial.N}, expected {N}")

    if config.mode == "temporal":
        angles = config.step_angles(steps)
        cos_t, sin_t = np.cos(angles), np.sin(angles)
    else:
        angles = config.site_angles(N)
        cos_x, sin_x = np.cos(angles), np.sin(angles)

    x = np.arange(-N, N + 1, dtype=float)
    up, down = initial.up.copy(), initial.down.copy()
    up0, down0 = initial.up, initial.down

    mean = np.empty(steps + 1) if "spread" in record else None
    var = np.empty(steps + 1) if "spread" in record else None
    nu = np.empty(steps + 1, dtype=np.complex128) if "survival" in record else None
    dists = np.empty((steps + 1, 2 * N + 1)) if "distribution" in record else None
    states = [initial.copy()] if "states" in record else None

    def _record(t, up, down):
        if mean is not None or dists is not None:
            p = up.real**2 + up.imag**2 + down.real**2 + down.imag**2
            if dists is not None:
                dists[t] = p
            if mean is not None:
                m = p @ x
                mean[t] = m
                var[t] = p @ (x * x) - m * m
        if nu is not None:
            nu[t] = np.vdot(up0, up) + np.vdot(down0, down)

    _record(0, up, down)
    for t in range(steps):
        if config.mode == "temporal":
            up, down = rotate_shift(up, down, cos_t[t], sin_t[t], boundary)
        else:
            up, down = rotate_shift(up, down, cos_x, sin_x, boundary)
        _record(t + 1, up, down)
        if states is not None:
            states.append(WalkState(up.copy(), down.copy(), N))

    return Trajectory(
        N=N,
        steps=steps,
        final=WalkState(up, down, N),
        t=np.arange(steps + 1),
        mean=mean,
        variance=var,
        nu=nu,
        distributions=dists,
        states=states,
    )


def make_config(kind, theta1: float, theta2: float, mode: str, N: int, steps: int, seed: int = 0) -> CoinConfig:
    """CoinConfig for a generator name (or a ready-made word) sized for the run."""
    if mode == "homogeneous":
        return CoinConfig(theta1, theta2, "homogeneous")
    if isinstance(kind, LetterString):
        return CoinConfig(theta1, theta2, mode, kind)
    length = 2 * N + 1 if mode == "spatial" else steps
    return CoinConfig(theta1, theta2, mode, generate(kind, length, seed))
