"""
Spreading and survival diagnostics computed from walk trajectories.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .sequences import LetterString
from .walk import Trajectory, WalkState, initial_state, rotate_shift

__all__ = [
    "CesaroSeries",
    "EchoSeries",
    "EchoSpectrum",
    "SpectralClassReport",
    "SpreadSeries",
    "cesaro_average",
    "echo_fourier",
    "probability_distribution",
    "spectral_class_report",
    "spread",
    "spread_sweep",
    "survival_series",
    "tail_mean",
]


@dataclass
class SpreadSeries:
    t: NDArray[np.int64]
    mean: NDArray[np.float64]
    variance: NDArray[np.float64]

    @property
    def sigma(self) -> NDArray[np.float64]:
        return np.sqrt(np.maximum(self.variance, 0.0))


@dataclass
class EchoSeries:
    """Survival amplitude nu(t) for t = 0..len-1."""

    nu: NDArray[np.complex128]

    def __post_init__(self):
        self.nu = np.asarray(self.nu, dtype=np.complex128)

    def __len__(self) -> int:
        return self.nu.size

    @property
    def t(self) -> NDArray[np.int64]:
        return np.arange(self.nu.size)

    @property
    def echo(self) -> NDArray[np.float64]:
        return np.abs(self.nu) ** 2

    def truncate(self, n: int) -> "EchoSeries":
        return EchoSeries(self.nu[:n].copy())


@dataclass
class CesaroSeries:
    """Running means <|nu|^2>_T for T = 1..len."""

    value: NDArray[np.float64]

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=float)

    def __len__(self) -> int:
        return self.value.size

    @property
    def T(self) -> NDArray[np.int64]:
        return np.arange(1, self.value.size + 1)


@dataclass
class EchoSpectrum:
    u: NDArray[np.float64]
    amplitude: NDArray[np.complex128]

    @property
    def magnitude(self) -> NDArray[np.float64]:
        return np.abs(self.amplitude)

    def peak_indices(self, count: int | None = None) -> NDArray[np.int64]:
        """Circular local maxima of |nu~(u)|, largest first."""
        a = self.magnitude
        is_peak = (a >= np.roll(a, 1)) & (a >= np.roll(a, -1)) & (a > 0)
        idx = np.flatnonzero(is_peak)
        idx = idx[np.argsort(-a[idx], kind="stable")]
        return idx if count is None else idx[:count]


def probability_distribution(state: WalkState) -> NDArray[np.float64]:
    """p_x = |a_up(x)|^2 + |a_down(x)|^2 over x = -N..N."""
    return np.abs(state.up) ** 2 + np.abs(state.down) ** 2


def spread(trajectory) -> SpreadSeries:
    """
    Mean displacement and variance of x.

    Accepts a :class:`Trajectory` (uses recorded moments or distributions) or
    a 2-D array of distributions, one row per time step, over x = -N..N.
    """
    if isinstance(trajectory, Trajectory):
        if trajectory.mean is not None:
            return SpreadSeries(trajectory.t, trajectory.mean, trajectory.variance)
        if trajectory.distributions is None:
            raise ValueError("trajectory recorded neither spread nor distributions")
        dists = trajectory.distributions
    else:
        dists = np.atleast_2d(np.asarray(trajectory, dtype=float))
    N = (dists.shape[1] - 1) // 2
    x = np.arange(-N, N + 1, dtype=float)
    mean = dists @ x
    var = dists @ (x * x) - mean**2
    return SpreadSeries(np.arange(dists.shape[0]), mean, var)


def survival_series(trajectory, initial: WalkState | None = None) -> EchoSeries:
    """
    nu(t) = <psi(0)|psi(t)> at every recorded step.

    Uses the amplitudes accumulated during evolution when present; otherwise the
    stored state history is projected on ``initial`` (default: its first state).
    """
    if trajectory.nu is not None and initial is None:
        return EchoSeries(trajectory.nu.copy())
    if trajectory.states is None:
        raise ValueError("trajectory has neither survival amplitudes nor a state history")
    psi0 = initial if initial is not None else trajectory.states[0]
    return EchoSeries(np.array([psi0.overlap(s) for s in trajectory.states]))


def cesaro_average(echo: EchoSeries) -> CesaroSeries:
    if len(echo) < 1:
        raise ValueError("echo series is empty")
    e = echo.echo
    return CesaroSeries(np.cumsum(e) / np.arange(1, e.size + 1))


def echo_fourier(echo: EchoSeries) -> EchoSpectrum:
    """
    nu~(u) = (1/T) sum_t nu(t) exp(+i u t) on u = 2 pi m / T in (-pi, pi].

    With this sign a pure phase exp(-i eps t) peaks at u = eps, the same axis as
    the quasi-energies.
    """
    T = len(echo)
    if T < 2:
        raise ValueError("echo series needs at least two points")
    m = np.arange(-((T - 1) // 2), T // 2 + 1)
    u = 2 * math.pi * m / T
    # sum_t nu(t) e^{2 pi i m t / T} = T * ifft(nu)[m mod T]
    amp = np.fft.ifft(echo.nu)[m % T]
    return EchoSpectrum(u, amp)


def tail_mean(echo: EchoSeries, fraction: float = 0.1) -> float:
    """Mean |nu(t)| over the final ``fraction`` of the series."""
    n = max(1, int(round(len(echo) * fraction)))
    return float(np.mean(np.abs(echo.nu[-n:])))


@dataclass
class SpectralClassReport:
    tail_mean_abs_nu: float
    tail_threshold: float
    nu_vanishes: bool
    cesaro_model: str | None
    cesaro_decay_exponent: float | None
    cesaro_vanishes: bool
    singular_continuous: bool

    def to_dict(self) -> dict:
        return asdict(self)


_DECAY_TOL = 1e-9


def _decay_exponent(fit) -> float:
    # sign < 0 means the fitted Cesaro law tends to zero
    if fit.model == "power-law":
        return fit.params["alpha"]
    if fit.model == "scaled-power-law":
        return fit.params["beta"]
    alpha, beta = fit.params["alpha"], fit.params["beta"]
    return alpha if beta > 0 else 0.0


def spectral_class_report(
    echo: EchoSeries,
    cesaro: CesaroSeries | None = None,
    fits: Sequence | None = None,
    reference_tail: float | None = None,
    tail_fraction: float = 0.1,
    factor: float = 3.0,
) -> SpectralClassReport:
    """
    Operational spectral-type verdict from the survival amplitude.

    (i) nu(t) -> 0 if the tail mean of |nu| is below ``factor * reference_tail``
        (the tail mean of a reference walk known to decay); without a
        reference the tail mean must be numerically zero (< 1e-8).
    (ii) <|nu|^2>_T -> 0 if the best non-degenerate fit of the Cesaro series
        decays, i.e. its exponent is negative beyond two standard errors.
    (iii) singular continuous when (i) fails and (ii) holds.

    ``fits`` defaults to :func:`qwalk.fitting.model_select` over the default window.
    """
    from .fitting import model_select

    if len(echo) < 100:
        raise ValueError(f"series too short for classification ({len(echo)} < 100)")
    if cesaro is None:
        cesaro = cesaro_average(echo)
    if fits is None:
        fits = model_select(cesaro).candidates
    tail = tail_mean(echo, tail_fraction)
    threshold = factor * reference_tail if reference_tail is not None else 1e-8
    nu_vanishes = tail < threshold

    usable = [f for f in fits if not f.degenerate]
    best = min(usable, key=lambda f: f.residual) if usable else None
    exponent = _decay_exponent(best) if best is not None else None
    if best is None:
        cesaro_vanishes = False
    else:
        key = "alpha" if best.model in ("power-law", "stretched-exponential") else "beta"
        err = best.errors.get(key, 0.0)
        cesaro_vanishes = exponent < -_DECAY_TOL and exponent + 2 * err < 0
    return SpectralClassReport(
        tail_mean_abs_nu=tail,
        tail_threshold=threshold,
        nu_vanishes=bool(nu_vanishes),
        cesaro_model=best.model if best is not None else None,
        cesaro_decay_exponent=exponent,
        cesaro_vanishes=bool(cesaro_vanishes),
        singular_continuous=bool(not nu_vanishes and cesaro_vanishes),
    )


def spread_sweep(
    sequence: LetterString | str,
    theta1: float,
    theta2_values,
    steps: int,
    N: int,
    mode: str = "spatial",
    spin: str = "symmetric",
    boundary: str = "periodic",
) -> NDArray[np.float64]:
    """
    sigma(t) for a batch of theta2 values stepped together.

    Returns an array of shape (len(theta2_values), steps + 1).
    """
    letters = sequence.letters if isinstance(sequence, LetterString) else sequence
    theta2 = np.asarray(theta2_values, dtype=float).reshape(-1, 1)
    codes = np.frombuffer(letters.encode("ascii"), dtype=np.uint8)
    is_a = codes == ord("A")
    L = 2 * N + 1
    if mode == "spatial":
        if codes.size != L:
            raise ValueError(f"spatial sequence has length {codes.size}, lattice needs {L}")
        angles = np.where(is_a[None, :], theta1, theta2)
        cos, sin = np.cos(angles), np.sin(angles)
    elif mode == "temporal":
        if codes.size < steps:
            raise ValueError(f"temporal sequence has length {codes.size} < {steps} steps")
    else:
        raise ValueError(f"sweep mode must be spatial or temporal, got {mode!r}")

    psi = initial_state(N, spin)
    up = np.tile(psi.up, (theta2.shape[0], 1))
    down = np.tile(psi.down, (theta2.shape[0], 1))
    x = np.arange(-N, N + 1, dtype=float)
    sigma = np.zeros((theta2.shape[0], steps + 1))
    for t in range(steps):
        if mode == "temporal":
            angle = theta1 if is_a[t] else theta2
            cos, sin = np.cos(angle), np.sin(angle)
        up, down = rotate_shift(up, down, cos, sin, boundary)
        p = up.real**2 + up.imag**2 + down.real**2 + down.imag**2
        m = p @ x
        sigma[:, t + 1] = np.sqrt(np.maximum(p @ (x * x) - m * m, 0.0))
    return sigma

