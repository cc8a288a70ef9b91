"""
Dense evolution operators and their spectra.

Operators act on the flattened state vector (up block, down block) of length
2L used by :meth:`qwalk.walk.WalkState.vector`. Quasi-energies follow
eps = i log(lambda) on the principal branch, i.e. eps = -arg(lambda) in
(-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import NumericalFailure
from .walk import CoinConfig, coin_matrix, rotate_shift

__all__ = [
    "DensityOfStates",
    "DiffractionSpectrum",
    "QuasiEnergySpectrum",
    "UnitaryOperator",
    "assemble_step_operator",
    "asymptotic_operator",
    "circular_hausdorff",
    "coin_decomposition",
    "diffraction_spectrum",
    "dos",
    "gap_statistics",
    "quasi_energies",
    "widest_gaps",
]

UNITARITY_TOL = 1e-6


@dataclass
class UnitaryOperator:
    matrix: NDArray[np.complex128]
    N: int
    boundary: str = "periodic"
    provenance: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def unitarity_defect(self) -> float:
        """Frobenius norm of U^dagger U - I."""
        U = self.matrix
        return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])))

    def apply(self, v):
        return self.matrix @ v


@dataclass
class QuasiEnergySpectrum:
    energies: NDArray[np.float64]
    eigenvalues: NDArray[np.complex128]
    provenance: str = ""

    def __len__(self) -> int:
        return len(self.energies)


@dataclass
class DensityOfStates:
    """
    Normalized quasi-energy histogram on the circle.

    Bin j is centred on -pi + (j+1) * width (so the last centre is pi) and
    covers (centre - width/2, centre + width/2]; the last bin wraps around
    -pi.
    """

    bin_centers: NDArray[np.float64]
    weights: NDArray[np.float64]
    width: float

    @property
    def bin_edges(self) -> NDArray[np.float64]:
        return np.append(self.bin_centers - self.width / 2, self.bin_centers[-1] + self.width / 2)

    def local_maxima(self) -> NDArray[np.int64]:
        """Indices of occupied bins not exceeded by either circular neighbour."""
        w = self.weights
        left, right = np.roll(w, 1), np.roll(w, -1)
        return np.flatnonzero((w > 0) & (w >= left) & (w >= right))


@dataclass
class DiffractionSpectrum:
    q: NDArray[np.float64]
    amplitudes: NDArray[np.complex128]

    @property
    def intensity(self) -> NDArray[np.float64]:
        return np.abs(self.amplitudes) ** 2

    def peaks(self, count: int = 10) -> list[tuple[float, float]]:
        """The ``count`` largest intensities as (q, |f|^2), strongest first."""
        inten = self.intensity
        order = np.argsort(-inten, kind="stable")[:count]
        return [(float(self.q[i]), float(inten[i])) for i in order]


def assemble_step_operator(theta_of_x, N: int, boundary: str = "periodic", provenance: str = "") -> UnitaryOperator:
    """
    Dense single-step operator S (sum_x |x><x| (x) C(theta(x))).

    ``theta_of_x`` is a scalar (homogeneous coin), a per-site array of length
    2N+1, or a spatial/homogeneous :class:`CoinConfig`.
    """
    L = 2 * N + 1
    if isinstance(theta_of_x, CoinConfig):
        provenance = provenance or f"single-step {theta_of_x.mode}"
        theta_of_x = theta_of_x.site_angles(N)
    theta = np.broadcast_to(np.asarray(theta_of_x, dtype=float), (L,)) if np.ndim(theta_of_x) == 0 else np.asarray(theta_of_x, dtype=float)
    if theta.shape != (L,):
        raise ValueError(f"coin assignment has {theta.size} sites, lattice has {L}")
    if boundary not in ("periodic", "open"):
        raise ValueError(f"unknown boundary {boundary!r}")
    c, s = np.cos(theta), np.sin(theta)
    i = np.arange(L)
    left, right = i - 1, i + 1
    if boundary == "periodic":
        keep_l = keep_r = np.ones(L, dtype=bool)
        left, right = left % L, right % L
    else:
        keep_l, keep_r = left >= 0, right < L
    M = np.zeros((2 * L, 2 * L), dtype=np.complex128)
    M[left[keep_l], i[keep_l]] = c[keep_l]
    M[left[keep_l], L + i[keep_l]] = -s[keep_l]
    M[L + right[keep_r], i[keep_r]] = s[keep_r]
    M[L + right[keep_r], L + i[keep_r]] = c[keep_r]
    return UnitaryOperator(M, N, boundary, provenance or "single-step")


def asymptotic_operator(config: CoinConfig, N: int, t: int, boundary: str = "periodic") -> UnitaryOperator:
    """
    Accumulated temporal product U(t) = W(theta(t)) ... W(theta(1)).

    Built by stepping every basis vector through ``t`` walk steps, which costs
    O(t L^2) instead of t dense matrix products.
    """
    if config.mode != "temporal":
        raise ValueError("asymptotic_operator needs a temporal config")
    if t < 1:
        raise ValueError(f"t must be >= 1 (got {t})")
    angles = config.step_angles(t)
    L = 2 * N + 1
    # row k of (up, down) holds basis column k
    eye = np.eye(2 * L, dtype=np.complex128)
    up, down = eye[:, :L].copy(), eye[:, L:].copy()
    for theta in angles:
        up, down = rotate_shift(up, down, math.cos(theta), math.sin(theta), boundary)
    U = np.vstack([up.T, down.T])
    return UnitaryOperator(U, N, boundary, f"temporal product U({t})")


def _principal_energies(lam: NDArray[np.complex128]) -> NDArray[np.float64]:
    eps = -np.angle(lam)
    eps[eps <= -math.pi] = math.pi
    return eps


def quasi_energies(U, tol: float = UNITARITY_TOL) -> QuasiEnergySpectrum:
    """
    Sorted quasi-energies eps_n = i log(lambda_n) of a (near-)unitary operator.

    Eigenvalues come from a general dense eigensolver; if any |lambda| differs
    from 1 by more than ``tol`` a :class:`NumericalFailure` is raised with the
    deviation in ``detail``.
    """
    provenance = ""
    if isinstance(U, UnitaryOperator):
        provenance = U.provenance
        U = U.matrix
    U = np.atleast_2d(np.asarray(U, dtype=np.complex128))
    lam = np.linalg.eigvals(U)
    deviation = float(np.max(np.abs(np.abs(lam) - 1.0)))
    if deviation > tol:
        raise NumericalFailure(
            f"operator {provenance or '(unnamed)'} is not unitary: max ||lambda|-1| = {deviation:.3e}",
            detail=deviation,
        )
    eps = _principal_energies(lam)
    order = np.argsort(eps, kind="stable")
    return QuasiEnergySpectrum(eps[order], lam[order], provenance)


def dos(spectrum, t_f: int) -> DensityOfStates:
    """Histogram of quasi-energies with bin width 2 pi / t_f, weights summing to 1."""
    if t_f < 2:
        raise ValueError(f"t_f must be >= 2 (got {t_f})")
    eps = spectrum.energies if isinstance(spectrum, QuasiEnergySpectrum) else np.asarray(spectrum, dtype=float)
    width = 2 * math.pi / t_f
    centers = -math.pi + width * np.arange(1, t_f + 1)
    r = (eps + math.pi) / width
    # snap rounding noise onto exact half-way points so ties break consistently
    half = np.round(2 * r) / 2
    r = np.where(np.abs(r - half) < 1e-9 * max(1.0, t_f), half, r)
    # nearest centre, with half-way points going to the lower bin
    j = np.ceil(r - 0.5).astype(np.int64) - 1
    j = np.mod(j, t_f)
    counts = np.bincount(j, minlength=t_f).astype(float)
    return DensityOfStates(centers, counts / counts.sum(), width)


def diffraction_spectrum(w) -> DiffractionSpectrum:
    """
    f(q) = (1/L) sum_{x=-N}^{N} exp(i q x) w(x) on q = 2 pi m / L, m = -N..N.
    """
    w = np.asarray(w, dtype=float)
    L = w.size
    if L % 2 == 0:
        raise ValueError(f"weight function must cover an odd number of sites 2N+1 (got {L})")
    N = L // 2
    m = np.arange(-N, N + 1)
    q = 2 * math.pi * m / L
    # sum_i e^{i q (i - N)} w_i = e^{-i q N} * L * ifft(w)[m mod L]
    f = np.fft.ifft(w)[m % L] * np.exp(-1j * q * N)
    return DiffractionSpectrum(q, f)


def coin_decomposition(theta1: float, theta2: float):
    """Mean and half-difference coins, C(theta1) = mean + delta, C(theta2) = mean - delta."""
    c1, c2 = coin_matrix(theta1), coin_matrix(theta2)
    return (c1 + c2) / 2, (c1 - c2) / 2


def _circular_gaps(eps: NDArray[np.float64]) -> NDArray[np.float64]:
    e = np.sort(np.asarray(eps, dtype=float))
    return np.diff(np.append(e, e[0] + 2 * math.pi))


def gap_statistics(spectrum, factor: float = 10.0) -> dict:
    """Largest gap, mean spacing, and the number of gaps wider than ``factor`` mean spacings."""
    eps = spectrum.energies if isinstance(spectrum, QuasiEnergySpectrum) else np.asarray(spectrum)
    gaps = _circular_gaps(eps)
    mean = 2 * math.pi / gaps.size
    return {
        "largest_gap": float(gaps.max()),
        "mean_spacing": mean,
        "wide_gap_count": int(np.sum(gaps > factor * mean)),
        "factor": factor,
    }


def widest_gaps(spectrum, count: int = 3) -> list[tuple[float, float]]:
    """The ``count`` widest circular gaps as (gap centre, width), widest first."""
    eps = np.sort(spectrum.energies if isinstance(spectrum, QuasiEnergySpectrum) else np.asarray(spectrum))
    gaps = _circular_gaps(eps)
    order = np.argsort(-gaps, kind="stable")[:count]
    centres = np.angle(np.exp(1j * (eps[order] + gaps[order] / 2)))
    return [(float(c), float(g)) for c, g in zip(centres, gaps[order])]


def _directed_circular(a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
    b = np.sort(b)
    ext = np.concatenate([b - 2 * math.pi, b, b + 2 * math.pi])
    j = np.searchsorted(ext, a)
    return float(np.max(np.minimum(a - ext[j - 1], ext[j] - a)))


def circular_hausdorff(a, b) -> float:
    """Hausdorff distance between two sets of angles, measured along the circle."""
    a = np.angle(np.exp(1j * np.asarray(a, dtype=float)))
    b = np.angle(np.exp(1j * np.asarray(b, dtype=float)))
    return max(_directed_circular(a, b), _directed_circular(b, a))
