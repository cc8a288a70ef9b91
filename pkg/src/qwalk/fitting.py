"""
Decay-law fits for Cesaro-averaged survival probabilities.

All fits are least squares on log(value) with uniform weights:

    power-law               log f = alpha * log T
    scaled-power-law        log f = log(alpha) + beta * log T
    stretched-exponential   log f = alpha * T**beta

Parameter uncertainties are one-sigma estimates from the local quadratic
model, s^2 (J^T J)^-1 with s^2 the residual variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailure
from .observables import CesaroSeries

__all__ = [
    "MODELS",
    "ConvergenceError",
    "FitResult",
    "Selection",
    "default_window",
    "fit_power_law",
    "fit_stretched_exponential",
    "model_select",
]

MODELS = ("power-law", "scaled-power-law", "stretched-exponential")

MAX_ITER = 500
REL_TOL = 1e-10


class ConvergenceError(NumericalFailure):
    """Raised when the stretched-exponential iteration exhausts its budget."""


@dataclass
class FitResult:
    model: str
    params: dict[str, float]
    errors: dict[str, float]
    residual: float
    window: tuple[int, int]
    degenerate: bool = False
    iterations: int = 0

    def predict(self, T) -> np.ndarray:
        T = np.asarray(T, dtype=float)
        p = self.params
        if self.model == "power-law":
            return T ** p["alpha"]
        if self.model == "scaled-power-law":
            return p["alpha"] * T ** p["beta"]
        return np.exp(p["alpha"] * T ** p["beta"])

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "uncertainties": dict(self.errors),
            "residual": self.residual,
            "window": list(self.window),
            "degenerate": self.degenerate,
        }


@dataclass
class Selection:
    best: FitResult
    candidates: list[FitResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "selected": self.best.model,
            "fits": [f.to_dict() for f in self.candidates],
        }


def default_window(n: int) -> tuple[int, int]:
    """Last 80% of T = 1..n."""
    return (n - int(0.8 * n) + 1, n)


def _window_data(series, window, min_len):
    if isinstance(series, CesaroSeries):
        T_all, y_all = series.T, series.value
    else:
        T_all, y_all = np.asarray(series[0], dtype=float), np.asarray(series[1], dtype=float)
    if window is None:
        window = default_window(T_all.size)
    lo, hi = int(window[0]), int(window[1])
    if lo < T_all[0] or hi > T_all[-1] or lo > hi:
        raise ValueError(f"window {window} outside data range [{T_all[0]}, {T_all[-1]}]")
    mask = (T_all >= lo) & (T_all <= hi)
    T, y = T_all[mask].astype(float), y_all[mask]
    if T.size < min_len:
        raise ValueError(f"window {window} holds {T.size} points, need at least {min_len}")
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("values in the fit window must be finite and strictly positive")
    return T, np.log(y), (lo, hi)


def _rms(r) -> float:
    return float(np.sqrt(np.mean(r * r)))


def _covariance(J, r):
    n, k = J.shape
    dof = max(n - k, 1)
    s2 = float(r @ r) / dof
    try:
        cov = np.linalg.inv(J.T @ J) * s2
    except np.linalg.LinAlgError:
        return np.full(k, np.inf)
    return np.sqrt(np.maximum(np.diag(cov), 0.0))


def fit_power_law(series, window=None, scaled: bool = False) -> FitResult:
    """
    Linear least squares of log(value) against log(T).

    ``scaled=False`` fits f(T) = T**alpha (no intercept); ``scaled=True`` fits
    f(T) = alpha * T**beta.
    """
    T, logy, window = _window_data(series, window, 10)
    logT = np.log(T)
    if scaled:
        J = np.column_stack([np.ones_like(logT), logT])
    else:
        J = logT[:, None]
    if np.ptp(logT) == 0:
        raise ValueError("degenerate window: a single T value")
    coef, *_ = np.linalg.lstsq(J, logy, rcond=None)
    r = logy - J @ coef
    err = _covariance(J, r)
    if scaled:
        a = math.exp(coef[0])
        params = {"alpha": a, "beta": float(coef[1])}
        # delta(alpha) = alpha * delta(log alpha)
        errors = {"alpha": a * float(err[0]), "beta": float(err[1])}
        model = "scaled-power-law"
    else:
        params = {"alpha": float(coef[0])}
        errors = {"alpha": float(err[0])}
        model = "power-law"
    return FitResult(model, params, errors, _rms(r), window)


def _stretched_initial(T, logy):
    # log(-log y) = log(-alpha) + beta log T for decays, log(log y) for growth
    logT = np.log(T)
    for sign in (-1.0, 1.0):
        z = sign * logy
        if np.all(z > 0):
            A = np.column_stack([np.ones_like(logT), logT])
            c, *_ = np.linalg.lstsq(A, np.log(z), rcond=None)
            return np.array([sign * math.exp(c[0]), float(c[1])])
    return np.array([float(np.mean(logy)), 0.0])


def fit_stretched_exponential(series, window=None, max_iter: int = MAX_ITER, rel_tol: float = REL_TOL) -> FitResult:
    """
    Fit f(T) = exp(alpha * T**beta) by Levenberg-Marquardt on log f.

    Iteration stops when the relative parameter change drops below
    ``rel_tol``; otherwise :class:`ConvergenceError` is raised with the last
    iterate in ``detail``. The result is flagged ``degenerate`` when beta (or
    alpha, which makes beta unidentifiable) cannot be told apart from zero.
    """
    T, logy, window = _window_data(series, window, 20)
    logT = np.log(T)
    p = _stretched_initial(T, logy)

    def residual(p):
        return logy - p[0] * T ** p[1]

    def jacobian(p):
        Tb = T ** p[1]
        return np.column_stack([Tb, p[0] * Tb * logT])

    r = residual(p)
    cost = float(r @ r)
    lam = 1e-3
    scale = float(logy @ logy) + 1e-300
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if cost <= 1e-28 * scale:
            converged = True
            break
        J = jacobian(p)
        A = J.T @ J
        g = J.T @ r
        while True:
            damped = A + lam * np.diag(np.maximum(np.diag(A), 1e-300))
            try:
                dp = np.linalg.solve(damped, g)
            except np.linalg.LinAlgError:
                dp = np.linalg.lstsq(damped, g, rcond=None)[0]
            trial = p + dp
            r_trial = residual(trial)
            cost_trial = float(r_trial @ r_trial)
            if np.isfinite(cost_trial) and cost_trial <= cost:
                break
            lam *= 10.0
            if lam > 1e16:
                dp = np.zeros_like(p)
                trial, r_trial, cost_trial = p, r, cost
                break
        p, r, cost = trial, r_trial, cost_trial
        lam = max(lam / 10.0, 1e-12)
        if np.linalg.norm(dp) <= rel_tol * (np.linalg.norm(p) + rel_tol):
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"stretched-exponential fit did not converge in {max_iter} iterations",
            detail={"alpha": float(p[0]), "beta": float(p[1]), "rms": _rms(r)},
        )

    err = _covariance(jacobian(p), r)
    alpha, beta = float(p[0]), float(p[1])
    ea, eb = float(err[0]), float(err[1])
    degenerate = bool(
        abs(alpha) < 1e-12
        or abs(beta) < 1e-8
        or not np.isfinite(eb)
        or (eb > 0 and abs(beta) < 2 * eb)
    )
    return FitResult(
        "stretched-exponential",
        {"alpha": alpha, "beta": beta},
        {"alpha": ea, "beta": eb},
        _rms(r),
        window,
        degenerate=degenerate,
        iterations=it,
    )


def _fit(model, series, window):
    if model == "power-law":
        return fit_power_law(series, window)
    if model == "scaled-power-law":
        return fit_power_law(series, window, scaled=True)
    if model == "stretched-exponential":
        return fit_stretched_exponential(series, window)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def model_select(series, window=None, models=MODELS) -> Selection:
    """
    Fit every model in ``models`` and pick the lowest log-space RMS residual.

    Degenerate fits are reported but only selected if nothing else is left.
    """
    fits = [_fit(m, series, window) for m in models]
    usable = [f for f in fits if not f.degenerate] or fits
    best = min(usable, key=lambda f: f.residual)
    return Selection(best, fits)
