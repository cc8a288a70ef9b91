import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwalk.errors import NumericalFailure
from qwalk.fitting import (
    ConvergenceError,
    MODELS,
    default_window,
    fit_power_law,
    fit_stretched_exponential,
    model_select,
)
from qwalk.observables import CesaroSeries

T = np.arange(1, 501, dtype=float)


def series(values):
    return CesaroSeries(np.asarray(values, dtype=float))


def test_default_window():
    assert default_window(500) == (101, 500)
    assert default_window(10) == (3, 10)


def test_power_law_exact():
    f = fit_power_law(series(T**-0.5))
    assert f.params["alpha"] == pytest.approx(-0.5, abs=1e-12)
    assert f.residual < 1e-12
    assert f.window == (101, 500)


def test_scaled_power_law_exact():
    f = fit_power_law(series(3 / T), scaled=True)
    assert f.params["alpha"] == pytest.approx(3, rel=1e-12)
    assert f.params["beta"] == pytest.approx(-1, abs=1e-12)


def test_stretched_exact():
    f = fit_stretched_exponential(series(np.exp(-0.1 * T**0.3)))
    assert f.params["alpha"] == pytest.approx(-0.1, abs=1e-6)
    assert f.params["beta"] == pytest.approx(0.3, abs=1e-6)
    assert not f.degenerate


def test_constant_series_degenerate():
    f = fit_stretched_exponential(series(np.ones(500)))
    assert f.degenerate
    sel = model_select(series(np.ones(500)))
    assert sel.best.model != "stretched-exponential"


def test_invalid_inputs():
    with pytest.raises(ValueError):
        fit_power_law(series(np.r_[np.ones(250), np.zeros(250)]))
    with pytest.raises(ValueError):
        fit_power_law(series(T**-1), window=(1, 5))
    with pytest.raises(ValueError):
        fit_power_law(series(T**-1), window=(10, 600))
    with pytest.raises(ValueError):
        fit_stretched_exponential(series(T**-1), window=(1, 15))
    with pytest.raises(ValueError):
        model_select(series(T**-1), models=("gaussian",))


def test_convergence_error_carries_iterate():
    with pytest.raises(ConvergenceError) as info:
        fit_stretched_exponential(series(np.exp(-0.1 * T**0.3) * (1 + 0.05 * np.sin(T))), max_iter=1)
    assert isinstance(info.value, NumericalFailure)
    assert set(info.value.detail) >= {"alpha", "beta"}


def test_model_select_examples():
    assert model_select(series(T**-0.7)).best.model in ("power-law", "scaled-power-law")
    assert model_select(series(T**-0.7), models=("power-law", "stretched-exponential")).best.model == "power-law"
    assert model_select(series(np.exp(-0.2 * T**0.3))).best.model == "stretched-exponential"


def test_to_dict_shape():
    sel = model_select(series(T**-0.5))
    d = sel.to_dict()
    assert d["selected"] == sel.best.model
    assert [f["model"] for f in d["fits"]] == list(MODELS)
    for f in d["fits"]:
        assert set(f) == {"model", "params", "uncertainties", "residual", "window", "degenerate"}


exps = st.floats(-2.0, -0.05)


@given(alpha=exps)
def test_power_law_recovery(alpha):
    f = fit_power_law(series(T**alpha))
    assert f.params["alpha"] == pytest.approx(alpha, rel=1e-6)


@given(a=st.floats(0.05, 20.0), beta=exps)
def test_scaled_recovery(a, beta):
    f = fit_power_law(series(a * T**beta), scaled=True)
    assert f.params["alpha"] == pytest.approx(a, rel=1e-6)
    assert f.params["beta"] == pytest.approx(beta, rel=1e-6)


@given(alpha=st.floats(-0.5, -0.01), beta=st.floats(0.05, 0.9))
@settings(max_examples=60, deadline=None)
def test_stretched_recovery(alpha, beta):
    f = fit_stretched_exponential(series(np.exp(alpha * T**beta)))
    assert f.params["alpha"] == pytest.approx(alpha, rel=1e-6)
    assert f.params["beta"] == pytest.approx(beta, rel=1e-6)


@given(beta=exps, c=st.floats(1e-3, 1e3))
def test_exponent_scale_covariance(beta, c):
    y = np.exp(0.01 * np.sin(T)) * T**beta
    a = fit_power_law(series(y), scaled=True)
    b = fit_power_law(series(c * y), scaled=True)
    assert abs(a.params["beta"] - b.params["beta"]) < 1e-10


@given(
    beta=exps,
    noise=st.floats(0.0, 0.2),
    freq=st.floats(0.01, 3.0),
)
@settings(max_examples=40, deadline=None)
def test_selected_residual_is_minimal(beta, noise, freq):
    y = T**beta * np.exp(noise * np.sin(freq * T))
    sel = model_select(series(y))
    usable = [f for f in sel.candidates if not f.degenerate] or sel.candidates
    assert all(sel.best.residual <= f.residual for f in usable)
    for f in sel.candidates:
        assert f.residual >= 0
        assert all(e >= 0 for e in f.errors.values())
        assert 1 <= f.window[0] <= f.window[1] <= T.size
