"""
Figures for the experiment runner.

Every function takes plain arrays, draws one figure with the Agg backend and
writes it to ``path``. matplotlib is imported lazily so the numerical modules
never pull in a GUI toolkit.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

SHORT = {"two-periodic": "2P", "fibonacci": "Fb", "thue-morse": "TM", "rudin-shapiro": "RS", "random": "Rnd"}

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "savefig.dpi": 150,
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update(_RC)
    return plt


def _figsize(scale=1.0):
    width = 4.8 * scale
    return (width, width * (math.sqrt(5.0) - 1.0) / 2.0)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no timestamp metadata, so reruns produce the same bytes
    fig.savefig(path, metadata={"Software": None}, bbox_inches="tight")
    import matplotlib.pyplot as plt

    plt.close(fig)
    return path


def _pi_ticks(ax, axis="x"):
    ticks = np.array([-1, -0.5, 0, 0.5, 1]) * math.pi
    labels = [r"$-\pi$", r"$-\pi/2$", "0", r"$\pi/2$", r"$\pi$"]
    if axis == "x":
        ax.set_xticks(ticks, labels)
    else:
        ax.set_yticks(ticks, labels)


def plot_distribution(path, x, p, title=""):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=_figsize())
    mask = p > 0
    ax.plot(np.asarray(x)[mask], np.asarray(p)[mask], lw=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel(r"$p_x$")
    ax.set_title(title)
    return _save(fig, path)


def plot_sigma(path, t, sigmas: dict, title=""):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=_figsize())
    for name, s in sigmas.items():
        ax.plot(t, s, lw=0.9, label=SHORT.get(name, name))
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\sigma(t)$")
    ax.legend(frameon=False)
    ax.set_title(title)
    return _save(fig, path)


def plot_sweep(path, theta2, sigmas: dict, title=""):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=_figsize())
    for name, s in sigmas.items():
        ax.plot(theta2, s, lw=0.9, marker=".", ms=2, label=SHORT.get(name, name))
    ax.set_xticks(np.arange(5) * math.pi / 2, ["0", r"$\pi/2$", r"$\pi$", r"$3\pi/2$", r"$2\pi$"])
    ax.set_xlabel(r"$\theta_2$")
    ax.set_ylabel(r"$\sigma$")
    ax.legend(frameon=False)
    ax.set_title(title)
    return _save(fig, path)


def plot_spectrum(path, energies, dos_centers=None, dos_weights=None, title=""):
    plt = _pyplot()
    ncols = 1 if dos_centers is None else 2
    fig, axes = plt.subplots(1, ncols, figsize=_figsize(1.0 + 0.6 * (ncols - 1)), squeeze=False)
    ax = axes[0, 0]
    ax.plot(np.arange(len(energies)), energies, ".", ms=1)
    ax.set_xlabel("n")
    ax.set_ylabel(r"$\epsilon_n$")
    _pi_ticks(ax, "y")
    if dos_centers is not None:
        ax = axes[0, 1]
        ax.bar(dos_centers, dos_weights, width=dos_centers[1] - dos_centers[0], lw=0)
        ax.set_xlabel(r"$\epsilon$")
        ax.set_ylabel("DOS")
        _pi_ticks(ax)
    fig.suptitle(title)
    return _save(fig, path)


def plot_survival(path, t, nu_abs, T, cesaro, fit_curves: dict | None = None, title=""):
    plt = _pyplot()
    fig, (a1, a2) = plt.subplots(1, 2, figsize=_figsize(1.6))
    a1.plot(t, nu_abs, lw=0.6)
    a1.set_xlabel("t")
    a1.set_ylabel(r"$|\nu(t)|$")
    a2.loglog(T, cesaro, lw=0.9, label="data")
    for name, curve in (fit_curves or {}).items():
        a2.loglog(curve[0], curve[1], "--", lw=0.8, label=name)
    a2.set_xlabel("T")
    a2.set_ylabel(r"$\langle|\nu|^2\rangle_T$")
    a2.legend(frameon=False)
    fig.suptitle(title)
    return _save(fig, path)


def plot_echo_spectrum(path, u, magnitude, title=""):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=_figsize())
    ax.plot(u, magnitude, lw=0.7)
    ax.set_xlabel("u")
    ax.set_ylabel(r"$|\tilde\nu(u)|$")
    _pi_ticks(ax)
    ax.set_title(title)
    return _save(fig, path)


def plot_diffraction(path, q, intensity, title=""):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=_figsize())
    ax.plot(q, intensity, lw=0.6)
    ax.set_xlabel("q")
    ax.set_ylabel(r"$|\tilde f(q)|^2$")
    _pi_ticks(ax)
    ax.set_title(title)
    return _save(fig, path)
