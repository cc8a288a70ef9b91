"""
Experiment runners behind the ``qwalk`` subcommands.

Each runner takes an :class:`ExperimentConfig` and an output directory,
writes CSV/JSON files (and PNG figures when ``config.plots`` is set) and
returns the list of written paths.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from . import plotting
from .config import ExperimentConfig
from .fitting import default_window, model_select
from .io import write_csv, write_json, write_state
from .observables import (
    cesaro_average,
    echo_fourier,
    spectral_class_report,
    spread,
    spread_sweep,
    survival_series,
    tail_mean,
)
from .sequences import generate, weight_function
from .spectral import (
    asymptotic_operator,
    assemble_step_operator,
    circular_hausdorff,
    diffraction_spectrum,
    dos,
    gap_statistics,
    quasi_energies,
)
from .walk import evolve, initial_state, make_config

log = logging.getLogger(__name__)

EXPERIMENTS = ("spread", "spectrum", "survival", "diffraction")


def check_config(command: str, config: ExperimentConfig) -> None:
    """Reject configs a runner cannot honour, before any work starts."""
    if command not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {command!r}")
    if command == "survival" and min(config.steps, config.extended_steps or config.steps) < 100:
        raise ValueError("survival runs need at least 100 steps")
    if command in ("spread", "survival") and 0 < config.lattice_half_width < config.steps + 1:
        log.warning("lattice_half_width < steps + 1: the walk will reach the boundary")


def _tag(kind: str, mode: str) -> str:
    return f"{kind}_{mode}"


def _walk(config: ExperimentConfig, kind: str, steps: int, spin: str, record):
    N = config.half_width(steps)
    coin = make_config(kind, config.theta1, config.theta2, config.mode, N, steps, config.seed)
    return evolve(coin, N, steps, config.boundary, initial_state(N, spin), record)


def run_spread(config: ExperimentConfig, out) -> list[Path]:
    """Final distribution, sigma(t) per sequence, and optionally the theta2 sweep."""
    out = Path(out)
    files = []
    spin = config.spin("spread")
    kinds = ("homogeneous",) if config.mode == "homogeneous" else config.sequences
    sigmas = {}
    t = None
    for kind in kinds:
        tag = _tag(kind, config.mode)
        log.info("spread: %s", tag)
        traj = _walk(config, kind, config.steps, spin, ("spread",))
        s = spread(traj)
        sigma = s.sigma
        sigmas[kind] = sigma
        t = s.t
        p = np.abs(traj.final.up) ** 2 + np.abs(traj.final.down) ** 2
        x = traj.final.x
        files.append(write_csv(out / f"distribution_{tag}.csv", ["t", "x", "p_x"], [np.full(x.size, config.steps), x, p]))
        files.append(write_csv(out / f"spread_{tag}.csv", ["t", "mean", "sigma"], [s.t, s.mean, sigma]))
        files.append(write_state(out / f"state_{tag}.csv", traj.final))
        if config.plots:
            files.append(plotting.plot_distribution(out / f"distribution_{tag}.png", x, p, f"{kind}, {config.mode}, t={config.steps}"))
    if config.plots:
        files.append(plotting.plot_sigma(out / f"sigma_{config.mode}.png", t, sigmas, config.mode))

    if config.sweep and config.mode in ("spatial", "temporal"):
        theta2 = 2 * math.pi * np.arange(config.sweep_points) / config.sweep_points
        N = config.half_width()
        final = {}
        for kind in config.sequences:
            log.info("sweep: %s %s", kind, config.mode)
            length = 2 * N + 1 if config.mode == "spatial" else config.steps
            seq = generate(kind, length, config.seed)
            sig = spread_sweep(seq, config.theta1, theta2, config.steps, N, config.mode, spin, config.boundary)
            final[kind] = sig[:, -1]
        files.append(
            write_csv(
                out / f"sigma_sweep_{config.mode}.csv",
                ["theta2"] + [f"sigma_{k}" for k in final],
                [theta2] + list(final.values()),
            )
        )
        if config.plots:
            files.append(plotting.plot_sweep(out / f"sigma_sweep_{config.mode}.png", theta2, final, f"{config.mode}, t={config.steps}"))
    return files


def _write_spectrum(out, name, spec, t_f, plots, title):
    files = [
        write_csv(
            out / f"spectrum_{name}.csv",
            ["n", "re_lambda", "im_lambda", "epsilon"],
            [np.arange(len(spec)), spec.eigenvalues.real, spec.eigenvalues.imag, spec.energies],
        )
    ]
    d = dos(spec, t_f)
    files.append(write_csv(out / f"dos_{name}.csv", ["bin_center", "weight"], [d.bin_centers, d.weights]))
    if plots:
        files.append(plotting.plot_spectrum(out / f"spectrum_{name}.png", spec.energies, d.bin_centers, d.weights, title))
    return files


def run_spectrum(config: ExperimentConfig, out) -> list[Path]:
    """Quasi-energies and DOS of the single-step operator (spatial/homogeneous) or of U(t) (temporal)."""
    out = Path(out)
    files = []
    N = config.half_width()
    summary = {"N": N, "t_f": config.t_f, "spectra": {}}
    if config.mode == "homogeneous":
        op = assemble_step_operator(config.theta1, N, "periodic", "single-step homogeneous")
        spec = quasi_energies(op)
        files += _write_spectrum(out, "homogeneous", spec, config.t_f, config.plots, f"theta={config.theta1:.4f}")
        summary["spectra"]["homogeneous"] = gap_statistics(spec)
    elif config.mode == "spatial":
        for kind in config.sequences:
            log.info("spectrum: %s spatial", kind)
            coin = make_config(kind, config.theta1, config.theta2, "spatial", N, config.steps, config.seed)
            spec = quasi_energies(assemble_step_operator(coin, N, "periodic"))
            files += _write_spectrum(out, _tag(kind, "spatial"), spec, config.t_f, config.plots, f"{kind}, spatial")
            summary["spectra"][_tag(kind, "spatial")] = gap_statistics(spec)
    else:
        for label, theta in (("theta1", config.theta1), ("theta2", config.theta2)):
            spec = quasi_energies(assemble_step_operator(theta, N, "periodic", f"single-step {label}"))
            files += _write_spectrum(out, f"instantaneous_{label}", spec, config.t_f, config.plots, f"W({label})")
        times = config.times
        for kind in config.sequences:
            energies = {}
            coin = make_config(kind, config.theta1, config.theta2, "temporal", N, max(times), config.seed)
            for t in times:
                log.info("spectrum: %s temporal U(%d)", kind, t)
                spec = quasi_energies(asymptotic_operator(coin, N, t))
                name = f"{_tag(kind, 'temporal')}_t{t}"
                files += _write_spectrum(out, name, spec, config.t_f, config.plots, f"{kind}, U({t})")
                summary["spectra"][name] = gap_statistics(spec)
                energies[t] = spec.energies
            summary["spectra"][_tag(kind, "temporal")] = {
                "hausdorff_to_last": {str(t): circular_hausdorff(energies[t], energies[times[-1]]) for t in times},
                "dos_bin_width": 2 * math.pi / config.t_f,
            }
    files.append(write_json(out / "spectrum_summary.json", summary))
    return files


def run_survival(config: ExperimentConfig, out) -> list[Path]:
    """Survival amplitude, Cesaro average, echo spectrum, decay fits and spectral verdict per sequence."""
    check_config("survival", config)
    out = Path(out)
    files = []
    spin = config.spin("survival")
    kinds = ("homogeneous",) if config.mode == "homogeneous" else config.sequences

    def echo_for(kind):
        steps = config.steps
        if kind == "rudin-shapiro" and config.extended_steps:
            steps = config.extended_steps
        traj = _walk(config, kind, steps, spin, ("survival",))
        return survival_series(traj).truncate(steps)

    reference = None
    if config.mode != "homogeneous":
        reference = tail_mean(echo_for("two-periodic"), config.tail_fraction)

    for kind in kinds:
        tag = _tag(kind, config.mode)
        log.info("survival: %s", tag)
        echo = echo_for(kind)
        ces = cesaro_average(echo)
        spec = echo_fourier(echo)
        n = len(ces)
        window = (n - int(config.fit_fraction * n) + 1, n) if config.fit_fraction < 1 else default_window(n)
        selection = model_select(ces, window)
        report = spectral_class_report(
            echo, ces, selection.candidates, reference_tail=reference, tail_fraction=config.tail_fraction
        )
        files.append(write_csv(out / f"echo_{tag}.csv", ["t", "re_nu", "im_nu", "abs_nu2"], [echo.t, echo.nu.real, echo.nu.imag, echo.echo]))
        files.append(write_csv(out / f"cesaro_{tag}.csv", ["T", "value"], [ces.T, ces.value]))
        files.append(write_csv(out / f"echo_spectrum_{tag}.csv", ["u", "abs_nu_tilde"], [spec.u, spec.magnitude]))
        files.append(write_json(out / f"fits_{tag}.json", selection.to_dict()))
        files.append(write_json(out / f"classification_{tag}.json", report.to_dict()))
        if config.plots:
            Tw = ces.T[window[0] - 1 :]
            curves = {f.model: (Tw, f.predict(Tw)) for f in selection.candidates}
            files.append(plotting.plot_survival(out / f"survival_{tag}.png", echo.t, np.abs(echo.nu), ces.T, ces.value, curves, tag))
            files.append(plotting.plot_echo_spectrum(out / f"echo_spectrum_{tag}.png", spec.u, spec.magnitude, tag))
    return files


def run_diffraction(config: ExperimentConfig, out) -> list[Path]:
    """Diffraction amplitudes of the weight function on L = 2N+1 sites plus a peak table."""
    out = Path(out)
    files = []
    N = config.half_width()
    summary = {"N": N, "L": 2 * N + 1, "sequences": {}}
    for kind in config.sequences:
        w = weight_function(generate(kind, 2 * N + 1, config.seed))
        ds = diffraction_spectrum(w)
        inten = ds.intensity
        files.append(
            write_csv(out / f"diffraction_{kind}.csv", ["q", "re_f", "im_f", "abs_f2"], [ds.q, ds.amplitudes.real, ds.amplitudes.imag, inten])
        )
        peaks = ds.peaks(config.peaks)
        files.append(
            write_csv(
                out / f"diffraction_peaks_{kind}.csv",
                ["rank", "q", "abs_f2"],
                [np.arange(1, len(peaks) + 1), [p[0] for p in peaks], [p[1] for p in peaks]],
            )
        )
        summary["sequences"][kind] = {
            "max_over_mean_intensity": float(inten.max() / inten.mean()),
            "total_intensity": float(inten.sum()),
        }
        if config.plots:
            files.append(plotting.plot_diffraction(out / f"diffraction_{kind}.png", ds.q, inten, kind))
    files.append(write_json(out / "diffraction_summary.json", summary))
    return files


RUNNERS = {
    "spread": run_spread,
    "spectrum": run_spectrum,
    "survival": run_survival,
    "diffraction": run_diffraction,
}
