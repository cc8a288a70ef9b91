"""
Command-line entry point.

    qwalk <spread|spectrum|survival|diffraction> --config PATH [--out DIR]
          [--override key=value ...] [--seed U64] [--no-plots] [-v]
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ExperimentConfig, load_config
from .errors import NumericalFailure
from .experiments import EXPERIMENTS, RUNNERS, check_config
from .io import relpaths, write_json

DESCRIPTIONS = {
    "spread": "probability distributions, sigma(t), and the sigma(theta2) sweep",
    "spectrum": "quasi-energy spectra and densities of states",
    "survival": "survival amplitude, Cesaro averages, echo spectrum and decay-law fits",
    "diffraction": "diffraction amplitudes of the coin weight function",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalk", description="Aperiodic discrete-time quantum walk experiments.")
    parser.add_argument("--version", action="version", version=f"qwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=DESCRIPTIONS[name])
        p.add_argument("--config", required=True, type=Path, help="flat key = value config file")
        p.add_argument("--out", type=Path, default=None, help="output directory (default: config output_dir)")
        p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE", help="override a config key; repeatable")
        p.add_argument("--seed", type=int, default=None, help="seed for random sequences (unsigned 64-bit)")
        p.add_argument("--no-plots", action="store_true", help="skip PNG figures")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _overrides(items) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"--override expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def resolve_config(args) -> ExperimentConfig:
    config = load_config(args.config)
    overrides = _overrides(args.override)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.no_plots:
        overrides["plots"] = "false"
    return config.with_overrides(overrides) if overrides else config


def run(command: str, config: ExperimentConfig, out: Path) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    files = RUNNERS[command](config, out)
    manifest = {
        "tool": "qwalk",
        "version": __version__,
        "command": command,
        "description": DESCRIPTIONS[command],
        "config": config.to_dict(),
        "config_sha256": config.sha256(),
        "steps": config.steps,
        "lattice_half_width": config.half_width(),
        "files": relpaths(files, out),
    }
    return write_json(out / "manifest.json", manifest)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        check_config(args.command, config)
    except (OSError, ValueError) as exc:
        print(f"qwalk: invalid configuration: {exc}", file=sys.stderr)
        return 2
    out = args.out if args.out is not None else Path(config.output_dir)
    try:
        manifest = run(args.command, config, out)
    except OSError as exc:
        print(f"qwalk: I/O error at {exc.filename or out}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"qwalk: numerical failure: {exc}", file=sys.stderr)
        return 3
    print(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
