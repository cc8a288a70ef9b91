"""Aperiodic discrete-time quantum walks."""

__version__ = "0.1.0"
