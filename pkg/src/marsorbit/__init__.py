"""Simulation and feasibility toolkit for a low-Mars-orbit compute constellation."""

__version__ = "0.1.0"
