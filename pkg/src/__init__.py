"""Simulation of production networks with load-dependent random capacities."""

__version__ = "0.1.0"
