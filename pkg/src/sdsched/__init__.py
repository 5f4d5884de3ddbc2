"""Simultaneous dynamic scheduling of processes and their energy systems."""

__version__ = "0.1.0"
