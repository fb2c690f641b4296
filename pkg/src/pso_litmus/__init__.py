"""Explicit-state checking of litmus programs under PSO and prophetic PSO."""

__version__ = "0.1.0"
