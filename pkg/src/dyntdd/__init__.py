"""Discrete-time system-level simulator for coordinated dynamic-TDD clusters."""

__version__ = "0.1.0"
