"""Dynamics, control, and teleoperation simulator for a suspended dual-arm aerial avatar."""

__version__ = "0.1.0"
