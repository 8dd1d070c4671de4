"""Entanglement diagnostics of critical chains under local quantum channels."""

__version__ = "0.1.0"
