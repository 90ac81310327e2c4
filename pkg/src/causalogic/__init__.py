"""Exact reasoning engine for finite structural-equation models."""

__version__ = "0.1.0"
