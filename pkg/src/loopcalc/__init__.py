"""Exact chain calculus and numerics for chains on based loop spaces."""

__version__ = "0.1.0"
