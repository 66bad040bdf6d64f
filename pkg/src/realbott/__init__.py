"""Spin structures and Stiefel-Whitney classes of real Bott manifolds."""

__version__ = "0.1.0"
