"""Exact analysis of three-user information-theoretically secure computation."""

__version__ = "0.1.0"
