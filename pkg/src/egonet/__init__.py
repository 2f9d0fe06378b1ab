"""Ego-network analysis of tweet timelines."""

__version__ = "0.1.0"
