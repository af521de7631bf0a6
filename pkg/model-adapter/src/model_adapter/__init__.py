"""Adapter: trains the digit CNN and exports activation tables for the miner."""

__version__ = "0.1.0"
