"""Deterministic experiment runner and acceptance verifier."""
