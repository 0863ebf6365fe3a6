"""Symbolic construction of family models."""
