"""Benchmark family generator."""
