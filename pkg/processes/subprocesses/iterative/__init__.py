"""Iterative variable reordering over growing family domains."""
