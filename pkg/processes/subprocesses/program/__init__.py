"""Guarded-command programs: syntax tree, parser, checks and explicit semantics."""
