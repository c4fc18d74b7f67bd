"""Closure analysis engines and bounded search."""
