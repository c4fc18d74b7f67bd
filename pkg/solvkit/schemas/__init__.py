"""Pydantic models for CLI sessions and reports."""
