"""Shared helpers for building test arrays."""
