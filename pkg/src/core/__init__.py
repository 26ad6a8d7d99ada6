"""Core infrastructure: configuration, errors and report models."""
