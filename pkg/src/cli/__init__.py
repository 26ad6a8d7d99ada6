"""Command-line surface: array file format, built-in fixtures and command handlers."""
