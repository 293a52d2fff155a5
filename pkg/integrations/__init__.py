"""Integrations package: CLI entry point."""
