"""Utilities module containing logging, settings and helper functions."""
