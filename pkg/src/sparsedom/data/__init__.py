"""Frozen regression data and the default sweep plan."""
