"""Dyadic sparse-domination toolkit: grids, Orlicz machinery, maximal and
sparse operators, weight constants and inequality verifiers."""

__version__ = "0.1.0"
