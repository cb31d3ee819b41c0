"""Holonomy maps, discrete principal bundles and the reconstruction functor."""

__version__ = "0.1.0"
