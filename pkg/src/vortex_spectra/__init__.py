"""Vortex standing waves of the planar NLS: profiles, spectra, and radiation models."""

__version__ = "0.1.0"

from . import errors  # noqa: F401
