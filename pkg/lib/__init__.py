"""Steady-state photon-phonon correlations of a driven qubit."""
__version__ = "0.1.0"

from . import (classes, moments, oracle, sweep)
