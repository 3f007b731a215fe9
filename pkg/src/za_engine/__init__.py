"""Exact free-field realization of affine sl2 in principal gradation, with verifiers."""

__version__ = "0.1.0"

from .exact import OffsetSeries, SeriesError, TruncationError
from .fock import FockState, FockVector, GradedBasis, ModuleLabel, apply_mode, enumerate_basis
from .rational import Rational
from .report import CheckReport, PreconditionError, UnsupportedParameter

__all__ = [
    "CheckReport", "FockState", "FockVector", "GradedBasis", "ModuleLabel", "OffsetSeries",
    "PreconditionError", "Rational", "SeriesError", "TruncationError", "UnsupportedParameter",
    "apply_mode", "enumerate_basis", "__version__",
]
