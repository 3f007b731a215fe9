"""Vertex operators, their Fourier modes, and the operator identity checks."""

from .checks import (
    check_eta,
    check_grading_covariance,
    check_intertwining,
    check_screening,
    check_sl2_relations,
    check_zalgebra,
    screening_charge,
)
from .modes import ModeMatrix, ModeProvider, WindowError, mode_matrix
from .operators import CATALOG, VertexOperatorSpec, act, build_operator

__all__ = [
    "CATALOG", "ModeMatrix", "ModeProvider", "VertexOperatorSpec", "WindowError", "act",
    "build_operator", "check_eta", "check_grading_covariance", "check_intertwining",
    "check_screening", "check_sl2_relations", "check_zalgebra", "mode_matrix", "screening_charge",
]
