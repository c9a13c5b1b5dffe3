"""Polynomial roots by core chasing on companion matrices and pencils.

The companion matrix (or pencil) is stored as sequences of 2x2 unitary
cores plus a rank-one spike, and the shifted QR (or QZ) iteration is carried
out on those O(n) parameters by turnovers and fusions.
"""

from ._jit import backend
from .backerr import (
    BackwardErrorReport,
    ExperimentConfig,
    coefficient_backward_error,
    coeffs_from_roots,
    random_poly,
    run_experiment,
    slope_summary,
)
from .companion import NoRootsError, Polynomial, build_pencil_state, build_qr_state, preprocess
from .dense import dense_companion, dense_francis, matrix_backward_error
from .errors import InfiniteEigenvalue, NoConvergence
from .qr import Diagnostics, RootResult, solve_qr
from .qz import solve_qz
from .rotations import CoreTransformation, CorruptionError, fuse, turnover
from .triangular import FactoredTriangular, SingularRepresentationError

__all__ = [
    "BackwardErrorReport", "CoreTransformation", "CorruptionError", "Diagnostics",
    "ExperimentConfig", "FactoredTriangular", "InfiniteEigenvalue", "NoConvergence",
    "NoRootsError", "Polynomial", "RootResult", "SingularRepresentationError", "backend",
    "build_pencil_state", "build_qr_state", "coefficient_backward_error", "coeffs_from_roots",
    "dense_companion", "dense_francis", "fuse", "matrix_backward_error", "preprocess",
    "random_poly", "run_experiment", "slope_summary", "solve_qr", "solve_qz", "turnover",
]
