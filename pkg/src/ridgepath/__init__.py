"""Regularization-path tooling for ridge regression.

The expensive object along a ridge path is the Cholesky factor of
H + lambda*I. This package fits low-degree polynomials to the factor
entries from a handful of exact factorizations and evaluates them
anywhere on the path, alongside exact and SVD-based baselines, an
adaptive multi-level search, cross-validation drivers, a numerical
verifier for the method's error analysis, and a CLI.
"""

from . import cvsearch, datagen, linalg, matio, pichol, ridge, theory, trivec
from .errors import (
    BadFormat,
    DimensionMismatch,
    HypothesisViolated,
    NotPositiveDefinite,
    NotSymmetric,
    NumericalError,
    RidgepathError,
    UsageError,
)

__version__ = "0.1.0"

__all__ = [
    "cvsearch",
    "datagen",
    "linalg",
    "matio",
    "pichol",
    "ridge",
    "theory",
    "trivec",
    "BadFormat",
    "DimensionMismatch",
    "HypothesisViolated",
    "NotPositiveDefinite",
    "NotSymmetric",
    "NumericalError",
    "RidgepathError",
    "UsageError",
    "__version__",
]
