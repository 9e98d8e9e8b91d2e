"""Ridge solvers: normal-equation assembly and the solution backends.

The shifted normal equations (H + lambda*I) theta = g with H = X.T X and
g = X.T y are solved four ways: exact Cholesky, interpolated Cholesky
(a fitted InterpModel instead of a fresh factorization), full SVD, and
truncated or randomized SVD. Every solution carries its relative
normal-equation residual as a certificate.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg, pichol
from .errors import DimensionMismatch, NotPositiveDefinite, SingularInterpolant

CHOL = "chol"
PICHOL = "pichol"
SVD = "svd"
TSVD = "tsvd"
RSVD = "rsvd"


@dataclass
class RidgeProblem:
    """A design matrix with cached normal-equation pieces."""

    X: np.ndarray
    y: np.ndarray
    H: np.ndarray
    g: np.ndarray

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.H.shape[0]


@dataclass
class Solution:
    theta: np.ndarray
    lam: float
    backend: str
    residual: float


def assemble(X, y):
    """Build a RidgeProblem, caching H = X.T X and g = X.T y."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.ndim != 2:
        raise DimensionMismatch(f"design matrix must be 2-D, got ndim={X.ndim}")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows vs {y.shape[0]} targets")
    H = X.T @ X
    H = 0.5 * (H + H.T)  # exact symmetry despite GEMM rounding
    return RidgeProblem(X=X, y=y, H=H, g=X.T @ y)


def _certify(p, lam, theta, backend):
    res = np.linalg.norm(p.H @ theta + lam * theta - p.g)
    gn = np.linalg.norm(p.g)
    return Solution(theta=theta, lam=float(lam), backend=backend, residual=float(res / max(gn, 1e-300)))


def solve_exact(p, lam):
    """Factor H + lambda*I and solve by substitution."""
    if lam < 0:
        raise NotPositiveDefinite(f"negative ridge {lam}")
    L = linalg.cholesky(p.H + lam * np.eye(p.dim), lam=lam)
    theta = linalg.solve_chol(L, p.g)
    return _certify(p, lam, theta, CHOL)


def solve_interp(p, model, lam):
    """Solve with an interpolated factor in place of an exact one.

    Raises
    ------
    SingularInterpolant
        When a fitted diagonal polynomial has collapsed toward zero at
        this lambda, which happens under far extrapolation.
    """
    L = pichol.eval(model, lam)
    if np.min(np.abs(np.diag(L.matrix))) < 1e-12:
        raise SingularInterpolant(f"interpolated factor is singular at lambda={lam}")
    theta = linalg.solve_chol(L, p.g)
    return _certify(p, lam, theta, PICHOL)


def _svd_theta(f, y, lam):
    coeff = f.sigma / (f.sigma**2 + lam)
    return f.V @ (coeff * (f.U.T @ y))


def solve_svd(p, f, y, lam):
    """Shrinkage solve through SVD factors of X.

    theta = V diag(sigma_i / (sigma_i^2 + lambda)) U.T y. With full
    factors this equals the exact solve; with truncated factors it is the
    low-rank approximation.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if f.U.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{f.U.shape[0]} SVD rows vs {y.shape[0]} targets")
    if lam < 0:
        raise NotPositiveDefinite(f"negative ridge {lam}")
    backend = RSVD if f.randomized else (TSVD if f.truncated else SVD)
    return _certify(p, lam, _svd_theta(f, y, lam), backend)


def solve_tsvd(p, k, lam, factors=None):
    """Rank-k solve; pass precomputed factors to amortize across lambdas."""
    f = factors if factors is not None else linalg.truncated_svd(p.X, k)
    return solve_svd(p, f, p.y, lam)


def solve_rsvd(p, k, lam, oversample=5, power_iters=2, seed=0, factors=None):
    """Randomized rank-k solve; seeded, so repeat calls agree exactly."""
    f = factors if factors is not None else linalg.randomized_svd(p.X, k, oversample, power_iters, seed)
    return solve_svd(p, f, p.y, lam)
