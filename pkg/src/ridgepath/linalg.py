"""Dense real linear algebra used by the path solvers.

Cholesky factorization and triangular solves wrap LAPACK through SciPy;
the randomized SVD is the range-finder construction with power iteration.
All routines treat matrices as column-major float64 and are pure functions
of their inputs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    InvalidRank,
    NotPositiveDefinite,
    NotSymmetric,
)


@dataclass
class CholeskyFactor:
    """Lower-triangular factor L with L @ L.T equal to the factored matrix.

    Attributes
    ----------
    matrix : (h, h) ndarray
        Dense lower-triangular factor, column-major, zeros above the
        diagonal.
    lam : float or None
        The ridge value the factored matrix was shifted by, when known.
    interpolated : bool
        True when the entries came from polynomial evaluation rather than
        an exact factorization.
    """

    matrix: np.ndarray
    lam: float | None = None
    interpolated: bool = False

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass
class SvdFactors:
    """Thin SVD of a matrix: X ~ U @ diag(sigma) @ V.T.

    sigma is non-increasing; U and V have orthonormal columns.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    truncated: bool = False
    randomized: bool = False

    @property
    def rank(self):
        return self.sigma.shape[0]


def cholesky(A, lam=None):
    """Factor a symmetric positive-definite matrix as A = L @ L.T.

    Parameters
    ----------
    A : (h, h) array_like
        Symmetric positive-definite matrix. Symmetry is enforced to a
        relative tolerance of 1e-10 in the Frobenius norm.
    lam : float, optional
        Ridge value recorded on the returned factor, for bookkeeping only.

    Returns
    -------
    CholeskyFactor
        Lower-triangular factor with positive diagonal.

    Raises
    ------
    NotSymmetric
        If A deviates from its transpose beyond tolerance.
    NotPositiveDefinite
        If a pivot is not positive. For shifted matrices this usually
        means the shift is too small for the spectrum of A.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    nrm = np.linalg.norm(A)
    asym = np.linalg.norm(A - A.T)
    if asym > 1e-10 * max(nrm, 1e-300):
        raise NotSymmetric(f"matrix is not symmetric: ||A - A.T|| = {asym:.3e}")
    try:
        L = scipy.linalg.cholesky(A, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as e:
        raise NotPositiveDefinite(str(e)) from e
    return CholeskyFactor(np.asfortranarray(L), lam=lam)


def solve_chol(factor, g):
    """Solve (L @ L.T) theta = g by forward and back substitution.

    Parameters
    ----------
    factor : CholeskyFactor
    g : (h,) or (h, k) array_like
        Right-hand side vector or matrix.

    Returns
    -------
    ndarray
        Solution with the same trailing shape as g.

    Raises
    ------
    DimensionMismatch
        If g's leading dimension differs from the factor order.
    """
    L = factor.matrix
    g = np.asarray(g, dtype=float)
    if g.shape[0] != L.shape[0]:
        raise DimensionMismatch(f"factor order {L.shape[0]} vs rhs length {g.shape[0]}")
    w = scipy.linalg.solve_triangular(L, g, lower=True, check_finite=False)
    return scipy.linalg.solve_triangular(L.T, w, lower=False, check_finite=False)


def svd(X):
    """Full thin SVD of a dense matrix.

    Returns
    -------
    SvdFactors
        With rank min(rows, cols); singular values non-increasing.

    Raises
    ------
    ConvergenceFailure
        If the underlying iteration does not converge.
    """
    X = np.asarray(X, dtype=float)
    try:
        U, s, Vt = scipy.linalg.svd(X, full_matrices=False, check_finite=False)
    except scipy.linalg.LinAlgError as e:
        raise ConvergenceFailure(str(e)) from e
    return SvdFactors(U, s, Vt.T)


def truncated_svd(X, k):
    """Top-k SVD factors, computed exactly and truncated.

    Raises
    ------
    InvalidRank
        Unless 1 <= k <= min(rows, cols).
    """
    X = np.asarray(X, dtype=float)
    if not 1 <= k <= min(X.shape):
        raise InvalidRank(f"k={k} outside [1, {min(X.shape)}]")
    f = svd(X)
    return SvdFactors(f.U[:, :k], f.sigma[:k], f.V[:, :k], truncated=True)


def randomized_svd(X, k, oversample=5, power_iters=2, seed=0):
    """Rank-k SVD approximation via a randomized range finder.

    Draws a Gaussian test matrix, captures the range of X with
    `power_iters` rounds of power iteration (re-orthonormalized each round
    to avoid losing small singular directions), then solves the small
    projected SVD exactly.

    Parameters
    ----------
    X : (n, d) array_like
    k : int
        Target rank, 1 <= k <= min(n, d).
    oversample : int
        Extra test vectors beyond k; the sketch width k + oversample is
        clamped to min(n, d).
    power_iters : int
        Rounds of (X X.T) applied to the sample; 2 suffices for spectra
        with a decent gap.
    seed : int
        Seed for the Gaussian draw; fixed seed gives identical factors.

    Raises
    ------
    InvalidRank
        If k is outside [1, min(n, d)].
    """
    X = np.asarray(X, dtype=float)
    if k < 1 or k > min(X.shape):
        raise InvalidRank(f"k={k} outside [1, {min(X.shape)}]")
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((X.shape[1], min(k + oversample, min(X.shape))))
    Y = X @ omega
    Q, _ = np.linalg.qr(Y)
    for _ in range(power_iters):
        Q, _ = np.linalg.qr(X.T @ Q)
        Q, _ = np.linalg.qr(X @ Q)
    B = Q.T @ X
    Ub, s, Vt = scipy.linalg.svd(B, full_matrices=False, check_finite=False)
    U = Q @ Ub
    return SvdFactors(U[:, :k], s[:k], Vt.T[:, :k], truncated=True, randomized=True)
