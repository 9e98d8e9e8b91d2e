"""Numerical verification of the factor-interpolation error analysis.

The Cholesky map C sends a positive-definite A to its lower-triangular
factor. Differentiating the defining equation L @ L.T = A shows that the
derivative Gamma of L in a symmetric direction Delta is the unique
lower-triangular solution of

    Gamma @ L.T + L @ Gamma.T = Delta.

In vectorized form the left side is a linear operator applied to
vec(Gamma). That operator maps the D-dimensional lower-triangular
subspace bijectively onto the D-dimensional symmetric subspace, and this
module represents its inverse M^-1 as a dense m^2 x m^2 matrix of rank D
(zero on the complement). Higher derivatives follow by differentiating
the defining equation again, each step contracting through M^-1.

Everything here is a verifier, not a production path: operators are
dense m^2 x m^2 matrices, so the order is capped at 32. The checks it
supports are finite-difference agreement of the derivatives, the cubic
decay of the second-order expansion of C(A + lambda*I) in lambda, and an
instance checker for the end-to-end interpolation error bound

    (1/sqrt(D)) ||C(A + lambda*I) - p(lambda)||_F
        <= [gamma^3 + sqrt(g) w^3 (1 + gamma^2) (lambda_c + 1)
            ||V^+||_2] * R_[lambda_c - gamma, lambda_c + gamma] / sqrt(D)

where p is the fitted degree-2 interpolant, the g samples lie within w of
lambda_c, the evaluation sweep lies within gamma, V is the raw monomial
observation matrix, and R is the third-derivative magnitude functional.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, pichol, trivec
from .errors import DimensionMismatch, HypothesisViolated, NotSymmetric, UsageError

# dense m^2 x m^2 operators; keep the verifier at desk scale
MAX_ORDER = 32


def vec(M):
    """Column-major flattening; an isometry from Frobenius to l2."""
    return np.asarray(M, dtype=float).reshape(-1, order="F")


def unvec(v):
    v = np.asarray(v, dtype=float)
    m = math.isqrt(v.shape[0])
    if m * m != v.shape[0]:
        raise DimensionMismatch(f"length {v.shape[0]} is not a square")
    return v.reshape((m, m), order="F")


def commutation(m):
    """Permutation matrix P with P @ vec(B) = vec(B.T)."""
    P = np.zeros((m * m, m * m))
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    P[(j * m + i).ravel(), (i * m + j).ravel()] = 1.0
    return P


def kron_sum_dense(X):
    """Dense form of the operator vec(B) -> vec(X @ B + B @ X.T)."""
    X = np.asarray(X, dtype=float)
    m = X.shape[0]
    _check_order(m)
    return np.kron(np.eye(m), X) + np.kron(X, np.eye(m))


def kron_sum_apply(X, v):
    """Apply vec(B) -> vec(X @ B + B @ X.T) without forming the operator."""
    X = np.asarray(X, dtype=float)
    m = X.shape[0]
    v = np.asarray(v, dtype=float)
    if v.shape[0] != m * m:
        raise DimensionMismatch(f"vector length {v.shape[0]} vs operator order {m * m}")
    B = unvec(v)
    return vec(X @ B + B @ X.T)


def sym_product_dense(G):
    """Dense form of the operator vec(B) -> vec(B @ G.T + G @ B.T).

    This is the derivative of L -> L @ L.T at G, and the building block
    of every derivative formula below. Unlike kron_sum_dense it
    transposes its argument, which matters because factors are
    lower-triangular, not symmetric.
    """
    G = np.asarray(G, dtype=float)
    m = G.shape[0]
    _check_order(m)
    return np.kron(G, np.eye(m)) + np.kron(np.eye(m), G) @ commutation(m)


def _check_order(m):
    if m > MAX_ORDER:
        raise UsageError(f"dense operators are capped at order {MAX_ORDER}, got {m}")


def _tri_basis(m):
    """Orthonormal basis of vectorized lower-triangular matrices."""
    cols = np.zeros((m * m, m * (m + 1) // 2))
    j = 0
    for q in range(m):
        for p in range(q, m):
            cols[q * m + p, j] = 1.0
            j += 1
    return cols


def _sym_basis(m):
    """Orthonormal basis of vectorized symmetric matrices."""
    cols = np.zeros((m * m, m * (m + 1) // 2))
    j = 0
    for q in range(m):
        for p in range(q, m):
            if p == q:
                cols[q * m + p, j] = 1.0
            else:
                cols[q * m + p, j] = cols[p * m + q, j] = 1.0 / np.sqrt(2.0)
            j += 1
    return cols


def factor_map_inverse(L):
    """Dense M^-1: symmetric vec(Delta) -> lower-triangular vec(Gamma).

    Gamma is the unique lower-triangular solution of
    Gamma @ L.T + L @ Gamma.T = Delta. As a matrix, M^-1 has rank D and
    annihilates the complement of the symmetric subspace.
    """
    L = L.matrix if isinstance(L, linalg.CholeskyFactor) else np.asarray(L, dtype=float)
    m = L.shape[0]
    _check_order(m)
    B_tri = _tri_basis(m)
    B_sym = _sym_basis(m)
    N = B_sym.T @ sym_product_dense(L) @ B_tri
    return B_tri @ np.linalg.solve(N, B_sym.T)


def _as_vec(delta, m):
    delta = np.asarray(delta, dtype=float)
    if delta.ndim == 2:
        delta = vec(delta)
    if delta.shape[0] != m * m:
        raise DimensionMismatch(f"direction length {delta.shape[0]} vs expected {m * m}")
    return delta


def dC(A, Delta):
    """First derivative of the Cholesky map at A in direction Delta.

    Returns the lower-triangular Gamma with
    Gamma @ chol(A).T + chol(A) @ Gamma.T = Delta.
    """
    A = np.asarray(A, dtype=float)
    Delta = np.asarray(Delta, dtype=float)
    if Delta.ndim == 1:
        Delta = unvec(Delta)
    if np.linalg.norm(Delta - Delta.T) > 1e-10 * max(np.linalg.norm(Delta), 1e-300):
        raise NotSymmetric("direction must be symmetric")
    L = linalg.cholesky(A)
    Minv = factor_map_inverse(L)
    return unvec(Minv @ vec(Delta))


def d2C(A, delta1, delta2):
    """Second derivative as a vector over the vectorized factor space."""
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    d1 = _as_vec(delta1, m)
    d2 = _as_vec(delta2, m)
    Minv = factor_map_inverse(linalg.cholesky(A))
    g1 = Minv @ d1
    g2 = Minv @ d2
    return -Minv @ sym_product_dense(unvec(g2)) @ g1


def d3C(A, delta1, delta2, delta3):
    """Third derivative as a vector over the vectorized factor space."""
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    d1 = _as_vec(delta1, m)
    d2 = _as_vec(delta2, m)
    d3 = _as_vec(delta3, m)
    Minv = factor_map_inverse(linalg.cholesky(A))
    g = [Minv @ d for d in (d1, d2, d3)]

    def second(i, j):
        return -Minv @ sym_product_dense(unvec(g[j])) @ g[i]

    h12, h13, h23 = second(0, 1), second(0, 2), second(1, 2)
    term = (
        sym_product_dense(unvec(g[2])) @ h12
        + sym_product_dense(unvec(h23)) @ g[0]
        + sym_product_dense(unvec(g[1])) @ h13
    )
    return -Minv @ term


@dataclass
class TaylorModel:
    """Second-order expansion of C(A + lambda*I) around lambda_c."""

    lambda_c: float
    L_c: linalg.CholeskyFactor
    first_term: np.ndarray
    second_term: np.ndarray

    def eval(self, lam):
        d = lam - self.lambda_c
        v = d * self.first_term - 0.5 * d * d * self.second_term
        M = self.L_c.matrix + unvec(v)
        return linalg.CholeskyFactor(np.asfortranarray(M), lam=lam, interpolated=True)


def taylor_model(A, lambda_c):
    """Precompute the two expansion terms at the center."""
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    _check_order(m)
    L_c = linalg.cholesky(A + lambda_c * np.eye(m), lam=lambda_c)
    Minv = factor_map_inverse(L_c)
    v_I = vec(np.eye(m))
    first = Minv @ v_I
    E_c = sym_product_dense(unvec(first))
    second = Minv @ (E_c @ first)
    return TaylorModel(lambda_c=float(lambda_c), L_c=L_c, first_term=first, second_term=second)


def taylor_eval(A, lambda_c, lam):
    """Second-order prediction of C(A + lam*I) expanded at lambda_c."""
    return taylor_model(A, lambda_c).eval(lam)


def remainder_R(A, a, b, grid_n=33):
    """Third-derivative magnitude functional over a shift interval.

    Maximizes ||Minv_s E_s||^2 ||Minv_s v_I|| + ||Minv_s|| ||Minv_s E_s||
    ||Minv_s v_I||^2 over grid_n log-spaced shifts s in [a, b], where
    E_s is the sym_product operator of the first derivative at shift s.
    A grid maximum underestimates the continuum value, so treat results
    near a bound-check boundary with suspicion.
    """
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    _check_order(m)
    if grid_n < 2:
        raise UsageError(f"need at least 2 grid points, got {grid_n}")
    lo, hi = min(a, b), max(a, b)
    if lo <= 0:
        raise UsageError(f"shift interval must be positive, got [{lo}, {hi}]")
    v_I = vec(np.eye(m))
    eye = np.eye(m)
    best = 0.0
    for s in np.logspace(np.log10(lo), np.log10(hi), grid_n):
        L = linalg.cholesky(A + s * eye)
        Minv = factor_map_inverse(L)
        g1 = Minv @ v_I
        E = sym_product_dense(unvec(g1))
        MinvE = Minv @ E
        n_MinvE = np.linalg.norm(MinvE, 2)
        n_g1 = np.linalg.norm(g1)
        n_Minv = np.linalg.norm(Minv, 2)
        best = max(best, n_MinvE**2 * n_g1 + n_Minv * n_MinvE * n_g1**2)
    return float(best)


def coeff_shift_inverse(lambda_c):
    """Inverse change of basis between centered and raw quadratic coefficients.

    Its spectral norm is at most lambda_c + 1, the constant that enters
    the interpolation-stability part of the bound.
    """
    return np.array([[1.0, lambda_c, 0.0], [0.0, 1.0, lambda_c], [0.0, 0.0, 1.0]])


@dataclass
class BoundReport:
    gamma: float
    w: float
    g: int
    D: int
    norm_V_dagger: float
    R_interval: float
    lhs: float
    rhs: float
    satisfied: bool
    near: bool


def check_main_bound(A, lambda_c, gamma, w, g=4, r=2, sweep_n=33, grid_n=33):
    """Measure one instance of the end-to-end interpolation bound.

    Fits the degree-r interpolant from g equispaced samples in
    [lambda_c - w, lambda_c + w] using the raw monomial basis (whose
    pseudoinverse norm is the bound's conditioning term), sweeps the
    maximum RMS factor error over [lambda_c - gamma, lambda_c + gamma],
    and compares it to the bound's value.

    Raises
    ------
    HypothesisViolated
        Unless lambda_c > gamma >= w > 0.
    """
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    _check_order(m)
    if not (lambda_c > gamma >= w > 0):
        raise HypothesisViolated(f"need lambda_c > gamma >= w > 0, got {lambda_c}, {gamma}, {w}")
    samples = np.linspace(lambda_c - w, lambda_c + w, g)
    layout = trivec.build_layout(trivec.ROWWISE, m)
    model = pichol.fit(A, samples, r, layout, raw_monomials=True)
    D = layout.length

    V = np.vander(model.sample_lambdas, r + 1, increasing=True)
    norm_V_dagger = float(1.0 / np.linalg.svd(V, compute_uv=False)[-1])
    R = remainder_R(A, lambda_c - gamma, lambda_c + gamma, grid_n)
    rhs = (gamma**3 + np.sqrt(g) * w**3 * (1 + gamma**2) * (lambda_c + 1) * norm_V_dagger) * R / np.sqrt(D)

    eye = np.eye(m)
    lhs = 0.0
    for lam in np.linspace(lambda_c - gamma, lambda_c + gamma, sweep_n):
        exact = linalg.cholesky(A + lam * eye)
        interp = pichol.eval(model, lam)
        lhs = max(lhs, np.linalg.norm(interp.matrix - exact.matrix) / np.sqrt(D))
    lhs = float(lhs)
    return BoundReport(
        gamma=float(gamma),
        w=float(w),
        g=int(g),
        D=int(D),
        norm_V_dagger=norm_V_dagger,
        R_interval=float(R),
        lhs=lhs,
        rhs=float(rhs),
        satisfied=lhs <= rhs * (1 + 1e-9),
        near=lhs > 0.9 * rhs,
    )
