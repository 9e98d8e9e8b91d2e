"""Polynomial interpolation of Cholesky factors along the ridge path.

Factor the shifted Hessian H + lambda*I exactly at g sample values of
lambda, pack the factors into a g x D target matrix, and fit one degree-r
polynomial in lambda per entry by least squares. Evaluating the D
polynomials at a new lambda then costs O(r*D) multiply-adds instead of a
fresh O(h^3) factorization.

The observation matrix is monomial (rows 1, t, ..., t^r). When the raw
sample values would make it ill-conditioned, the samples are mapped
affinely onto [-1, 1] first; the map is recorded on the model so
evaluation applies the same transform. Pass raw_monomials=True to force
the untransformed basis.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import linalg, trivec
from .errors import DegenerateSamples, DimensionMismatch, InsufficientSamples

# raw-basis condition number beyond which samples are rescaled to [-1, 1]
COND_LIMIT = 1e8


@dataclass
class InterpModel:
    """Per-entry polynomial coefficients fitted over a lambda window.

    theta has shape (r+1, D): column j holds the coefficients of entry j's
    polynomial, constant term first, in the (possibly rescaled) basis
    t = t_scale * lambda + t_shift.
    """

    degree: int
    sample_lambdas: np.ndarray
    theta: np.ndarray
    layout: trivec.VecLayout
    cond_V: float
    t_scale: float
    t_shift: float
    residual_fro: float

    @property
    def num_samples(self):
        return self.sample_lambdas.shape[0]

    def eval_ops(self):
        """Multiply-add count of one Horner evaluation: degree * D."""
        return self.degree * self.layout.length


@dataclass
class FitDiagnostics:
    """Interpolation error of a model against exact factorization."""

    nrmse_per_lambda: dict
    max_nrmse: float
    residual_fro: float


def _observation_matrix(t, r):
    return np.vander(t, r + 1, increasing=True)


def fit(H, sample_lambdas, r, layout, raw_monomials=False, timings=None):
    """Fit the per-entry polynomials from g exact factorizations.

    Parameters
    ----------
    H : (h, h) array_like
        Symmetric matrix; H + lambda*I must be positive definite at every
        sample.
    sample_lambdas : sequence of float
        g strictly increasing positive sample points, g > r.
    r : int
        Polynomial degree, >= 1.
    layout : trivec.VecLayout
        Packing used for the target matrix; also fixes D.
    raw_monomials : bool
        Disable the internal rescaling of samples onto [-1, 1].
    timings : dict, optional
        When given, seconds spent factoring, packing, and solving are
        added to its "factorize", "vec", and "fit" entries.

    Returns
    -------
    InterpModel
    """
    H = np.asarray(H, dtype=float)
    lams = np.asarray(sample_lambdas, dtype=float)
    g = lams.shape[0]
    if g <= r:
        raise InsufficientSamples(f"need more samples than the degree: g={g}, r={r}")
    if np.unique(lams).shape[0] != g:
        raise DegenerateSamples("sample lambdas must be distinct")
    if np.any(lams <= 0):
        raise DegenerateSamples("sample lambdas must be positive")
    if H.shape[0] != layout.h:
        raise DimensionMismatch(f"H order {H.shape[0]} vs layout order {layout.h}")
    lams = np.sort(lams)

    eye = np.eye(H.shape[0])
    t0 = time.perf_counter()
    factors = [linalg.cholesky(H + lam * eye, lam=lam) for lam in lams]
    t1 = time.perf_counter()
    T = trivec.bulk_gather(factors, layout)
    t2 = time.perf_counter()

    V_raw = _observation_matrix(lams, r)
    cond_raw = float(np.linalg.cond(V_raw))
    t_scale, t_shift = 1.0, 0.0
    V = V_raw
    if not raw_monomials and cond_raw > COND_LIMIT:
        span = lams[-1] - lams[0]
        t_scale = 2.0 / span
        t_shift = -(lams[-1] + lams[0]) / span
        V = _observation_matrix(t_scale * lams + t_shift, r)

    G = V.T @ T
    Lv = linalg.cholesky(V.T @ V)
    theta = linalg.solve_chol(Lv, G)
    residual = float(np.linalg.norm(T - V @ theta))
    t3 = time.perf_counter()
    if timings is not None:
        timings["factorize"] += t1 - t0
        timings["vec"] += t2 - t1
        timings["fit"] += t3 - t2
    return InterpModel(
        degree=r,
        sample_lambdas=lams,
        theta=theta,
        layout=layout,
        cond_V=cond_raw,
        t_scale=t_scale,
        t_shift=t_shift,
        residual_fro=residual,
    )


def eval_vector(model, lambda_t):
    """Horner evaluation of all D entry polynomials at one lambda."""
    t = model.t_scale * lambda_t + model.t_shift
    theta = model.theta
    v = theta[model.degree].copy()
    for i in range(model.degree - 1, -1, -1):
        v *= t
        v += theta[i]
    return v


def eval(model, lambda_t):
    """Interpolated factor at lambda_t, unpacked through the model layout.

    Extrapolation outside the sample window is permitted; far enough out
    the fitted diagonal polynomials can cross zero and the factor stops
    being usable for solves.
    """
    if lambda_t <= 0:
        raise DegenerateSamples(f"lambda must be positive, got {lambda_t}")
    v = eval_vector(model, lambda_t)
    return trivec.unvectorize(v, model.layout, lam=lambda_t, interpolated=True)


def sample_indices(q, g):
    """Indices of g near-evenly spaced grid positions including both ends."""
    return np.round(np.linspace(0, q - 1, g)).astype(int)


def nrmse(L_interp, L_exact):
    """Frobenius error normalized by the exact factor's entry range."""
    A = L_interp.matrix if isinstance(L_interp, linalg.CholeskyFactor) else np.asarray(L_interp)
    B = L_exact.matrix if isinstance(L_exact, linalg.CholeskyFactor) else np.asarray(L_exact)
    spread = float(B.max() - B.min())
    return float(np.linalg.norm(A - B) / spread)


def diagnostics(model, H, dense_lambdas):
    """NRMSE of the model against exact factorization at each lambda."""
    H = np.asarray(H, dtype=float)
    eye = np.eye(H.shape[0])
    per = {}
    for lam in np.asarray(dense_lambdas, dtype=float):
        exact = linalg.cholesky(H + lam * eye, lam=lam)
        interp = eval(model, lam)
        per[float(lam)] = nrmse(interp, exact)
    return FitDiagnostics(
        nrmse_per_lambda=per,
        max_nrmse=max(per.values()),
        residual_fro=model.residual_fro,
    )
