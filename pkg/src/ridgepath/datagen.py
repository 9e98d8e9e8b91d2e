"""Synthetic regression problems with controlled conditioning.

The design matrix is built from an explicit SVD, X = U @ diag(sigma) @ V.T
plus an intercept column, so the condition number of the Gram matrix is
known exactly rather than estimated. The left factor is drawn orthogonal
to the all-ones direction and the intercept column is scaled to the
geometric mean of the spectrum, so appending it changes neither the
largest nor the smallest singular value.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import UsageError

CONTINUOUS = "continuous"
BINARY = "binary"
LABEL_KINDS = (CONTINUOUS, BINARY)


@dataclass(frozen=True)
class Uniform:
    """Singular values evenly spaced from hi down to lo."""

    lo: float = 0.5
    hi: float = 1.0


@dataclass(frozen=True)
class Decay:
    """Geometric spectrum sigma_i = rate**i, i = 0..d-1."""

    rate: float = 0.9


@dataclass(frozen=True)
class SynthSpec:
    n: int
    d: int
    spectrum: object = Uniform()
    noise_sigma: float = 0.0
    label_kind: str = CONTINUOUS
    seed: int = 0


def _singular_values(spectrum, d):
    if isinstance(spectrum, Uniform):
        if not (0 < spectrum.lo <= spectrum.hi):
            raise UsageError(f"need 0 < lo <= hi, got [{spectrum.lo}, {spectrum.hi}]")
        return np.linspace(spectrum.hi, spectrum.lo, d)
    if isinstance(spectrum, Decay):
        if not (0 < spectrum.rate <= 1):
            raise UsageError(f"decay rate must lie in (0, 1], got {spectrum.rate}")
        return spectrum.rate ** np.arange(d)
    raise UsageError(f"unknown spectrum {spectrum!r}")


def generate(spec):
    """Draw (X, y, theta_true) from a SynthSpec, deterministically in the seed.

    X has shape (n, d+1) with the intercept appended last; theta_true has
    length d+1 and y = X @ theta_true plus N(0, noise_sigma^2) noise, or
    the sign of that sum for binary labels.
    """
    n, d = spec.n, spec.d
    if n < 1 or d < 1:
        raise UsageError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if spec.noise_sigma < 0:
        raise UsageError(f"noise_sigma must be nonnegative, got {spec.noise_sigma}")
    if spec.label_kind not in LABEL_KINDS:
        raise UsageError(f"label_kind must be one of {LABEL_KINDS}, got {spec.label_kind!r}")
    if n < d + 1:
        warnings.warn(f"n={n} < d+1={d + 1}: design is rank-deficient", stacklevel=2)

    rng = np.random.default_rng(spec.seed)
    sigma = _singular_values(spec.spectrum, d)

    # left factor orthogonal to ones; at most n-1 such directions exist
    k = min(d, max(n - 1, 0))
    G = rng.standard_normal((n, d))
    Q, _ = np.linalg.qr(np.column_stack([np.ones(n), G]))
    U = Q[:, 1 : 1 + k]
    Qv, _ = np.linalg.qr(rng.standard_normal((d, d)))
    V = Qv[:, :k]

    B = U @ (sigma[:k, None] * V.T)
    sig_mid = np.sqrt(sigma[0] * sigma[-1])
    X = np.column_stack([B, np.full(n, sig_mid / np.sqrt(n))])

    theta_true = rng.standard_normal(d + 1)
    y = X @ theta_true
    if spec.noise_sigma > 0:
        y = y + spec.noise_sigma * rng.standard_normal(n)
    if spec.label_kind == BINARY:
        y = np.where(y >= 0, 1.0, -1.0)
    return X, y, theta_true
