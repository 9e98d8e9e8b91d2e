"""Synthetic problems: conditioning control, recovery, determinism."""

import numpy as np
import pytest

from ridgepath import datagen, ridge
from ridgepath.errors import UsageError


def test_shapes_and_intercept_column():
    spec = datagen.SynthSpec(n=40, d=6, seed=1)
    X, y, theta = datagen.generate(spec)
    assert X.shape == (40, 7)
    assert y.shape == (40,)
    assert theta.shape == (7,)
    # last column is the constant intercept regressor, scaled so it sits
    # in the middle of the data spectrum
    col = X[:, -1]
    assert np.allclose(col, col[0])
    sv = np.linalg.svd(X[:, :-1], compute_uv=False)
    sig_mid = np.sqrt(sv[0] * sv[-1])
    assert col[0] * np.sqrt(40) == pytest.approx(sig_mid, rel=1e-10)


def test_determinism_bitwise():
    spec = datagen.SynthSpec(n=30, d=4, noise_sigma=0.2, seed=9)
    X1, y1, t1 = datagen.generate(spec)
    X2, y2, t2 = datagen.generate(spec)
    assert X1.tobytes() == X2.tobytes()
    assert y1.tobytes() == y2.tobytes()
    assert t1.tobytes() == t2.tobytes()
    X3, _, _ = datagen.generate(datagen.SynthSpec(n=30, d=4, noise_sigma=0.2, seed=10))
    assert X1.tobytes() != X3.tobytes()


def test_uniform_spectrum_condition_number():
    spec = datagen.SynthSpec(n=500, d=12, spectrum=datagen.Uniform(0.25, 1.0), seed=3)
    X, _, _ = datagen.generate(spec)
    H = X.T @ X
    cond = np.linalg.cond(H)
    assert cond == pytest.approx((1.0 / 0.25) ** 2, rel=0.01)


def test_decay_spectrum_condition_number():
    spec = datagen.SynthSpec(n=400, d=6, spectrum=datagen.Decay(0.5), seed=4)
    X, _, _ = datagen.generate(spec)
    cond = np.linalg.cond(X.T @ X)
    # sigma ranges over 0.5**0 .. 0.5**5, squared ratio is 2**10
    assert cond == pytest.approx(1024.0, rel=0.01)


def test_noiseless_labels_recoverable():
    spec = datagen.SynthSpec(n=200, d=10, seed=5)
    X, y, theta_true = datagen.generate(spec)
    p = ridge.assemble(X, y)
    sol = ridge.solve_exact(p, 1e-10)
    assert np.max(np.abs(sol.theta - theta_true)) <= 1e-6


def test_binary_labels():
    spec = datagen.SynthSpec(n=100, d=5, label_kind=datagen.BINARY, noise_sigma=0.3, seed=6)
    _, y, _ = datagen.generate(spec)
    assert set(np.unique(y)) <= {-1.0, 1.0}


def test_warns_when_underdetermined():
    with pytest.warns(UserWarning):
        datagen.generate(datagen.SynthSpec(n=4, d=6, seed=0))


def test_validation_errors():
    with pytest.raises(UsageError):
        datagen.generate(datagen.SynthSpec(n=0, d=3))
    with pytest.raises(UsageError):
        datagen.generate(datagen.SynthSpec(n=10, d=0))
    with pytest.raises(UsageError):
        datagen.generate(datagen.SynthSpec(n=10, d=3, noise_sigma=-0.1))
    with pytest.raises(UsageError):
        datagen.generate(datagen.SynthSpec(n=10, d=3, label_kind="counts"))
    with pytest.raises(UsageError):
        datagen.generate(datagen.SynthSpec(n=10, d=3, spectrum=datagen.Uniform(2.0, 1.0)))
    with pytest.raises(UsageError):
        datagen.generate(datagen.SynthSpec(n=10, d=3, spectrum=datagen.Uniform(0.0, 1.0)))
    with pytest.raises(UsageError):
        datagen.generate(datagen.SynthSpec(n=10, d=3, spectrum=datagen.Decay(1.5)))
    with pytest.raises(UsageError):
        datagen.generate(datagen.SynthSpec(n=10, d=3, spectrum=datagen.Decay(0.0)))


def test_data_block_orthogonal_to_intercept():
    # the non-constant block is built orthogonal to the all-ones direction,
    # so centering does not disturb the designed spectrum
    X, _, _ = datagen.generate(datagen.SynthSpec(n=120, d=8, seed=7))
    assert np.max(np.abs(X[:, :-1].sum(axis=0))) <= 1e-9
