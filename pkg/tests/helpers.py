"""Shared constructions for the test suite."""

import numpy as np


def make_spd(rng, m, shift=1.0):
    """Random SPD matrix with a safe floor on the spectrum."""
    G = rng.standard_normal((m, m))
    return G @ G.T / m + shift * np.eye(m)


def make_spd_spectrum(d, lo, hi, seed):
    """SPD matrix with eigenvalues log-spaced from lo to hi."""
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eig = np.logspace(np.log10(lo), np.log10(hi), d)
    return (Q * eig) @ Q.T


def gauss_jordan_solve(A, b):
    """Row-reduction solve, independent of any library factorization."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m = A.shape[0]
    M = np.hstack([A, b.reshape(-1, 1)])
    for col in range(m):
        piv = col + int(np.argmax(np.abs(M[col:, col])))
        M[[col, piv]] = M[[piv, col]]
        M[col] = M[col] / M[col, col]
        for row in range(m):
            if row != col:
                M[row] -= M[row, col] * M[col]
    return M[:, -1]


def strip_timing_columns(csv_text):
    """Drop the t_* columns from a report CSV for determinism comparisons."""
    lines = csv_text.strip().splitlines()
    header = lines[0].split(",")
    keep = [i for i, name in enumerate(header) if not name.startswith("t_")]
    out = []
    for line in lines:
        cells = line.split(",")
        out.append(",".join(cells[i] for i in keep))
    return "\n".join(out)
