"""Matrix file I/O.

Binary format ("RPMATX01"): an 8-byte magic string, two u64 little-endian
header words (rows, cols), then rows*cols f64 little-endian values in
column-major order. Round-trips bit-exactly.

CSV (comma delimiter, '.' decimal, one header row) is the secondary
ingestion format; values parse as f64.
"""

import os

import numpy as np

from .errors import BadFormat, IoError

MAGIC = b"RPMATX01"
_HEADER = np.dtype([("rows", "<u8"), ("cols", "<u8")])


def save_matrix(path, a):
    """Write a 2-D array to `path` in the binary matrix format."""
    a = np.asarray(a, dtype="<f8")
    if a.ndim != 2:
        raise BadFormat(f"expected a 2-D array, got ndim={a.ndim}")
    with open(path, "wb") as f:
        f.write(MAGIC)
        np.array([(a.shape[0], a.shape[1])], dtype=_HEADER).tofile(f)
        a.T.tofile(f)  # transpose of C-order == column-major payload


def load_matrix(path):
    """Read a matrix written by save_matrix. Returns an F-ordered array."""
    try:
        with open(path, "rb") as f:
            magic = f.read(8)
            if magic != MAGIC:
                raise BadFormat(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
            hdr = np.fromfile(f, dtype=_HEADER, count=1)
            if hdr.size != 1:
                raise BadFormat(f"{path}: truncated header")
            rows, cols = int(hdr["rows"][0]), int(hdr["cols"][0])
            data = np.fromfile(f, dtype="<f8", count=rows * cols)
    except OSError as e:
        raise IoError(f"{path}: {e}") from e
    if data.size != rows * cols:
        raise BadFormat(f"{path}: payload has {data.size} values, header says {rows * cols}")
    return data.reshape((rows, cols), order="F")


def save_csv(path, a, header=None):
    """Write a 2-D array as CSV with one header row."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if header is None:
        header = ",".join(f"c{j}" for j in range(a.shape[1]))
    np.savetxt(path, a, delimiter=",", header=header, comments="", fmt="%.17g")


def load_csv(path):
    """Read a CSV matrix written with one header row."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as e:
        raise IoError(f"{path}: {e}") from e
    except ValueError as e:
        raise BadFormat(f"{path}: {e}") from e
    return data


def load_any(path):
    """Dispatch on extension: .csv is text, everything else is binary."""
    if os.path.splitext(path)[1].lower() == ".csv":
        return load_csv(path)
    return load_matrix(path)
