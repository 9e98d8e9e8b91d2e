"""Cross-validated selection of the ridge parameter.

Four drivers share the same fold plan and hold-out metric:

* grid_search_exact: factor H + lambda*I at every grid point.
* grid_search_pichol: factor at g sample points per fold, fit the
  per-entry polynomials once, and evaluate the fitted factors at all q
  grid points.
* mchol_search: adaptive three-point narrowing. Evaluate the hold-out
  error at 10**(c-s), 10**c, 10**(c+s), re-center on the argmin, halve s,
  and stop once s falls below s_min. The center is cached between rounds,
  so each round after the first costs two new factorizations per fold.
* pinrmse_search: fit one polynomial to g exact hold-out errors and pick
  the minimizer of the fitted curve; the factor-free baseline.

Folds are independent and run on a thread pool when threads > 1; results
merge in fold order, so the report is identical at any thread count.
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg, pichol, ridge, trivec
from .errors import DimensionMismatch, EmptyValidationSet, UsageError

RMSE = "rmse"
MISCLASS = "misclass"
METRICS = (RMSE, MISCLASS)

PHASES = ("factorize", "vec", "fit", "interp", "solve", "predict")

THREADS_ENV = "RIDGEPATH_THREADS"


@dataclass
class Dataset:
    """Full design and labels; fold plans slice it into train/validation."""

    X: np.ndarray
    y: np.ndarray


@dataclass
class LambdaGrid:
    lo: float
    hi: float
    q: int
    values: np.ndarray


def make_grid(lo, hi, q):
    """q log-spaced values from lo to hi inclusive."""
    if not (0 < lo < hi):
        raise UsageError(f"need 0 < lo < hi, got lo={lo}, hi={hi}")
    if q < 1:
        raise UsageError(f"grid size must be >= 1, got q={q}")
    if q == 1:
        values = np.array([lo])
    else:
        values = np.logspace(np.log10(lo), np.log10(hi), q)
        values[0], values[-1] = lo, hi  # pin endpoints against log/exp rounding
    return LambdaGrid(lo=lo, hi=hi, q=q, values=values)


@dataclass
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int


def make_folds(n, k, seed, labels=None):
    """Seeded fold assignment; stratified when labels are +/-1."""
    if k < 2:
        raise UsageError(f"need k >= 2 folds, got {k}")
    if k > n:
        raise UsageError(f"cannot split {n} samples into {k} nonempty folds")
    rng = np.random.default_rng(seed)
    assignments = np.empty(n, dtype=np.int64)
    if labels is not None and set(np.unique(labels)) <= {-1.0, 1.0}:
        for cls in (-1.0, 1.0):
            idx = np.flatnonzero(np.asarray(labels) == cls)
            idx = rng.permutation(idx)
            assignments[idx] = np.arange(idx.size) % k
    else:
        perm = rng.permutation(n)
        assignments[perm] = np.arange(n) % k
    return FoldPlan(k=k, assignments=assignments, seed=seed)


@dataclass
class CvReport:
    method: str
    per_lambda_error: dict
    best_lambda: float
    best_error: float
    timings: dict
    rows: list = field(default_factory=list)
    wall_seconds: float = 0.0


def holdout_error(theta, X_val, y_val, metric=RMSE):
    """Validation error of one solution.

    rmse: sqrt(mean((X theta - y)^2)). misclass: fraction of sign
    disagreements, for +/-1 labels.
    """
    X_val = np.asarray(X_val, dtype=float)
    y_val = np.asarray(y_val, dtype=float).reshape(-1)
    if X_val.shape[0] == 0:
        raise EmptyValidationSet("validation set is empty")
    if X_val.shape[0] != y_val.shape[0]:
        raise DimensionMismatch(f"{X_val.shape[0]} rows vs {y_val.shape[0]} targets")
    pred = X_val @ theta
    if metric == RMSE:
        return float(np.sqrt(np.mean((pred - y_val) ** 2)))
    if metric == MISCLASS:
        return float(np.mean(np.where(pred >= 0, 1.0, -1.0) != np.sign(y_val)))
    raise UsageError(f"unknown metric {metric!r}")


def resolve_threads(threads=None):
    """Thread count from the argument, RIDGEPATH_THREADS, or 1."""
    if threads is None:
        threads = os.environ.get(THREADS_ENV, "1")
    try:
        threads = int(threads)
    except ValueError as e:
        raise UsageError(f"bad thread count {threads!r}") from e
    return max(1, threads)


def _map_ordered(fn, items, threads):
    # results always merge in submission order regardless of pool size
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _fold_slices(p, folds, i):
    val = folds.assignments == i
    return p.X[~val], p.y[~val], p.X[val], p.y[val]


def _zero_timings():
    return dict.fromkeys(PHASES, 0.0)


def _merge(method, grid_values, fold_results, wall):
    """Average fold error curves and apply the tie rule (smallest lambda)."""
    errs = np.mean([r[0] for r in fold_results], axis=0)
    timings = _zero_timings()
    rows = []
    for i, (fold_errs, fold_times) in enumerate(fold_results):
        for phase in PHASES:
            timings[phase] += fold_times[phase]
        for lam, e in zip(grid_values, fold_errs):
            rows.append({"fold": i, "lambda": float(lam), "error": float(e), **fold_times})
    best_idx = int(np.argmin(errs))  # first minimum = smallest lambda on an increasing grid
    for lam, e in zip(grid_values, errs):
        rows.append({"fold": -1, "lambda": float(lam), "error": float(e), **_zero_timings()})
    return CvReport(
        method=method,
        per_lambda_error={float(l): float(e) for l, e in zip(grid_values, errs)},
        best_lambda=float(grid_values[best_idx]),
        best_error=float(errs[best_idx]),
        timings=timings,
        rows=rows,
        wall_seconds=wall,
    )


def grid_search_exact(p, grid, folds, metric=RMSE, threads=None):
    """One exact factorization per fold per grid point."""
    threads = resolve_threads(threads)
    t_start = time.perf_counter()

    def run_fold(i):
        X_tr, y_tr, X_val, y_val = _fold_slices(p, folds, i)
        sub = ridge.assemble(X_tr, y_tr)
        times = _zero_timings()
        eye = np.eye(sub.dim)
        errs = np.empty(grid.q)
        for j, lam in enumerate(grid.values):
            t0 = time.perf_counter()
            L = linalg.cholesky(sub.H + lam * eye, lam=lam)
            t1 = time.perf_counter()
            theta = linalg.solve_chol(L, sub.g)
            t2 = time.perf_counter()
            errs[j] = holdout_error(theta, X_val, y_val, metric)
            t3 = time.perf_counter()
            times["factorize"] += t1 - t0
            times["solve"] += t2 - t1
            times["predict"] += t3 - t2
        return errs, times

    results = _map_ordered(run_fold, range(folds.k), threads)
    return _merge("chol", grid.values, results, time.perf_counter() - t_start)


def grid_search_pichol(
    p,
    grid,
    folds,
    metric=RMSE,
    g=4,
    r=2,
    layout_kind=trivec.RECURSIVE,
    h0=64,
    raw_monomials=False,
    threads=None,
):
    """Fit the factor polynomials per fold, then sweep the grid cheaply."""
    if g > grid.q:
        raise UsageError(f"cannot draw g={g} samples from a grid of {grid.q}")
    threads = resolve_threads(threads)
    t_start = time.perf_counter()
    sample_lams = grid.values[pichol.sample_indices(grid.q, g)]

    def run_fold(i):
        X_tr, y_tr, X_val, y_val = _fold_slices(p, folds, i)
        sub = ridge.assemble(X_tr, y_tr)
        times = _zero_timings()
        layout = trivec.build_layout(layout_kind, sub.dim, h0)
        model = pichol.fit(sub.H, sample_lams, r, layout, raw_monomials, timings=times)
        errs = np.empty(grid.q)
        for j, lam in enumerate(grid.values):
            t0 = time.perf_counter()
            sol = ridge.solve_interp(sub, model, lam)
            t1 = time.perf_counter()
            errs[j] = holdout_error(sol.theta, X_val, y_val, metric)
            t2 = time.perf_counter()
            times["interp"] += t1 - t0
            times["predict"] += t2 - t1
        return errs, times

    results = _map_ordered(run_fold, range(folds.k), threads)
    return _merge("pichol", grid.values, results, time.perf_counter() - t_start)


def mchol_search(p, c0, s0_init, s_min, folds, metric=RMSE, threads=None):
    """Three-point log-scale narrowing with exact solves.

    Per fold, the number of factorizations is exactly
    3 + 2 * ceil(log2(s0_init / s_min)): three in the first round and two
    per refinement, with the center value reused between rounds.
    """
    if not s0_init > s_min > 0:
        raise UsageError(f"need s0_init > s_min > 0, got {s0_init}, {s_min}")
    threads = resolve_threads(threads)
    t_start = time.perf_counter()

    def fold_state(i):
        X_tr, y_tr, X_val, y_val = _fold_slices(p, folds, i)
        return ridge.assemble(X_tr, y_tr), X_val, y_val

    states = _map_ordered(fold_state, range(folds.k), threads)
    times = [_zero_timings() for _ in range(folds.k)]
    cache = {}

    def eval_log_lambda(lc):
        if lc in cache:
            return cache[lc]
        lam = 10.0**lc

        def one_fold(i):
            sub, X_val, y_val = states[i]
            t0 = time.perf_counter()
            L = linalg.cholesky(sub.H + lam * np.eye(sub.dim), lam=lam)
            t1 = time.perf_counter()
            theta = linalg.solve_chol(L, sub.g)
            t2 = time.perf_counter()
            err = holdout_error(theta, X_val, y_val, metric)
            t3 = time.perf_counter()
            times[i]["factorize"] += t1 - t0
            times[i]["solve"] += t2 - t1
            times[i]["predict"] += t3 - t2
            return err

        errs = _map_ordered(one_fold, range(folds.k), threads)
        cache[lc] = float(np.mean(errs))
        return cache[lc]

    c, s = float(c0), float(s0_init)
    while True:
        cands = [c - s, c, c + s]
        vals = [eval_log_lambda(x) for x in cands]
        c = cands[int(np.argmin(vals))]
        # <= keeps the factorization count at exactly the documented
        # formula when s0_init / s_min is a power of two
        if s <= s_min:
            break
        s /= 2.0
    wall = time.perf_counter() - t_start

    evaluated = sorted(cache)
    lams = np.array([10.0**lc for lc in evaluated])
    errs = np.array([cache[lc] for lc in evaluated])
    timings = _zero_timings()
    rows = []
    for i in range(folds.k):
        for phase in PHASES:
            timings[phase] += times[i][phase]
    for lam, e in zip(lams, errs):
        rows.append({"fold": -1, "lambda": float(lam), "error": float(e), **_zero_timings()})
    best_idx = int(np.argmin(errs))
    return CvReport(
        method="mchol",
        per_lambda_error={float(l): float(e) for l, e in zip(lams, errs)},
        best_lambda=float(lams[best_idx]),
        best_error=float(errs[best_idx]),
        timings=timings,
        rows=rows,
        wall_seconds=wall,
    )


def pinrmse_search(p, grid, folds, metric=RMSE, g=4, r=2, threads=None):
    """Interpolate the hold-out error curve itself from g exact points.

    The g sampled errors are averaged across folds, one degree-r
    polynomial is fitted to them (the one-entry analog of the factor
    fit), and the minimizer of the fitted curve over the grid is
    selected.
    """
    if g <= r:
        raise UsageError(f"need more samples than the degree: g={g}, r={r}")
    if g > grid.q:
        raise UsageError(f"cannot draw g={g} samples from a grid of {grid.q}")
    threads = resolve_threads(threads)
    t_start = time.perf_counter()
    sample_lams = grid.values[pichol.sample_indices(grid.q, g)]

    def run_fold(i):
        X_tr, y_tr, X_val, y_val = _fold_slices(p, folds, i)
        sub = ridge.assemble(X_tr, y_tr)
        times = _zero_timings()
        errs = np.empty(g)
        for j, lam in enumerate(sample_lams):
            t0 = time.perf_counter()
            L = linalg.cholesky(sub.H + lam * np.eye(sub.dim), lam=lam)
            t1 = time.perf_counter()
            theta = linalg.solve_chol(L, sub.g)
            t2 = time.perf_counter()
            errs[j] = holdout_error(theta, X_val, y_val, metric)
            t3 = time.perf_counter()
            times["factorize"] += t1 - t0
            times["solve"] += t2 - t1
            times["predict"] += t3 - t2
        return errs, times

    results = _map_ordered(run_fold, range(folds.k), threads)
    mean_errs = np.mean([rr[0] for rr in results], axis=0)

    lams = np.asarray(sample_lams, dtype=float)
    V = np.vander(lams, r + 1, increasing=True)
    t_scale, t_shift = 1.0, 0.0
    if float(np.linalg.cond(V)) > pichol.COND_LIMIT:
        span = lams[-1] - lams[0]
        t_scale = 2.0 / span
        t_shift = -(lams[-1] + lams[0]) / span
        V = np.vander(t_scale * lams + t_shift, r + 1, increasing=True)
    Lv = linalg.cholesky(V.T @ V)
    coeff = linalg.solve_chol(Lv, V.T @ mean_errs)
    t_grid = t_scale * grid.values + t_shift
    fitted = np.vander(t_grid, r + 1, increasing=True) @ coeff
    wall = time.perf_counter() - t_start

    timings = _zero_timings()
    rows = []
    for i, (fold_errs, fold_times) in enumerate(results):
        for phase in PHASES:
            timings[phase] += fold_times[phase]
        for lam, e in zip(sample_lams, fold_errs):
            rows.append({"fold": i, "lambda": float(lam), "error": float(e), **fold_times})
    for lam, e in zip(grid.values, fitted):
        rows.append({"fold": -1, "lambda": float(lam), "error": float(e), **_zero_timings()})
    best_idx = int(np.argmin(fitted))
    return CvReport(
        method="pinrmse",
        per_lambda_error={float(l): float(e) for l, e in zip(grid.values, fitted)},
        best_lambda=float(grid.values[best_idx]),
        best_error=float(fitted[best_idx]),
        timings=timings,
        rows=rows,
        wall_seconds=wall,
    )


def grid_search_svd(p, grid, folds, metric=RMSE, kind=ridge.SVD, k=None, oversample=5, power_iters=2, seed=0, threads=None):
    """Factor X once per fold, then sweep the grid with the shrink formula."""
    threads = resolve_threads(threads)
    t_start = time.perf_counter()

    def run_fold(i):
        X_tr, y_tr, X_val, y_val = _fold_slices(p, folds, i)
        sub = ridge.assemble(X_tr, y_tr)
        times = _zero_timings()
        t0 = time.perf_counter()
        if kind == ridge.SVD:
            f = linalg.svd(X_tr)
        elif kind == ridge.TSVD:
            f = linalg.truncated_svd(X_tr, k)
        elif kind == ridge.RSVD:
            f = linalg.randomized_svd(X_tr, k, oversample, power_iters, seed + i)
        else:
            raise UsageError(f"unknown svd kind {kind!r}")
        times["factorize"] += time.perf_counter() - t0
        errs = np.empty(grid.q)
        for j, lam in enumerate(grid.values):
            t1 = time.perf_counter()
            sol = ridge.solve_svd(sub, f, y_tr, lam)
            t2 = time.perf_counter()
            errs[j] = holdout_error(sol.theta, X_val, y_val, metric)
            t3 = time.perf_counter()
            times["solve"] += t2 - t1
            times["predict"] += t3 - t2
        return errs, times

    results = _map_ordered(run_fold, range(folds.k), threads)
    return _merge(kind, grid.values, results, time.perf_counter() - t_start)


CSV_HEADER = "method,fold,lambda,error," + ",".join(f"t_{ph}" for ph in PHASES)


def report_csv_lines(report):
    """Render a CvReport as CSV lines (header first).

    Rows with fold >= 0 are per-fold measurements and carry that fold's
    phase-time totals; fold == -1 rows are the fold-averaged curve the
    selection uses, with zero timings.
    """
    lines = [CSV_HEADER]
    for row in report.rows:
        cells = [report.method, str(row["fold"]), f"{row['lambda']:.17g}", f"{row['error']:.17g}"]
        cells += [f"{row[ph]:.6g}" for ph in PHASES]
        lines.append(",".join(cells))
    return lines
