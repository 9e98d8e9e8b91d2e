"""Command-line surface: data generation, search drivers, diagnostics.

Commands write delimited reports (CSV with documented headers) and, by
default, a rendered figure next to each report; pass --no-figures to
skip rendering. Exit codes: 0 success, 1 usage, 2 numerical failure,
3 I/O.

BLAS pools are pinned to one thread for the whole run so that results
and timings are reproducible; --threads (or RIDGEPATH_THREADS) controls
fold-level parallelism instead, and reports are identical at any thread
count.
"""

import argparse
import os
import sys
import time

import numpy as np
from threadpoolctl import threadpool_limits

from . import cvsearch, datagen, linalg, matio, pichol, ridge, trivec
from .errors import DimensionMismatch, RidgepathError, UsageError

_METHODS = ("chol", "pichol", "mchol", "svd", "tsvd", "rsvd", "pinrmse")


def _positive_floats(text):
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        raise UsageError(f"bad number list {text!r}") from e
    return values


def _figure_path(csv_path):
    return os.path.splitext(csv_path)[0] + ".png"


def _write_lines(path, lines):
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def _load_problem(x_path, y_path):
    X = matio.load_any(x_path)
    y = matio.load_any(y_path)
    if y.ndim == 2:
        if 1 not in y.shape:
            raise DimensionMismatch(f"labels must be a vector, got shape {y.shape}")
        y = y.ravel(order="F")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    return X, y


def cmd_gen(args):
    if args.spectrum == "decay":
        spectrum = datagen.Decay(args.rate)
    else:
        spectrum = datagen.Uniform(args.lo, args.hi)
    spec = datagen.SynthSpec(
        n=args.n,
        d=args.d,
        spectrum=spectrum,
        noise_sigma=args.noise,
        label_kind=args.labels,
        seed=args.seed,
    )
    X, y, theta_true = datagen.generate(spec)
    os.makedirs(args.out, exist_ok=True)
    paths = {
        "X": os.path.join(args.out, "X.mat"),
        "y": os.path.join(args.out, "y.mat"),
        "theta_true": os.path.join(args.out, "theta_true.mat"),
    }
    matio.save_matrix(paths["X"], X)
    matio.save_matrix(paths["y"], y.reshape(-1, 1))
    matio.save_matrix(paths["theta_true"], theta_true.reshape(-1, 1))
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def _run_cv_method(args, p, grid, folds):
    if args.method == "chol":
        return cvsearch.grid_search_exact(p, grid, folds, args.metric, threads=args.threads)
    if args.method == "pichol":
        return cvsearch.grid_search_pichol(
            p,
            grid,
            folds,
            args.metric,
            g=args.g,
            r=args.r,
            layout_kind=args.layout,
            h0=args.h0,
            raw_monomials=args.raw_monomials,
            threads=args.threads,
        )
    if args.method == "mchol":
        c0 = 0.5 * (np.log10(grid.lo) + np.log10(grid.hi))
        return cvsearch.mchol_search(
            p, c0, args.s0, args.s_min, folds, args.metric, threads=args.threads
        )
    if args.method == "pinrmse":
        return cvsearch.pinrmse_search(
            p, grid, folds, args.metric, g=args.g, r=args.r, threads=args.threads
        )
    kind = {"svd": ridge.SVD, "tsvd": ridge.TSVD, "rsvd": ridge.RSVD}[args.method]
    if kind != ridge.SVD and args.k is None:
        raise UsageError(f"--k is required for method {args.method}")
    return cvsearch.grid_search_svd(
        p,
        grid,
        folds,
        args.metric,
        kind=kind,
        k=args.k,
        oversample=args.oversample,
        power_iters=args.power_iters,
        seed=args.seed,
        threads=args.threads,
    )


def cmd_cv(args):
    X, y = _load_problem(args.x, args.y)
    grid = cvsearch.make_grid(args.lo, args.hi, args.q)
    labels = y if args.metric == cvsearch.MISCLASS else None
    folds = cvsearch.make_folds(X.shape[0], args.folds, args.fold_seed, labels)

    report = _run_cv_method(args, cvsearch.Dataset(X, y), grid, folds)
    _write_lines(args.out, cvsearch.report_csv_lines(report))
    if args.figures:
        from . import plots

        plots.cv_figure(report, _figure_path(args.out))
    print(f"{report.method}, {report.best_lambda:.6g}, {report.best_error:.6g}, {report.wall_seconds:.3f}")
    return 0


def cmd_factor_path(args):
    H = matio.load_any(args.matrix)
    if args.lambdas is not None:
        lams = np.array(_positive_floats(args.lambdas))
        if lams.size == 0:
            raise UsageError("empty lambda list")
    else:
        lams = cvsearch.make_grid(args.lo, args.hi, args.q).values
    layout = trivec.build_layout(args.layout, H.shape[0], args.h0)
    sample_lams = lams[pichol.sample_indices(len(lams), args.g)]
    t0 = time.perf_counter()
    model = pichol.fit(H, sample_lams, args.r, layout, args.raw_monomials)
    diag = pichol.diagnostics(model, H, lams)
    wall = time.perf_counter() - t0

    sample_set = set(float(s) for s in model.sample_lambdas)
    errs = [diag.nrmse_per_lambda[float(lam)] for lam in lams]
    lines = ["lambda,nrmse,is_sample"]
    for lam, e in zip(lams, errs):
        lines.append(f"{lam:.17g},{e:.17g},{int(float(lam) in sample_set)}")
    _write_lines(args.out, lines)
    if args.figures:
        from . import plots

        plots.factor_path_figure(lams, errs, model.sample_lambdas, _figure_path(args.out))
    print(f"pichol, max_nrmse {diag.max_nrmse:.6g}, residual {diag.residual_fro:.6g}, {wall:.3f}")
    return 0


def cmd_diagnose_bound(args):
    from . import theory

    rng = np.random.default_rng(args.seed)
    reports = []
    for _ in range(args.trials):
        G = rng.standard_normal((args.order, args.order))
        A = G @ G.T / args.order
        reports.append(theory.check_main_bound(A, args.lambda_c, args.gamma, args.w, g=args.g))
    lines = ["trial,order,lambda_c,gamma,w,g,D,norm_V_dagger,R_interval,lhs,rhs,satisfied,near"]
    for i, r in enumerate(reports):
        lines.append(
            f"{i},{args.order},{args.lambda_c:.17g},{r.gamma:.17g},{r.w:.17g},{r.g},{r.D},"
            f"{r.norm_V_dagger:.17g},{r.R_interval:.17g},{r.lhs:.17g},{r.rhs:.17g},"
            f"{int(r.satisfied)},{int(r.near)}"
        )
    _write_lines(args.out, lines)
    if args.figures:
        from . import plots

        plots.bound_figure(reports, _figure_path(args.out))
    n_ok = sum(r.satisfied for r in reports)
    print(f"bound satisfied on {n_ok}/{len(reports)} instances")
    return 0 if n_ok == len(reports) else 2


def cmd_bench(args):
    sizes = [int(v) for v in _positive_floats(args.sizes)]
    if not sizes or min(sizes) < 1:
        raise UsageError(f"bad size list {args.sizes!r}")
    if args.reps < 1:
        raise UsageError(f"reps must be positive, got {args.reps}")
    rng = np.random.default_rng(args.seed)
    rows = []
    lines = ["h,layout,g,reps,seconds"]
    for h in sizes:
        factors = [
            linalg.CholeskyFactor(np.asfortranarray(np.tril(rng.standard_normal((h, h)))))
            for _ in range(args.g)
        ]
        for kind in trivec.KINDS:
            layout = trivec.build_layout(kind, h, args.h0)
            seconds = trivec.time_gather(factors, layout, reps=args.reps)
            rows.append({"h": h, "layout": kind, "seconds": seconds})
            lines.append(f"{h},{kind},{args.g},{args.reps},{seconds:.6g}")
            print(f"h={h} {kind}: {seconds * 1e3:.2f} ms")
    _write_lines(args.out, lines)
    if args.figures:
        from . import plots

        plots.bench_figure(rows, _figure_path(args.out))
    return 0


def _add_figures_flag(sub):
    sub.add_argument("--no-figures", dest="figures", action="store_false", help="skip PNG rendering")
    sub.set_defaults(figures=True)


def _add_grid_flags(sub, lo=1e-3, hi=1.0, q=31):
    sub.add_argument("--lo", type=float, default=lo, help="grid lower endpoint")
    sub.add_argument("--hi", type=float, default=hi, help="grid upper endpoint")
    sub.add_argument("--q", type=int, default=q, help="number of grid points")


def build_parser():
    parser = argparse.ArgumentParser(prog="ridgepath", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate a synthetic problem")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--spectrum", choices=("uniform", "decay"), default="uniform")
    gen.add_argument("--lo", type=float, default=0.5, help="smallest singular value (uniform)")
    gen.add_argument("--hi", type=float, default=1.0, help="largest singular value (uniform)")
    gen.add_argument("--rate", type=float, default=0.9, help="geometric decay rate")
    gen.add_argument("--noise", type=float, default=0.0)
    gen.add_argument("--labels", choices=datagen.LABEL_KINDS, default=datagen.CONTINUOUS)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(func=cmd_gen)

    cv = subs.add_parser("cv", help="cross-validated lambda search")
    cv.add_argument("--x", required=True, help="design matrix file")
    cv.add_argument("--y", required=True, help="label vector file")
    cv.add_argument("--method", choices=_METHODS, required=True)
    _add_grid_flags(cv)
    cv.add_argument("--metric", choices=cvsearch.METRICS, default=cvsearch.RMSE)
    cv.add_argument("--folds", type=int, default=5)
    cv.add_argument("--fold-seed", type=int, default=0)
    cv.add_argument("--g", type=int, default=4, help="factorization samples")
    cv.add_argument("--r", type=int, default=2, help="polynomial degree")
    cv.add_argument("--layout", choices=trivec.KINDS, default=trivec.RECURSIVE)
    cv.add_argument("--h0", type=int, default=64, help="recursive base-case size")
    cv.add_argument("--raw-monomials", action="store_true", help="disable the fitting rescale")
    cv.add_argument("--s0", type=float, default=1.5, help="initial half-width, log10 (mchol)")
    cv.add_argument("--s-min", type=float, default=0.0025, help="stopping half-width (mchol)")
    cv.add_argument("--k", type=int, default=None, help="rank (tsvd/rsvd)")
    cv.add_argument("--oversample", type=int, default=5)
    cv.add_argument("--power-iters", type=int, default=2)
    cv.add_argument("--seed", type=int, default=0, help="sketch seed (rsvd)")
    cv.add_argument("--threads", type=int, default=None)
    cv.add_argument("--out", default="cv_report.csv")
    _add_figures_flag(cv)
    cv.set_defaults(func=cmd_cv)

    fp = subs.add_parser("factor-path", help="factor interpolation error along a lambda path")
    fp.add_argument("--matrix", required=True, help="SPD matrix file")
    fp.add_argument("--lambdas", default=None, help="comma-separated lambda list")
    _add_grid_flags(fp)
    fp.add_argument("--g", type=int, default=4)
    fp.add_argument("--r", type=int, default=2)
    fp.add_argument("--layout", choices=trivec.KINDS, default=trivec.RECURSIVE)
    fp.add_argument("--h0", type=int, default=64)
    fp.add_argument("--raw-monomials", action="store_true")
    fp.add_argument("--out", default="factor_path.csv")
    _add_figures_flag(fp)
    fp.set_defaults(func=cmd_factor_path)

    db = subs.add_parser("diagnose-bound", help="check the interpolation error bound on random instances")
    db.add_argument("--order", type=int, default=6)
    db.add_argument("--lambda-c", type=float, default=1.0)
    db.add_argument("--gamma", type=float, default=0.1)
    db.add_argument("--w", type=float, default=0.1)
    db.add_argument("--g", type=int, default=4)
    db.add_argument("--trials", type=int, default=20)
    db.add_argument("--seed", type=int, default=0)
    db.add_argument("--out", default="bound_report.csv")
    _add_figures_flag(db)
    db.set_defaults(func=cmd_diagnose_bound)

    bench = subs.add_parser("bench", help="time the triangular gather by layout")
    bench.add_argument("--sizes", default="256,1024,4096", help="comma-separated h values")
    bench.add_argument("--reps", type=int, default=3, help="repetitions; the median is reported")
    bench.add_argument("--g", type=int, default=4, help="factors gathered per call")
    bench.add_argument("--h0", type=int, default=64)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default="bench.csv")
    _add_figures_flag(bench)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        with threadpool_limits(limits=1):
            return args.func(args)
    except RidgepathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
