"""Headless figure rendering for CLI reports.

Every function writes one PNG next to the CSV it visualizes and returns
the path. The Agg backend is forced so rendering works without a
display.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def cv_figure(report, path):
    """Fold-averaged validation error against lambda, best point marked."""
    lams = np.array(sorted(report.per_lambda_error))
    errs = np.array([report.per_lambda_error[l] for l in lams])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lams, errs, marker="o", ms=3, lw=1)
    ax.plot([report.best_lambda], [report.best_error], marker="*", ms=12, color="crimson")
    if lams.min() > 0 and len(lams) > 1:
        ax.set_xscale("log")
    ax.set_xlabel("lambda")
    ax.set_ylabel("validation error")
    ax.set_title(f"{report.method}: best lambda {report.best_lambda:.4g}")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def factor_path_figure(lambdas, nrmse, sample_lambdas, path):
    """NRMSE of interpolated factors along the path; samples marked."""
    lambdas = np.asarray(lambdas, dtype=float)
    nrmse = np.asarray(nrmse, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lambdas, nrmse, marker="o", ms=3, lw=1)
    for s in sample_lambdas:
        ax.axvline(s, color="gray", lw=0.8, ls="--", alpha=0.6)
    if lambdas.min() > 0 and len(lambdas) > 1:
        ax.set_xscale("log")
    ax.set_xlabel("lambda")
    ax.set_ylabel("NRMSE")
    ax.set_title("factor interpolation error along the path")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def bench_figure(rows, path):
    """Grouped bars of gather time per layout at each size."""
    sizes = sorted({r["h"] for r in rows})
    layouts = sorted({r["layout"] for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / max(len(layouts), 1)
    for j, layout in enumerate(layouts):
        xs = np.arange(len(sizes)) + j * width
        ys = [next(r["seconds"] for r in rows if r["h"] == h and r["layout"] == layout) for h in sizes]
        ax.bar(xs, ys, width=width, label=layout)
    ax.set_xticks(np.arange(len(sizes)) + 0.4 - width / 2)
    ax.set_xticklabels([str(h) for h in sizes])
    ax.set_xlabel("h")
    ax.set_ylabel("median gather seconds")
    ax.set_yscale("log")
    ax.legend()
    ax.set_title("triangular gather by layout")
    return _finish(fig, path)


def bound_figure(reports, path):
    """Measured error vs bound value per instance, with the y = x line."""
    lhs = np.array([r.lhs for r in reports])
    rhs = np.array([r.rhs for r in reports])
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(rhs, lhs, s=14, alpha=0.8)
    lo = max(min(lhs.min(), rhs.min()), 1e-300)
    hi = max(lhs.max(), rhs.max())
    ax.plot([lo, hi], [lo, hi], color="gray", lw=1, ls="--")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("bound value")
    ax.set_ylabel("measured sweep error")
    ax.set_title("error bound per instance")
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)
