"""Acceptance gate: one criterion per test, one printed verdict line each.

BLAS pools are pinned to one thread for every criterion so the timing
comparisons measure the algorithms, not the thread scheduler.
"""

import time

import numpy as np
import pytest
from threadpoolctl import threadpool_limits

from ridgepath import cvsearch, datagen, linalg, pichol, ridge, theory, trivec
from tests.helpers import make_spd_spectrum, strip_timing_columns


@pytest.fixture(autouse=True)
def _pin_blas():
    with threadpool_limits(limits=1):
        yield


def verdict(capsys, ok, label):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}")
    assert ok, label


def curve(report, values):
    return np.array([report.per_lambda_error[float(l)] for l in values])


def test_criterion_1_factor_interpolation_accuracy(capsys):
    # degree-2 fit from 4 factorizations stays within 5% NRMSE at every
    # grid point of a one-decade window, small and moderate dimension
    t0 = time.perf_counter()
    grid = np.logspace(-1, 0, 31)
    worst = {}
    for d in (16, 128):
        H = make_spd_spectrum(d, 0.3, 30.0, seed=0)
        layout = trivec.build_layout(trivec.RECURSIVE, d, 32)
        samples = grid[pichol.sample_indices(31, 4)]
        model = pichol.fit(H, samples, 2, layout)
        diag = pichol.diagnostics(model, H, grid)
        worst[d] = diag.max_nrmse
    elapsed = time.perf_counter() - t0
    ok = worst[16] <= 0.05 and worst[128] <= 0.05 and elapsed < 10.0
    verdict(
        capsys,
        ok,
        f"criterion 1: factor path NRMSE d=16 {worst[16]:.4f}, d=128 {worst[128]:.4f} "
        f"(need <= 0.05 each) in {elapsed:.1f}s",
    )


def test_criterion_2_selection_agreement(capsys):
    # over 20 seeded replicates with an interior optimum, the interpolated
    # search lands within one grid step of the exact search on at least 18,
    # and the multilevel search within 10^0.01 of the fine-grid optimum
    t0 = time.perf_counter()
    grid = cvsearch.make_grid(0.01, 0.1, 31)
    fine = cvsearch.make_grid(1e-3, 1.0, 301)
    agree_pichol = agree_mchol = interior = 0
    n_rep = 20
    for s in range(n_rep):
        spec = datagen.SynthSpec(
            n=1200, d=48, spectrum=datagen.Uniform(0.0548, 0.548), noise_sigma=0.17, seed=s
        )
        X, y, _ = datagen.generate(spec)
        ds = cvsearch.Dataset(X, y)
        folds = cvsearch.make_folds(1200, 2, seed=s)
        exact = cvsearch.grid_search_exact(ds, grid, folds)
        interp = cvsearch.grid_search_pichol(ds, grid, folds, g=4, r=2)
        fine_exact = cvsearch.grid_search_exact(ds, fine, folds)
        mc = cvsearch.mchol_search(ds, c0=-1.5, s0_init=1.5, s_min=0.0025, folds=folds)

        i_e = int(np.argmin(curve(exact, grid.values)))
        i_p = int(np.argmin(curve(interp, grid.values)))
        i_f = int(np.argmin(curve(fine_exact, fine.values)))
        if 0 < i_e < 30 and 0 < i_f < 300:
            interior += 1
        agree_pichol += int(abs(i_p - i_e) <= 1)
        agree_mchol += int(abs(np.log10(mc.best_lambda / fine_exact.best_lambda)) <= 0.01 + 1e-9)
    elapsed = time.perf_counter() - t0
    ok = interior == n_rep and agree_pichol >= 18 and agree_mchol >= 18 and elapsed < 60.0
    verdict(
        capsys,
        ok,
        f"criterion 2: interior {interior}/20, pichol within one step {agree_pichol}/20, "
        f"mchol within 10^0.01 {agree_mchol}/20 (need >= 18 each) in {elapsed:.1f}s",
    )


def test_criterion_3_runtime_win(capsys):
    # on a ~1000-dimensional problem the interpolated sweep costs at most
    # half the exact sweep, measured by the drivers' own wall clocks
    t0 = time.perf_counter()
    spec = datagen.SynthSpec(
        n=1400, d=1023, spectrum=datagen.Uniform(0.1, 1.0), noise_sigma=0.3, seed=0
    )
    X, y, _ = datagen.generate(spec)
    ds = cvsearch.Dataset(X, y)
    grid = cvsearch.make_grid(1e-3, 1.0, 31)
    folds = cvsearch.make_folds(1400, 2, seed=0)
    exact = cvsearch.grid_search_exact(ds, grid, folds)
    interp = cvsearch.grid_search_pichol(ds, grid, folds, g=4, r=2)
    ratio = interp.wall_seconds / exact.wall_seconds
    elapsed = time.perf_counter() - t0
    ok = ratio <= 0.5 and np.isfinite(interp.best_error) and elapsed < 300.0
    verdict(
        capsys,
        ok,
        f"criterion 3: pichol/exact wall ratio {ratio:.3f} at d=1024 "
        f"({interp.wall_seconds:.2f}s vs {exact.wall_seconds:.2f}s, need <= 0.5) in {elapsed:.1f}s",
    )


def test_criterion_4_vectorization_speed(capsys):
    # the recursive gather beats both the rowwise and the full-matrix
    # gather at h=4096, and every layout round-trips exactly
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    h = 4096
    factors = [
        linalg.CholeskyFactor(np.asfortranarray(np.tril(rng.standard_normal((h, h)))))
        for _ in range(4)
    ]
    medians = {}
    for kind in trivec.KINDS:
        layout = trivec.build_layout(kind, h, 64)
        medians[kind] = trivec.time_gather(factors, layout, reps=3)
    del factors

    exact_roundtrip = True
    for hh in list(range(1, 65)) + [255, 256, 257]:
        L = np.tril(np.random.default_rng(hh).standard_normal((hh, hh)))
        for kind in trivec.KINDS:
            layout = trivec.build_layout(kind, hh, 16)
            v = trivec.vectorize(linalg.CholeskyFactor(np.asfortranarray(L)), layout)
            back = trivec.unvectorize(v, layout).matrix
            if not np.array_equal(np.tril(back), L):
                exact_roundtrip = False
    elapsed = time.perf_counter() - t0
    rec, row, full = medians[trivec.RECURSIVE], medians[trivec.ROWWISE], medians[trivec.FULLMATRIX]
    ok = rec < row and rec < full and exact_roundtrip and elapsed < 120.0
    verdict(
        capsys,
        ok,
        f"criterion 4: h=4096 gather medians recursive {rec * 1e3:.0f}ms < "
        f"rowwise {row * 1e3:.0f}ms and fullmatrix {full * 1e3:.0f}ms, "
        f"roundtrip exact {exact_roundtrip}, in {elapsed:.1f}s",
    )


def test_criterion_5_theory_validation(capsys):
    t0 = time.perf_counter()
    # (a) the derivative operator solves its defining equation and matches
    # finite differences on 50 random instances up to order 8
    deriv_ok = True
    for i in range(50):
        rng = np.random.default_rng(2000 + i)
        m = 2 + i % 7
        G = rng.standard_normal((m, m))
        A = G @ G.T / m + np.eye(m)
        B = rng.standard_normal((m, m))
        Delta = (B + B.T) / 2.0
        L = linalg.cholesky(A).matrix
        Gam = theory.dC(A, Delta)
        if np.max(np.abs(Gam @ L.T + L @ Gam.T - Delta)) > 1e-10:
            deriv_ok = False
        eps = 1e-6
        fd = (linalg.cholesky(A + eps * Delta).matrix - linalg.cholesky(A - eps * Delta).matrix) / (2 * eps)
        if np.max(np.abs(Gam - fd)) > 1e-5:
            deriv_ok = False

    # (b) the second-order model's error decays at third order
    rng = np.random.default_rng(7)
    G = rng.standard_normal((4, 4))
    A = G @ G.T / 4 + np.eye(4)
    model = theory.taylor_model(A, 1.0)
    hs = np.logspace(-3, -1, 9)
    errs = [
        np.linalg.norm(model.eval(1.0 + h).matrix - linalg.cholesky(A + (1.0 + h) * np.eye(4)).matrix, "fro")
        for h in hs
    ]
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])

    # (c) the accuracy bound holds on 100 random instances
    n_sat = 0
    for i in range(100):
        rng = np.random.default_rng(1000 + i)
        m = int(rng.integers(2, 9))
        G = rng.standard_normal((m, m))
        A = G @ G.T / m
        rep = theory.check_main_bound(A, lambda_c=1.0, gamma=0.1, w=0.1)
        n_sat += int(rep.satisfied)

    # (d) the norm ingredients of the bound hold on 1000 draws
    rng = np.random.default_rng(11)
    norms_ok = True
    for _ in range(1000):
        m = int(rng.integers(2, 7))
        v = rng.standard_normal(m * m)
        if np.linalg.norm(theory.sym_product_dense(theory.unvec(v)), 2) > 2.0 * np.linalg.norm(v) + 1e-9:
            norms_ok = False
        lam_c = float(rng.uniform(0.05, 4.0))
        if np.linalg.norm(theory.coeff_shift_inverse(lam_c), 2) > lam_c + 1.0 + 1e-9:
            norms_ok = False
        t = float(rng.uniform(0.0, 5.0))
        if np.linalg.norm([1.0, t, t * t]) > 1.0 + t * t + 1e-9:
            norms_ok = False
    elapsed = time.perf_counter() - t0
    ok = deriv_ok and 2.7 <= slope <= 3.3 and n_sat == 100 and norms_ok and elapsed < 180.0
    verdict(
        capsys,
        ok,
        f"criterion 5: derivative checks 50/50 {deriv_ok}, taylor slope {slope:.3f} in [2.7, 3.3], "
        f"bound {n_sat}/100, norm lemmas 1000 draws {norms_ok}, in {elapsed:.1f}s",
    )


def test_criterion_6_baseline_equivalence(capsys):
    # full SVD solves match the factorization solves to 1e-8 on 50 random
    # problems, truncation at full rank changes nothing, and the error
    # interpolation baseline emits a schema-complete report
    t0 = time.perf_counter()
    agree = trunc = 0
    for i in range(50):
        rng = np.random.default_rng(3000 + i)
        n, d = int(rng.integers(20, 60)), int(rng.integers(2, 11))
        X = rng.standard_normal((n, d))
        y = rng.standard_normal(n)
        lam = float(rng.uniform(0.01, 10.0))
        p = ridge.assemble(X, y)
        t_exact = ridge.solve_exact(p, lam).theta
        f = linalg.svd(X)
        t_svd = ridge.solve_svd(p, f, y, lam).theta
        agree += int(np.max(np.abs(t_exact - t_svd)) <= 1e-8)
        ft = linalg.truncated_svd(X, d)
        t_tsvd = ridge.solve_svd(p, ft, y, lam).theta
        trunc += int(np.max(np.abs(t_tsvd - t_svd)) <= 1e-10)

    spec = datagen.SynthSpec(n=300, d=12, spectrum=datagen.Uniform(0.0548, 0.548), noise_sigma=0.17, seed=0)
    X, y, _ = datagen.generate(spec)
    grid = cvsearch.make_grid(0.01, 0.1, 31)
    folds = cvsearch.make_folds(300, 2, seed=0)
    rep = cvsearch.pinrmse_search(cvsearch.Dataset(X, y), grid, folds)
    lines = cvsearch.report_csv_lines(rep)
    schema_ok = (
        lines[0] == cvsearch.CSV_HEADER
        and len(lines) == 1 + 2 * 4 + 31
        and rep.method == "pinrmse"
        and float(rep.best_lambda) in set(float(v) for v in grid.values)
    )
    elapsed = time.perf_counter() - t0
    ok = agree == 50 and trunc == 50 and schema_ok and elapsed < 60.0
    verdict(
        capsys,
        ok,
        f"criterion 6: svd agrees {agree}/50, full-rank truncation exact {trunc}/50, "
        f"pinrmse report schema {schema_ok}, in {elapsed:.1f}s",
    )


def test_criterion_7_determinism(capsys):
    # identical reports at any fold-level thread count, CSV included
    t0 = time.perf_counter()
    spec = datagen.SynthSpec(n=600, d=24, spectrum=datagen.Uniform(0.0548, 0.548), noise_sigma=0.17, seed=0)
    X, y, _ = datagen.generate(spec)
    ds = cvsearch.Dataset(X, y)
    grid = cvsearch.make_grid(0.01, 0.1, 31)
    folds = cvsearch.make_folds(600, 4, seed=0)
    same = True
    for driver in (
        lambda t: cvsearch.grid_search_exact(ds, grid, folds, threads=t),
        lambda t: cvsearch.grid_search_pichol(ds, grid, folds, threads=t),
        lambda t: cvsearch.mchol_search(ds, c0=-1.5, s0_init=1.5, s_min=0.0025, folds=folds, threads=t),
    ):
        r1, r8 = driver(1), driver(8)
        vals = sorted(r1.per_lambda_error)
        if not np.array_equal(curve(r1, vals), curve(r8, vals)):
            same = False
        if r1.best_lambda != r8.best_lambda:
            same = False
        csv1 = strip_timing_columns("\n".join(cvsearch.report_csv_lines(r1)))
        csv8 = strip_timing_columns("\n".join(cvsearch.report_csv_lines(r8)))
        if csv1 != csv8:
            same = False
    elapsed = time.perf_counter() - t0
    ok = same and elapsed < 60.0
    verdict(
        capsys,
        ok,
        f"criterion 7: exact, pichol, and mchol reports identical at 1 and 8 threads "
        f"({same}), in {elapsed:.1f}s",
    )
