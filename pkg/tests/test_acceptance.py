"""End-to-end acceptance checks, one per numbered criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line and then
asserts, so ``pytest -v`` shows both the verdict and the measured values.
"""

import time

import numpy as np
import pytest
from scipy.integrate import quad

from torus_superres import adversarial, bump, cube
from torus_superres.fourier import LinfBall, comb_fourier, max_coeff_diff, perturb, table_of
from torus_superres.jackson import JacksonKernel
from torus_superres.metrics import HHParams, hh_distance, hh_violation, wasserstein
from torus_superres.recon import default_params, random_spikes, reconstruct_signed
from torus_superres.torus import DiracComb, ball_mass, coordinate_distances


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} | {detail}")


def test_criterion_1_jackson(capsys):
    t0 = time.perf_counter()
    norm_err = 0.0
    for n in range(1, 9):
        k = JacksonKernel(n)
        val, _ = quad(k.eval_1d, 0, 1, limit=400, epsabs=1e-12, epsrel=1e-12)
        norm_err = max(norm_err, abs(val - 1))
    coeff_err = 0.0
    for n in (2, 3, 5):
        k = JacksonKernel(n)
        for ell in range(0, 2 * n + 1):
            val, _ = quad(lambda x: k.eval_1d(x) * np.cos(2 * np.pi * ell * x), 0, 1,
                          limit=400, epsabs=1e-12, epsrel=1e-12)
            coeff_err = max(coeff_err, abs(val - k.fourier_1d(ell)))
    vanish = all(JacksonKernel(n).fourier_1d(l) == 0 for n in range(1, 9)
                 for l in range(2 * n - 1, 2 * n + 6))
    mc = []
    for d, n in ((1, 4), (2, 4), (3, 8)):
        s = JacksonKernel(n, d).sample(10**5, seed=0)
        c = coordinate_distances(s, np.zeros(d))
        dist = np.sqrt((c * c).sum(axis=1))
        bound = np.sqrt(d) / n + 3 * dist.std(ddof=1) / np.sqrt(dist.size)
        mc.append((d, n, float(dist.mean()), float(bound)))
    elapsed = time.perf_counter() - t0
    ok = (norm_err <= 1e-6 and coeff_err <= 1e-6 and vanish
          and all(m <= b for *_, m, b in mc) and elapsed < 30)
    detail = (f"norm_err={norm_err:.2e} coeff_err={coeff_err:.2e} vanish={vanish} "
              + " ".join(f"E[d](d={d},n={n})={m:.4f}<={b:.4f}" for d, n, m, b in mc)
              + f" time={elapsed:.1f}s")
    report(capsys, 1, ok, detail)
    assert ok


def test_criterion_2_grid_pair(capsys):
    t0 = time.perf_counter()
    D1, D2, Tp = adversarial.grid_pair(2, 0.1)
    _, diff = max_coeff_diff(table_of(D1, LinfBall(6)), table_of(D2, LinfBall(6)))
    w = wasserstein(D1, D2)
    elapsed = time.perf_counter() - t0
    ok = Tp == 7 and diff <= 1e-10 and w >= 0.1 - 1e-9 and elapsed < 60
    report(capsys, 2, ok, f"T'={Tp} max_diff={diff:.2e} d_W={w:.6f} time={elapsed:.1f}s")
    assert ok


def test_criterion_3_one_dim_pair(capsys):
    eps = 0.1
    D1, D2 = adversarial.one_dim_pair(eps)
    diffs = {ell: abs(comb_fourier(D1, [ell]) - comb_fourier(D2, [ell])) for ell in range(-7, 8)}
    parity_ok = all(abs(v - (0 if ell % 2 == 0 else 4 * eps)) <= 1e-12 for ell, v in diffs.items())
    w = wasserstein(D1, D2)
    hh = hh_distance(D1, D2, HHParams(0.49))
    ok = (parity_ok and abs(w - eps) <= 1e-6
          and abs(hh.lower - 2 * eps) <= 1e-6 and abs(hh.upper - 2 * eps) <= 1e-6)
    report(capsys, 3, ok, f"parity={parity_ok} d_W={w:.8f} hh=[{hh.lower:.8f}, {hh.upper:.8f}]")
    assert ok


def test_criterion_4_reconstruction(capsys):
    t0 = time.perf_counter()
    eps = 0.25
    p = default_params(1, eps, T=24, n=4, K=64, kappa=0.01)
    dists = []
    for seed in range(10):
        f = random_spikes(1, 3, seed, signed=True)
        u = perturb(table_of(f, LinfBall(p.T)), p.kappa / 8, "worst_case_sign")
        dists.append(wasserstein(f, reconstruct_signed(u, p)))
    elapsed = time.perf_counter() - t0
    med = float(np.median(dists))
    ok = max(dists) <= 4 * eps and med <= 0.25 and elapsed < 300
    report(capsys, 4, ok, f"max d_W={max(dists):.4f} (<= 1.0) median={med:.4f} (<= 0.25) "
                          f"time={elapsed:.1f}s")
    assert ok


def test_criterion_5_bump(capsys):
    t0 = time.perf_counter()
    B = bump.build_q(0.25, 0.49, 16, "far")
    q_ok = all(c["ok"] for c in B.checks.values())
    v = bump.verify_bump(B, n_points=10_000, seed=0)
    v_ok = all(c["ok"] for c in v.values())
    s = bump.sandwich_check(16, B.outer_radius, n_points=10_000, seed=0)
    trend = bump.degree_trend(0.25, 0.49, (4, 16, 64))
    trend_ok = all(r <= 2.0 for r in trend["ratios"])
    elapsed = time.perf_counter() - t0
    ok = q_ok and v_ok and s["ok"] and trend_ok and elapsed < 120
    degs = "/".join(str(trend["degrees"][d]) for d in (4, 16, 64))
    ratios = "/".join(f"{r:.3f}" for r in trend["ratios"])
    report(capsys, 5, ok, f"q_checks={q_ok} near_min={v['near']['min']:.4f} "
                          f"far_max={v['far']['max']:.2e} sandwich={s['ok']} "
                          f"deg_q(4/16/64)={degs} ratios={ratios} time={elapsed:.1f}s")
    assert ok


def test_criterion_6_cube(capsys):
    t0 = time.perf_counter()
    # oracle first: d = 10 exhaustive tabulation against the closed forms
    small = cube.cube_mixture_pair(10, 0.005, enforce_range=False)
    sizes = np.array([bin(i).count("1") for i in range(2**10)])
    oracle_err = 0.0
    for m in small:
        tab = cube.tabulate_mixture(m)
        walsh = cube.walsh_coefficients(tab)
        levels = np.array([cube.mix_fourier_level(m, s) for s in range(11)])
        oracle_err = max(oracle_err, float(np.max(np.abs(walsh - levels[sizes]))),
                         abs(tab[0] - cube.mix_mass_allones(m)))
    pair = cube.cube_mixture_pair(30, 0.005)
    a0 = abs(pair.poly.a0)
    split_ok = (abs(pair.mu.weights.sum() - 1) < 1e-12 and abs(pair.nu.weights.sum() - 1) < 1e-12
                and abs(np.sum(np.clip(pair.poly.coefficients, 0, None)) - 1) < 1e-9)
    bek = cube.bek_supnorm_check(pair.poly)
    gap = abs(pair.mass_gap)
    elapsed = time.perf_counter() - t0
    ok = (pair.poly.k == 3 and a0 >= 0.015 and split_ok and bek.holds and gap >= 0.01
          and oracle_err <= 1e-12 and elapsed < 60)
    report(capsys, 6, ok, f"k={pair.poly.k} |a0|={a0:.6f} split={split_ok} "
                          f"bek_sup={bek.sup:.2e}<={bek.bound:.3f} mass_gap={gap:.6f} "
                          f"oracle_err={oracle_err:.1e} time={elapsed:.1f}s")
    assert ok


def test_criterion_7_embedding(capsys):
    eps = 0.005
    pair = cube.cube_mixture_pair(12, eps, enforce_range=False)
    D1, D2 = cube.embed_cube_pair(12, pair)
    walsh = cube.walsh_coefficients(cube.tabulate_mixture(pair.mu))
    rng = np.random.Generator(np.random.Philox(0))
    err = max(abs(comb_fourier(D1, ell) - cube.embedded_coefficient(walsh, ell))
              for ell in rng.integers(-10, 11, size=(200, 12)))
    zero = np.zeros(12)
    margin = ball_mass(D1, zero, 0.0) - ball_mass(D2, zero, 0.49)
    witness = hh_violation(D1, D2, 0.49, eps, zero, 0.0)
    ok = err <= 1e-10 and witness
    report(capsys, 7, ok, f"identity_err={err:.1e} witness_margin={margin:.4f} (> eps={eps}) "
                          f"violation={witness}")
    assert ok


def test_criterion_8_wasserstein_controls_hh(capsys):
    t0 = time.perf_counter()
    configs = [(d, e) for d in (1, 2) for e in (0.2, 0.4)]
    worst, failures = -np.inf, 0
    for trial in range(100):
        d, ed = configs[trial % 4]
        rng = np.random.Generator(np.random.Philox(trial))
        D1 = DiracComb(rng.uniform(size=(5, d)), rng.dirichlet(np.ones(5)))
        D2 = DiracComb(rng.uniform(size=(5, d)), rng.dirichlet(np.ones(5)))
        w = wasserstein(D1, D2)
        hh = hh_distance(D1, D2, HHParams(ed))
        allowed = w / (ed - 2 * hh.cover_radius) + 1e-9
        worst = max(worst, hh.upper - allowed)
        failures += hh.upper > allowed
    elapsed = time.perf_counter() - t0
    ok = failures == 0
    report(capsys, 8, ok, f"trials=100 failures={failures} worst_excess={worst:.4f} "
                          f"time={elapsed:.1f}s")
    assert ok


def test_criterion_9_infinite_bandlimit_preconditions(capsys):
    eps, M, n = 0.05, 64, 80
    kappa = adversarial.default_sizes(1, eps)[2]
    retries = 2000
    try:
        pair = adversarial.random_separated_pair(1, eps, seed=0, max_retries=retries, M=M, n=n)
    except adversarial.RetriesExhausted as exc:
        report(capsys, 9, False, f"kappa={kappa:.4f}: no draw in {retries} satisfies both "
                                 f"conditions; failures={dict(exc.failures)}")
        pytest.fail(str(exc))
    _, gap = adversarial.max_infinite_fourier_diff(pair)
    ok = gap < pair.kappa
    report(capsys, 9, ok, f"attempts={pair.attempts} min_cross={pair.min_cross_distance:.4f} "
                          f"max_exp_sum={pair.max_exp_sum:.4f} max_diff={gap:.2e} < kappa={kappa:.4f}")
    assert ok
