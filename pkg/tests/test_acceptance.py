"""Acceptance criteria 1-17, one verdict line each.

Run with ``pytest -v tests/test_acceptance.py``; each test prints
``criterion N: PASS|FAIL  <detail>`` straight to the terminal.
"""
import json
import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from ddseries import arith, corrpoly, dds, eisenstein, lfun, whittaker
from ddseries.arith import ALL_CHARS, CHI4, CHI8, TRIV
from ddseries.cli import SUITES, RunConfig, run_suite
from ddseries.coeffs import CoeffSequence
from ddseries.corrpoly import DIVISOR

HECKE = CoeffSequence.hecke(seed=7)


@pytest.fixture
def verdict(capsys):
    def report(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return report


def _opts(**kw):
    return SimpleNamespace(points=None, chi=TRIV, chip=TRIV, **kw)


_reports = {}


def suite(name, seed=0):
    if (name, seed) not in _reports:
        t0 = time.perf_counter()
        rep = run_suite(name, RunConfig(seed=seed), _opts())
        _reports[name, seed] = (rep, time.perf_counter() - t0)
    return _reports[name, seed]


def describe(rep, secs=None):
    txt = f"{rep['n_points']} checks, max residual {rep['max_residual']:.2e} (tol {rep['tolerance']:.0e})"
    return txt + (f", {secs:.1f} s" if secs is not None else "")


def test_criterion_01_gauss_closed_form(verdict):
    t0 = time.perf_counter()
    ds = [d for d in range(1, 2002, 2) if arith.is_squarefree(d)]
    worst = max(abs(arith.gauss_H(1, d) - math.sqrt(d)) / math.sqrt(d) for d in ds)
    secs = time.perf_counter() - t0
    verdict(1, worst < 1e-8 and secs < 10, f"{len(ds)} moduli, max rel err {worst:.2e}, {secs:.2f} s")


def test_criterion_02_prime_power_table(verdict):
    worst = max(
        abs(arith.gauss_H_prime_power(p, a, b) - arith.gauss_H(p**a, p**b)) / p ** (b / 2)
        for p in (3, 5, 7)
        for a in range(5)
        for b in range(5)
    )
    verdict(2, worst < 1e-9, f"75 entries, max scaled err {worst:.2e}")


def test_criterion_03_euler_factors(verdict):
    rng = np.random.default_rng(0)
    local = 0.0
    for p in arith.primes_up_to(47)[1:]:
        for _ in range(30):
            n = int(rng.integers(1, 5000)) * int(rng.choice([-1, 1])) * int(p) ** int(rng.integers(0, 3))
            s = complex(rng.uniform(0.8, 3), rng.uniform(-10, 10))
            lhs, rhs = dds.local_factor_c(int(p), s, n, ALL_CHARS[int(rng.integers(4))])
            local = max(local, abs(lhs - rhs) / max(1, abs(rhs)))
    glob_ok, glob_worst = True, 0.0
    for n in (1, -3, 5, 12, -45):
        for chi in ALL_CHARS:
            s = 2 + 0.7j
            v = dds.inner_sum_over_c(s, n, chi, 20001)
            err = abs(v.value - dds.inner_sum_over_c_limit(s, n, chi))
            glob_ok &= err <= v.tail_bound + 1e-12
            glob_worst = max(glob_worst, err)
    verdict(3, local < 1e-10 and glob_ok, f"local max {local:.2e}; global max err {glob_worst:.2e} within tails: {glob_ok}")


def test_criterion_04_inner_n_sum(verdict):
    ok, worst = True, 0.0
    for seq in (DIVISOR, HECKE):
        for c in (1, 3, 9, 15, 45):
            v = dds.inner_sum_over_n(3, c, TRIV, seq, 10**6)
            ref, ref_err = dds.Lstar_gl2_bounded(3, c, TRIV, seq)
            err = abs(v.value - math.sqrt(c) * ref)
            ok &= err <= v.tail_bound + math.sqrt(c) * ref_err + 1e-14 * abs(ref)
            worst = max(worst, err)
    local = max(
        abs(lhs - rhs)
        for seq in (DIVISOR, HECKE)
        for p in (3, 5, 7, 11)
        for c in (1, p, p**2, p**3, 15 * p)
        for lhs, rhs in [dds.local_factor_n(p, 3 + 1j, c, CHI8, seq)]
    )
    verdict(4, ok and local < 1e-10, f"N=1e6 max err {worst:.2e} within tail + reference bound: {ok}; local max {local:.2e}")


def test_criterion_05_correction_fe(verdict):
    rng = np.random.default_rng(5)
    q = max(
        corrpoly.q_fe_residual(complex(rng.uniform(-1, 2), rng.uniform(-10, 10)), int(rng.integers(1, 10**5)) * int(rng.choice([-1, 1])), ALL_CHARS[int(rng.integers(4))])
        for _ in range(200)
    )
    Q = max(
        corrpoly.Q_fe_residual(complex(rng.uniform(-1, 2), rng.uniform(-10, 10)), 2 * int(rng.integers(0, 5 * 10**4)) + 1, ALL_CHARS[int(rng.integers(4))], seq)
        for seq in (DIVISOR, HECKE)
        for _ in range(100)
    )
    verdict(5, q < 1e-12 and Q < 1e-12, f"q max {q:.2e}, Q max {Q:.2e} (200 each)")


def test_criterion_06_nontrivial_relation(verdict):
    rep, secs = suite("corrpoly")
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        s = complex(rng.uniform(0, 1.5), rng.uniform(-5, 5))
        d0 = 2 * int(rng.integers(0, 100)) + 1
        while not arith.is_squarefree(d0):
            d0 = 2 * int(rng.integers(0, 100)) + 1
        d1 = 2 * int(rng.integers(0, 100)) + 1
        worst = max(worst, corrpoly.nontrivial_relation_check(s, d0, d1, ALL_CHARS[int(rng.integers(4))]))
    verdict(6, worst < 1e-11 and rep["pass"], f"max residual {worst:.2e} on 100 inputs; suite: {describe(rep)}")


def test_criterion_07_representations(verdict):
    lines, ok = [], True
    for chars in ((TRIV, TRIV), (CHI4, CHI8)):
        for s, w in [(4.5, 2.0), (5.0, 2.5), (4.6, 2.1), (5.0, 2.0), (4.0, 2.0)]:
            t0 = time.perf_counter()
            pt = dds.RegionPoint(s, w)
            a = dds.Z_repr_A(pt, *chars)
            b = dds.Z_repr_B(pt, *chars)
            secs = time.perf_counter() - t0
            diff = abs(a.value - b.value)
            good = diff <= a.tail_bound + b.tail_bound + 1e-8 * abs(b.value) and diff <= 1e-6 and secs < 60
            ok &= good
            lines.append(diff)
    verdict(7, ok, f"10 points, max |A-B| {max(lines):.2e} (within tails, <= 1e-6)")


def test_criterion_08_zhat(verdict):
    rep, secs = suite("zhat")
    verdict(8, rep["pass"] and rep["n_points"] >= 5, describe(rep, secs))


def test_criterion_09_term_fe(verdict):
    a, sa = suite("gl1fe")
    b, sb = suite("gl2fe-divisor")
    verdict(9, a["pass"] and b["pass"], f"alpha: {describe(a)}; beta: {describe(b)}")


def test_criterion_10_r2(verdict):
    rep, secs = suite("r2")
    verdict(10, rep["pass"] and rep["n_points"] == 2500, describe(rep, secs))


def test_criterion_11_sturm(verdict):
    rep, secs = suite("sturm")
    verdict(11, rep["pass"] and rep["n_points"] == 100 * 101, describe(rep, secs))


def test_criterion_12_scattering(verdict):
    rep, secs = suite("scattering")
    verdict(12, rep["pass"] and rep["n_points"] == 11, describe(rep, secs))


def test_criterion_13_automorphy(verdict):
    ctx = eisenstein.GroupContext()
    gens = [ctx.generator(c) for c in ctx.open_cusps()]
    zs = [0.1 + 0.6j, -0.3 + 0.8j, 0.45 + 0.5j, 0.2 + 1.1j, -0.05 + 0.4j]
    auto = max(eisenstein.automorphy_residual(g, z, 2.0) for g in gens for z in zs)
    f = eisenstein.eval_E(1j, 2.0).value
    g = eisenstein.eval_E_group_sum(1j, 2.0).value
    verdict(13, auto < 1e-5 and abs(f - g) < 1e-3, f"automorphy max {auto:.2e} ({len(gens)} generators x 5 points); Fourier vs group sum {abs(f - g):.2e}")


def test_criterion_14_whittaker(verdict):
    rep, secs = suite("whittaker")
    verdict(14, rep["pass"] and rep["n_points"] == 12 + 16, describe(rep, secs))


def test_criterion_15_decay(verdict):
    spreads = []
    for p in (1, -1):
        rows = whittaker.nicole_decay_scan(p, 0.5 + 1j, np.geomspace(2, 32, 17))
        spreads += whittaker.dyadic_spread(rows)
    decreasing = True
    for p in (1, -1):
        vals = [abs(whittaker.estimateM_I(p, t)) for t in (2.0, 4.0, 8.0)]
        decreasing &= vals[0] > vals[1] > vals[2]
    verdict(15, max(spreads) < 4 and decreasing, f"max dyadic spread {max(spreads):.3f}; normalized I decreasing: {decreasing}")


def test_criterion_16_average_slopes(verdict):
    moment = lfun.moment_experiment(2000, 0.5, power=4).slope
    lind = dds.lindelof_average_experiment(2000, 0.5).slope
    ok = 0.9 <= moment <= 1.3 and 0.9 <= lind <= 1.4
    verdict(16, ok, f"fourth-moment slope {moment:.3f} (want [0.9, 1.3]); divisor average slope {lind:.3f} (want [0.9, 1.4])")


def test_criterion_17_determinism(verdict):
    first = [json.dumps(suite(name)[0], sort_keys=True) for name in SUITES]
    second = [json.dumps(run_suite(name, RunConfig(seed=0), _opts()), sort_keys=True) for name in SUITES]
    same = first == second
    verdict(17, same, f"{len(SUITES)} suites run twice with seed 0: identical JSON {same}")
