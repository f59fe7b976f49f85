import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddseries import arith, corrpoly
from ddseries.arith import ALL_CHARS, CHI4, CHI8, TRIV
from ddseries.coeffs import CoeffSequence, b_coeff, coeff, coeff_array, local_lfactor, rpc_average_check
from ddseries.corrpoly import DIVISOR, Q_poly, Qhat_poly, Qstar_poly, q_poly, u_r

HECKE = CoeffSequence.hecke(seed=11)


def tau(n):
    return len(arith.divisors(n))


def test_divisor_coefficients_are_tau():
    t = coeff_array(DIVISOR, 3000)
    for n in range(1, 3001, 7):
        if n % 2:
            assert t[n] == tau(n)
    assert coeff(DIVISOR, 45) == 6


def test_array_matches_pointwise_for_hecke():
    t = coeff_array(HECKE, 2000)
    for n in (1, 2, 3, 9, 27, 45, 64, 97, 1024, 1155, 1997):
        assert abs(t[n] - coeff(HECKE, n)) < 1e-9


@settings(max_examples=60)
@given(st.integers(1, 300), st.integers(1, 300))
def test_hecke_multiplicative(m, n):
    if math.gcd(m, n) == 1:
        assert abs(coeff(HECKE, m * n) - coeff(HECKE, m) * coeff(HECKE, n)) < 1e-9


def test_hecke_tempered_and_recursion():
    for p in arith.primes_up_to(200)[1:]:
        pw = HECKE.prime_powers(int(p), 4)
        assert abs(pw[1]) <= 2
        for k in range(2, 5):
            assert abs(pw[k] - (pw[1] * pw[k - 1] - pw[k - 2])) < 1e-12


def test_seeded_determinism_and_overrides():
    a = coeff_array(CoeffSequence.hecke(seed=5), 500)
    b = coeff_array(CoeffSequence.hecke(seed=5), 500)
    assert np.array_equal(a, b)
    pinned = CoeffSequence.hecke(seed=5, overrides={3: 1.5})
    assert coeff(pinned, 3) == 1.5
    with pytest.raises(ValueError):
        CoeffSequence.hecke(overrides={3: 3.0})


def test_b_coeff_and_local_factor():
    assert abs(b_coeff(DIVISOR, -9) - 3 / 3) < 1e-15
    x = 0.3
    series = sum(DIVISOR.prime_powers(3, 60)[k] * x**k for k in range(61))
    assert abs(local_lfactor(DIVISOR, 3, x) - series) < 1e-12
    with pytest.raises(ValueError):
        local_lfactor(DIVISOR, 2, x)


def test_rpc_slope():
    rep = rpc_average_check(HECKE, 20000)
    assert 0.85 < rep.slope < 1.25


# ---------------------------------------------------------------- corrpoly


def test_q_examples():
    s = 0.4 + 1.1j
    assert q_poly(s, 5, CHI8) == 1
    assert abs(q_poly(s, 9, TRIV) - ((1 - 3**-s) + 3 ** (1 - 2 * s))) < 1e-14


def test_Q_examples():
    assert Q_poly(0.3 + 2j, 15, CHI4) == 1
    # (tau(9) - tau(3)(1 + 3)/3 + tau(1)/3) / 3^{2(1 - 1/2)}
    assert abs(Q_poly(1, 9, TRIV) - (3 - 8 / 3 + 1 / 3) / 3) < 1e-14
    s = 0.7 - 0.2j
    assert abs(Qstar_poly(s, 9, TRIV) - (Q_poly(s, 9, TRIV) + 1 + 3 ** (2 - 4 * s))) < 1e-14
    assert abs(Qstar_poly(s, 45, TRIV) - (Q_poly(s, 45, TRIV) + 1 + 3 ** (2 - 4 * s))) < 1e-14
    with pytest.raises(ValueError):
        Q_poly(s, 10, TRIV)


def test_Qhat_relation_to_Q():
    s = 0.6 + 0.8j
    assert abs(Qhat_poly(s, 45, TRIV) - Q_poly(s, 45, TRIV)) < 1e-14
    assert abs(Qhat_poly(s, 27, TRIV) - Q_poly(s, 27, CHI4)) < 1e-14
    for c in (9 * 7, 25 * 3, 49 * 11, 81 * 5):
        c0 = arith.squarefree_decomp(c).n0
        for chi in ALL_CHARS:
            other = chi if c0 % 4 == 1 else chi * CHI4
            assert abs(Qhat_poly(s, c, chi) - Q_poly(s, c, other)) < 1e-12


def test_u_r():
    assert u_r(0.7, 0) == 0
    assert abs(u_r(0.5 + 0.1j, 2) - ((0.5 + 0.1j) ** 2 + (0.5 + 0.1j) ** 4)) < 1e-15
    assert u_r(1, 1) == 1
    x = 0.8 - 0.3j
    assert abs(u_r(x, 5) - ((x * x) ** 6 - x * x) / (x * x - 1)) < 1e-14


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-1, 2),
    st.floats(-10, 10),
    st.integers(1, 10**5),
    st.sampled_from([-1, 1]),
    st.sampled_from(ALL_CHARS),
)
def test_q_functional_equation(x, y, n, sign, chi):
    assert corrpoly.q_fe_residual(complex(x, y), sign * n, chi) < 1e-12


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-1, 2),
    st.floats(-10, 10),
    st.integers(0, 5 * 10**4).map(lambda k: 2 * k + 1),
    st.sampled_from(ALL_CHARS),
    st.sampled_from([DIVISOR, HECKE]),
)
def test_Q_functional_equation(x, y, c, chi, seq):
    assert corrpoly.Q_fe_residual(complex(x, y), c, chi, seq) < 1e-12


def test_q_trivial_bound():
    for n in range(1, 10**4, 37):
        bound = 2 ** len(arith.factorize(n)) * tau(n) if n > 1 else 1
        for s in (0.5, 0.5 + 7j, 1.3):
            assert abs(q_poly(s, n, CHI8)) <= bound + 1e-9


@pytest.mark.parametrize("s,d0,d1", [(0.8 + 1.5j, 5, 9), (0.6, 21, 15), (1.1 - 2j, 1, 45), (0.3 + 0.2j, 3, 1)])
def test_nontrivial_relation_examples(s, d0, d1):
    for chi in ALL_CHARS:
        assert corrpoly.nontrivial_relation_check(s, d0, d1, chi) < 1e-11


def test_Lstar_gl1_examples():
    assert abs(corrpoly.Lstar_gl1(2, 9, TRIV) - ((1 - 1 / 9) + 3**-3) * math.pi**2 / 8) < 1e-13
    assert abs(corrpoly.Lstar_gl1(2, -5, TRIV) - corrpoly.Lstar_gl1(2, 5, CHI4)) < 1e-14
