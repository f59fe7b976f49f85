import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddseries import lfun
from ddseries._common import PoleError
from ddseries.arith import ALL_CHARS, CHI4, CHI8, TRIV, kronecker

mp.mp.dps = 30


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


def scaled(a, b):
    """Error relative to max(|b|, 1); safe next to zeros."""
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1.0)


points = st.complex_numbers(min_magnitude=0, max_magnitude=60, allow_nan=False, allow_infinity=False)


@settings(max_examples=200)
@given(points)
def test_gamma_matches_mpmath(s):
    if abs(s - round(s.real)) < 1e-6 and s.real <= 0.5:
        return
    ref = mp.gamma(mp.mpc(s.real, s.imag))
    if abs(ref) < 1e-290 or abs(ref) > 1e290:
        return
    assert rel(lfun.complex_gamma(s), ref) < 1e-12


@pytest.mark.parametrize("s", [0, -1, -7])
def test_gamma_poles(s):
    with pytest.raises(PoleError):
        lfun.complex_gamma(s)


def test_gamma_large_imaginary_sign():
    for s in (0.3 + 25j, 0.3 - 25j, -4.5 + 40j):
        assert rel(lfun.complex_gamma(s), mp.gamma(mp.mpc(s.real, s.imag))) < 1e-11


@pytest.mark.parametrize("s", [2, 0.5 + 14.134725j, -1.5 + 3j, 0.2, 3 - 20j, -7.3])
@pytest.mark.parametrize("a", [1.0, 0.25, 0.8])
def test_hurwitz_matches_mpmath(s, a):
    assert scaled(lfun.hurwitz_zeta(s, a), mp.zeta(mp.mpc(complex(s).real, complex(s).imag), a)) < 1e-11


def test_zeta2_and_xi():
    assert abs(lfun.zeta2(2) - math.pi**2 / 8) < 1e-14
    for s in (0.3 + 2j, 2.5, -3 + 1j):
        assert rel(lfun.xi(s), lfun.xi(1 - s)) < 1e-11
    with pytest.raises(PoleError):
        lfun.xi(1)


def mp_L(s, n0, chi):
    """mpmath Dirichlet L over residues mod 8 n0, Euler factor at 2 absent."""
    q = 8 * n0
    vals = [0 if a % 2 == 0 else kronecker(n0, a) * chi(a) if n0 > 1 else chi(a) for a in range(q)]
    return mp.dirichlet(mp.mpc(complex(s).real, complex(s).imag), vals)


@pytest.mark.parametrize("n0", [1, 3, 5, 15, 21])
@pytest.mark.parametrize("chi", ALL_CHARS)
@pytest.mark.parametrize("s", [2, 0.5 + 3j, 0.8 - 7j])
def test_L_quadratic_matches_mpmath(n0, chi, s):
    if n0 == 1 and chi == TRIV and s == 2:
        ref = (1 - 2**-2) * math.pi**2 / 6
    else:
        ref = mp_L(s, n0, chi)
    assert scaled(lfun.L_quadratic(s, n0, chi), ref) < 1e-10


def test_L_quadratic_reflection_branch():
    for n0, chi in ((5, TRIV), (3, CHI8), (7, CHI4)):
        s = -1.3 + 2j
        auto = lfun.L_quadratic(s, n0, chi)
        direct = lfun.L_quadratic(s, n0, chi, method="direct")
        assert rel(auto, direct) < 1e-9


def test_L_quadratic_pole_and_bad_input():
    with pytest.raises(PoleError):
        lfun.L_quadratic(1, 1, TRIV)
    with pytest.raises(ValueError):
        lfun.L_quadratic(2, 4, TRIV)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-0.5, 1.5),
    st.floats(-15, 15),
    st.sampled_from([1, 3, 5, 7, 11, 15, 21, 33, 105]),
    st.sampled_from(ALL_CHARS),
)
def test_gl1_functional_equation(x, y, n0, chi):
    if n0 == 1 and chi == TRIV and abs(complex(x, y) - 1) < 0.05 or abs(complex(x, y)) < 0.05:
        return
    assert lfun.gl1_fe_residual(complex(x, y), n0, chi) < 1e-9


def test_conductor_data_primitive_character():
    for n0 in (1, 3, 5, 15, 21):
        for chi in ALL_CHARS:
            cd = lfun.conductor_data(n0, chi)
            assert abs(cd.disc) == cd.delta
            for a in range(1, 200, 2):
                expect = chi(a) * (kronecker(n0, a) if n0 > 1 else 1)
                assert kronecker(cd.disc, a) == expect


def test_two_factor():
    p = lfun.TwoFactorPoly(-2.0, 1.0)
    assert p.series(5) == [1, 2, 3, 4, 5]
    assert lfun.two_factor_eval(p, 2, 0) == 1
    assert abs(lfun.two_factor_eval(p, 1, 1) - 0.25) < 1e-15
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        lfun.two_factor_eval(p, 0.2, -1)
    assert rec


def test_euler_product_matches_L():
    val, tail = lfun.l2_euler_product(3, lambda p: (np.array([kronecker(5, int(x)) for x in p]), np.zeros(p.size)), 5000)
    assert abs(val - lfun.L_quadratic(3, 5)) < tail + 1e-12


def test_moment_report_small():
    rep = lfun.moment_experiment(200, 0.5, power=2, points=6)
    assert all(b >= a for a, b in zip(rep.S, rep.S[1:]))
    with pytest.raises(ValueError):
        lfun.moment_experiment(10, 0.5, power=3)
