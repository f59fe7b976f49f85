import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddseries import arith
from ddseries.arith import CHI4, CHI4CHI8, CHI8, TRIV, Char8


def legendre_euler(n, p):
    r = pow(n % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def jacobi_oracle(n, d):
    out = 1
    for p, e in arith.factorize(d).items() if d > 1 else ():
        out *= legendre_euler(n, p) ** e
    return out


odd_pos = st.integers(min_value=0, max_value=5000).map(lambda k: 2 * k + 1)


@given(st.integers(-10**6, 10**6), odd_pos)
def test_jacobi_matches_euler_criterion(n, d):
    assert arith.jacobi(n, d) == jacobi_oracle(n, d)


@given(st.integers(-1000, 1000), st.integers(-1000, 1000), odd_pos)
def test_jacobi_multiplicative_in_top(a, b, d):
    assert arith.jacobi(a * b, d) == arith.jacobi(a, d) * arith.jacobi(b, d)


@pytest.mark.parametrize("d", [0, -3, 4])
def test_jacobi_rejects_bad_modulus(d):
    with pytest.raises(ValueError):
        arith.jacobi(1, d)


def test_jacobi_examples():
    assert arith.jacobi(2, 15) == 1
    assert arith.jacobi(3, 9) == 0
    assert arith.jacobi(0, 1) == 1


def test_epsilon_and_gauss_closed_forms():
    assert arith.epsilon_d(5) == 1
    assert arith.epsilon_d(7) == 1j
    for d in (1, 3, 5, 15, 105, 1001):
        G = arith.gauss_G(1, d)
        assert abs(G - arith.epsilon_d(d) * math.sqrt(d)) < 1e-10 * math.sqrt(d)


def gauss_brute(n, d):
    return sum(jacobi_oracle(m, d) * cmath.exp(2j * math.pi * n * m / d) for m in range(d))


@pytest.mark.parametrize("n,d", [(1, 9), (3, 9), (2, 25), (7, 45), (-4, 27), (0, 9), (0, 7)])
def test_gauss_G_brute(n, d):
    assert abs(arith.gauss_G(n, d) - gauss_brute(n, d)) < 1e-9


@pytest.mark.parametrize("p", [3, 5, 7])
def test_prime_power_table(p):
    for a in range(5):
        for b in range(5):
            direct = arith.gauss_H(p**a, p**b)
            assert abs(arith.gauss_H_prime_power(p, a, b) - direct) < 1e-9 * p ** (b / 2)


@settings(max_examples=60)
@given(st.integers(-500, 500), st.integers(0, 200).map(lambda k: 2 * k + 1))
def test_gauss_H_fast_matches_direct(n, d):
    assert abs(arith.gauss_H_fast(n, d) - arith.gauss_H(n, d)) < 1e-8 * max(1, d)


def test_H_multiplicative_on_coprime_moduli():
    for n in (1, 2, 6, -5):
        for c, d in ((3, 5), (7, 9), (5, 27)):
            assert abs(arith.gauss_H(n, c * d) - arith.gauss_H(n, c) * arith.gauss_H(n, d)) < 1e-8 * c * d


@pytest.mark.parametrize("c", [1, 2, 3, 8, 12, 25, 50])
def test_sturm_split(c):
    for n in range(-20, 21):
        lhs, rhs = arith.sturm_split(n, c)
        assert abs(lhs - rhs) < 1e-9 * 4 * c


def test_divisor_sigma():
    assert arith.divisor_sigma(0, 12) == 6
    assert abs(arith.divisor_sigma(1, 12) - 28) < 1e-12
    assert abs(arith.divisor_sigma(-2, 9) - (1 + 1 / 9 + 1 / 81)) < 1e-15


@given(st.integers(1, 10**6))
def test_squarefree_decomp(n):
    for m in (n, -n):
        dec = arith.squarefree_decomp(m)
        assert dec.n0 * dec.n1**2 == m
        assert arith.is_squarefree(abs(dec.n0))


def test_char8_table():
    rows = {TRIV: [1, 1, 1, 1], CHI4: [1, -1, 1, -1], CHI8: [1, -1, -1, 1], CHI4CHI8: [1, 1, -1, -1]}
    for chi, expect in rows.items():
        assert [chi(r) for r in (1, 3, 5, 7)] == expect
        assert chi(4) == 0
        assert list(chi.values(np.array([1, 3, 5, 7, 2]))) == expect + [0]
    assert CHI4 * CHI8 == CHI4CHI8
    assert Char8.parse("chi4*chi8") == CHI4CHI8
    with pytest.raises(ValueError):
        Char8.parse("chi3")


@given(st.integers(-3000, 3000).filter(lambda n: n != 0), odd_pos)
def test_twist_for(n, c):
    n0 = arith.squarefree_decomp(n).n0
    m, psi = arith.twist_for(n0)
    assert arith.jacobi(m, c) * psi(c) == jacobi_oracle(n0, c)
