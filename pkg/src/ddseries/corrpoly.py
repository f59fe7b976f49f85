"""Correction polynomials q, Q, Q*, Q-hat and the auxiliary u_r.

Each is a finite Euler product over the primes dividing the square part of
its index, evaluated directly in product form.
"""
from __future__ import annotations

from .arith import (
    CHI4,
    Char8,
    divisor_sigma,
    divisors,
    factorize,
    is_squarefree,
    jacobi,
    squarefree_decomp,
    twist_for,
    valuation,
)
from .coeffs import CoeffSequence
from .lfun import L_quadratic

DIVISOR = CoeffSequence.divisor()


def _odd_positive(c: int) -> None:
    if c < 1 or c % 2 == 0:
        raise ValueError("index must be a positive odd integer")


def q_local(s: complex, n0: int, chi: Char8, p: int, v: int) -> complex:
    """Factor of q at the odd prime p, where p^v exactly divides n1."""
    s = complex(s)
    twist = jacobi(n0, p) * chi(p) * p ** (-s)
    decay = p ** (-2 * (s - 0.5))
    acc, scale = 0j, 1 + 0j
    for beta in range(v + 1):
        acc += (1 - twist if beta < v else 1) * scale
        scale *= decay
    return acc


def q_poly(s: complex, n: int, chi: Char8) -> complex:
    """q(s, n, chi) for nonzero n (sign carried by the squarefree part)."""
    if n == 0:
        raise ValueError("n must be nonzero")
    dec = squarefree_decomp(n)
    out = 1 + 0j
    for p, v in factorize(dec.n1).items() if dec.n1 > 1 else ():
        if p != 2:
            out *= q_local(s, dec.n0, chi, p, v)
    return out


def _Q_generic(s: complex, c: int, chi: Char8, seq: CoeffSequence, hat: bool) -> complex:
    _odd_positive(c)
    s = complex(s)
    dec = squarefree_decomp(c)
    c0 = dec.n0
    out = 1 + 0j
    for p, v in factorize(dec.n1).items() if dec.n1 > 1 else ():
        t = seq.prime_powers(p, 2 * v)
        x = jacobi(c0, p) if hat else jacobi(p, c0)
        num = (
            t[2 * v]
            - t[2 * v - 1] * x * chi(p) * (p ** (1 - s) + p**s) / p
            + t[2 * v - 2] * x * x / p
        )
        out *= num / p ** (2 * v * (s - 0.5))
    return out


def Q_poly(s: complex, c: int, chi: Char8, seq: CoeffSequence = DIVISOR) -> complex:
    """Q(s, c, chi) with the twist (p / c0) at each p | c1."""
    return _Q_generic(s, c, chi, seq, hat=False)


def Qhat_poly(s: complex, c: int, chi: Char8, seq: CoeffSequence = DIVISOR) -> complex:
    """Q with (c0 / p) in place of (p / c0)."""
    return _Q_generic(s, c, chi, seq, hat=True)


def Qstar_poly(s: complex, c: int, chi: Char8, seq: CoeffSequence = DIVISOR) -> complex:
    """sum over l^2 | c of sigma_{2-4s}(l) Q(s, c/l^2, chi)."""
    _odd_positive(c)
    s = complex(s)
    n1 = squarefree_decomp(c).n1
    return sum(
        divisor_sigma(2 - 4 * s, l) * Q_poly(s, c // (l * l), chi, seq) for l in divisors(n1)
    )


def u_r(x: complex, r: int) -> complex:
    """sum_{j=1}^r x^{2j}."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    x2 = complex(x) ** 2
    acc, term = 0j, 1 + 0j
    for _ in range(r):
        term *= x2
        acc += term
    return acc


def nontrivial_relation_sides(s: complex, d0: int, d1: int, chi: Char8) -> tuple[complex, complex]:
    """Both sides of the q^2 versus Q-hat divisor-sum relation (t_n = tau(n))."""
    _odd_positive(d0)
    _odd_positive(d1)
    if not is_squarefree(d0):
        raise ValueError("d0 must be squarefree")
    s = complex(s)
    lhs = rhs = 0j
    for d in divisors(d1):
        m = d0 * (d1 // d) ** 2
        lhs += d ** (1 - 2 * s) * q_poly(s, m, chi) ** 2
        rhs += divisor_sigma(2 - 4 * s, d) * Qhat_poly(s, m, chi, DIVISOR)
    return lhs, rhs


def nontrivial_relation_check(s: complex, d0: int, d1: int, chi: Char8) -> float:
    """|lhs - rhs| / max(1, |lhs|); both sides grow like d1^{1-2 Re s}."""
    lhs, rhs = nontrivial_relation_sides(s, d0, d1, chi)
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def Lstar_gl1(s: complex, n: int, chi: Char8) -> complex:
    """L*(s, n, chi) = q(s, n, chi) L_2(s, chi_{n0} chi); negative n twists by chi_4."""
    if n == 0:
        raise ValueError("n must be nonzero")
    if n < 0:
        return Lstar_gl1(s, -n, CHI4 * chi)
    m, psi = twist_for(squarefree_decomp(n).n0)
    return q_poly(s, n, chi) * L_quadratic(s, m, psi * chi)


def q_fe_residual(s: complex, n: int, chi: Char8) -> float:
    """|q(s) - (n1'^2)^{1/2-s} q(1-s)| relative to |q(s)|, n1' the odd part of n1."""
    s = complex(s)
    n1 = squarefree_decomp(n).n1
    n1 >>= valuation(n1, 2)
    lhs = q_poly(s, n, chi)
    rhs = (n1 * n1) ** (0.5 - s) * q_poly(1 - s, n, chi)
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


def Q_fe_residual(s: complex, c: int, chi: Char8, seq: CoeffSequence = DIVISOR) -> float:
    """|Q(s) - (c1^2)^{1-2s} Q(1-s)| relative to |Q(s)|."""
    s = complex(s)
    c1 = squarefree_decomp(c).n1
    lhs = Q_poly(s, c, chi, seq)
    rhs = (c1 * c1) ** (1 - 2 * s) * Q_poly(1 - s, c, chi, seq)
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)
