"""Integer and character arithmetic: Jacobi symbols, quadratic Gauss sums,
factorisation, divisor sums and the four Dirichlet characters mod 8."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._common import csum

FACTOR_CAP = 10**12
TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# factorisation


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of |n| by trial division on a 2,3,5 wheel."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    if n > FACTOR_CAP:
        raise ValueError(f"factorisation capped at {FACTOR_CAP}")
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    gaps = (4, 2, 4, 2, 4, 6, 2, 6)
    d, i = 7, 0
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += gaps[i]
        i = (i + 1) & 7
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=8)
def spf_sieve(N: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..N (spf[0] = spf[1] = 0)."""
    spf = np.zeros(N + 1, dtype=np.int64)
    if N >= 2:
        spf[2::2] = 2
        for p in range(3, math.isqrt(N) + 1, 2):
            if spf[p] == 0:
                block = spf[p * p :: 2 * p]
                block[block == 0] = p
        rest = np.nonzero(spf == 0)[0]
        spf[rest[rest >= 2]] = rest[rest >= 2]
    spf.setflags(write=False)
    return spf


@lru_cache(maxsize=8)
def primes_up_to(N: int) -> np.ndarray:
    spf = spf_sieve(max(int(N), 2))
    idx = np.arange(spf.size)
    return idx[(spf == idx) & (idx >= 2)]


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


@dataclass(frozen=True)
class SquarefreeDecomp:
    """n = n0 * n1**2 with n0 squarefree (carrying the sign of n) and n1 > 0."""

    n: int
    n0: int
    n1: int


def squarefree_decomp(n: int) -> SquarefreeDecomp:
    if n == 0:
        raise ValueError("n must be nonzero")
    n0, n1 = 1, 1
    for p, e in factorize(n).items():
        n1 *= p ** (e // 2)
        if e & 1:
            n0 *= p
    return SquarefreeDecomp(n, n0 if n > 0 else -n0, n1)


def valuation(n: int, p: int) -> int:
    v = 0
    n = abs(n)
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def divisor_sigma(nu: complex, n: int) -> complex:
    """sigma_nu(n) = sum over d | n of d**nu."""
    if n < 1:
        raise ValueError("n must be positive")
    out = 1 + 0j
    for p, e in factorize(n).items():
        out *= sum(complex(p) ** (nu * k) for k in range(e + 1))
    return out


# --------------------------------------------------------------------------
# symbols


def jacobi(n: int, d: int) -> int:
    """Jacobi symbol (n/d) for odd d >= 1."""
    if d < 1 or d % 2 == 0:
        raise ValueError(f"lower argument must be a positive odd integer, got {d}")
    n %= d
    acc = 1
    while n:
        while n % 2 == 0:
            n //= 2
            if d % 8 in (3, 5):
                acc = -acc
        n, d = d, n
        if n % 4 == 3 and d % 4 == 3:
            acc = -acc
        n %= d
    return acc if d == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 1; used for primitive real characters."""
    if n < 1:
        raise ValueError("n must be positive")
    acc = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            acc = -acc
    return acc * jacobi(D, n)


@lru_cache(maxsize=4096)
def jacobi_table(d: int) -> np.ndarray:
    """Array of (m/d) for m = 0..d-1, d odd positive."""
    if d < 1 or d % 2 == 0:
        raise ValueError("modulus must be a positive odd integer")
    table = np.ones(d, dtype=np.int8)
    m = np.arange(d)
    for p, e in factorize(d).items() if d > 1 else ():
        leg = np.full(p, -1, dtype=np.int8)
        leg[(np.arange(1, p) ** 2) % p] = 1
        leg[0] = 0
        table *= leg[m % p] ** e
    table.setflags(write=False)
    return table


def epsilon_d(d: int) -> complex:
    if d % 2 == 0:
        raise ValueError("epsilon_d needs odd d")
    return 1 + 0j if d % 4 == 1 else 1j


def e_frac(num: int, den: int) -> complex:
    """e(num/den) = exp(2 pi i num/den) with the fractional part taken exactly."""
    return cmath.exp(TWO_PI * 1j * ((num % den) / den))


def _phases(n: int, m: np.ndarray, d: int) -> np.ndarray:
    return np.exp(TWO_PI * 1j * (((n % d) * m) % d) / d)


# --------------------------------------------------------------------------
# Gauss sums


def gauss_G(n: int, d: int) -> complex:
    """G_n(d) = sum_{m mod d} (m/d) e(nm/d) by direct summation."""
    if d < 1 or d % 2 == 0:
        raise ValueError("modulus must be a positive odd integer")
    m = np.arange(d)
    return csum(jacobi_table(d) * _phases(n, m, d))


def gauss_H(n: int, d: int) -> float:
    """H_n(d) = G_n(d) / epsilon_d; real."""
    return (gauss_G(n, d) / epsilon_d(d)).real


def gauss_H_prime_power(p: int, alpha: int, beta: int) -> float:
    """Closed form of H_{p^alpha}(p^beta) for an odd prime p."""
    if p == 2:
        raise ValueError("p must be odd")
    if beta == 0:
        return 1.0
    if alpha >= beta and beta % 2 == 0:
        return float(p ** (beta - 1) * (p - 1))
    if alpha == beta - 1:
        if beta % 2 == 1:
            return p ** (beta - 0.5)
        return -float(p ** (beta - 1))
    return 0.0


def gauss_H_fast(n: int, d: int) -> float:
    """H_n(d) via multiplicativity in d and the prime-power closed form."""
    if d < 1 or d % 2 == 0:
        raise ValueError("modulus must be a positive odd integer")
    out = 1.0
    for p, beta in factorize(d).items() if d > 1 else ():
        if n == 0:
            out *= gauss_H_prime_power(p, beta, beta)
            continue
        alpha = valuation(n, p)
        rest = n // p**alpha
        val = gauss_H_prime_power(p, alpha, beta)
        if val:
            val *= jacobi(rest, p) ** beta
        out *= val
        if out == 0.0:
            return 0.0
    return out


@lru_cache(maxsize=4096)
def _two_power_gauss_sum(n_mod: int, k: int) -> complex:
    M = 1 << k
    r = np.arange(1, M, 2)
    eps = np.where(r % 4 == 1, 1.0 + 0j, 1j)
    sym = CHI8.values(r).astype(float) ** (k % 2)  # (2^k / r) = chi_8(r)^k
    return csum(sym * eps * _phases(n_mod, r, M))


def two_power_gauss_sum(n: int, k: int) -> complex:
    """sum over odd r mod 2^k of (2^k/r) eps_r e(n r / 2^k)."""
    if k < 1:
        raise ValueError("k must be positive")
    return _two_power_gauss_sum(n % (1 << k), k)


def sturm_split(n: int, c: int) -> tuple[complex, complex]:
    """Both sides of the factorisation of the level-4 Kloosterman-type sum.

    lhs sums eps_d (4c/d) e(nd/4c) over odd d mod 4c; rhs is
    H_n(c') times the 2-power sum, where 4c = 2^k c' with c' odd.
    """
    if c < 1:
        raise ValueError("c must be positive")
    M = 4 * c
    d = np.arange(1, M, 2)
    eps = np.where(d % 4 == 1, 1.0 + 0j, 1j)
    sym = np.array([jacobi(M, int(x)) for x in d], dtype=float)
    lhs = csum(sym * eps * _phases(n, d, M))
    k = valuation(M, 2)
    c_odd = M >> k
    rhs = gauss_H(n, c_odd) * two_power_gauss_sum(n, k)
    return lhs, rhs


# --------------------------------------------------------------------------
# characters mod 8

_LABELS = ("triv", "chi4", "chi8", "chi4chi8")
_ALIASES = {"1": "triv", "trivial": "triv", "chi4*chi8": "chi4chi8", "chi4·chi8": "chi4chi8"}


@dataclass(frozen=True)
class Char8:
    """One of the four real characters mod 8 (zero on even integers)."""

    label: str

    def __post_init__(self):
        if self.label not in _LABELS:
            raise ValueError(f"unknown character {self.label!r}")

    @property
    def has4(self) -> bool:
        return self.label in ("chi4", "chi4chi8")

    @property
    def has8(self) -> bool:
        return self.label in ("chi8", "chi4chi8")

    @property
    def kappa(self) -> int:
        return 1 if self.has4 else 0

    @classmethod
    def parse(cls, text: str) -> "Char8":
        key = text.strip().lower()
        return cls(_ALIASES.get(key, key))

    @classmethod
    def from_flags(cls, has4: bool, has8: bool) -> "Char8":
        return cls(_LABELS[int(has4) + 2 * int(has8)])

    def __mul__(self, other: "Char8") -> "Char8":
        return Char8.from_flags(self.has4 != other.has4, self.has8 != other.has8)

    def __call__(self, n: int) -> int:
        if n % 2 == 0:
            return 0
        v = 1
        if self.has4 and n % 4 == 3:
            v = -v
        if self.has8 and n % 8 in (3, 5):
            v = -v
        return v

    def values(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n)
        r = n % 8
        v = np.where(r % 2 == 1, 1, 0).astype(np.int8)
        if self.has4:
            v = np.where(r % 4 == 3, -v, v)
        if self.has8:
            v = np.where((r == 3) | (r == 5), -v, v)
        return v

    def __str__(self) -> str:
        return self.label


TRIV = Char8("triv")
CHI4 = Char8("chi4")
CHI8 = Char8("chi8")
CHI4CHI8 = Char8("chi4chi8")
ALL_CHARS = (TRIV, CHI4, CHI8, CHI4CHI8)


def twist_for(n0: int) -> tuple[int, Char8]:
    """Split chi_{n0}, n0 squarefree nonzero, as chi_m * (character mod 8).

    Returns (m, psi) with m odd positive squarefree such that
    (n0/c) = (m/c) psi(c) for every odd c > 0.
    """
    has4 = n0 < 0
    m = abs(n0)
    has8 = m % 2 == 0
    if has8:
        m //= 2
    return m, Char8.from_flags(has4, has8)


def chi_n0_values(n0: int, c: np.ndarray) -> np.ndarray:
    """(n0/c) for odd positive c, n0 odd positive, via reciprocity."""
    c = np.asarray(c)
    if n0 == 1:
        return np.ones(c.shape, dtype=np.int8)
    tab = jacobi_table(n0)[c % n0]
    if n0 % 4 == 3:
        tab = np.where(c % 4 == 3, -tab, tab)
    return tab
