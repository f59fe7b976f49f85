"""Weight 1/2 Eisenstein series for Gamma_0(4) at the cusp infinity.

Fourier coefficients phi_n(s), the 2-adic factor r_2(s, n), the constant
term phi(s) and the scattering matrix, evaluation on the upper half plane
(Fourier expansion and the defining group sum) and a mass integral.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._common import PoleError, RegionError, csum
from .arith import (
    CHI8,
    TRIV,
    chi_n0_values,
    gauss_H_fast,
    two_power_gauss_sum,
    valuation,
)
from .corrpoly import Lstar_gl1, u_r
from .lfun import POLE_GUARD, _near_nonpositive_integer, log_gamma, xi, zeta, zeta2
from .whittaker import whittaker_W

SQRT2 = math.sqrt(2.0)
ROOT8 = cmath.exp(-0.25j * math.pi)  # e^{-i pi/4}
Y_MIN = 0.05
T_MAX = 10.0


class BudgetExceeded(RuntimeError):
    """The requested accuracy needs more terms than the budget allows."""


def _rgamma(z: complex) -> complex:
    """1/Gamma(z), entire."""
    z = complex(z)
    if _near_nonpositive_integer(z):
        return 0j
    return cmath.exp(-log_gamma(z))


# --------------------------------------------------------------------------
# the 2-adic factor


def r2_explicit(s: complex, n: int) -> complex:
    """Closed form of r_2(s, n); entire in s."""
    if n == 0:
        raise ValueError("n must be nonzero")
    s = complex(s)
    x = 2.0 ** (-(2 * s - 1))
    r, m = 0, n
    while m % 4 == 0:
        m //= 4
        r += 1
    if m % 4 == 1:
        base = x**2 + CHI8(m) * SQRT2 * x**3
    else:
        base = -(x**2)
    return (1 + 1j) / 4 * (u_r(x, r) + x ** (2 * r) * base)


def r2_numerator(n: int, k: int) -> complex:
    """sum_{r mod 2^k} (2^k/r) eps_r e(n r / 2^k)."""
    return two_power_gauss_sum(n, k)


def r2_direct(s: complex, n: int, extra: int = 2) -> complex:
    """r_2(s, n) by summing the 2-power Gauss sums for k = 2 .. v_2(n) + 6.

    ``extra`` further numerators are computed and must vanish.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    s = complex(s)
    top = valuation(abs(n), 2) + 6
    for k in range(top + 1, top + 1 + extra):
        if abs(r2_numerator(n, k)) > 1e-9 * 2.0 ** (k / 2):
            raise ArithmeticError(f"2-power sum at k={k} should vanish for n={n}")
    return csum([r2_numerator(n, k) * 2.0 ** (-2 * k * s) for k in range(2, top + 1)])


def _gauss_mod_2k(n: int, k: int, chi) -> complex:
    M = 1 << k
    r = np.arange(1, M, 2)
    ph = np.exp(2j * math.pi * ((n % M) * r % M) / M)
    return csum(chi(r) * ph)


def r2_character_split(n: int, k: int) -> tuple[complex, complex]:
    """The k-th numerator directly and via eps_r = (1+i)/2 chi_4^0 + (1-i)/2 chi_4."""
    c8 = CHI8.values
    chi4 = np.vectorize(lambda r: 1 if r % 4 == 1 else -1)

    def first(r):
        return c8(r).astype(float) ** (k % 2)

    def second(r):
        return first(r) * chi4(r)

    split = (1 + 1j) / 2 * _gauss_mod_2k(n, k, first) + (1 - 1j) / 2 * _gauss_mod_2k(n, k, second)
    return r2_numerator(n, k), split


# --------------------------------------------------------------------------
# Fourier coefficients


@dataclass(frozen=True)
class EisensteinCoeff:
    n: int
    s: complex
    phi_n: complex
    r2: complex
    lstar: complex


def _coeff_prefactor(s: complex, n: int) -> complex:
    sign = 1 if n > 0 else -1
    return math.pi**s * ROOT8 * abs(n) ** (s - 1) * _rgamma(s + sign / 4)


def phi_n(s: complex, n: int) -> EisensteinCoeff:
    """phi_n(s, 1/2) in closed form (L*, zeta_2 and r_2)."""
    if n == 0:
        raise ValueError("n must be nonzero; the constant term is scattering_phi")
    s = complex(s)
    r2 = r2_explicit(s, n)
    lstar = Lstar_gl1(2 * s - 0.5, n, TRIV)
    if abs(4 * s - 2) < POLE_GUARD:
        # 1/zeta_2(4s-1) vanishes at s = 1/2
        return EisensteinCoeff(n, s, 0j, r2, lstar)
    z2 = zeta2(4 * s - 1)
    if abs(z2) < 1e-14:
        raise PoleError("zeta_2(4s-1) vanishes here")
    return EisensteinCoeff(n, s, _coeff_prefactor(s, n) * lstar / z2 * r2, r2, lstar)


@lru_cache(maxsize=65536)
def _phi_cached(s: complex, n: int) -> complex:
    return phi_n(s, n).phi_n


def level4_sum(n: int, c: int) -> complex:
    """sum over odd d mod 4c of eps_d (4c/d) e(n d / 4c)."""
    M = 4 * c
    d = np.arange(1, M, 2)
    v = valuation(c, 2)
    sym = chi_n0_values(c >> v, d).astype(float) * CHI8.values(d).astype(float) ** (v % 2)
    eps = np.where(d % 4 == 1, 1.0 + 0j, 1j)
    ph = np.exp(2j * math.pi * ((n % M) * d % M) / M)
    return csum(sym * eps * ph)


def _level4_sum_sturm(n: int, c: int) -> complex:
    M = 4 * c
    k = valuation(M, 2)
    return gauss_H_fast(n, M >> k) * two_power_gauss_sum(n, k)


def phi_n_raw(s: complex, n: int, C: int, split: bool = False) -> complex:
    """phi_n from the defining double sum truncated at c <= C.

    With ``split`` each inner sum is replaced by its odd-part / 2-part
    factorisation; the truncation is identical, so both agree exactly.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    s = complex(s)
    inner = _level4_sum_sturm if split else level4_sum
    terms = [inner(n, c) * (4.0 * c) ** (-2 * s) for c in range(1, C + 1)]
    return _coeff_prefactor(s, n) * csum(terms)


# --------------------------------------------------------------------------
# constant term and scattering


def scattering_phi(s: complex) -> complex:
    """phi(s, 1/2) = xi(4s-2) / ((2^{4s-1} - 1) xi(4s-1))."""
    s = complex(s)
    if abs(s - 0.5) < POLE_GUARD:
        return -1 + 0j  # both xi values are at poles; the ratio tends to -1
    den = 2 ** (4 * s - 1) - 1
    if abs(den) < POLE_GUARD:
        raise PoleError("2^{4s-1} = 1")
    return xi(4 * s - 2) / (den * xi(4 * s - 1))


def scattering_phi_intermediate(s: complex) -> complex:
    """The Gamma(2s-1) / (Gamma(s+1/4) Gamma(s-1/4)) form before duplication."""
    s = complex(s)
    g = cmath.exp(log_gamma(2 * s - 1) - log_gamma(s + 0.25) - log_gamma(s - 0.25))
    return (
        math.pi * 4 ** (1 - s) * ROOT8 * g * (1 + 1j) * 2 ** (-4 * s) * zeta(4 * s - 2) / zeta2(4 * s - 1)
    )


def scattering_phi_raw(s: complex, C: int) -> complex:
    """Constant term from the n = 0 double sum truncated at c <= C."""
    s = complex(s)
    g = cmath.exp(log_gamma(2 * s - 1) - log_gamma(s + 0.25) - log_gamma(s - 0.25))
    terms = [level4_sum(0, c) * (4.0 * c) ** (-2 * s) for c in range(1, C + 1)]
    return math.pi * 4 ** (1 - s) * ROOT8 * g * csum(terms)


@dataclass(frozen=True)
class ScatteringMatrix:
    s: complex
    entries: np.ndarray

    def __matmul__(self, other: "ScatteringMatrix") -> np.ndarray:
        return self.entries @ other.entries


def scattering_matrix(s: complex) -> ScatteringMatrix:
    """Scattering matrix at the open cusps (infinity, 0)."""
    s = complex(s)
    ratio = xi(4 * s - 2) / xi(4 * s - 1)
    den = 1 - 2 ** (-(4 * s - 1))
    if abs(den) < POLE_GUARD:
        raise PoleError("2^{4s-1} = 1")
    diag = 2 ** (-(4 * s - 1)) / den * ratio
    common = (1 - 2 ** (-(4 * s - 2))) / den * ratio
    off = 2 ** (-2 * s) * common
    E = np.array([[diag, (1 - 1j) * off], [(1 + 1j) * off, diag]], dtype=complex)
    return ScatteringMatrix(s, E)


def scattering_product_residual(s: complex) -> float:
    """max |Phi(s) Phi(1-s) - I|."""
    s = complex(s)
    prod = scattering_matrix(s) @ scattering_matrix(1 - s)
    return float(np.max(np.abs(prod - np.eye(2))))


# --------------------------------------------------------------------------
# group data


def shimura_symbol(c: int, d: int) -> int:
    """(c/d) for odd d, extended to d < 0 as in the theta multiplier."""
    if d % 2 == 0:
        raise ValueError("d must be odd")
    if c == 0:
        return 1 if abs(d) == 1 else 0
    v = valuation(abs(c), 2)
    odd = abs(c) >> v
    ad = abs(d)
    val = int(chi_n0_values(odd, np.array([ad]))[0]) * CHI8(ad) ** (v % 2)
    if c < 0 and ad % 4 == 3:
        val = -val  # (-1/|d|)
    if c < 0 and d < 0:
        val = -val
    return val


def nu(gamma) -> complex:
    """Theta multiplier (c/d) eps_d^{-1} on Gamma_0(4)."""
    a, b, c, d = gamma
    if a * d - b * c != 1 or c % 4:
        raise ValueError("gamma must lie in Gamma_0(4)")
    eps = 1 + 0j if d % 4 == 1 else 1j
    return shimura_symbol(c, d) / eps


@dataclass(frozen=True)
class GroupContext:
    """Cusps of Gamma_0(4) with stabiliser generators and scaling matrices."""

    cusps: tuple = (
        ("inf", math.inf, (1, 1, 0, 1), (1.0, 0.0, 0.0, 1.0)),
        ("0", 0.0, (1, 0, -4, 1), (0.0, -0.5, 2.0, 0.0)),
        ("1/2", 0.5, (-1, 1, -4, 3), (1.0, -0.5, 2.0, 0.0)),
    )

    def generator(self, name: str):
        for cname, _, gen, _ in self.cusps:
            if cname == name:
                return gen
        raise KeyError(name)

    def open_cusps(self) -> list[str]:
        return [name for name, _, gen, _ in self.cusps if nu(gen) == 1]


def mobius(gamma, z: complex) -> complex:
    a, b, c, d = gamma
    return (a * z + b) / (c * z + d)


def automorphy_factor(gamma, z: complex) -> complex:
    """nu(gamma) e^{i arg(cz+d)/2} with the principal argument."""
    _, _, c, d = gamma
    return nu(gamma) * cmath.exp(0.5j * cmath.phase(c * z + d))


# --------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class EisensteinValue:
    value: complex
    tail_bound: float
    terms_used: int


def fourier_cutoff(y: float, s: complex, tol: float) -> int:
    """N with |n| <= N enough for W(4 pi |n| y) ~ e^{-2 pi |n| y} to drop below tol."""
    return max(1, math.ceil((math.log(1 / tol) + 3 + abs(complex(s).imag)) / (2 * math.pi * y)))


def eval_E_grid(xs, ys, s: complex, tol: float = 1e-10, budget: int = 4000):
    """E(x + iy, s, 1/2) on the tensor grid xs x ys; returns (values, tail, N)."""
    s = complex(s)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if np.any(ys <= 0):
        raise ValueError("points must lie in the upper half plane")
    ymin = float(ys.min())
    N = fourier_cutoff(ymin, s, tol)
    if N > budget:
        raise BudgetExceeded(f"y = {ymin} needs {N} Fourier terms (budget {budget})")
    out = np.empty((xs.size, ys.size), dtype=complex)
    out[:] = np.exp(s * np.log(ys))[None, :] + scattering_phi(s) * np.exp((1 - s) * np.log(ys))[None, :]
    last = 0.0
    for n in [*range(1, N + 1), *range(-1, -N - 1, -1)]:
        c = _phi_cached(s, n)
        if c == 0:
            continue
        W = whittaker_W(0.25 if n > 0 else -0.25, s - 0.5, 4 * math.pi * abs(n) * ys)
        out += c * W[None, :] * np.exp(2j * math.pi * n * xs)[:, None]
        if abs(n) == N:
            last = max(last, float(np.max(np.abs(c * W))))
    q = math.exp(-2 * math.pi * ymin)
    tail = 2 * last * q / (1 - q)
    return out, tail, N


def eval_E(z: complex, s: complex, tol: float = 1e-10, budget: int = 4000) -> EisensteinValue:
    """E(z, s, 1/2) from its Fourier expansion at infinity."""
    z = complex(z)
    vals, tail, N = eval_E_grid([z.real], [z.imag], s, tol, budget)
    return EisensteinValue(complex(vals[0, 0]), tail, 2 * N + 1)


def eval_E_group_sum(z: complex, s: complex, C: int = 2000, tol_d: float = 1e-8) -> EisensteinValue:
    """E(z, s, 1/2) from the defining sum over Gamma_inf \\ Gamma_0(4), Re s > 1.

    Lower-left entries 0 < c <= C; for each c the d-range is cut where the
    remaining terms are below tol_d in total.  The tail bound is the
    absolute-value integral estimate of both cut-offs.
    """
    z, s = complex(z), complex(s)
    sig = s.real
    if sig <= 1:
        raise RegionError("the group sum converges only for Re(s) > 1")
    x, y = z.real, z.imag
    count = C // 4
    D = math.ceil((count * 2 * y**sig / ((2 * sig - 1) * tol_d)) ** (1 / (2 * sig - 1)))
    acc = [complex(y**s)]
    for c in range(4, C + 1, 4):
        centre = int(round(-c * x))
        d = np.arange(centre - D, centre + D + 1)
        d = d[d % 2 == 1]
        v = valuation(c, 2)
        ad = np.abs(d)
        sym = chi_n0_values(c >> v, ad).astype(float) * CHI8.values(ad).astype(float) ** (v % 2)
        keep = sym != 0
        d, sym = d[keep], sym[keep]
        eps = np.where(d % 4 == 1, 1.0 + 0j, 1j)
        w = c * z + d
        term = sym * eps * np.exp(-0.5j * np.angle(w)) * np.exp(s * np.log(y / np.abs(w) ** 2))
        acc.append(csum(term))
    g = math.sqrt(math.pi) * math.exp(math.lgamma(sig - 0.5) - math.lgamma(sig))
    c_tail = y ** (1 - sig) * g * C ** (2 - 2 * sig) / (4 * (2 * sig - 2))
    return EisensteinValue(csum(acc), c_tail + tol_d, count)


def automorphy_residual(gamma, z: complex, s: complex, tol: float = 1e-10) -> float:
    z = complex(z)
    lhs = eval_E(mobius(gamma, z), s, tol).value
    rhs = automorphy_factor(gamma, z) * eval_E(z, s, tol).value
    return abs(lhs - rhs)


# --------------------------------------------------------------------------
# mass integral


@dataclass(frozen=True)
class MassResult:
    value: float
    t: float
    nodes: int
    warning: str | None
    grid: tuple = ()


def mass_integral(rect, t: float, grid: int = 24, tol: float = 1e-10, keep_grid: bool = False) -> MassResult:
    """int over rect of |E(z, 1/2+it, 1/2)|^2 dx dy / y^2 (Gauss-Legendre).

    ``rect`` is (x0, x1, y0, y1) with y0 >= 0.05.  Orders with t > 10 are
    refused; above t = 6 the result carries an accuracy warning.
    """
    x0, x1, y0, y1 = (float(v) for v in rect)
    if x1 < x0 or y1 < y0:
        raise ValueError("rectangle corners out of order")
    if y0 < Y_MIN:
        raise RegionError(f"rectangle must lie in y >= {Y_MIN}")
    if abs(t) > T_MAX:
        raise RegionError(f"|t| > {T_MAX} is outside the supported Whittaker range")
    warning = "accuracy degrades for t > 6; treat as qualitative" if abs(t) > 6 else None
    if x1 == x0 or y1 == y0:
        return MassResult(0.0, t, 0, warning)
    u, w = np.polynomial.legendre.leggauss(grid)
    xs = 0.5 * (x1 - x0) * u + 0.5 * (x1 + x0)
    ys = 0.5 * (y1 - y0) * u + 0.5 * (y1 + y0)
    E, _, _ = eval_E_grid(xs, ys, complex(0.5, t), tol)
    dens = np.abs(E) ** 2 / ys[None, :] ** 2
    val = 0.25 * (x1 - x0) * (y1 - y0) * math.fsum((w[:, None] * w[None, :] * dens).ravel())
    cells = ()
    if keep_grid:
        cells = tuple((float(a), float(b), float(dens[i, j])) for i, a in enumerate(xs) for j, b in enumerate(ys))
    return MassResult(val, t, grid * grid, warning, cells)


# --------------------------------------------------------------------------
# tables


def coefficient_rows(s: complex, ns) -> list[tuple]:
    """(n, Re phi_n, Im phi_n) rows for a CSV table."""
    rows = []
    for n in ns:
        v = phi_n(s, int(n)).phi_n
        rows.append((int(n), v.real, v.imag))
    return rows

