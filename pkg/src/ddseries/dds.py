"""Double Dirichlet series Z(s, w, chi, chi') built from quadratic twists.

Two series representations (a sum over n of GL1 twists and a sum over c
of GL2 twists), the variants Z-hat, Z_+/- and Z-hat_+/-, term-level checks
of the functional equations, the analytic conductor, growth scans and the
Lindelof-on-average experiment.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._common import (
    PoleError,
    RegionError,
    SlopeReport,
    TruncatedValue,
    UnsupportedError,
    csum,
    cumulative_report,
    finish,
    geometric_grid,
    power_tail,
)
from .arith import (
    CHI4,
    TRIV,
    Char8,
    gauss_H,
    gauss_H_fast,
    jacobi,
    jacobi_table,
    primes_up_to,
    squarefree_decomp,
    twist_for,
    valuation,
)
from .coeffs import CoeffSequence, coeff_array
from .corrpoly import DIVISOR, Lstar_gl1, Q_poly, Qstar_poly, q_local, q_poly
from .eisenstein import phi_n, r2_explicit
from .lfun import (
    L_quadratic,
    TwoFactorPoly,
    complex_gamma,
    conductor_data,
    gl1_fe_factor,
    squarefree_odd_upto,
    zeta2,
)

MARGIN = 0.1
POLE_RADIUS = 1e-3
P_CAP = 30000
P_CAP_FEW = 10**6  # prime cap when only a few L-values are wanted
EXACT_SMALL = 48


class ConvergenceWarning(UserWarning):
    """A series was evaluated outside its region of absolute convergence."""


# --------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class RegionPoint:
    s: complex
    w: complex

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "w", complex(self.w))

    def d1_gaps(self) -> dict[str, float]:
        return {
            "Re(s-w) > 1/2": (self.s - self.w).real - 0.5,
            "Re(s+w) > 3/2": (self.s + self.w).real - 1.5,
        }

    def d2_gaps(self) -> dict[str, float]:
        return {"Re(s) > 3/4": self.s.real - 0.75, "Re(w) > 3/4": self.w.real - 0.75}

    @property
    def in_D1(self) -> bool:
        return all(g > 0 for g in self.d1_gaps().values())

    @property
    def in_D2(self) -> bool:
        return all(g > 0 for g in self.d2_gaps().values())

    def require(self, region: str, margin: float = MARGIN) -> None:
        gaps = self.d1_gaps() if region == "D1" else self.d2_gaps()
        for name, gap in gaps.items():
            if gap < margin:
                raise RegionError(f"({self.s}, {self.w}) violates {name} with margin {margin}")

    @property
    def sigma(self) -> complex:
        """s - w + 1/2, the argument of the GL2 twists."""
        return self.s - self.w + 0.5

    @property
    def z(self) -> complex:
        """2w - 1/2, the argument of the GL1 twists."""
        return 2 * self.w - 0.5


def _near(a: complex, b: complex) -> bool:
    return abs(complex(a) - complex(b)) < POLE_RADIUS


@dataclass(frozen=True)
class Conductor:
    t: float
    u: float
    q: float


def conductor(t: float, u: float) -> Conductor:
    """Analytic conductor (1+|t|)(1+|t+u|)^2(1+|u|)."""
    return Conductor(t, u, (1 + abs(t)) * (1 + abs(t + u)) ** 2 * (1 + abs(u)))


# --------------------------------------------------------------------------
# the polynomials in 2^{-s} attached to the functional equations


@dataclass(frozen=True)
class FEFactors:
    """T, U, V and the Gamma product G from the functional equations."""

    p2: TwoFactorPoly
    s0: complex = 0.5

    def T(self, s: complex, w: complex) -> complex:
        out = 1 + 0j
        for e in (1, -1):
            out *= self.p2(e * 2.0 ** (-(s + w - 0.5))) * self.p2(e * 2.0 ** (-(s - w + 0.5)))
        return out

    @staticmethod
    def U(s: complex, w: complex) -> complex:
        return (
            (1 - 2.0 ** (-(4 * w - 1)))
            * (1 - 2.0 ** (-2 * s))
            * (1 - 2.0 ** (-(4 * w - 2 + 2 * s)))
            * (1 - 2.0 ** (-(-4 * w + 2 + 2 * s)))
        )

    @staticmethod
    def V(s: complex, w: complex, twisted_p2) -> complex:
        """Product over the four primitive twists g of p_{2,g}(+/- 2^{-(w-s+1/2)})."""
        x = 2.0 ** (-(w - s + 0.5))
        out = 1 + 0j
        for p in twisted_p2:
            out *= p(x) * p(-x)
        return out

    def G(self, s: complex, w: complex, k=(0, 0, 0, 0)) -> complex:
        s0 = complex(self.s0)
        out = complex_gamma((2 * w - 0.5 + k[0]) / 2) * complex_gamma((2 * s - 0.5 + k[2]) / 2)
        for e in (1, -1):
            out *= complex_gamma((s + w - 0.5 + k[1] + e * (s0 - 0.5)) / 2)
            out *= complex_gamma((s - w + 0.5 + k[3] + e * (s0 - 0.5)) / 2)
        return out


# --------------------------------------------------------------------------
# batched L-values


def _legendre_table(p: int) -> np.ndarray:
    tab = -np.ones(p, dtype=np.int8)
    r = np.arange(1, p, dtype=np.int64)
    tab[(r * r) % p] = 1
    tab[0] = 0
    return tab


def _prime_cutoff(u: float, tol: float, weight: float = 1.0, cap: int = P_CAP) -> int:
    """Smallest P (on a coarse grid) with weight * P^{1-u} / ((u-1) log P) <= tol."""
    if u <= 1:
        return cap + 1
    P = 100
    while P <= cap:
        if weight * P ** (1 - u) / ((u - 1) * math.log(P)) <= tol:
            return P
        P = int(P * 1.5)
    return cap + 1


def _euler_bound(u: float, P: int, weight: float) -> float:
    return weight * P ** (1 - u) / ((u - 1) * math.log(P)) if u > 1 else math.inf


def _exact_gl1(z: complex, n0: int, chi: Char8) -> complex:
    m, psi = twist_for(n0)
    return L_quadratic(z, m, psi * chi)


def l2_gl1_batch(z: complex, n0s, chi: Char8, tol: float = 1e-12):
    """L_2(z, chi_{n0} chi) for an array of signed squarefree n0.

    Euler products over odd p <= P when Re z is large enough, exact
    Hurwitz evaluation otherwise.  If the prime cap prevents reaching tol,
    the EXACT_SMALL smallest |n0| are done exactly and the rest keep the
    truncated product.  Returns (values, relative error bounds).
    """
    z = complex(z)
    n0s = np.asarray(n0s, dtype=np.int64)
    out = np.empty(n0s.size, dtype=complex)
    err = np.zeros(n0s.size)
    if n0s.size == 0:
        return out, err
    P = _prime_cutoff(z.real, tol)
    if P > P_CAP and n0s.size <= EXACT_SMALL:
        for i, n0 in enumerate(n0s):
            out[i] = _exact_gl1(z, int(n0), chi)
        return out, err
    P = min(P, P_CAP)
    if z.real <= 1:
        raise RegionError("batched Euler products need Re(z) > 1")
    logs = np.zeros(n0s.size, dtype=complex)
    for p in primes_up_to(P)[1:]:
        p = int(p)
        a = _legendre_table(p)[n0s % p] * chi(p)
        logs -= np.log1p(-a * p ** (-z))
    out[:] = np.exp(logs)
    err[:] = _euler_bound(z.real, P, 1.0)
    if _prime_cutoff(z.real, tol) > P_CAP:
        small = np.argsort(np.abs(n0s), kind="stable")[:EXACT_SMALL]
        for i in small:
            out[i] = _exact_gl1(z, int(n0s[i]), chi)
            err[i] = 0.0
    return out, err


def _reciprocal_sign(c0s: np.ndarray) -> np.ndarray:
    """c0* = +/- c0 with (p/c0) = (c0*/p) for odd primes p."""
    return np.where(c0s % 4 == 1, c0s, -c0s)


def l2_gl2_batch(z: complex, c0s, chi: Char8, seq: CoeffSequence, tol: float = 1e-12):
    """L_2(z, psi (x) chi~_{c0} chi) for odd squarefree c0 > 0.

    chi~_{c0}(n) = (n/c0).  For the divisor sequence this is the square of
    a GL1 value; for Hecke sequences only the Euler product (Re z > 1) is
    available.
    """
    z = complex(z)
    c0s = np.asarray(c0s, dtype=np.int64)
    if seq.kind == "divisor":
        vals, err = l2_gl1_batch(z, _reciprocal_sign(c0s), chi, tol)
        return vals**2, 2 * err
    if z.real <= 1 + MARGIN:
        raise RegionError("Hecke twists are only available for Re(z) > 1.1 (no continuation)")
    few = c0s.size <= EXACT_SMALL
    cap = P_CAP_FEW if few else P_CAP
    P = min(_prime_cutoff(z.real, tol, 2.0, cap), cap)
    primes = primes_up_to(P)
    tps = seq.tp_array(primes)[1:]
    logs = np.zeros(c0s.size, dtype=complex)
    if few:
        # vectorise over primes instead: (c0*/p) = (p/c0)
        odd = primes[1:]
        y = np.exp(-z * np.log(odd.astype(float)))
        chiv = chi.values(odd)
        for i, c0 in enumerate(c0s):
            x = jacobi_table(int(c0))[odd % c0] * chiv
            logs[i] = -csum(np.log(1 - tps * x * y + (x * x) * y * y))
        return np.exp(logs), np.full(c0s.size, _euler_bound(z.real, P, 2.0))
    cstar = _reciprocal_sign(c0s)
    for p, tp in zip(primes[1:], tps):
        p = int(p)
        x = _legendre_table(p)[cstar % p] * chi(p)
        y = p ** (-z)
        logs -= np.log(1 - tp * x * y + (x * x) * y * y)
    return np.exp(logs), np.full(c0s.size, _euler_bound(z.real, P, 2.0))


def Lstar_gl2_bounded(s: complex, c: int, chi: Char8, seq: CoeffSequence = DIVISOR, tol: float = 1e-12):
    """(L*(s, c, psi, chi), absolute error bound of the Euler product)."""
    if c < 1 or c % 2 == 0:
        raise ValueError("c must be a positive odd integer")
    c0 = squarefree_decomp(c).n0
    if seq.kind == "divisor" and c0 == 1 and chi == TRIV and _near(s, 1):
        raise PoleError("principal character: pole at s = 1")
    vals, err = l2_gl2_batch(s, [c0], chi, seq, tol)
    value = Q_poly(s, c, chi, seq) * vals[0]
    return value, float(err[0]) * abs(value)


def Lstar_gl2(s: complex, c: int, chi: Char8, seq: CoeffSequence = DIVISOR) -> complex:
    """L*(s, c, psi, chi) = Q(s, c, chi) L_2(s, psi (x) chi~_{c0} chi)."""
    return Lstar_gl2_bounded(s, c, chi, seq)[0]


# --------------------------------------------------------------------------
# inner sums (the two halves of the interchange)


def _odd_upto(N: int) -> np.ndarray:
    return np.arange(1, N + 1, 2)


def inner_sum_over_c(s: complex, n: int, chi: Char8, C: int) -> TruncatedValue:
    """sum over odd c <= C of chi(c) H_n(c) / c^{2s}."""
    s = complex(s)
    if 2 * s.real <= 1.5:
        warnings.warn("inner sum over c diverges for Re(2s) <= 3/2", ConvergenceWarning, stacklevel=2)
    c = _odd_upto(C)
    H = np.array([gauss_H_fast(n, int(x)) for x in c])
    terms = chi.values(c) * H * np.exp(-2 * s * np.log(c))
    tail = power_tail(c, terms, 2 * s.real - 0.5, density=0.5)
    return finish(csum(terms), tail, c.size, 1e-8)


def inner_sum_over_c_limit(s: complex, n: int, chi: Char8) -> complex:
    return Lstar_gl1(2 * complex(s) - 0.5, n, chi) / zeta2(4 * complex(s) - 1)


def local_factor_c(p: int, s: complex, n: int, chi: Char8) -> tuple[complex, complex]:
    """Both sides of the Euler factor at p of inner_sum_over_c."""
    s = complex(s)
    alpha = valuation(abs(n), p)
    lhs = csum(
        [chi(p) ** b * gauss_H(n % p**b, p**b) * p ** (-2 * b * s) for b in range(alpha + 2)]
    )
    dec = squarefree_decomp(n)
    z = 2 * s - 0.5
    rhs = (1 - p ** (-(4 * s - 1))) / (1 - jacobi(dec.n0, p) * chi(p) * p ** (-z))
    rhs *= q_local(z, dec.n0, chi, p, valuation(dec.n1, p))
    return lhs, rhs


def inner_sum_over_n(s: complex, c: int, chi: Char8, seq: CoeffSequence, N: int) -> TruncatedValue:
    """sum over odd n <= N of t_n chi(n) H_n(c) / n^s."""
    s = complex(s)
    if s.real <= 1 + MARGIN:
        raise RegionError("inner sum over n needs Re(s) > 1.1")
    if c < 1 or c % 2 == 0:
        raise ValueError("c must be a positive odd integer")
    Htab = np.array([gauss_H(r, c) for r in range(c)])
    n = _odd_upto(N)
    t = coeff_array(seq, N)[n]
    terms = t * chi.values(n) * Htab[n % c] * np.exp(-s * np.log(n))
    tail = power_tail(n, terms, s.real, density=0.5, log_power=_log_power(seq))
    return finish(csum(terms), tail, n.size, 1e-8)


def local_factor_n(p: int, s: complex, c: int, chi: Char8, seq: CoeffSequence, lam_max: int = 80):
    """Both sides of the Euler factor at p of inner_sum_over_n (l = v_p(c))."""
    s = complex(s)
    l = valuation(c, p)
    cp = c // p**l
    c0 = squarefree_decomp(c).n0
    t = seq.prime_powers(p, max(lam_max, l) + 1)
    sym = jacobi(p, cp)
    M = p**l
    lhs = csum(
        [
            t[lam] * chi(p) ** lam * gauss_H(pow(p, lam, M) % M if l else 0, M) * sym**lam * p ** (-lam * s)
            for lam in range(lam_max + 1)
        ]
    )
    x = jacobi(p, c0) * chi(p)
    Lp = 1 / (1 - t[1] * x * p ** (-s) + x * x * p ** (-2 * s))
    if l == 0:
        rhs = Lp
    elif l % 2 == 0:
        bracket = p * t[l] - t[l - 1] * x * (p ** (1 - s) + p**s) + t[l - 2]
        rhs = p ** (l / 2) * Lp * bracket / p ** (l * (s - 0.5) + 1)
    else:
        rhs = p ** (l / 2) * t[l - 1] / p ** ((l - 1) * (s - 0.5))
    return lhs, rhs


# --------------------------------------------------------------------------
# Z in its two representations


def _terms_needed(rate: float, tol: float, budget: int, scale: float = 10.0) -> int:
    """Index N where scale * N^{1-rate} / (rate-1) drops below tol, capped by budget."""
    if rate <= 1:
        return budget
    N = math.ceil((scale / (tol * (rate - 1))) ** (1 / (rate - 1)))
    return int(min(max(N, 64), budget))


def _log_power(seq: CoeffSequence) -> int:
    # divisor coefficients grow like log n on average
    return 1 if seq.kind == "divisor" else 0


def _sqfree_parts(ns: np.ndarray) -> np.ndarray:
    return np.array([squarefree_decomp(int(n)).n0 for n in ns], dtype=np.int64)


def _lookup(keys: np.ndarray, values_of_unique):
    uniq, inv = np.unique(keys, return_inverse=True)
    vals, err = values_of_unique(uniq)
    return vals[inv], err[inv]


def Z_repr_A(
    point: RegionPoint,
    chi: Char8,
    chi_p: Char8,
    seq: CoeffSequence = DIVISOR,
    tol: float = 1e-8,
    budget: int = 40000,
) -> TruncatedValue:
    """zeta_2(4s-1) sum_{odd n} chi(n) t_n L*(2w-1/2, n, chi') / n^{s-w+1/2}."""
    point.require("D1")
    if chi_p == TRIV and _near(point.w, 0.75):
        raise PoleError("pole at w = 3/4 for principal chi'")
    s, sig, z = point.s, point.sigma, point.z
    N = _terms_needed(sig.real, tol, budget)
    n = _odd_upto(N)
    t = coeff_array(seq, N)[n]
    n0 = _sqfree_parts(n)
    L, err = _lookup(n0, lambda u: l2_gl1_batch(z, u, chi_p, tol * 1e-2))
    q = np.array([q_poly(z, int(m), chi_p) for m in n])
    terms = chi.values(n) * t * q * L * np.exp(-sig * np.log(n))
    pref = zeta2(4 * s - 1)
    tail = abs(pref) * (power_tail(n, terms, sig.real, 0.5, _log_power(seq)) + float(np.sum(np.abs(terms) * err)))
    return finish(pref * csum(terms), tail, n.size, tol)


def _c_series(point, chi, chi_p, seq, tol, budget, star: bool):
    sig, zc = point.sigma, point.z
    C = _terms_needed(zc.real, tol, budget)
    c = _odd_upto(C)
    c0 = _sqfree_parts(c)
    L, err = _lookup(c0, lambda u: l2_gl2_batch(sig, u, chi, seq, tol * 1e-2))
    poly = Qstar_poly if star else Q_poly
    Q = np.array([poly(sig, int(m), chi, seq) for m in c])
    terms = chi_p.values(c) * Q * L * np.exp(-zc * np.log(c))
    tail = power_tail(c, terms, zc.real, density=0.5) + float(np.sum(np.abs(terms) * err))
    return csum(terms), tail, c.size


def _check_B(point: RegionPoint, seq: CoeffSequence) -> None:
    point.require("D2")
    if seq.kind == "hecke" and point.sigma.real <= 1 + MARGIN:
        raise RegionError("Hecke coefficients need Re(s-w+1/2) > 1.1 in the c-representation")
    if _near(point.s - point.w, 0.5):
        raise PoleError("double polar line s - w + 1/2 = 1")


def Z_repr_B(
    point: RegionPoint,
    chi: Char8,
    chi_p: Char8,
    seq: CoeffSequence = DIVISOR,
    tol: float = 1e-8,
    budget: int = 40000,
) -> TruncatedValue:
    """sum_{odd c} chi'(c) Q*(s-w+1/2, c, chi) L_2(s-w+1/2, psi (x) chi~_{c0} chi) / c^{2w-1/2}."""
    _check_B(point, seq)
    val, tail, used = _c_series(point, chi, chi_p, seq, tol, budget, star=True)
    return finish(val, tail, used, tol)


def Z_interchanged(
    point: RegionPoint,
    chi: Char8,
    chi_p: Char8,
    seq: CoeffSequence = DIVISOR,
    tol: float = 1e-8,
    budget: int = 40000,
) -> TruncatedValue:
    """zeta_2(4s-1) zeta_2(4w-1) sum_{odd c} chi'(c) L*(s-w+1/2, c, psi, chi) / c^{2w-1/2}."""
    _check_B(point, seq)
    val, tail, used = _c_series(point, chi, chi_p, seq, tol, budget, star=False)
    pref = zeta2(4 * point.s - 1) * zeta2(4 * point.w - 1)
    return finish(pref * val, abs(pref) * tail, used, tol)


def Z_eval(point, chi, chi_p, seq=DIVISOR, repr: str = "auto", tol=1e-8, budget=40000) -> TruncatedValue:
    """Z by representation A, B, or whichever valid one converges faster."""
    if repr == "A":
        return Z_repr_A(point, chi, chi_p, seq, tol, budget)
    if repr == "B":
        return Z_repr_B(point, chi, chi_p, seq, tol, budget)
    if repr != "auto":
        raise ValueError("repr must be A, B or auto")
    options = []
    for name, fn, rate in (("A", Z_repr_A, point.sigma.real), ("B", Z_repr_B, point.z.real)):
        try:
            (point.require("D1") if name == "A" else _check_B(point, seq))
        except (RegionError, PoleError) as exc:
            last = exc
            continue
        options.append((rate, name, fn))
    if not options:
        raise last
    _, _, fn = max(options, key=lambda o: o[0])
    return fn(point, chi, chi_p, seq, tol, budget)


# --------------------------------------------------------------------------
# term-level functional equations


def fe_alpha_term_residual(w: complex, n: int, chi_p: Char8) -> float:
    """Relative residual of the GL1 functional equation of q L_2 at 2w-1/2."""
    if n == 0:
        raise ValueError("n must be nonzero")
    if n < 0:
        n, chi_p = -n, CHI4 * chi_p
    w = complex(w)
    z = 2 * w - 0.5
    dec = squarefree_decomp(n)
    m, psi = twist_for(dec.n0)
    ch = psi * chi_p
    cd = conductor_data(m, ch)
    n1_odd = dec.n1 >> valuation(dec.n1, 2)
    lhs = q_poly(z, n, chi_p) * L_quadratic(z, m, ch, method="direct")
    rhs = (
        n1_odd ** (1 - 2 * z)
        * gl1_fe_factor(z, cd)
        * cd.h2(z)
        / cd.h2(1 - z)
        * q_poly(1 - z, n, chi_p)
        * L_quadratic(1 - z, m, ch, method="direct")
    )
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


def fe_beta_term_residual(s: complex, w: complex, c: int, chi: Char8, seq: CoeffSequence = DIVISOR) -> float:
    """Relative residual of the c-term of the c-representation under (s, w) -> (w, s).

    Divisor sequence only: its GL2 twist is the square of a GL1 twist.
    """
    if seq.kind != "divisor":
        raise UnsupportedError("the beta transformation needs root numbers; divisor case only")
    if c < 1 or c % 2 == 0:
        raise ValueError("c must be a positive odd integer")
    sig = complex(s) - complex(w) + 0.5
    c0 = squarefree_decomp(c).n0
    ch = (CHI4 if c0 % 4 == 3 else TRIV) * chi
    cd = conductor_data(c0, ch)
    fe = gl1_fe_factor(sig, cd) * cd.h2(sig) / cd.h2(1 - sig)
    lhs = Q_poly(sig, c, chi) * L_quadratic(sig, c0, ch, method="direct") ** 2
    rhs = (
        (c / c0) ** (1 - 2 * sig)
        * fe**2
        * Q_poly(1 - sig, c, chi)
        * L_quadratic(1 - sig, c0, ch, method="direct") ** 2
    )
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


# --------------------------------------------------------------------------
# Z-hat and the plus/minus series


def Zhat_eval(point: RegionPoint, chi: Char8, chi_p: Char8, tol: float = 1e-8, budget: int = 40000) -> TruncatedValue:
    """sum_{odd c} chi'(c) L*(s-w+1/2, c, chi)^2 / c^{2w-1/2}."""
    _check_B(point, DIVISOR)
    sig, zc = point.sigma, point.z
    C = _terms_needed(zc.real, tol, budget)
    c = _odd_upto(C)
    c0 = _sqfree_parts(c)
    L, err = _lookup(c0, lambda u: l2_gl1_batch(sig, u, chi, tol * 1e-2))
    q = np.array([q_poly(sig, int(m), chi) for m in c])
    terms = chi_p.values(c) * (q * L) ** 2 * np.exp(-zc * np.log(c))
    tail = power_tail(c, terms, zc.real, density=0.5) + float(np.sum(np.abs(terms) * 2 * err))
    return finish(csum(terms), tail, c.size, tol)


def zhat_identity_sides(point: RegionPoint, chi: Char8, chi_p: Char8, tol: float = 1e-9, budget: int = 40000):
    """Z-hat and its expression through four divisor-case Z values."""
    lhs = Zhat_eval(point, chi, chi_p, tol, budget)
    parts = [
        (1, chi, chi_p),
        (1, chi * CHI4, chi_p),
        (1, chi, chi_p * CHI4),
        (-1, chi * CHI4, chi_p * CHI4),
    ]
    vals = [Z_eval(point, a, b, DIVISOR, "auto", tol, budget) for _, a, b in parts]
    den = 2 * zeta2(2 * point.s + 2 * point.w - 1)
    rhs = sum(sg * v.value for (sg, _, _), v in zip(parts, vals)) / den
    tail = lhs.tail_bound + sum(v.tail_bound for v in vals) / abs(den)
    return lhs.value, rhs, tail


def _signed_range(sign: int, N: int) -> np.ndarray:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return sign * np.arange(1, N + 1)


def _lstar_batch(z: complex, ns: np.ndarray, tol: float):
    """L*(z, n, 1) for signed n; the sign rides on the squarefree part."""
    n0 = _sqfree_parts(ns)
    L, err = _lookup(n0, lambda u: l2_gl1_batch(z, u, TRIV, tol))
    q = np.array([q_poly(z, int(m), TRIV) for m in ns])
    return q * L, err


def Zpm_eval(
    point: RegionPoint, sign: int, seq: CoeffSequence = DIVISOR, tol: float = 1e-8, budget: int = 60000
) -> TruncatedValue:
    """zeta_2(4s-1) sum_{sign n >= 1} b_n r_2(w, -n) L*(2w-1/2, -n, 1) / |n|^{s-w}."""
    point.require("D1")
    s, w, z = point.s, point.w, point.z
    rate = (s - w).real + 0.5
    N = _terms_needed(rate, tol, budget, scale=1.0)
    ns = _signed_range(sign, N)
    k = np.abs(ns)
    bsign = seq.b_plus if sign > 0 else seq.b_minus
    b = bsign * coeff_array(seq, N)[k] / np.sqrt(k)
    r2 = np.array([r2_explicit(w, -int(m)) for m in ns])
    L, err = _lstar_batch(z, -ns, tol * 1e-2)
    terms = b * r2 * L * np.exp(-(s - w) * np.log(k))
    pref = zeta2(4 * s - 1)
    tail = abs(pref) * (power_tail(k, terms, rate, 1.0, _log_power(seq)) + float(np.sum(np.abs(terms) * err)))
    return finish(pref * csum(terms), tail, ns.size, tol)


def zpm_term_pair(point: RegionPoint, n: int, seq: CoeffSequence = DIVISOR) -> tuple[complex, complex]:
    """The n-th Z_+/- summand directly and rebuilt from phi_{-n}(w)."""
    s, w = point.s, point.w
    from .coeffs import b_coeff

    b = b_coeff(seq, n)
    direct = zeta2(4 * s - 1) * b * r2_explicit(w, -n) * Lstar_gl1(2 * w - 0.5, -n, TRIV) / abs(n) ** (s - w)
    sign = 1 if n > 0 else -1
    root8 = complex(math.cos(math.pi / 4), -math.sin(math.pi / 4))
    norm = complex_gamma(w - sign / 4) / (math.pi**w * root8)
    via_phi = norm * zeta2(4 * s - 1) * zeta2(4 * w - 1) * b * phi_n(w, -n).phi_n / abs(n) ** (s - 1)
    return direct, via_phi


def Zhatpm_eval(point: RegionPoint, sign: int, tol: float = 1e-6, budget: int = 300) -> TruncatedValue:
    """(zeta_2(4w-1) zeta_2(3-4w))^{-1} sum_{sign n >= 1} L*(2w-1/2, n) L*(3/2-2w, n) r_2(w,n) r_2(1-w,n) / |n|^s.

    The L-values sit near the critical line, so each is evaluated exactly;
    the default budget is small and the tail is reported.
    """
    s, w = complex(point.s), complex(point.w)
    if s.real <= 1 + MARGIN:
        raise RegionError("Z-hat_+/- needs Re(s) > 1.1 here")
    N = _terms_needed(s.real, tol, budget, scale=1.0)
    ns = _signed_range(sign, N)
    terms = np.array([zhatpm_term(w, int(m)) * abs(m) ** (-s) for m in ns])
    pref = 1 / (zeta2(4 * w - 1) * zeta2(3 - 4 * w))
    tail = abs(pref) * power_tail(np.abs(ns), terms, s.real)
    return finish(pref * csum(terms), tail, ns.size, tol)


def zhatpm_term(w: complex, n: int) -> complex:
    """L*(2w-1/2, n) L*(3/2-2w, n) r_2(w, n) r_2(1-w, n)."""
    w = complex(w)
    return (
        Lstar_gl1(2 * w - 0.5, n, TRIV)
        * Lstar_gl1(1.5 - 2 * w, n, TRIV)
        * r2_explicit(w, n)
        * r2_explicit(1 - w, n)
    )


def zhatpm_phi_form(w: complex, n: int) -> complex:
    """Gamma(w +/- 1/4) Gamma(1-w +/- 1/4) / (pi i) |n| phi_n(w) phi_n(1-w), scaled by the zeta_2 pair.

    Comparable with zhatpm_term: the two differ by an overall factor -1.
    """
    w = complex(w)
    sign = 1 if n > 0 else -1
    g = complex_gamma(w + sign / 4) * complex_gamma(1 - w + sign / 4) / (math.pi * 1j)
    prod = phi_n(w, n).phi_n * phi_n(1 - w, n).phi_n
    return g * abs(n) * prod * zeta2(4 * w - 1) * zeta2(3 - 4 * w)


# --------------------------------------------------------------------------
# scans and experiments


def growth_scan(
    re_s: float,
    re_w: float,
    line,
    chi: Char8 = TRIV,
    chi_p: Char8 = TRIV,
    seq: CoeffSequence = DIVISOR,
    tol: float = 1e-6,
    budget: int = 20000,
) -> list[dict]:
    """|Z| along s = re_s + it, w = re_w + iu for (t, u) in ``line``."""
    rows = []
    for t, u in line:
        point = RegionPoint(complex(re_s, t), complex(re_w, u))
        if not (point.in_D1 or point.in_D2):
            raise RegionError(f"({point.s}, {point.w}) is outside D1 and D2; no continuation")
        v = Z_eval(point, chi, chi_p, seq, "auto", tol, budget)
        q = conductor(t, u).q
        rows.append(
            {
                "t": t,
                "u": u,
                "abs_Z": abs(v.value),
                "conductor": q,
                "ratio": abs(v.value) / q**0.25,
                "tail": v.tail_bound,
                "converged": v.converged,
            }
        )
    return rows


def lindelof_average_experiment(
    X: int, s: complex = 0.5, chi: Char8 = TRIV, seq: CoeffSequence = DIVISOR, points: int = 12
) -> SlopeReport:
    """Partial sums of |L_2(s, psi (x) chi~_{c0} chi)|^2 over odd squarefree c0 <= x."""
    if seq.kind != "divisor":
        raise UnsupportedError("Hecke twists are not available on the critical line")
    s = complex(s)
    c0s = squarefree_odd_upto(X)
    if chi == TRIV and _near(s, 1):
        raise PoleError("pole at s = 1")
    weights = [
        abs(L_quadratic(s, int(c), (CHI4 if c % 4 == 3 else TRIV) * chi)) ** 4 for c in c0s
    ]
    grid = geometric_grid(1, X, points)
    return cumulative_report(c0s, weights, grid, label="lindelof-average")
