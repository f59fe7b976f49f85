"""Whittaker functions, 3F2 at unit argument, and Mellin transforms of
products of two Whittaker functions (closed form versus quadrature)."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from ._common import RegionError, csum
from .lfun import _em_remainder, complex_gamma, log_gamma


class QuadratureError(RuntimeError):
    """Quadrature failed to resolve the integrand."""


# --------------------------------------------------------------------------
# Whittaker W via a rotated Laplace-type integral


_ROTATION = math.pi / 2 - 0.5


def _w_nodes(re_a: float, theta: float, h: float = 0.04):
    """Log-scale trapezoid nodes r = e^u covering r^{Re a} decay at 0
    and e^{-r cos(theta)} decay at infinity."""
    u_lo = -40.0 / max(re_a, 0.05)
    u_hi = math.log(45.0 / math.cos(theta))
    u = np.arange(u_lo, u_hi + h, h)
    return np.exp(u), h


def _kummer_M(a: complex, b: complex, y: np.ndarray) -> np.ndarray:
    """1F1(a; b; y) by its power series (y real, moderate)."""
    nmax = int(3 * float(y.max()) + 80)
    term = np.ones(y.shape, dtype=complex)
    acc = term.copy()
    for n in range(nmax):
        term = term * ((a + n) / ((b + n) * (n + 1))) * y
        acc += term
        if n > y.max() and np.all(np.abs(term) <= 1e-18 * np.abs(acc)):
            break
    return acc


def _whittaker_kummer(kappa: float, mu: complex, y: np.ndarray) -> np.ndarray:
    """W as the connection-formula combination of M_{kappa,+mu} and M_{kappa,-mu}."""
    out = np.zeros(y.shape, dtype=complex)
    logy = np.log(y)
    for m in (mu, -mu):
        pref = log_gamma(-2 * m) - log_gamma(0.5 - m - kappa)
        Mser = _kummer_M(0.5 + m - kappa, 1 + 2 * m, y)
        out += np.exp(pref - y / 2 + (0.5 + m) * logy) * Mser
    return out


def whittaker_W(kappa: float, mu: complex, y) -> np.ndarray | complex:
    """W_{kappa,mu}(y) for y > 0 (scalar or array).

    Main route: W = y^{1/2-mu} e^{-y/2} / Gamma(a) * int_0^inf e^{-tau}
    tau^{a-1} (y+tau)^{b-1} dtau with a = 1/2+mu-kappa, b = 1/2+mu+kappa,
    on a ray arg tau = theta.  For |Im mu| >= 1 and y below the turning
    point that integral cancels to about e^{-pi |Im mu|/2}, so the Kummer
    connection formula (which is cancellation free there) is used instead.
    """
    scalar = np.ndim(y) == 0
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    mu = complex(mu)
    if abs(mu.imag) >= 1.0:
        low = y < math.pi * abs(mu.imag)
        if np.any(low):
            out = np.empty(y.shape, dtype=complex)
            out[low] = _whittaker_kummer(kappa, mu, y[low])
            if np.any(~low):
                out[~low] = whittaker_W(kappa, mu, y[~low])
            return complex(out[0]) if scalar else out
    # W is even in mu; pick the sign that keeps Re a > 0, prefer Im mu >= 0
    cands = [m for m in (mu, -mu) if (0.5 + m - kappa).real > 0.02]
    if not cands:
        raise RegionError("Re(1/2 + mu - kappa) must be positive for some sign of mu")
    cands.sort(key=lambda m: (m.imag < 0, -m.real))
    mu = cands[0]
    a = 0.5 + mu - kappa
    b1 = mu + kappa - 0.5
    theta = math.copysign(_ROTATION, mu.imag) if abs(mu.imag) >= 1.0 else 0.0
    r, h = _w_nodes(a.real, theta)
    rot = cmath.exp(1j * theta)
    tau = r * rot
    log_tau = np.log(r) + 1j * theta
    base = np.exp(-tau + a * log_tau)  # includes the Jacobian factor tau
    yy = y[:, None]
    integrand = base[None, :] * np.exp(b1 * np.log(yy + tau[None, :]))
    vals = integrand.sum(axis=1) * h
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("Whittaker quadrature overflow")
    out = np.exp((0.5 - mu) * np.log(y) - y / 2 - log_gamma(a)) * vals
    return complex(out[0]) if scalar else out


def bessel_K_imag(nu: float, x: float, h: float = 0.01) -> float:
    """K_{i nu}(x) = int_0^inf exp(-x cosh u) cos(nu u) du (trapezoid)."""
    umax = math.acosh(max(1.0, 800.0 / x)) + 1.0
    u = np.arange(0.0, umax, h)
    f = np.exp(-x * np.cosh(u)) * np.cos(nu * u)
    return h * (math.fsum(f) - 0.5 * f[0])


# --------------------------------------------------------------------------
# 3F2 at z = 1


def _bernoulli_numbers(m: int) -> list[Fraction]:
    B = [Fraction(0)] * (m + 1)
    B[0] = Fraction(1)
    for n in range(1, m + 1):
        B[n] = -sum(comb(n + 1, k) * B[k] for k in range(n)) / (n + 1)
    return B


_BN = _bernoulli_numbers(16)


def _bernoulli_poly(m: int, x: complex) -> complex:
    return sum(float(comb(m, j) * _BN[j]) * x ** (m - j) for j in range(m + 1))


def _asymptotic_coeffs(a: list[complex], b: list[complex], K: int) -> list[complex]:
    """d_0..d_K with T_n ~ C n^{-1-e} sum_k d_k n^{-k}, T_n the nth 3F2 term."""
    top = [*a]
    bot = [1.0 + 0j, *b]
    c = [0j] * (K + 1)
    for k in range(1, K + 1):
        acc = sum(_bernoulli_poly(k + 1, x) for x in top) - sum(_bernoulli_poly(k + 1, x) for x in bot)
        c[k] = (-1) ** (k + 1) * acc / (k * (k + 1))
    # exp of the power series sum_k c_k z^k
    d = [0j] * (K + 1)
    d[0] = 1 + 0j
    for n in range(1, K + 1):
        d[n] = sum(k * c[k] * d[n - k] for k in range(1, n + 1)) / n
    return d


@dataclass(frozen=True)
class HypResult:
    value: complex
    tail: complex
    terms: int


def hyp3f2_unit(a1, a2, a3, b1, b2, N: int | None = None, K: int = 10, detail: bool = False):
    """3F2(a1,a2,a3; b1,b2; 1) by direct summation plus an asymptotic tail.

    The tail uses the exact large-n expansion of the terms (leading constant
    from Gamma functions, corrections from Bernoulli polynomials) resummed
    with Hurwitz zeta values.
    """
    a = [complex(x) for x in (a1, a2, a3)]
    b = [complex(x) for x in (b1, b2)]
    e = sum(b) - sum(a)
    if e.real <= 0:
        raise RegionError("3F2 at 1 diverges: need Re(b1+b2-a1-a2-a3) > 0")
    for x in a:
        if x.imag == 0 and x.real <= 0 and x.real == round(x.real):
            # terminating series
            M = int(-x.real)
            res = _partial(a, b, M + 1)
            return HypResult(res, 0j, M + 1) if detail else res
    scale = max(1.0, *(abs(x) for x in a + b))
    if N is None:
        N = int(max(2000, 60 * scale))
    head = _partial(a, b, N)
    d = _asymptotic_coeffs(a, b, K)
    logC = sum(log_gamma(x) for x in b) - sum(log_gamma(x) for x in a)
    C = cmath.exp(logC)
    tail = 0j
    for k, dk in enumerate(d):
        tail += dk * complex(_em_remainder(1 + e + k, np.array([float(N)]), drop_pole=False)[0])
    tail *= C
    val = head + tail
    return HypResult(val, tail, N) if detail else val


def _partial(a, b, N: int) -> complex:
    n = np.arange(N - 1, dtype=float)
    ratio = (n + a[0]) * (n + a[1]) * (n + a[2]) / ((n + 1) * (n + b[0]) * (n + b[1]))
    terms = np.concatenate(([1 + 0j], np.cumprod(ratio)))
    return csum(terms)


def hyp_terms(a, b, count: int) -> np.ndarray:
    """First ``count`` terms of a pFq series at z = 1 (len(b) = len(a) - 1)."""
    n = np.arange(count - 1, dtype=float)
    ratio = np.ones(count - 1, dtype=complex) / (n + 1)
    for x in a:
        ratio = ratio * (n + x)
    for x in b:
        ratio = ratio / (n + x)
    return np.concatenate(([1 + 0j], np.cumprod(ratio)))


# --------------------------------------------------------------------------
# Mellin transforms of W W


@dataclass(frozen=True)
class MellinParams:
    """Parameters of int_0^inf W_{0,s0-1/2}(y) W_{p/4,w-1/2}(y) y^{s-1} dy/y."""

    p: int
    s0: complex
    s: complex
    w: complex

    def __post_init__(self):
        if self.p not in (1, -1):
            raise ValueError("p must be +1 or -1")

    def check(self) -> None:
        s0, s, w = complex(self.s0), complex(self.s), complex(self.w)
        if abs((s0 - 0.5).real) + abs((w - 0.5).real) >= s.real:
            raise RegionError("need |Re(s0-1/2)| + |Re(w-1/2)| < Re(s)")
        if s.real >= 1 + self.p / 4:
            raise RegionError("3F2 series diverge unless Re(s) < 1 + p/4")


def mellin_general(rho: complex, k1: float, mu: complex, k2: float, nu: complex) -> complex:
    """int_0^inf y^{rho-1} W_{k1,mu}(y) W_{k2,nu}(y) dy as two Gamma * 3F2 terms."""
    rho, mu, nu = complex(rho), complex(mu), complex(nu)
    if rho.real + 1 <= abs(mu.real) + abs(nu.real):
        raise RegionError("Mellin integral diverges at 0")
    out = 0j
    for v in (nu, -nu):
        A1 = rho + 1 + v - mu
        A2 = rho + 1 + v + mu
        A3 = 0.5 + v - k2
        B1 = 1 + 2 * v
        B2 = rho + 1.5 + v - k1
        pref = cmath.exp(
            log_gamma(A1) + log_gamma(A2) + log_gamma(-2 * v) - log_gamma(0.5 - k2 - v) - log_gamma(B2)
        )
        out += pref * hyp3f2_unit(A1, A2, A3, B1, B2)
    return out


def mellin_WW_closed(params: MellinParams) -> complex:
    params.check()
    s0, s, w = complex(params.s0), complex(params.s), complex(params.w)
    return mellin_general(s - 1, 0.0, s0 - 0.5, params.p / 4, w - 0.5)


def _mellin_nodes(h: float = 0.05, lo: float = -60.0, hi: float = 4.6):
    u = np.arange(lo, hi + h, h)
    return np.exp(u), h


def mellin_quadrature(rho: complex, k1: float, mu: complex, k2: float, nu: complex, lo: float = -60.0) -> complex:
    """Direct quadrature of int_0^inf y^{rho-1} W_{k1,mu} W_{k2,nu} dy in log y."""
    y, h = _mellin_nodes(lo=lo)
    f = whittaker_W(k1, mu, y) * whittaker_W(k2, nu, y) * np.exp(complex(rho) * np.log(y))
    return csum(f) * h


def mellin_WW_quadrature(params: MellinParams) -> complex:
    s0, s, w = complex(params.s0), complex(params.s), complex(params.w)
    return mellin_quadrature(s - 1, 0.0, s0 - 0.5, params.p / 4, w - 0.5)


def nmn_closed(p: int, s0: complex, t: float) -> complex:
    """The s = 1/2+it, w = 1/2-it specialisation after Bailey's transformation."""
    s0 = complex(s0)
    k = p / 4
    it = 1j * t
    first = cmath.exp(log_gamma(1 - s0) + log_gamma(s0) + log_gamma(2 * it) - log_gamma(0.5 - k + it))
    first *= hyp3f2_unit(1 - s0, s0, 0.5 - k - it, 1 - 2 * it, 1)
    second = cmath.exp(
        log_gamma(s0 + 2 * it)
        + log_gamma(1 - s0 + 2 * it)
        + log_gamma(-2 * it)
        + log_gamma(0.5 + k - it)
        - log_gamma(0.5 - k - it)
        - log_gamma(0.5 + k + it)
    )
    second *= hyp3f2_unit(1 - s0, s0, 0.5 - k + it, 1 + 2 * it, 1)
    return first + second


def bailey_sides(p: int, s0: complex, t: float) -> tuple[complex, complex]:
    """Both sides of the 3F2 transformation used for the s = 1/2+it specialisation."""
    s0 = complex(s0)
    k = p / 4
    it = 1j * t
    lhs = hyp3f2_unit(s0 + 2 * it, 1 - s0 + 2 * it, 0.5 - k + it, 1 + 2 * it, 1 + 2 * it)
    fac = cmath.exp(log_gamma(0.5 + k - it) + log_gamma(1 + 2 * it) - log_gamma(0.5 + k + it))
    rhs = fac * hyp3f2_unit(0.5 - k + it, 1 - s0, s0, 1 + 2 * it, 1)
    return lhs, rhs


def G_pm(w: complex, sign: int, s0: complex) -> complex:
    """G_(+/-)(w) = Gamma(w +/- 1/4)^{-1} int W_{+/-1/4,w-1/2}(2y) W_{0,s0-1/2}(2y) y^{w-1} dy/y."""
    w = complex(w)
    params = MellinParams(sign, s0, w, w)
    return 2 ** (1 - w) / complex_gamma(w + sign / 4) * mellin_WW_closed(params)


def G_pm_quadrature(w: complex, sign: int, s0: complex) -> complex:
    w = complex(w)
    y, h = _mellin_nodes()
    f = whittaker_W(sign / 4, w - 0.5, 2 * y) * whittaker_W(0.0, complex(s0) - 0.5, 2 * y)
    f = f * np.exp((w - 1) * np.log(y))
    return csum(f) * h / complex_gamma(w + sign / 4)


# --------------------------------------------------------------------------
# decay estimates


def nicole_row(p: int, s0: complex, t: float) -> dict:
    s = 0.5 + 1j * t
    w = 1 - s
    raw = mellin_WW_closed(MellinParams(p, s0, s, w))
    M = abs(raw) / abs(complex_gamma(w + p / 4))
    model = (1 + abs(t)) ** (-(0.5 - p / 4)) * math.exp(-math.pi * abs(t) / 2)
    return {
        "t": t,
        "raw": abs(raw),
        "M": M,
        "normalized": M * (1 + abs(t)) ** 0.5,
        "model": model,
        "raw_over_model": abs(raw) / model,
    }


def nicole_decay_scan(p: int, s0: complex, t_grid) -> list[dict]:
    rows = []
    for t in t_grid:
        if not 1 <= t <= 40:
            raise ValueError("t must lie in [1, 40]")
        rows.append(nicole_row(p, s0, float(t)))
    return rows


def dyadic_spread(rows: list[dict], key: str = "normalized", lo: float = 2.0, hi: float = 32.0) -> list[float]:
    """max/min of a column over each dyadic block [2^j, 2^{j+1}] inside [lo, hi]."""
    out = []
    start = lo
    while start < hi:
        vals = [r[key] for r in rows if start <= r["t"] <= 2 * start]
        if vals:
            out.append(max(vals) / min(vals))
        start *= 2
    return out


def estimateM_I(p: int, t: float, u: float = 0.0, normalized: bool = True) -> complex:
    """I_{p,t}(u) = int y^{-1/2+iu} |W_{p/4,it}(y)|^2 dy/y, optionally divided
    by |Gamma(1/2+p/4+it)|^2."""
    if p not in (1, -1):
        raise ValueError("p must be +1 or -1")
    val = mellin_general(-0.5 + 1j * u, p / 4, 1j * t, p / 4, 1j * t)
    if normalized:
        val /= abs(complex_gamma(0.5 + p / 4 + 1j * t)) ** 2
    return val


def estimateM_quadrature(p: int, t: float, u: float = 0.0) -> complex:
    y, h = _mellin_nodes(lo=-80.0)
    W = whittaker_W(p / 4, 1j * t, y)
    f = np.abs(W) ** 2 * np.exp((-0.5 + 1j * u) * np.log(y))
    return csum(f) * h


def majorant_ratio(p: int, s0: complex, t: float, count: int = 1000, eps: float = 0.1) -> float:
    """max_n |term_n(3F2)| / term_n(2F1(s0,1-s0;1+eps;1)); at most 1 when the
    majorisation holds."""
    s0 = complex(s0)
    k = p / 4
    f3 = hyp_terms([s0, 1 - s0, 0.5 - k - 1j * t], [1 - 2j * t, 1], count)
    f2 = hyp_terms([s0, 1 - s0], [1 + eps], count)
    return float(np.max(np.abs(f3) / np.abs(f2)))
