"""Hecke-multiplicative coefficient sequences t_n.

Two kinds are provided: the divisor function (Satake pair 1, 1 at every
prime) and synthetic tempered sequences whose odd-prime angles are drawn
from a seeded generator.  The coefficients at powers of 2 come from the
inverse of a two-factor polynomial.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from ._common import PoleError, SlopeReport, cumulative_report, geometric_grid
from .arith import factorize, primes_up_to
from .lfun import TwoFactorPoly

T2_CHOICES = (0.0, 1 / math.sqrt(2), -1 / math.sqrt(2))


@dataclass(frozen=True, eq=False)
class CoeffSequence:
    """Coefficients t_n with t_1 = 1, multiplicative, Hecke recursion at odd p.

    ``overrides`` pins t_p for chosen odd primes (|t_p| <= 2 keeps the
    sequence tempered).  ``b_plus``/``b_minus`` are the signs b_{+1}, b_{-1}
    used by b_n = b_{sign n} |n|^{-1/2} t_{|n|}.
    """

    kind: str = "divisor"
    seed: int = 0
    s0: complex = 0.5
    theta: float = 0.0
    two_factor: TwoFactorPoly = field(default=TwoFactorPoly(-2.0, 1.0))
    overrides: tuple = ()
    b_plus: int = 1
    b_minus: int = 1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("divisor", "hecke"):
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        for p, tp in self.overrides:
            if p % 2 == 0 or abs(tp) > 2:
                raise ValueError("overrides need odd p and |t_p| <= 2")

    @classmethod
    def divisor(cls) -> "CoeffSequence":
        return cls("divisor")

    @classmethod
    def hecke(cls, seed: int = 0, s0: complex = 0.5, t2: float | None = None, overrides=None) -> "CoeffSequence":
        if t2 is None:
            t2 = T2_CHOICES[seed % 3]
        ov = tuple(sorted((int(p), float(v)) for p, v in dict(overrides or {}).items()))
        return cls("hecke", seed=seed, s0=s0, two_factor=TwoFactorPoly.degree_one(t2), overrides=ov)

    @property
    def label(self) -> str:
        return "divisor" if self.kind == "divisor" else f"hecke(seed={self.seed})"

    # prime data ---------------------------------------------------------

    def _angles(self, count: int) -> np.ndarray:
        # prefix-stable: the i-th odd prime always gets the i-th draw
        return np.random.default_rng(self.seed).random(count) * math.pi

    def tp_array(self, primes: np.ndarray) -> np.ndarray:
        """t_p for an ascending array of primes (t_2 from the two-factor)."""
        primes = np.asarray(primes)
        out = np.empty(primes.size)
        if self.kind == "divisor":
            out[:] = 2.0
        else:
            odd = primes > 2
            out[odd] = 2.0 * np.cos(self._angles(int(odd.sum())))
            for p, tp in self.overrides:
                out[primes == p] = tp
        out[primes == 2] = -self.two_factor.c1
        return out

    def prime_powers(self, p: int, top: int) -> list[float]:
        """[t_1, t_p, ..., t_{p^top}]."""
        key = (p, top)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        if p == 2:
            vals = self.two_factor.series(top + 1)
        else:
            tp = self._tp_single(p)
            vals = [1.0, tp]
            while len(vals) < top + 1:
                vals.append(tp * vals[-1] - vals[-2])
            vals = vals[: top + 1]
        with self._lock:
            self._cache[key] = vals
        return vals

    def _tp_single(self, p: int) -> float:
        if self.kind == "divisor":
            return 2.0
        for q, tp in self.overrides:
            if q == p:
                return tp
        primes = primes_up_to(p)
        idx = int(np.searchsorted(primes, p)) - 1  # index among odd primes
        return float(2.0 * math.cos(self._angles(idx + 1)[idx]))


def coeff(seq: CoeffSequence, n: int) -> float:
    if n < 1:
        raise ValueError("n must be positive")
    out = 1.0
    for p, e in factorize(n).items() if n > 1 else ():
        out *= seq.prime_powers(p, e)[e]
    return out


def b_coeff(seq: CoeffSequence, n: int) -> float:
    """b_n = b_{sign n} |n|^{-1/2} t_{|n|}."""
    if n == 0:
        raise ValueError("n must be nonzero")
    sign = seq.b_plus if n > 0 else seq.b_minus
    return sign * coeff(seq, abs(n)) / math.sqrt(abs(n))


def coeff_array(seq: CoeffSequence, N: int) -> np.ndarray:
    """Array t[0..N] (t[0] = 0) built by sieving over prime powers."""
    t = np.ones(N + 1)
    t[0] = 0.0
    if N < 2:
        return t
    primes = primes_up_to(N)
    tps = seq.tp_array(primes)
    root = math.isqrt(N)
    for p, tp in zip(primes, tps):
        p = int(p)
        if p > root:
            t[p::p] *= tp
            continue
        top = int(math.log(N) / math.log(p)) + 1
        while p**top > N:
            top -= 1
        pw = seq.prime_powers(p, top) if seq.kind == "divisor" or p == 2 else _powers_from(tp, top)
        for k in range(top, 0, -1):
            step = p**k
            mult = np.arange(step, N + 1, step)
            mult = mult[(mult // step) % p != 0]
            t[mult] *= pw[k]
    return t


def _powers_from(tp: float, top: int) -> list[float]:
    vals = [1.0, tp]
    while len(vals) < top + 1:
        vals.append(tp * vals[-1] - vals[-2])
    return vals[: top + 1]


def local_lfactor(seq: CoeffSequence, p: int, x: complex) -> complex:
    """(1 - t_p x + x^2)^{-1}, the generating function of t_{p^l}."""
    if p == 2 or p < 2:
        raise ValueError("p must be an odd prime")
    tp = seq.prime_powers(p, 1)[1]
    den = 1 - tp * x + x * x
    if abs(den) < 1e-14:
        raise PoleError("local factor has a pole here")
    return 1 / den


def rpc_average_check(seq: CoeffSequence, X: int, points: int = 12) -> SlopeReport:
    """Partial sums of t_n^2 up to x on a geometric grid, with log-log slope."""
    if X < 1:
        raise ValueError("X must be positive")
    t = coeff_array(seq, X)
    n = np.arange(1, X + 1)
    grid = geometric_grid(1, X, points) if X > 1 else np.array([1])
    return cumulative_report(n, t[1:] ** 2, grid, label=f"rpc:{seq.label}")
