"""Complex Gamma, Hurwitz/Riemann zeta, xi, and L-functions of the real
characters chi_{n0} * chi (chi mod 8), with the 2-factor bookkeeping needed
to pass between L_2 and the primitive L-function."""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._common import PoleError, SlopeReport, csum, cumulative_report, geometric_grid
from .arith import (
    Char8,
    TRIV,
    chi_n0_values,
    factorize,
    is_squarefree,
    kronecker,
    primes_up_to,
)

POLE_GUARD = 1e-6
LOG_2PI_HALF = 0.5 * math.log(2.0 * math.pi)

# Godfrey's g = 607/128 Lanczos coefficients
_LANCZOS_G = 607.0 / 128.0
_LANCZOS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


def _bernoulli_even(count: int) -> list[Fraction]:
    """B_2, B_4, ..., B_{2*count} from the Akiyama-Tanigawa recurrence."""
    top = 2 * count
    a = [Fraction(0)] * (top + 1)
    B = []
    for m in range(top + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        B.append(a[0])
    return [B[2 * k] for k in range(1, count + 1)]


# B_{2j}/(2j)! for j = 1..15, built once at import
_EM_COEFFS = tuple(
    float(b / math.factorial(2 * j)) for j, b in enumerate(_bernoulli_even(15), start=1)
)


# --------------------------------------------------------------------------
# Gamma


def _near_nonpositive_integer(s: complex) -> bool:
    r = round(s.real)
    return r <= 0 and abs(s - r) < POLE_GUARD


def _log_sin_pi(s: complex) -> complex:
    """log sin(pi s), stable for large |Im s|; branch irrelevant for exp()."""
    y = s.imag
    if abs(y) < 20.0:
        return cmath.log(cmath.sin(math.pi * s))
    if y > 0:
        # sin(pi s) = e^{-i pi s} (1 - e^{2 i pi s}) / (2i)
        return -1j * math.pi * s + cmath.log(1 - cmath.exp(2j * math.pi * s)) - cmath.log(-2j)
    return 1j * math.pi * s + cmath.log(1 - cmath.exp(-2j * math.pi * s)) - cmath.log(2j)


def log_gamma(s: complex) -> complex:
    """log Gamma(s) up to a multiple of 2 pi i (Lanczos + reflection)."""
    s = complex(s)
    if _near_nonpositive_integer(s):
        raise PoleError(f"Gamma has a pole at {s}")
    if s.real < 0.5:
        return math.log(math.pi) - _log_sin_pi(s) - log_gamma(1 - s)
    z = s - 1
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return LOG_2PI_HALF + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def complex_gamma(s: complex) -> complex:
    s = complex(s)
    if s.imag == 0 and s.real > 0 and s.real < 170:
        return complex(math.gamma(s.real))
    return cmath.exp(log_gamma(s))


def gamma_ratio(a: complex, b: complex) -> complex:
    """Gamma(a) / Gamma(b) computed in log space."""
    return cmath.exp(log_gamma(a) - log_gamma(b))


# --------------------------------------------------------------------------
# Hurwitz zeta


def _expm1_over(z: np.ndarray) -> np.ndarray:
    """(exp(z) - 1) / z, equal to 1 at z = 0."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-3
    zs = z[small]
    out[small] = 1 + zs / 2 + zs * zs / 6 + zs**3 / 24
    zb = z[~small]
    out[~small] = (np.exp(zb) - 1) / zb
    return out


def _shift(s: complex) -> int:
    # 15 Bernoulli terms at y >= |s| + 1 already reach ~1e-13
    return max(10, int(abs(s)) + 1)


def _em_remainder(s: complex, y: np.ndarray, drop_pole: bool) -> np.ndarray:
    """Euler-Maclaurin remainder sum_{k>=0} (y+k)^{-s} for shifted arguments y.

    With drop_pole the constant 1/(s-1) piece of y^{1-s}/(s-1) is omitted,
    which is legitimate when the caller's weights sum to zero.
    """
    logy = np.log(y)
    ys = np.exp(-s * logy)
    if drop_pole:
        head = -logy * _expm1_over((1 - s) * logy)
    else:
        head = y * ys / (s - 1)
    out = head + 0.5 * ys
    poch = s  # (s)_{2j-1}
    ypow = ys / y
    inv_y2 = 1.0 / (y * y)
    for j, c in enumerate(_EM_COEFFS, start=1):
        out = out + c * poch * ypow
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        ypow = ypow * inv_y2
    return out


REFLECT_BELOW = -1.0
MAX_DENOMINATOR = 4096


def _hurwitz_many(s: complex, a: np.ndarray) -> np.ndarray:
    """zeta(s, a_j) for an array of shifts by Euler-Maclaurin (no reflection)."""
    N = _shift(s)
    k = np.arange(N)[:, None] + a[None, :]
    head = np.exp(-s * np.log(k))
    tail = _em_remainder(s, N + a, drop_pole=False)
    return np.array([csum(head[:, j]) for j in range(a.size)]) + tail


def _hurwitz_reflected(s: complex, p: int, q: int) -> complex:
    """zeta(s, p/q) for Re(s) < 0 from Hurwitz's formula.

    zeta(1-u, a) = Gamma(u) (2 pi)^{-u} [e^{-i pi u/2} F(a, u) + e^{i pi u/2} F(-a, u)]
    with the periodic zeta F(a, u) = q^{-u} sum_j e(a j) zeta(u, j/q), Re(u) > 1.
    """
    u = 1 - s
    j = np.arange(1, q + 1)
    hz = _hurwitz_many(u, j / q) * np.exp(-u * math.log(q))
    ph = 2j * math.pi * ((p * j) % q) / q
    F_plus, F_minus = csum(np.exp(ph) * hz), csum(np.exp(-ph) * hz)
    base = log_gamma(u) - u * math.log(2 * math.pi)
    return cmath.exp(base - 0.5j * math.pi * u) * F_plus + cmath.exp(base + 0.5j * math.pi * u) * F_minus


def hurwitz_zeta(s: complex, a: float = 1.0) -> complex:
    """zeta(s, a) for 0 < a <= 1.

    Euler-Maclaurin summation, except for Re(s) < -1 with a rational of
    small denominator, where the head sum would cancel catastrophically and
    Hurwitz's formula is used instead.
    """
    s = complex(s)
    if not 0 < a <= 1:
        raise ValueError("a must lie in (0, 1]")
    if abs(s - 1) < POLE_GUARD:
        raise PoleError("zeta(s, a) has a pole at s = 1")
    if s.real < REFLECT_BELOW:
        frac = Fraction(a).limit_denominator(MAX_DENOMINATOR)
        if float(frac) == a:
            return _hurwitz_reflected(s, frac.numerator, frac.denominator)
    return complex(_hurwitz_many(s, np.array([float(a)]))[0])


def zeta(s: complex) -> complex:
    return hurwitz_zeta(s, 1.0)


def zeta2(s: complex) -> complex:
    """Riemann zeta with the Euler factor at 2 removed."""
    s = complex(s)
    return (1 - 2.0**-s) * zeta(s)


def xi(s: complex) -> complex:
    """Completed zeta pi^{-s/2} Gamma(s/2) zeta(s)."""
    s = complex(s)
    if abs(s) < POLE_GUARD or abs(s - 1) < POLE_GUARD:
        raise PoleError("xi has poles at 0 and 1")
    if s.real < 0.5:
        return xi(1 - s)
    return cmath.exp(-0.5 * s * math.log(math.pi) + log_gamma(s / 2)) * zeta(s)


# --------------------------------------------------------------------------
# characters chi_{n0} chi and their primitive versions


@dataclass(frozen=True)
class ConductorData:
    """Primitivisation record of chi_{n0} * chi.

    ``disc`` is the fundamental-discriminant-like integer D with the
    primitive character equal to the Kronecker symbol (D/.); its absolute
    value is ``delta``.  h2(s) = 1 + h2_sign * 2^{-s}.
    """

    n0: int
    chi: Char8
    primitive_label: str
    delta: int
    kappa: int
    h2_sign: int
    disc: int

    def h2(self, s: complex) -> complex:
        return 1 + self.h2_sign * 2.0 ** (-complex(s))

    def primitive_value(self, a: int) -> int:
        return kronecker(self.disc, a)


def conductor_data(n0: int, chi: Char8) -> ConductorData:
    """Row of the primitivisation table for chi_{n0} chi (n0 odd squarefree)."""
    if n0 < 1 or n0 % 2 == 0 or not is_squarefree(n0):
        raise ValueError("n0 must be an odd squarefree positive integer")
    one_mod_4 = n0 % 4 == 1
    # chi_{n0} = chi4 * chi_{-n0} when n0 = 3 mod 4, so chi4 factors cancel
    extra4 = chi.has4 != (not one_mod_4)
    parts = (["chi4"] if extra4 else []) + (["chi8"] if chi.has8 else [])
    if n0 > 1:
        parts.append(f"chi_{n0}" if one_mod_4 else f"chi_-{n0}")
    label = "*".join(parts) or "1"
    if chi.has8:
        delta = 8 * n0
    elif extra4:
        delta = 4 * n0
    else:
        delta = n0
    core = n0 if one_mod_4 else -n0
    disc = core * {(False, False): 1, (True, False): -4, (False, True): 8, (True, True): -8}[
        (extra4, chi.has8)
    ]
    if delta % 2 == 0:
        h2_sign = 0
    else:
        h2_sign = -kronecker(disc, 2)
    return ConductorData(n0, chi, label, delta, chi.kappa, h2_sign, disc)


def _check_char_args(n0: int) -> None:
    if n0 < 1 or n0 % 2 == 0:
        raise ValueError("n0 must be an odd positive integer")


def _char_table(n0: int, chi: Char8) -> tuple[int, np.ndarray]:
    q = 8 * n0
    a = np.arange(q)
    vals = chi.values(a).astype(float)
    odd = a % 2 == 1
    vals[odd] *= chi_n0_values(n0, a[odd])
    return q, vals


def gl1_fe_factor(s: complex, cd: ConductorData) -> complex:
    """Ratio L(s, chi^*) / L(1-s, chi^*) from the functional equation."""
    s = complex(s)
    k = cd.kappa
    return cmath.exp(
        (0.5 - s) * math.log(cd.delta / math.pi)
        + log_gamma((1 - s + k) / 2)
        - log_gamma((s + k) / 2)
    )


def L_quadratic(
    s: complex, n0: int, chi: Char8 = TRIV, remove_two: bool = True, method: str = "auto"
) -> complex:
    """L(s, chi_{n0} chi) through Hurwitz zeta at modulus 8*n0.

    The modulus already kills the Euler factor at 2, so the default returns
    L_2.  With ``remove_two=False`` the 2-factor of the primitive character is
    restored, i.e. the primitive L-function L(s, (chi_{n0} chi)^*) is returned.
    For Re(s) < 0 the ``auto`` method reflects through the functional
    equation (squarefree n0 only); ``direct`` never reflects.
    """
    s = complex(s)
    _check_char_args(n0)
    if method not in ("auto", "direct"):
        raise ValueError("method must be 'auto' or 'direct'")
    principal = n0 == 1 and chi == TRIV
    if principal and abs(s - 1) < POLE_GUARD:
        raise PoleError("principal character: pole at s = 1")
    sqfree = is_squarefree(n0)
    if not remove_two and not sqfree:
        raise ValueError("primitive L needs squarefree n0")
    if method == "auto" and s.real < 0 and sqfree:
        cd = conductor_data(n0, chi)
        if principal:
            prim = xi(s) / cmath.exp(-0.5 * s * math.log(math.pi) + log_gamma(s / 2))
        else:
            prim = gl1_fe_factor(s, cd) * L_quadratic(1 - s, n0, chi, remove_two=False)
        return prim if not remove_two else prim * cd.h2(s)
    q, vals = _char_table(n0, chi)
    val = _l_from_table(s, q, vals, principal)
    if not remove_two:
        val = val / conductor_data(n0, chi).h2(s)
    return val


def _l_from_table(s: complex, q: int, vals: np.ndarray, principal: bool) -> complex:
    N = _shift(s)
    n = np.arange(1, N * q + 1)
    w = vals[n % q]
    nz = w != 0
    logn = np.log(n[nz])
    if s.imag == 0:
        direct = complex(math.fsum(w[nz] * np.exp(-s.real * logn)))
    else:
        direct = csum(w[nz] * np.exp(-s * logn))
    a = np.nonzero(vals)[0]
    y = N + a / q
    rem = _em_remainder(s, y, drop_pole=not principal)
    tail = csum(vals[a] * rem)
    return direct + q ** (-s) * tail


def L_primitive_direct(s: complex, cd: ConductorData) -> complex:
    """L(s, chi^*) from the Kronecker-symbol values at modulus delta.

    Independent of the h2 bookkeeping in ``L_quadratic``; used as a check.
    """
    s = complex(s)
    q = cd.delta
    a = np.arange(q)
    if q == 1:
        return zeta(s)
    vals = np.array([cd.primitive_value(int(x)) if x else 0 for x in a], dtype=float)
    return _l_from_table(s, q, vals, principal=False)


def gl1_fe_residual(s: complex, n0: int, chi: Char8) -> float:
    """Relative residual of the even functional equation of L(s, (chi_{n0}chi)^*)."""
    s = complex(s)
    cd = conductor_data(n0, chi)
    lhs = L_quadratic(s, n0, chi, remove_two=False, method="direct")
    rhs = gl1_fe_factor(s, cd) * L_quadratic(1 - s, n0, chi, remove_two=False, method="direct")
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


# --------------------------------------------------------------------------
# 2-factors


@dataclass(frozen=True)
class TwoFactorPoly:
    """p(z) = 1 + c1 z + c2 z^2 whose reciprocal generates t_{2^j}."""

    c1: float
    c2: float = 0.0

    @property
    def degree(self) -> int:
        return 2 if self.c2 != 0 else 1

    @classmethod
    def degree_one(cls, t2: float) -> "TwoFactorPoly":
        return cls(-float(t2), 0.0)

    @classmethod
    def from_satake(cls, alpha: complex, beta: complex) -> "TwoFactorPoly":
        tr = alpha + beta
        det = alpha * beta
        return cls(-float(np.real(tr)), float(np.real(det)))

    def __call__(self, z: complex) -> complex:
        return 1 + self.c1 * z + self.c2 * z * z

    def series(self, count: int) -> list[float]:
        """First ``count`` coefficients of 1/p(z)."""
        out = []
        for j in range(count):
            v = 1.0 if j == 0 else 0.0
            if j >= 1:
                v -= self.c1 * out[j - 1]
            if j >= 2:
                v -= self.c2 * out[j - 2]
            out.append(v)
        return out


class NonvanishingUnchecked(UserWarning):
    """Two-factor evaluated where nonvanishing is not guaranteed."""


def two_factor_eval(p2: TwoFactorPoly, s: complex, sign: int) -> complex:
    """p(sign * 2^{-s}); sign 0 gives p(0) = 1."""
    s = complex(s)
    if sign not in (-1, 0, 1):
        raise ValueError("sign must be -1, 0 or 1")
    if sign == 0:
        return 1 + 0j
    if s.real < 0.5:
        warnings.warn("Re(s) < 1/2: nonvanishing not guaranteed", NonvanishingUnchecked, stacklevel=2)
    return p2(sign * 2.0 ** (-s))


# --------------------------------------------------------------------------
# L-values in bulk at large Re(s)


def l2_euler_product(s: complex, char_at_prime, P: int) -> tuple[complex, float]:
    """prod over odd primes p <= P of (1 - a_p p^{-s} + b_p p^{-2s})^{-1}.

    ``char_at_prime(primes)`` returns arrays (a_p, b_p).  Returns the
    product and a tail estimate 2 * sum_{p > P} p^{-Re s}.
    """
    s = complex(s)
    primes = primes_up_to(P)
    primes = primes[primes > 2]
    a, b = char_at_prime(primes)
    x = np.exp(-s * np.log(primes.astype(float)))
    logs = np.log(1 - a * x + b * x * x)
    val = cmath.exp(-csum(logs))
    sig = s.real
    tail = 2.0 * P ** (1 - sig) / ((sig - 1) * math.log(P)) if sig > 1 else math.inf
    return val, tail


# --------------------------------------------------------------------------
# moments


def squarefree_odd_upto(X: int) -> np.ndarray:
    flags = np.ones(X + 1, dtype=bool)
    flags[0] = False
    for p in primes_up_to(max(2, math.isqrt(X))):
        flags[:: p * p] = False
    flags[::2] = False
    return np.nonzero(flags)[0]


def moment_experiment(X: int, s: complex, chi: Char8 = TRIV, power: int = 4, points: int = 12) -> SlopeReport:
    """Sum of |L(s, chi_{d0} chi)|^power over odd squarefree 1 < d0 <= x."""
    if power not in (2, 4):
        raise ValueError("power must be 2 or 4")
    s = complex(s)
    d0s = squarefree_odd_upto(X)
    d0s = d0s[d0s > 1]
    weights = [abs(L_quadratic(s, int(d), chi)) ** power for d in d0s]
    grid = geometric_grid(3, X, points)
    return cumulative_report(d0s, weights, grid, label=f"moment{power}")
