"""Shared plumbing: error types, compensated sums, truncated-series bookkeeping."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np


class PoleError(ValueError):
    """Evaluation requested at (or within the guard radius of) a pole."""


class RegionError(ValueError):
    """Point lies outside the convergence region of the chosen representation."""


class UnsupportedError(ValueError):
    """Requested combination is deliberately not implemented."""


def csum(values) -> complex:
    """Correctly rounded sum of a complex array (fsum on each component)."""
    arr = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def rsum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel())


@dataclass(frozen=True)
class TruncatedValue:
    """Value of a truncated infinite series plus a heuristic tail estimate."""

    value: complex
    tail_bound: float
    terms_used: int
    converged: bool

    def __complex__(self) -> complex:
        return complex(self.value)

    def as_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "tail_bound": self.tail_bound,
            "terms_used": self.terms_used,
            "converged": self.converged,
        }


def power_tail(indices, terms, sigma: float, density: float = 1.0, log_power: int = 0) -> float:
    """Tail estimate for a series whose terms decay like A * n**(-sigma) * log(n)**k.

    ``A`` is the mean of |term_n| * n**sigma / log(n)**k over the last decade
    of indices; the tail past N is the integral of density * A *
    x**(-sigma) * log(x)**k from N to infinity.  Heuristic, not rigorous.
    """
    idx = np.asarray(indices, dtype=float)
    mag = np.abs(np.asarray(terms))
    if idx.size == 0:
        return math.inf
    N = idx[-1]
    if sigma <= 1.0:
        return math.inf
    sel = idx >= N / 10.0
    if not np.any(sel):
        sel = slice(None)
    logs = np.log(np.maximum(idx[sel], 2.0)) ** log_power
    A = float(np.mean(mag[sel] * idx[sel] ** sigma / logs))
    a, L = sigma - 1.0, math.log(max(N, 2.0))
    # integral of x^{-sigma} log(x)^k from N: N^{-a} sum_j k!/(k-j)! L^{k-j} / a^{j+1}
    integral = sum(
        math.factorial(log_power) / math.factorial(log_power - j) * L ** (log_power - j) / a ** (j + 1)
        for j in range(log_power + 1)
    )
    return density * A * N ** (-a) * integral


def finish(value: complex, tail: float, n_terms: int, tol: float) -> TruncatedValue:
    return TruncatedValue(complex(value), float(tail), int(n_terms), bool(tail <= tol))


@dataclass
class SlopeReport:
    """Partial sums S(x) on a geometric grid and their log-log slope."""

    x: list = field(default_factory=list)
    S: list = field(default_factory=list)
    slope: float = math.nan
    label: str = ""

    def rows(self):
        return [(float(a), float(b)) for a, b in zip(self.x, self.S)]


def geometric_grid(x_min: float, x_max: float, points: int = 12) -> np.ndarray:
    grid = np.unique(np.round(np.geomspace(x_min, x_max, points)).astype(np.int64))
    return grid[grid >= 1]


def loglog_slope(x, S) -> float:
    x = np.asarray(x, dtype=float)
    S = np.asarray(S, dtype=float)
    ok = (x > 0) & (S > 0)
    if ok.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(x[ok]), np.log(S[ok]), 1)[0])


def cumulative_report(indices, weights, grid, label: str = "") -> SlopeReport:
    """S(x) = sum of weights with index <= x, evaluated on grid."""
    order = np.argsort(indices, kind="stable")
    idx = np.asarray(indices)[order]
    cum = np.cumsum(np.asarray(weights, dtype=float)[order])
    S = []
    for x in grid:
        k = np.searchsorted(idx, x, side="right")
        S.append(float(cum[k - 1]) if k > 0 else 0.0)
    return SlopeReport(x=[int(g) for g in grid], S=S, slope=loglog_slope(grid, S), label=label)


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows, meta: dict | None = None) -> str:
    """CSV with a header row and trailing ``# key=value`` metadata lines."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    for k, v in (meta or {}).items():
        buf.write(f"# {k}={v}\n")
    return buf.getvalue()


def write_csv(path, header, rows, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows, meta))
