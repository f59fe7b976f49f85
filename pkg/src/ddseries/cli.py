"""Command-line front end.

Subcommands evaluate single objects (gauss, lfun, zeval, eisen, scatter,
whittaker), run identity suites with a JSON verdict, or write CSV tables for
scans and experiments.  Exit status: 0 pass, 1 numeric failure, 2 usage.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import arith, corrpoly, dds, eisenstein, lfun, whittaker
from ._common import PoleError, RegionError, UnsupportedError, csv_text
from .arith import ALL_CHARS, Char8
from .coeffs import CoeffSequence, rpc_average_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
TOL_RANGE = (1e-12, 1e-3)


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-8
    budget: int = 40000
    coeff: str = "divisor"
    seed: int = 0
    fmt: str | None = None
    out: str | None = None
    threads: int = 1

    def validate(self) -> "RunConfig":
        lo, hi = TOL_RANGE
        if not lo <= self.tol <= hi:
            raise UsageError(f"--tol must lie in [{lo:g}, {hi:g}]")
        if self.budget < 1:
            raise UsageError("--budget must be positive")
        if self.threads < 1:
            raise UsageError("--threads must be positive")
        if self.coeff not in ("divisor", "hecke"):
            raise UsageError("--coeff must be divisor or hecke")
        if self.fmt not in (None, "csv", "json"):
            raise UsageError("--format must be csv or json")
        return self

    def sequence(self) -> CoeffSequence:
        return CoeffSequence.divisor() if self.coeff == "divisor" else CoeffSequence.hecke(seed=self.seed)

    def meta(self) -> dict:
        return {"tolerance": self.tol, "budget": self.budget, "seed": self.seed, "coeff": self.coeff}


_CONFIG_KEYS = {
    "tol": ("tol", float),
    "budget": ("budget", int),
    "coeff": ("coeff", str),
    "seed": ("seed", int),
    "format": ("fmt", str),
    "out": ("out", str),
    "threads": ("threads", int),
}


def read_config(path: str) -> dict:
    """Flat key=value file; blank lines and # comments ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            field, conv = _CONFIG_KEYS[key]
            try:
                out[field] = conv(value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    return out


def build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = replace(cfg, **read_config(args.config))
    flags = {
        "tol": args.tol,
        "budget": args.budget,
        "coeff": args.coeff,
        "seed": args.seed,
        "fmt": args.format,
        "out": args.out,
        "threads": args.threads,
    }
    return replace(cfg, **{k: v for k, v in flags.items() if v is not None}).validate()


# --------------------------------------------------------------------------
# argument parsing helpers


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_char(text: str) -> Char8:
    try:
        return Char8.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_range(text: str) -> list[float]:
    """'a:b:step' (inclusive) or a comma list."""
    try:
        if ":" in text:
            a, b, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            return [a + k * step for k in range(max(count, 0))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}: {exc}") from None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def parse_point(text: str) -> tuple[complex, complex]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("a point is s,w")
    return parse_complex(parts[0]), parse_complex(parts[1])


# --------------------------------------------------------------------------
# output


def emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(obj):
    if isinstance(obj, complex):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def emit_record(record: dict, cfg: RunConfig, default: str = "json") -> None:
    fmt = cfg.fmt or default
    if fmt == "json":
        emit(json.dumps(record, indent=2, default=_jsonable) + "\n", cfg)
    else:
        emit(csv_text(list(record), [list(record.values())], cfg.meta()), cfg)


def emit_table(header, rows, cfg: RunConfig, meta: dict | None = None) -> None:
    full = {**cfg.meta(), **(meta or {})}
    if (cfg.fmt or "csv") == "json":
        emit(json.dumps({"columns": list(header), "rows": [list(r) for r in rows], "meta": full}, indent=2, default=_jsonable) + "\n", cfg)
    else:
        emit(csv_text(header, rows, full), cfg)


def _pmap(fn, items, cfg: RunConfig):
    if cfg.threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# identity suites


@dataclass
class SuiteResult:
    """Residuals with their own tolerances; the binding one is reported."""

    tol: float
    checks: list
    errors: list

    def add(self, fn, label, tol=None):
        try:
            got = fn()
            res, bound = got if isinstance(got, tuple) else (got, self.tol if tol is None else tol)
            self.checks.append((float(res), float(bound)))
        except (PoleError, RegionError, UnsupportedError, ValueError, ArithmeticError) as exc:
            self.errors.append(f"{label}: {exc}")


def _random_char(rng) -> Char8:
    return ALL_CHARS[int(rng.integers(4))]


def _odd_squarefree(rng, hi: int) -> int:
    while True:
        n = 2 * int(rng.integers(0, hi // 2)) + 1
        if n == 1 or arith.is_squarefree(n):
            return n


def suite_gauss(cfg, rng, opts, res):
    for d in range(1, 2002, 2):
        if d == 1 or arith.is_squarefree(d):
            res.add(lambda d=d: abs(arith.gauss_H(1, d) - math.sqrt(d)) / math.sqrt(d), f"d={d}")
    for p in (3, 5, 7):
        for a in range(5):
            for b in range(5):
                res.add(
                    lambda p=p, a=a, b=b: abs(arith.gauss_H_prime_power(p, a, b) - arith.gauss_H(p**a, p**b))
                    / p ** (b / 2),
                    f"p={p},a={a},b={b}",
                )


def suite_corrpoly(cfg, rng, opts, res):
    seq = cfg.sequence()
    for _ in range(200):
        s = complex(rng.uniform(-1, 2), rng.uniform(-10, 10))
        n = int(rng.integers(1, 10**5)) * int(rng.choice([-1, 1]))
        res.add(lambda s=s, n=n, c=_random_char(rng): corrpoly.q_fe_residual(s, n, c), f"q n={n}", tol=1e-12)
    for _ in range(200):
        s = complex(rng.uniform(-1, 2), rng.uniform(-10, 10))
        c = 2 * int(rng.integers(0, 5 * 10**4)) + 1
        res.add(lambda s=s, c=c, ch=_random_char(rng): corrpoly.Q_fe_residual(s, c, ch, seq), f"Q c={c}", tol=1e-12)
    for _ in range(100):
        s = complex(rng.uniform(0, 1.5), rng.uniform(-5, 5))
        d0, d1 = _odd_squarefree(rng, 200), 2 * int(rng.integers(0, 100)) + 1
        ch = _random_char(rng)
        res.add(lambda s=s, d0=d0, d1=d1, ch=ch: corrpoly.nontrivial_relation_check(s, d0, d1, ch), f"relation d0={d0},d1={d1}")


def suite_gl1fe(cfg, rng, opts, res):
    for _ in range(100):
        s = complex(rng.uniform(-0.5, 1.5), rng.uniform(-10, 10))
        n0, ch = _odd_squarefree(rng, 400), _random_char(rng)
        res.add(lambda s=s, n0=n0, ch=ch: lfun.gl1_fe_residual(s, n0, ch), f"gl1 n0={n0}")
    for _ in range(100):
        w = complex(rng.uniform(0.25, 0.75), rng.uniform(-5, 5))
        n = int(rng.integers(1, 2000)) * int(rng.choice([-1, 1]))
        res.add(lambda w=w, n=n, ch=_random_char(rng): dds.fe_alpha_term_residual(w, n, ch), f"alpha n={n}")


def suite_gl2fe_divisor(cfg, rng, opts, res):
    for _ in range(100):
        w = complex(rng.uniform(0.3, 1.2), rng.uniform(-4, 4))
        sig = complex(rng.uniform(-0.4, 1.4), rng.uniform(-4, 4))
        s = sig + w - 0.5
        c = 2 * int(rng.integers(0, 1000)) + 1
        res.add(lambda s=s, w=w, c=c, ch=_random_char(rng): dds.fe_beta_term_residual(s, w, c, ch), f"beta c={c}")


ZREPR_POINTS = [(4.5, 2.0), (5.0, 2.5), (4.6, 2.1), (5.0, 2.0), (4.0, 2.0)]
ZHAT_POINTS = [(2.6, 1.4), (4.5, 2.0), (5.0, 2.5), (3.0, 1.6), (4.0, 2.0)]


def suite_zrepr(cfg, rng, opts, res):
    seq = cfg.sequence()
    for s, w in opts.points or ZREPR_POINTS:

        def normalized(s=s, w=w):
            pt = dds.RegionPoint(s, w)
            a = dds.Z_repr_A(pt, opts.chi, opts.chip, seq, cfg.tol, cfg.budget)
            b = dds.Z_repr_B(pt, opts.chi, opts.chip, seq, cfg.tol, cfg.budget)
            scale = abs(b.value)
            allowed = (a.tail_bound + b.tail_bound) / scale + 1e-8
            return abs(a.value - b.value) / scale, allowed

        res.add(normalized, f"({s}, {w})")


def suite_zhat(cfg, rng, opts, res):
    for s, w in opts.points or ZHAT_POINTS:

        def rel(s=s, w=w):
            lhs, rhs, _ = dds.zhat_identity_sides(dds.RegionPoint(s, w), opts.chi, opts.chip, min(cfg.tol, 1e-9), cfg.budget)
            return abs(lhs - rhs) / abs(lhs)

        res.add(rel, f"({s}, {w})")


def suite_r2(cfg, rng, opts, res):
    svals = [0.7 + 0.3j, 1.2, 0.5 + 4j, 2.0 - 1j, 0.9 + 10j]
    ns = rng.integers(1, 10**4, size=500) * rng.choice([-1, 1], size=500)
    for s in svals:
        for n in ns:
            n = int(n)

            def rel(s=s, n=n):
                a, b = eisenstein.r2_explicit(s, n), eisenstein.r2_direct(s, n)
                return abs(a - b) / max(1.0, abs(b))

            res.add(rel, f"s={s},n={n}")


def suite_sturm(cfg, rng, opts, res):
    for c in range(1, 101):
        for n in range(-50, 51):

            def rel(c=c, n=n):
                lhs, rhs = arith.sturm_split(n, c)
                return abs(lhs - rhs) / (4 * c)

            res.add(rel, f"c={c},n={n}")


def _zeta_by_summation(k: int, N: int = 20000) -> float:
    """zeta(k) for integer k >= 2: partial sum plus Euler-Maclaurin tail."""
    n = np.arange(1, N, dtype=float)
    head = math.fsum(n**-k)
    return head + N ** (1 - k) / (k - 1) + 0.5 * N**-k + k / 12 * N ** (-k - 1)


def suite_scattering(cfg, rng, opts, res):
    for k in range(10):
        s = complex(0.5 + 0.05 * k, 1.0 + 1.7 * k)
        res.add(lambda s=s: eisenstein.scattering_product_residual(s), f"s={s}")
    oracle = _zeta_by_summation(2) * 6 / (21 * _zeta_by_summation(3))  # pi^2 = 6 zeta(2)
    res.add(lambda: abs(eisenstein.scattering_phi(1.0) - oracle), "phi(1)")


MELLIN_GRID = [
    (1, 0.5, 0.9, 0.6),
    (1, 0.5 + 1j, 0.9, 0.6),
    (-1, 0.5 + 1j, 0.6, 0.55),
    (1, 0.5 + 2j, 0.8 + 1j, 0.6 - 0.5j),
    (-1, 0.5 + 3j, 0.7 + 3j, 0.55),
    (1, 0.5 + 0.5j, 0.9 - 2j, 0.5 + 1j),
    (-1, 0.5, 0.6 + 1j, 0.6),
    (1, 0.6, 1.0, 0.5 + 3j),
    (-1, 0.5 + 1.5j, 0.7, 0.55 + 2j),
    (1, 0.5 + 3j, 1.1, 0.52),
    (1, 0.5 + 2.5j, 0.5 + 1j, 0.5 - 1j),
    (-1, 0.5 + 1j, 0.5 + 3j, 0.5 - 3j),
]


def suite_whittaker(cfg, rng, opts, res):
    for p, s0, s, w in MELLIN_GRID:

        def rel(p=p, s0=s0, s=s, w=w):
            prm = whittaker.MellinParams(p, s0, s, w)
            q = whittaker.mellin_WW_quadrature(prm)
            return abs(whittaker.mellin_WW_closed(prm) - q) / abs(q)

        res.add(rel, f"mellin p={p},s0={s0},s={s},w={w}", tol=1e-6)
    for t in (0.5, 1.0, 2.0, 3.0):
        for y in (0.2, 1.0, 3.0, 8.0):

            def bessel(t=t, y=y):
                W = whittaker.whittaker_W(0.0, 1j * t, y)
                K = math.sqrt(y / math.pi) * whittaker.bessel_K_imag(t, y / 2)
                return abs(W - K) / max(abs(K), 1e-300)

            res.add(bessel, f"bessel t={t},y={y}")


SUITES = {
    "gauss": (suite_gauss, 1e-9),
    "corrpoly": (suite_corrpoly, 1e-11),
    "gl1fe": (suite_gl1fe, 1e-8),
    "gl2fe-divisor": (suite_gl2fe_divisor, 1e-8),
    "zrepr": (suite_zrepr, 1e-6),
    "zhat": (suite_zhat, 1e-6),
    "r2": (suite_r2, 1e-12),
    "sturm": (suite_sturm, 1e-9),
    "scattering": (suite_scattering, 1e-10),
    "whittaker": (suite_whittaker, 1e-9),
}


def run_suite(name: str, cfg: RunConfig, opts) -> dict:
    fn, tol = SUITES[name]
    rng = np.random.default_rng(cfg.seed)
    res = SuiteResult(tol, [], [])
    fn(cfg, rng, opts, res)
    worst, bound = max(res.checks, key=lambda c: c[0] / c[1], default=(0.0, tol))
    passed = not res.errors and bool(res.checks) and all(r <= b for r, b in res.checks)
    report = {
        "identity": name,
        "n_points": len(res.checks) + len(res.errors),
        "max_residual": worst,
        "tolerance": bound,
        "pass": passed,
    }
    if res.errors:
        report["errors"] = res.errors
    report["seed"] = cfg.seed
    return report


def cmd_identities(args, cfg):
    report = run_suite(args.suite, cfg, args)
    emit_record(report, cfg)
    return EXIT_OK if report["pass"] else EXIT_FAIL


# --------------------------------------------------------------------------
# single evaluations


def cmd_gauss(args, cfg):
    G = arith.gauss_G(args.n, args.d)
    rec = {"n": args.n, "d": args.d, "G_re": G.real, "G_im": G.imag, "H": arith.gauss_H(args.n, args.d)}
    emit_record(rec, cfg)
    return EXIT_OK


def cmd_lfun(args, cfg):
    v = lfun.L_quadratic(args.s, args.n0, args.chi, remove_two=not args.primitive)
    rec = {"s": str(args.s), "n0": args.n0, "chi": str(args.chi), "re": v.real, "im": v.imag}
    emit_record(rec, cfg)
    return EXIT_OK


def cmd_zeval(args, cfg):
    pt = dds.RegionPoint(args.s, args.w)
    v = dds.Z_eval(pt, args.chi, args.chip, cfg.sequence(), args.repr, cfg.tol, cfg.budget)
    rec = {"s": str(pt.s), "w": str(pt.w), "repr": args.repr, **v.as_dict(), **cfg.meta()}
    emit_record(rec, cfg)
    return EXIT_OK


def cmd_eisen(args, cfg):
    if args.z is not None:
        x, y = args.z
        v = eisenstein.eval_E(complex(x, y), args.s, cfg.tol)
        emit_record({"x": x, "y": y, "re": v.value.real, "im": v.value.imag, "tail_bound": v.tail_bound}, cfg)
        return EXIT_OK
    ns = [int(n) for n in args.n if int(n) != 0]
    emit_table(["n", "re_phi", "im_phi"], eisenstein.coefficient_rows(args.s, ns), cfg, {"s": args.s})
    return EXIT_OK


def cmd_scatter(args, cfg):
    M = eisenstein.scattering_matrix(args.s).entries
    rows = [(i, j, M[i, j].real, M[i, j].imag) for i in range(2) for j in range(2)]
    meta = {"s": args.s, "phi": eisenstein.scattering_phi(args.s), "unitarity_residual": eisenstein.scattering_product_residual(args.s)}
    emit_table(["row", "col", "re", "im"], rows, cfg, meta)
    return EXIT_OK


def cmd_whittaker(args, cfg):
    ys = np.asarray(args.y, dtype=float)
    W = np.atleast_1d(whittaker.whittaker_W(args.kappa, args.mu, ys))
    rows = [(float(y), complex(v).real, complex(v).imag) for y, v in zip(ys, W)]
    emit_table(["y", "re_W", "im_W"], rows, cfg, {"kappa": args.kappa, "mu": args.mu})
    return EXIT_OK


# --------------------------------------------------------------------------
# scans and experiments


def _point_rows(fn, items, cfg):
    """Run fn per item; failures become rows carrying an error message."""

    def safe(x):
        try:
            return fn(x), ""
        except (PoleError, RegionError, UnsupportedError, ValueError, ArithmeticError) as exc:
            return None, str(exc)

    return _pmap(safe, items, cfg)


def _exp_growth(args, cfg):
    line = [(t, args.slope * t) for t in args.t]
    seq = cfg.sequence()
    header = ["t", "u", "abs_Z", "conductor", "ratio", "tail", "converged", "error"]

    def one(tu):
        return dds.growth_scan(args.re_s, args.re_w, [tu], args.chi, args.chip, seq, cfg.tol, cfg.budget)[0]

    rows = []
    for (t, u), (row, err) in zip(line, _point_rows(one, line, cfg)):
        if row is None:
            rows.append([t, u, "", "", "", "", "", err])
        else:
            rows.append([row[k] for k in header[:-1]] + [""])
    return header, rows, {"re_s": args.re_s, "re_w": args.re_w}


def _slope_table(rep):
    return ["x", "S"], [list(r) for r in rep.rows()], {"slope": rep.slope}


def _exp_lindelof(args, cfg):
    if cfg.coeff != "divisor":
        raise UnsupportedError("lindelof-average needs the divisor sequence")
    return _slope_table(dds.lindelof_average_experiment(args.X, args.s, args.chi))


def _exp_moment(args, cfg):
    return _slope_table(lfun.moment_experiment(args.X, args.s, args.chi, args.power))


def _exp_rpc(args, cfg):
    return _slope_table(rpc_average_check(cfg.sequence(), args.X))


def _exp_nicole(args, cfg):
    header = ["t", "raw", "M", "normalized", "model", "raw_over_model", "error"]
    got = _point_rows(lambda t: whittaker.nicole_decay_scan(args.p, args.s0, [t])[0], args.t, cfg)
    rows = []
    for t, (row, err) in zip(args.t, got):
        rows.append([t, "", "", "", "", "", err] if row is None else [row[k] for k in header[:-1]] + [""])
    ok = [dict(zip(header, r)) for r in rows if not r[-1]]
    return header, rows, {"p": args.p, "s0": args.s0, "dyadic_spread": whittaker.dyadic_spread(ok)}


def _exp_mass(args, cfg):
    r = eisenstein.mass_integral(args.rect, args.t, args.grid, min(cfg.tol, 1e-10))
    meta = {"accuracy": r.warning or "Gauss-Legendre product rule; compare grid sizes for an error estimate"}
    return ["t", "rect", "mass", "nodes"], [[r.t, " ".join(map(repr, args.rect)), r.value, r.nodes]], meta


EXPERIMENTS = {
    "growth": _exp_growth,
    "lindelof-average": _exp_lindelof,
    "moment": _exp_moment,
    "rpc": _exp_rpc,
    "nicole-decay": _exp_nicole,
    "mass": _exp_mass,
}


def cmd_experiment(args, cfg):
    header, rows, meta = EXPERIMENTS[args.kind](args, cfg)
    emit_table(header, rows, cfg, meta)
    failed = any(r[-1] for r in rows) if header[-1] == "error" else False
    if cfg.out and "slope" in meta:
        print(f"{args.kind}: slope={meta['slope']:.4f} ({cfg.out})")
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# parser


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--tol", type=float, help="series tolerance in [1e-12, 1e-3]")
    g.add_argument("--budget", type=int, help="maximum number of series terms")
    g.add_argument("--coeff", choices=["divisor", "hecke"])
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--format", choices=["csv", "json"])
    g.add_argument("--threads", type=int)
    g.add_argument("--config", help="key=value configuration file")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="ddseries", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gauss", parents=[common], help="quadratic Gauss sums G_n(d), H_n(d)")
    p.add_argument("n", type=int)
    p.add_argument("d", type=int)
    p.set_defaults(func=cmd_gauss)

    p = sub.add_parser("lfun", parents=[common], help="L_2(s, chi_{n0} chi)")
    p.add_argument("s", type=parse_complex)
    p.add_argument("n0", type=int)
    p.add_argument("--chi", type=parse_char, default=arith.TRIV)
    p.add_argument("--primitive", action="store_true", help="keep the Euler factor at 2")
    p.set_defaults(func=cmd_lfun)

    p = sub.add_parser("zeval", parents=[common], help="evaluate Z(s, w, chi, chi')")
    p.add_argument("s", type=parse_complex)
    p.add_argument("w", type=parse_complex)
    p.add_argument("chi", type=parse_char)
    p.add_argument("chip", type=parse_char)
    p.add_argument("--repr", choices=["A", "B", "auto"], default="auto")
    p.set_defaults(func=cmd_zeval)

    p = sub.add_parser("identities", parents=[common], help="run an identity suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--point", dest="points", type=parse_point, action="append", help="s,w (repeatable)")
    p.add_argument("--chi", type=parse_char, default=arith.TRIV)
    p.add_argument("--chip", type=parse_char, default=arith.TRIV)
    p.set_defaults(func=cmd_identities)

    for name in ("scan", "experiment"):
        p = sub.add_parser(name, parents=[common], help="write a CSV table for a scan or experiment")
        p.add_argument("kind", choices=sorted(EXPERIMENTS))
        p.add_argument("--X", type=int, default=2000)
        p.add_argument("--s", type=parse_complex, default=0.5)
        p.add_argument("--chi", type=parse_char, default=arith.TRIV)
        p.add_argument("--chip", type=parse_char, default=arith.TRIV)
        p.add_argument("--power", type=int, choices=[2, 4], default=4)
        p.add_argument("--p", type=int, choices=[1, -1], default=1)
        p.add_argument("--s0", type=parse_complex, default=0.5 + 1j)
        p.add_argument("--t", type=parse_range, default=None, help="a:b:step or comma list")
        p.add_argument("--rect", type=parse_floats, default=[0.0, 1.0, 0.2, 2.0], help="x0,x1,y0,y1")
        p.add_argument("--grid", type=int, default=24)
        p.add_argument("--re-s", type=float, default=2.0)
        p.add_argument("--re-w", type=float, default=1.2)
        p.add_argument("--slope", type=float, default=1.0, help="growth scan uses u = slope * t")
        p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("eisen", parents=[common], help="Eisenstein coefficients or values")
    p.add_argument("--s", type=parse_complex, required=True)
    p.add_argument("--z", type=parse_floats, help="x,y")
    p.add_argument("--n", type=parse_range, default=parse_range("-10:10:1"))
    p.set_defaults(func=cmd_eisen)

    p = sub.add_parser("scatter", parents=[common], help="scattering matrix at the open cusps")
    p.add_argument("--s", type=parse_complex, required=True)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("whittaker", parents=[common], help="W_{kappa,mu}(y)")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--mu", type=parse_complex, required=True)
    p.add_argument("--y", type=parse_range, required=True)
    p.set_defaults(func=cmd_whittaker)
    return parser


def _fill_defaults(args) -> None:
    if getattr(args, "kind", None) is None:
        return
    if args.t is None:
        args.t = {"nicole-decay": parse_range("1:40:1"), "mass": [2.0], "growth": parse_range("0:20:5")}.get(args.kind, [])
    if args.kind == "mass":
        if len(args.rect) != 4:
            raise UsageError("--rect needs x0,x1,y0,y1")
        args.t = args.t[0]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
        _fill_defaults(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RegionError, PoleError, UnsupportedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
