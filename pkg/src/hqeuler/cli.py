"""Command-line driver emitting JSON-lines records.

Every stream starts with a header record naming the schema version and the
resolved configuration; every following record carries the working
precision it was computed at and a boolean ``pass`` where a check applies.
Exit status: 0 when every record passes, 1 when any check fails or a record
errors, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import List, Optional

from . import archimedean as arch
from .characters import conductor, enumerate_characters, primitivize, ring_for
from .congruence import kummer_check, pair_congruence_check
from .cyclotomic import CycloRing
from .euler import (EulerParams, classical_twisted_numbers, distribution_rhs,
                    generalized_twisted_number, poly_from_numbers, twisted_hq_euler_number,
                    twisted_hq_euler_poly)
from .lfunction import LFunctionSpec, interpolation_check, l_p_riemann
from .measure import (Ball, boundedness_probe, check_density, check_density_relative,
                      check_distribution, check_fermionic_shift, check_scaling,
                      density_verdict, integrate_character)
from .padic import is_prime, vp

SCHEMA = "hqeuler.v1"
DEFAULT_SEED = 20240601
THREADS_ENV = "HQEULER_THREADS"


class ConfigError(ValueError):
    def __init__(self, problems: List[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


# -- configuration ----------------------------------------------------------------


_Q_FORM = re.compile(r"^\s*1\s*\+\s*(-?\d+)\s*\*\s*p\s*\^\s*(\d+)\s*$")


def parse_q(expr: str, p: int) -> int:
    """Evaluate "1+u*p^e" (u an integer, e >= 1) or "1"."""
    if expr.strip() == "1":
        return 1
    m = _Q_FORM.match(expr)
    if not m:
        raise ValueError(f"q expression {expr!r} is not of the form 1+u*p^e")
    u, e = int(m.group(1)), int(m.group(2))
    if e < 1:
        raise ValueError(f"q expression needs e >= 1 so that q = 1 (mod p), got e={e}")
    return 1 + u * p**e


@dataclass(frozen=True)
class RunConfig:
    p: int = 5
    target: int = 12
    d: int = 3
    chars: str = "all"
    r: int = 7
    twist: int = 1
    h: int = 1
    q: str = "1+1*p^1"
    n_max: int = 4
    c: tuple = ()
    k_max: int = 2
    levels: tuple = (1, 2, 3)
    samples: int = 5
    allow_even_r: bool = False
    seed: int = DEFAULT_SEED
    x: str = "0"
    s: Optional[str] = None
    n: Optional[int] = None
    n2: Optional[int] = None
    suite: str = "all"

    @property
    def q_value(self) -> int:
        return parse_q(self.q, self.p)

    @property
    def c_values(self) -> tuple:
        return self.c or (self.p - 1,)

    @property
    def effective_n(self) -> int:
        """Largest degree any command of this config may need."""
        return self.n_max + self.k_max * max(self.c_values)

    @property
    def working_precision(self) -> int:
        q = self.q_value
        v = vp(q - 1, self.p) if q != 1 else 0
        return self.target + self.effective_n * v + 10


def _validate(cfg: RunConfig) -> None:
    problems = []
    p = cfg.p
    if p < 3 or not is_prime(p):
        problems.append(f"p={p} must be an odd prime")
        raise ConfigError(problems)
    if cfg.target < 1:
        problems.append(f"target precision {cfg.target} must be >= 1")
    if cfg.d < 1 or cfg.d % 2 == 0:
        problems.append(f"d={cfg.d} must be a positive odd integer")
    if math.gcd(cfg.d, p) != 1:
        problems.append(f"d={cfg.d} must be prime to p={p}")
    if cfg.r < 1:
        problems.append(f"r={cfg.r} must be positive")
    elif cfg.r % 2 == 0 and not cfg.allow_even_r:
        problems.append(f"r={cfg.r} is even; even twist orders need --allow-even-r")
    if math.gcd(cfg.r, p) != 1:
        problems.append(f"r={cfg.r} must be prime to p={p}")
    if cfg.r >= 1 and math.gcd(cfg.twist, cfg.r) != 1:
        problems.append(f"twist power {cfg.twist} must be prime to r={cfg.r}")
    try:
        cfg.q_value
    except ValueError as exc:
        problems.append(str(exc))
    if cfg.n_max < 0:
        problems.append("n range must have n_max >= 0")
    for c in cfg.c_values:
        if c < 1 or c % (p - 1):
            problems.append(f"c={c} must be a positive multiple of p-1={p - 1}")
    if cfg.k_max < 0:
        problems.append("k_max must be >= 0")
    if not cfg.levels or min(cfg.levels) < 1:
        problems.append("ball levels must be >= 1")
    if cfg.samples < 1:
        problems.append("samples must be >= 1")
    if cfg.chars != "all":
        try:
            idx = [int(t) for t in cfg.chars.split(",")]
            count = len(enumerate_characters(cfg.d)) if cfg.d >= 1 else 0
            bad = [i for i in idx if not 0 <= i < count]
            if bad:
                problems.append(f"character indices {bad} out of range 0..{count - 1}")
        except ValueError:
            problems.append(f"character selector {cfg.chars!r} must be 'all' or indices")
    try:
        Fraction(cfg.x)
    except ValueError:
        problems.append(f"x={cfg.x!r} must be a rational number")
    if cfg.s is not None:
        try:
            Fraction(cfg.s)
        except ValueError:
            problems.append(f"s={cfg.s!r} must be a rational number")
    if problems:
        raise ConfigError(problems)


def parse_config(argv=None, base: Optional[dict] = None) -> RunConfig:
    """Build a RunConfig from a flag namespace (or list) with an optional JSON file."""
    ns = argv if isinstance(argv, argparse.Namespace) else build_parser().parse_args(argv)
    values = dict(base or {})
    if getattr(ns, "config", None):
        with open(ns.config) as fh:
            values.update(json.load(fh))
    for name in RunConfig.__dataclass_fields__:
        v = getattr(ns, name, None)
        if v is not None and v is not False:
            values[name] = v
    if "c" in values:
        values["c"] = tuple(values["c"])
    if "levels" in values:
        values["levels"] = tuple(values["levels"])
    unknown = set(values) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError([f"unknown config keys: {sorted(unknown)}"])
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError([str(exc)]) from exc
    _validate(cfg)
    return cfg


# -- shared objects ---------------------------------------------------------------


def _characters(cfg: RunConfig) -> list:
    chars = enumerate_characters(cfg.d)
    if cfg.chars == "all":
        return list(enumerate(chars))
    return [(i, chars[i]) for i in map(int, cfg.chars.split(","))]


def _ring(cfg: RunConfig) -> CycloRing:
    chars = [c for _, c in _characters(cfg)]
    return ring_for(cfg.r, chars, cfg.p, cfg.working_precision)


def _params(cfg: RunConfig, n: int = 0, ring: Optional[CycloRing] = None) -> EulerParams:
    ring = ring or _ring(cfg)
    return EulerParams(n, cfg.h, cfg.q_value, ring, (ring.M // cfg.r) * cfg.twist, cfg.d,
                       allow_even_r=cfg.allow_even_r)


def _num(v):
    """JSON-safe number: infinite valuations become the string "inf"."""
    if v == math.inf:
        return "inf"
    return v


def _record(cfg: RunConfig, kind: str, **fields) -> dict:
    rec = {"record": kind, "working_precision": cfg.working_precision}
    for k, v in fields.items():
        rec[k] = _num(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v
    return rec


def _grid(cfg: RunConfig) -> dict:
    return {"p": cfg.p, "d": cfg.d, "r": cfg.r, "twist": cfg.twist, "h": cfg.h, "q": cfg.q}


# -- record producers (top-level so they can run in worker processes) -------------


def task_char_list(cfg: RunConfig) -> list:
    out = []
    for i, chi in _characters(cfg):
        out.append(_record(cfg, "character", index=i, **chi.describe()))
    return out


def task_euler_numbers(cfg: RunConfig) -> list:
    ring = _ring(cfg)
    out = []
    for n in range(cfg.n_max + 1):
        P = _params(cfg, n, ring)
        E = twisted_hq_euler_number(P)
        out.append(_record(cfg, "euler_number", n=n, value=E.to_json(), **_grid(cfg)))
    return out


def task_euler_poly(cfg: RunConfig) -> list:
    ring = _ring(cfg)
    x = Fraction(cfg.x)
    out = []
    for n in range(cfg.n_max + 1):
        P = _params(cfg, n, ring)
        val = twisted_hq_euler_poly(P, x)
        res = (val - poly_from_numbers(P, x)).min_valuation()
        out.append(_record(cfg, "euler_poly", n=n, x=cfg.x, value=val.to_json(),
                           check="poly_from_numbers", residual_valuation=res,
                           **{"pass": res >= cfg.target}))
    return out


def task_euler_suite(cfg: RunConfig) -> list:
    ring = _ring(cfg)
    out = []
    q = cfg.q_value
    for n in range(min(cfg.n_max, 6) + 1):
        P = _params(cfg, n, ring)
        for d2 in (1, 3, 5):
            if d2 % cfg.p == 0:
                continue
            for x in (0, 1):
                if q == 1:
                    continue
                res = (twisted_hq_euler_poly(P, x) - distribution_rhs(P, x, d2)).min_valuation()
                out.append(_record(cfg, "check", check="distribution_identity", n=n, d2=d2,
                                   x=x, residual_valuation=res, **{"pass": res >= cfg.target},
                                   **_grid(cfg)))
        for i, chi in _characters(cfg):
            f = conductor(chi)
            a = generalized_twisted_number(P, chi, f)
            b = generalized_twisted_number(P, chi, 3 * f if (3 * f) % cfg.p else 7 * f)
            res = (a - b).min_valuation()
            out.append(_record(cfg, "check", check="generalized_modulus_independence", n=n,
                               char=i, residual_valuation=res, **{"pass": res >= cfg.target},
                               **_grid(cfg)))
    rat = CycloRing(1)
    nums = classical_twisted_numbers(3, rat.one())
    got = [str(e.coeffs[0]) for e in nums]
    out.append(_record(cfg, "check", check="classical_numbers_w1", values=got,
                       **{"pass": got == ["1", "-1/2", "0", "1/4"]}))
    return out


def _random_balls(cfg: RunConfig, rng: random.Random, N: int, count: int) -> list:
    size = cfg.d * cfg.p**N
    return [Ball(rng.randrange(size), N, cfg.d, cfg.p) for _ in range(count)]


def task_measure_suite(cfg: RunConfig) -> list:
    ring = _ring(cfg)
    rng = random.Random(cfg.seed)
    out = []
    for n in range(cfg.n_max + 1):
        P = _params(cfg, n, ring)
        for N in cfg.levels:
            balls = _random_balls(cfg, rng, N, cfg.samples)
            worst = min(check_distribution(P, b) for b in balls)
            out.append(_record(cfg, "check", check="distribution", n=n, level=N,
                               residual_valuation=worst, **{"pass": worst >= cfg.target},
                               **_grid(cfg)))
            worst = min(check_scaling(P, b) for b in balls)
            out.append(_record(cfg, "check", check="scaling", n=n, level=N,
                               residual_valuation=worst, **{"pass": worst >= cfg.target},
                               **_grid(cfg)))
            floor = boundedness_probe(P, balls)
            v = vp(cfg.q_value - 1, cfg.p) if cfg.q_value != 1 else 0
            out.append(_record(cfg, "check", check="boundedness", n=n, level=N,
                               min_valuation=floor, bound=-n * v,
                               **{"pass": floor >= -n * v}, **_grid(cfg)))
        a = rng.randrange(cfg.d * cfg.p)
        levels = list(range(1, 5))
        lit = check_density(P, a, levels)
        rel = check_density_relative(P, a, levels)
        thr = min(cfg.target, 3)
        out.append(_record(cfg, "check", check="density_fermionic", n=n, a=a,
                           residuals=[_num(v) for v in lit],
                           **{"pass": density_verdict(lit, thr)}, **_grid(cfg)))
        out.append(_record(cfg, "check", check="density_degree0", n=n, a=a,
                           residuals=[_num(v) for v in rel],
                           **{"pass": density_verdict(rel, thr)}, **_grid(cfg)))
    shift_ring = ring
    table = [shift_ring.root_of_unity(rng.randrange(ring.M)).scale(rng.randrange(1, 50))
             for _ in range(cfg.d * cfg.p)]
    for k in range(5):
        res = check_fermionic_shift(table, k, cfg.d, cfg.p)
        out.append(_record(cfg, "check", check="fermionic_shift", shift=k,
                           residual_valuation=res, **{"pass": res >= cfg.target}))
    return out


def _specs(cfg: RunConfig) -> list:
    ring = _ring(cfg)
    P = _params(cfg, 0, ring)
    return [(i, LFunctionSpec(chi, P, cfg.target)) for i, chi in _characters(cfg)]


def task_integrate(cfg: RunConfig) -> list:
    ring = _ring(cfg)
    out = []
    for i, chi in _characters(cfg):
        prim = primitivize(chi)
        for n in range(cfg.n_max + 1):
            P = _params(cfg, n, ring)
            vals = [integrate_character(P, prim, N) for N in cfg.levels]
            res = min((v - vals[0]).min_valuation() for v in vals)
            ref = generalized_twisted_number(P, chi, conductor(chi))
            res2 = (vals[0] - ref).min_valuation()
            out.append(_record(cfg, "integral", char=i, n=n, levels=list(cfg.levels),
                               value=vals[0].to_json(), level_residual=res,
                               distribution_residual=res2,
                               **{"pass": min(res, res2) >= cfg.target}, **_grid(cfg)))
    return out


def task_lp_value(cfg: RunConfig) -> list:
    out = []
    s = Fraction(cfg.s) if cfg.s is not None else Fraction(-(cfg.n or 0))
    s_arg = int(s) if s.denominator == 1 else s
    for i, spec in _specs(cfg):
        for N in cfg.levels:
            rs = l_p_riemann(s_arg, spec, N)
            out.append(_record(cfg, "lp_value", char=i, s=str(s), level=N,
                               value=rs.value.to_json(),
                               stabilization_valuation=_num(rs.stabilization)
                               if rs.stabilization is not None else None,
                               precision=_num(rs.precision), **_grid(cfg)))
    return out


def task_interpolation(cfg: RunConfig) -> list:
    out = []
    ns = [cfg.n] if cfg.n is not None else range(cfg.n_max + 1)
    for i, spec in _specs(cfg):
        for n in ns:
            rep = interpolation_check(n, spec, max(cfg.levels) if max(cfg.levels) > 1 else 5,
                                      min(cfg.target, 3))
            out.append(_record(cfg, "interpolation", char=i, n=n,
                               residuals=[_num(v) for v in rep.residuals],
                               threshold=rep.threshold, **{"pass": rep.passed}, **_grid(cfg)))
    return out


def task_kummer(cfg: RunConfig) -> list:
    out = []
    for i, spec in _specs(cfg):
        for c in cfg.c_values:
            for k in range(1, cfg.k_max + 1):
                rep = kummer_check(spec, c, k, range(cfg.n_max + 1))
                out.append(_record(cfg, "kummer", char=i, c=c, k=k,
                                   residuals=[_num(v) for v in rep.residuals],
                                   integrality=[_num(v) for v in rep.integrality],
                                   **{"pass": rep.passed}, **_grid(cfg)))
    return out


def task_pairs(cfg: RunConfig) -> list:
    out = []
    p = cfg.p
    if cfg.n is not None and cfg.n2 is not None:
        pairs = [(cfg.n, cfg.n2)]
    else:
        pairs = [(n, m) for n in range(1, cfg.n_max + 1) for m in range(1, n)
                 if (n - m) % (p - 1) == 0]
    for i, spec in _specs(cfg):
        for n, m in pairs:
            rep = pair_congruence_check(spec, n, m)
            out.append(_record(cfg, "congruence_pair", char=i, n=n, n2=m,
                               residual_valuation=rep.residuals[0],
                               **{"pass": rep.passed}, **_grid(cfg)))
    return out


def task_archimedean(cfg: RunConfig) -> list:
    out = []
    tol = 1e-8
    for q in (0.2, 0.3, 0.5):
        for h in (1, 2):
            for r in (1, 3, 4):
                w = arch.root_of_unity(1, r)
                for d in sorted({1, cfg.d}):
                    for ci, chi in enumerate(enumerate_characters(d)):
                        spec = arch.ComplexSeriesSpec(q, h, w, chi, tol=1e-13)
                        for n in range(6):
                            ser = arch.twisted_l_series(spec, -n)
                            closed = arch.closed_form_generalized(n, q, h, w, chi, d)
                            res = abs(ser.value - closed)
                            out.append(_record(cfg, "archimedean", series="l", q=q, h=h,
                                               r=r, d=d, char=ci, s=-n, residual=res,
                                               tail_bound=ser.tail_bound,
                                               **{"pass": res < tol}))
                spec = arch.ComplexSeriesSpec(q, h, w, None, tol=1e-13)
                for n in range(6):
                    ser = arch.twisted_zeta_series(spec, -n, 1)
                    closed = arch.closed_form_poly(n, q, h, w, 1)
                    res = abs(ser.value - closed)
                    out.append(_record(cfg, "archimedean", series="zeta", q=q, h=h, r=r,
                                       x=1, s=-n, residual=res, tail_bound=ser.tail_bound,
                                       **{"pass": res < tol}))
    ze = arch.classical_euler_zeta(2, 2000)
    res = abs(ze.value + math.pi**2 / 6)
    out.append(_record(cfg, "archimedean", series="euler_zeta", s=2, residual=res,
                       tail_bound=ze.tail_bound, **{"pass": res <= ze.tail_bound}))
    return out


SUITES = {
    "euler": ["task_euler_suite"],
    "measure": ["task_measure_suite", "task_integrate"],
    "lp": ["task_interpolation", "task_pairs"],
    "kummer": ["task_kummer"],
    "archimedean": ["task_archimedean"],
}
SUITES["all"] = [t for name in ("euler", "measure", "lp", "kummer", "archimedean")
                 for t in SUITES[name]]

COMMANDS = {
    "char-list": ["task_char_list"],
    "euler-number": ["task_euler_numbers"],
    "euler-poly": ["task_euler_poly"],
    "measure-check": ["task_measure_suite"],
    "integrate": ["task_integrate"],
    "lp-value": ["task_lp_value"],
    "interpolation-check": ["task_interpolation"],
    "kummer-check": ["task_kummer"],
    "congruence-pair": ["task_pairs"],
    "archimedean-check": ["task_archimedean"],
}


def _run_task(name_cfg) -> list:
    name, cfg = name_cfg
    try:
        return globals()[name](cfg)
    except Exception as exc:  # record-level failure must not abort the stream
        return [_record(cfg, "error", task=name, error=f"{type(exc).__name__}: {exc}",
                        **{"pass": False})]


def run_tasks(cfg: RunConfig, names: list, threads: Optional[int] = None) -> list:
    """Run named tasks; results come back in the listed order regardless of scheduling."""
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    jobs = [(n, cfg) for n in names]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_run_task, jobs))
    else:
        chunks = [_run_task(j) for j in jobs]
    return [rec for chunk in chunks for rec in chunk]


def header(cfg: RunConfig, command: str) -> dict:
    conf = asdict(cfg)
    conf["c"] = list(cfg.c_values)
    conf["levels"] = list(cfg.levels)
    return {"record": "header", "schema": SCHEMA, "command": command, "config": conf,
            "working_precision": cfg.working_precision}


def run_suite(cfg: RunConfig, suite: str = "all", out=None) -> int:
    return _emit(cfg, "suite:" + suite, SUITES[suite], out)


def _emit(cfg: RunConfig, command: str, names: list, out=None) -> int:
    out = out or sys.stdout
    records = [header(cfg, command)] + run_tasks(cfg, names)
    failed = False
    for rec in records:
        if rec.get("pass") is False:
            failed = True
        out.write(json.dumps(rec, sort_keys=True) + "\n")
    out.flush()
    return 1 if failed else 0


# -- argument parsing ---------------------------------------------------------------


def _int_list(text: str) -> tuple:
    return tuple(int(t) for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hqeuler", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["suite"]:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file with RunConfig fields")
        sp.add_argument("--p", type=int)
        sp.add_argument("--target", type=int, help="target precision in p-adic digits")
        sp.add_argument("--d", type=int)
        sp.add_argument("--chars", help="'all' or comma-separated indices")
        sp.add_argument("--r", type=int, help="twist order")
        sp.add_argument("--twist", type=int, help="power of the primitive r-th root")
        sp.add_argument("--h", type=int)
        sp.add_argument("--q", help="expression 1+u*p^e, or 1")
        sp.add_argument("--n-max", dest="n_max", type=int)
        sp.add_argument("--c", type=_int_list, help="comma-separated difference steps")
        sp.add_argument("--k-max", dest="k_max", type=int)
        sp.add_argument("--levels", type=_int_list, help="comma-separated ball levels")
        sp.add_argument("--samples", type=int, help="random balls per level")
        sp.add_argument("--allow-even-r", dest="allow_even_r", action="store_true")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--x", help="evaluation point for euler-poly")
        sp.add_argument("--s", help="s for lp-value (rational in Z_p)")
        sp.add_argument("--n", type=int)
        sp.add_argument("--n2", type=int)
        if name == "suite":
            sp.add_argument("--suite", choices=sorted(SUITES))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = parse_config(ns)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    if ns.command == "suite":
        return run_suite(cfg, cfg.suite)
    return _emit(cfg, ns.command, COMMANDS[ns.command])


if __name__ == "__main__":
    sys.exit(main())
