"""padic-asg command line.

Every verb reads a YAML config (exact numbers only: integers, or rationals
written as strings such as "3/4"), validates it against a JSON schema, runs
the computation and emits a report echoing the config, so the report can be
re-run as is.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from fractions import Fraction
from typing import Any, Callable

import jsonschema
import yaml

from . import __version__
from .algebraic import AlgebraicNumber, NumberField
from .analytic import PowerSeries, schwarz_check, schwarz_suite
from .auxiliary import Constants, run_pipeline
from .groups import GroupPoint, LieSubspace, SplitGroup, group_exp, group_log, is_torsion
from .padic import DEFAULT_PRECISION, PNorm
from .semistability import is_semistable, semistable_reduction
from .siegel_lattice import asg_find_subgroup, detect_log_relations, siegel_solve

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2
VERBS = ("log", "relations", "subgroup", "semistable", "schwarz", "siegel", "aux", "selftest")

# -- schema -----------------------------------------------------------------------

_RATIONAL = {"oneOf": [{"type": "integer"},
                       {"type": "string", "pattern": r"^\s*-?\d+\s*(/\s*\d+\s*)?$"}]}
_INT_LIST = {"type": "array", "items": {"type": "integer"}, "minItems": 2}
_NUMBER = {"oneOf": [_RATIONAL, {
    "type": "object", "required": ["field", "coeffs"], "additionalProperties": False,
    "properties": {"field": {"type": "string"}, "coeffs": {"type": "array", "items": _RATIONAL}}}]}
_POS = {"type": "integer", "minimum": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(VERBS)},
        "prime": {"type": "integer", "minimum": 2},
        "precision": _POS,
        "seed": {"type": "integer"},
        "fields": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["minpoly", "seed"], "additionalProperties": False,
            "properties": {"minpoly": _INT_LIST, "seed": {"type": "integer"}}}},
        "group": {"type": "object", "additionalProperties": False,
                  "properties": {"additive": {"type": "integer", "minimum": 0},
                                 "multiplicative": {"type": "integer", "minimum": 0}}},
        "point": {"type": "array", "items": _NUMBER},
        "numbers": {"type": "array", "items": _NUMBER, "minItems": 1},
        "subspace": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
        "matrix": {"type": "array", "minItems": 1, "items": {"type": "array", "items": {"type": "integer"}}},
        "bounds": {"type": "object", "additionalProperties": False,
                   "properties": {"M": _POS, "B": _POS, "node_cap": _POS, "N": _POS}},
        "schedule": {"type": "object", "additionalProperties": False,
                     "properties": {k: _POS for k in ("S0", "S", "D", "T")}},
        "constants": {"type": "object", "additionalProperties": False,
                      "properties": {k: _RATIONAL for k in ("c", "c1", "c2", "c3")}},
        "c_range": {"type": "array", "items": _RATIONAL, "minItems": 2, "maxItems": 2},
        "schwarz": {"type": "object", "additionalProperties": False, "properties": {
            "count": _POS,
            "coefficients": {"type": "array", "items": _RATIONAL, "minItems": 1},
            "s": _RATIONAL, "t": _RATIONAL, "q": _POS,
            "points": {"type": "array", "items": _RATIONAL}}},
        "output": {"type": "string"},
    },
}


class InputError(ValueError):
    pass


# -- config parsing ---------------------------------------------------------------

def _rat(x) -> Fraction:
    return Fraction(str(x).replace(" ", ""))


class Parsed:
    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.prime = cfg.get("prime")
        self.fields: dict[str, NumberField] = {}
        for name, spec in sorted(cfg.get("fields", {}).items()):
            self.fields[name] = NumberField(spec["minpoly"], self._need_prime(), spec["seed"])

    def _need_prime(self) -> int:
        if self.prime is None:
            raise InputError("config needs 'prime'")
        return self.prime

    def number(self, x) -> AlgebraicNumber:
        p = self._need_prime()
        if isinstance(x, dict):
            if x["field"] not in self.fields:
                raise InputError(f"unknown field {x['field']!r}")
            return self.fields[x["field"]]([_rat(c) for c in x["coeffs"]])
        return NumberField.rationals(p)(_rat(x))

    def group(self) -> SplitGroup:
        g = self.cfg.get("group")
        if g is None:
            raise InputError("config needs 'group'")
        return SplitGroup(g.get("additive", 0), g.get("multiplicative", 0))

    def point(self, G: SplitGroup) -> GroupPoint:
        if "point" not in self.cfg:
            raise InputError("config needs 'point'")
        return GroupPoint(G, [self.number(c) for c in self.cfg["point"]], self._need_prime())

    def subspace(self, G: SplitGroup) -> LieSubspace:
        rows = self.cfg.get("subspace")
        if rows is None:
            return LieSubspace.full(G.dim)
        for r in rows:
            if len(r) != G.dim:
                raise InputError(f"subspace rows need {G.dim} entries")
        def entry(c):
            a = self.number(c)
            return a.as_rational() if a.is_rational else a
        return LieSubspace([[entry(c) for c in r] for r in rows], G.dim)

    def bound(self, key, default):
        return self.cfg.get("bounds", {}).get(key, default)


def load_config(path: str, verb: str, precision=None, seed=None) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise InputError(f"config is not valid YAML: {exc}") from exc
    cfg = cfg or {}
    if not isinstance(cfg, dict):
        raise InputError("config must be a mapping")
    _reject_floats(cfg)
    if precision is not None:
        cfg["precision"] = precision
    if seed is not None:
        cfg["seed"] = seed
    if cfg.get("command", verb) != verb:
        raise InputError(f"config is for {cfg['command']!r}, not {verb!r}")
    cfg["command"] = verb
    jsonschema.validate(cfg, SCHEMA)
    return cfg


def _reject_floats(obj, where="config"):
    if isinstance(obj, float):
        raise InputError(f"{where}: floats are not accepted; write rationals as strings like \"3/4\"")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _reject_floats(v, f"{where}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _reject_floats(v, f"{where}[{i}]")


def fingerprint(cfg: dict, constants: Any = None) -> str:
    blob = json.dumps({"config": cfg, "constants": constants, "version": __version__}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


# -- commands ---------------------------------------------------------------------

def _prec(cfg) -> int:
    return cfg.get("precision", DEFAULT_PRECISION)


def cmd_log(P: Parsed) -> dict:
    G = P.group()
    x = P.point(G)
    prec = _prec(P.cfg)
    tv = is_torsion(x)
    out = {"torsion": bool(tv), "torsion_order": tv.order}
    if not x.in_finite_type:
        raise InputError("point is not in G(F)_f: multiplicative coordinates must be units")
    u = group_log(x, prec)
    out["log"] = [str(c) for c in u]
    out["log_is_zero"] = all(c.is_zero for c in u)
    if tv:
        assert out["log_is_zero"], "torsion point with nonzero logarithm"
    return out


def cmd_relations(P: Parsed) -> dict:
    alphas = [P.number(x) for x in P.cfg.get("numbers", [])]
    if not alphas:
        raise InputError("config needs 'numbers'")
    for a in alphas:
        if a.is_zero or a.valuation() != 0:
            raise InputError(f"{a} is not a p-adic unit")
    M = P.bound("M", 10)
    res = detect_log_relations(alphas, M, P.bound("N", None))
    assert all(c.verify(alphas) for c in res.certificates)
    g = res.guard
    return {"certificates": [c.as_dict() for c in res.certificates],
            "summary": "no relations up to bound" if not res.certificates
            else f"{len(res.certificates)} independent relation(s)",
            "M": M, "precision": res.precision,
            "guard": {"digits": g.precision, "formula": g.formula}}


def cmd_subgroup(P: Parsed) -> dict:
    G = P.group()
    return asg_find_subgroup(G, P.point(G), P.subspace(G), P.bound("M", 10), P.bound("N", None),
                             _prec(P.cfg)).as_dict()


def cmd_semistable(P: Parsed) -> dict:
    G = P.group()
    V = P.subspace(G)
    B = P.bound("B", 5)
    rep = is_semistable(G, V, B)
    out = rep.as_dict()
    if not rep.is_semistable:
        red = semistable_reduction(G, V, B)
        out["reduction"] = {"kernel": red.kernel, "projection": red.projection,
                            "quotient_dim": red.quotient.dim if red.quotient else 0,
                            "tau": str(red.tau), "final_verdict": red.final.verdict}
    return out


def cmd_schwarz(P: Parsed) -> dict:
    sc = P.cfg.get("schwarz", {})
    if "coefficients" in sc:
        p = P._need_prime()
        f = PowerSeries.polynomial(p, [_rat(c) for c in sc["coefficients"]])
        s, t = _rat(sc.get("s", 1)), _rat(sc.get("t", 1))
        rep = schwarz_check(f, _norm_of(s, p), _norm_of(t, p), sc.get("q", 1),
                            [_rat(g) for g in sc.get("points", [])])
        return {"verdict": rep.verdict, "lhs": repr(rep.lhs), "rhs": repr(rep.rhs),
                "growth_term": repr(rep.growth_term), "value_term": repr(rep.value_term),
                "delta": repr(rep.delta), "mu": repr(rep.mu), "l": rep.l}
    res = schwarz_suite(sc.get("count", 1000), P.cfg.get("seed", 1))
    res["summary"] = f"{res['verdicts']['holds']}/{res['count']} hold"
    assert not res["failures"], "Schwarz inequality failed on a random instance"
    return res


def _norm_of(r: Fraction, p: int) -> PNorm:
    """Radii are given as rationals; their p-adic norm must be a power of p."""
    from .padic import valuation
    if r <= 0:
        raise InputError("radii must be positive rationals")
    v = valuation(r, p)
    if r != Fraction(p) ** (-v):
        raise InputError(f"radius {r} is not a power of {p}")
    return PNorm(p, -v)


def cmd_siegel(P: Parsed) -> dict:
    A = P.cfg.get("matrix")
    if not A:
        raise InputError("config needs 'matrix'")
    if len({len(r) for r in A}) != 1:
        raise InputError("matrix rows must have equal length")
    sol = siegel_solve(A, P.bound("node_cap", 200_000))
    assert all(sum(a * x for a, x in zip(r, sol.x)) == 0 for r in A)
    return sol.as_dict()


def cmd_aux(P: Parsed) -> dict:
    G = P.group()
    gamma = P.point(G)
    V = P.subspace(G)
    consts_cfg = {k: _rat(v) for k, v in P.cfg.get("constants", {}).items()}
    consts = Constants.default(G.dim, V.dim, **consts_cfg)
    c_range = tuple(_rat(c) for c in P.cfg.get("c_range", ["1", "64"]))
    tr = run_pipeline(G, V, gamma, P.cfg.get("schedule"), consts, P.cfg.get("seed", 0), c_range,
                      P.bound("node_cap", 200_000))
    assert tr.ok, "auxiliary pipeline check failed: " + json.dumps(tr.data["verdict"])
    return {"transcript": tr.data}


def cmd_selftest(P: Parsed) -> dict:
    """Fast end-to-end checks of each module."""
    from .algebraic import weil_height
    from .analytic import iwasawa_log
    from .padic import PAdicNumber
    rng = random.Random(P.cfg.get("seed", 0))
    checks = {}
    p = 5
    ok = True
    for _ in range(20):
        y = PAdicNumber.from_rational(p * rng.randint(1, 10 ** 6), p, 40)
        G1 = SplitGroup.torus(1)
        x = GroupPoint(G1, [1 + y])
        ok &= group_exp(G1, group_log(x, 40)) == x
    checks["exp/log roundtrip"] = bool(ok)
    checks["torsion log"] = iwasawa_log(-1, 3, 30).is_zero
    checks["schwarz"] = not schwarz_suite(100, 1)["failures"]
    checks["siegel"] = siegel_solve([[1, 2, 3]]).x == [1, 1, -1]
    Q = NumberField.rationals(5)
    rel = detect_log_relations([Q(6), Q(216)], 10)
    checks["relations"] = [c.exponents for c in rel.certificates] == [(3, -1)]
    G2 = SplitGroup.torus(2)
    checks["semistable"] = not is_semistable(G2, LieSubspace([[Fraction(1), Fraction(1)]], 2)).is_semistable
    K = NumberField([-2, 0, 1], 7, 3)
    h = weil_height(K.gen())
    checks["height"] = float(h.lo) <= 0.34658 <= float(h.hi) + 1e-5
    tr = run_pipeline(SplitGroup.torus(1), LieSubspace.full(1), GroupPoint(SplitGroup.torus(1), [Q(6)]),
                      {"S0": 1, "T": 1, "D": 2}, Constants.default(1, 1, c1=2))
    checks["aux"] = tr.ok
    assert all(checks.values()), f"selftest failures: {[k for k, v in checks.items() if not v]}"
    return {"checks": checks}


COMMANDS: dict[str, Callable[[Parsed], dict]] = {
    "log": cmd_log, "relations": cmd_relations, "subgroup": cmd_subgroup, "semistable": cmd_semistable,
    "schwarz": cmd_schwarz, "siegel": cmd_siegel, "aux": cmd_aux, "selftest": cmd_selftest,
}


# -- driver -----------------------------------------------------------------------

def _threads() -> int:
    raw = os.environ.get("PADIC_ASG_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"PADIC_ASG_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise InputError("PADIC_ASG_THREADS must be >= 1")
    return n


def run(verb: str, cfg: dict) -> dict:
    """Execute one verb on a validated config and build the report."""
    start = time.perf_counter()
    parsed = Parsed(cfg)
    results = COMMANDS[verb](parsed)
    constants = results.get("transcript", {}).get("constants") if isinstance(results, dict) else None
    return {
        "version": __version__,
        "command": verb,
        "config": cfg,
        "fingerprint": fingerprint(cfg, constants),
        "results": results,
        "timing": {"seconds": round(time.perf_counter() - start, 3), "threads": _threads()},
    }


def render(report: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(report, sort_keys=True, indent=2, default=str)
    return yaml.safe_dump(json.loads(json.dumps(report, default=str)), sort_keys=True, width=100)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padic-asg", description="p-adic analytic subgroup toolkit")
    ap.add_argument("verb", choices=VERBS)
    ap.add_argument("--config", help="YAML config file")
    ap.add_argument("--precision", type=int, help="p-adic digits (overrides the config)")
    ap.add_argument("--seed", type=int, help="random seed (overrides the config)")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--json", action="store_true", help="emit JSON instead of YAML")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _threads()
        if args.config:
            cfg = load_config(args.config, args.verb, args.precision, args.seed)
        elif args.verb in ("selftest", "schwarz"):
            cfg = {"command": args.verb}
            if args.precision is not None:
                cfg["precision"] = args.precision
            if args.seed is not None:
                cfg["seed"] = args.seed
            jsonschema.validate(cfg, SCHEMA)
        else:
            raise InputError(f"{args.verb} needs --config")
        report = run(args.verb, cfg)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        print(f"error: config invalid at {path}: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, ArithmeticError, NotImplementedError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = render(report, args.json)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"{args.verb}: report written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
