"""Command line entry point: ``reyemirror <subcommand>``."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import golden

SCHEMA_VERSION = "1"
SKIPPABLE = ("exact", "annihilation", "monodromy", "center", "connection", "relations",
             "blocks", "pointcount", "h21", "discriminant")

try:  # 3.11+
    import tomllib as _toml
except ModuleNotFoundError:  # pragma: no cover
    import tomli as _toml


@dataclass
class RunConfig:
    degree: int = 60
    digits: int = 60
    tolerance: float = 1e-4
    catalog_version: str = "1"
    threads: int = 1
    output_format: str = "json"
    count_primes: tuple = (73, 89, 97)
    h21_primes: tuple = golden.H21_PRIMES
    skip: tuple = ()
    timings: bool = False

    def __post_init__(self):
        self.count_primes = tuple(int(p) for p in self.count_primes)
        self.h21_primes = tuple(int(p) for p in self.h21_primes)
        self.skip = tuple(self.skip)
        self.validate()

    def validate(self):
        if self.degree < 6:
            raise ValueError("degree must be at least 6")
        if self.digits < 30:
            raise ValueError("digits must be at least 30")
        if not 0 < self.tolerance <= 1e-2:
            raise ValueError("tolerance must lie in (0, 1e-2]")
        if self.catalog_version != "1":
            raise ValueError(f"unknown path catalog version {self.catalog_version!r}")
        if self.output_format not in ("json", "csv", "text"):
            raise ValueError("output_format must be json, csv or text")
        bad = set(self.skip) - set(SKIPPABLE)
        if bad:
            raise ValueError(f"unknown skip items {sorted(bad)}")

    @classmethod
    def load(cls, path: Optional[str] = None, **overrides) -> "RunConfig":
        """Defaults, then the TOML file (top level or a [run] table), then overrides."""
        data = {}
        if path:
            with open(path, "rb") as fh:
                raw = _toml.load(fh)
            data = dict(raw.get("run", raw))
        if "threads" not in data and "threads" not in overrides:
            env = os.environ.get("REYEMIRROR_THREADS")
            if env:
                data["threads"] = int(env)
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def continuation(self):
        from .continuation import ContinuationConfig
        return ContinuationConfig(degree=self.degree, digits=self.digits, tolerance=self.tolerance)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _emit(obj, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    else:
        if isinstance(obj, dict):
            for k, v in obj.items():
                out.write(f"{k}: {_jsonable(v)}\n")
        else:
            out.write(f"{_jsonable(obj)}\n")


def _parse_complex_pair(s: str):
    parts = [float(v) for v in s.split(",")]
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise argparse.ArgumentTypeError("expected RE,IM")


def _parse_point(s: str):
    parts = [float(v) for v in s.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected RE,IM,RE,IM")
    return complex(parts[0], parts[1]), complex(parts[2], parts[3])


def _primes(s: str):
    return tuple(int(v) for v in s.split(",") if v.strip())


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_periods(a) -> int:
    from .hyperseries import build_period_vector, eval_period
    v = build_period_vector(a.degree)
    vals, errs = eval_period(v, a.x, a.y, dps=a.digits)
    out = {"x": a.x, "y": a.y, "degree": a.degree,
           "values": [complex(z) for z in vals], "tail_estimates": errs}
    _emit(out, a.json)
    return 0


def cmd_pf(a) -> int:
    from .pf_local import annihilation_check, local_basis, operators
    from .hyperseries import build_period_vector
    if a.action == "check":
        charts = ("A0", "A1", "A2") if a.chart == "all" else (a.chart,)
        res = {}
        for ch in charts:
            v = build_period_vector(a.degree, chart=ch)
            res[ch] = str(annihilation_check(v, operators(ch)))
        ok = all(r == "0" for r in res.values())
        _emit({"degree": a.degree, "guard": a.degree - 3, "max_residual": res, "passed": ok}, a.json)
        return 0 if ok else 1
    if a.at is None:
        raise SystemExit("pf basis needs --at RE,IM,RE,IM")
    b = local_basis(a.at, a.degree, dps=a.digits)
    out = {"point": list(a.at), "degree": a.degree, "frame": b.frame, "condition": b.condition,
           "series": [{f"{p},{q}": complex(c) for (p, q), c in sorted(f.items())} for f in b.series]}
    _emit(out, a.json)
    return 0


def cmd_monodromy(a) -> int:
    from .continuation import LOOP_NAMES, monodromy
    from .symplectic_lattice import CertificationError
    cfg = RunConfig.load(a.config, degree=a.degree, digits=a.digits, tolerance=a.tolerance).continuation()
    loops = LOOP_NAMES if a.loop == "all" else (a.loop,)
    results, status = [], 0
    for name in loops:
        try:
            results.append(monodromy(name, cfg).to_json())
        except CertificationError as e:
            results.append({"name": name, "error": str(e)})
            status = 1
    _emit(results if len(results) > 1 else results[0], a.json)
    return status


def cmd_connect(a) -> int:
    from .continuation import connection_matrices
    cfg = RunConfig.load(a.config, degree=a.degree, digits=a.digits, tolerance=a.tolerance).continuation()
    C = connection_matrices(cfg)
    which = ("C10", "C20") if a.which == "both" else (a.which,)
    out = [C[k].to_json() for k in which]
    _emit(out if len(out) > 1 else out[0], a.json)
    return 0


def _computed_ledger(cfg, monodromies=None, connections=None):
    from .continuation import LOOP_NAMES, connection_matrices, monodromy
    from .symplectic_lattice import RelationLedger
    mats = dict(monodromies or {n: monodromy(n, cfg) for n in LOOP_NAMES})
    mats.update(connections or connection_matrices(cfg))
    return RelationLedger.from_matrices(mats, "computed")


def cmd_relations(a) -> int:
    from .symplectic_lattice import RelationLedger, verify_relations
    if a.source == "builtin":
        L = RelationLedger.builtin()
    else:
        cfg = RunConfig.load(a.config).continuation()
        L = _computed_ledger(cfg)
    rep = verify_relations(L)
    if a.json:
        _emit(rep.to_json(), True)
    else:
        for r in rep.results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}" + (f"  ({r.detail})" if r.detail else ""))
    return 0 if rep.all_passed else 1


def cmd_pointcount(a) -> int:
    from .fp_count import CountCache, assemble_count, count_delpezzo, count_quintic, good_prime
    threads = a.threads or RunConfig.load(a.config).threads
    cache = CountCache(a.cache) if a.cache else None
    if good_prime(a.p):
        out = assemble_count(a.p, threads, cache).to_json()
    else:
        out = {"p": a.p, "n_Z": count_quintic(a.p, threads), "n_E1": count_delpezzo(a.p, threads),
               "good_prime": False}
    _emit(out, a.json)
    return 0


def cmd_certify(a) -> int:
    from .fp_count import CountCache, certify_h21
    threads = a.threads or RunConfig.load(a.config).threads
    cache = CountCache(a.cache) if a.cache else None
    feas = sorted(certify_h21(a.primes, threads, cache))
    _emit({"primes": list(a.primes), "h21": feas, "certified": feas == [golden.H21]}, a.json)
    return 0 if feas == [golden.H21] else 1


def _discriminant_report(n_random: int = 20, seed: int = 0) -> Dict[str, object]:
    import random
    from .geometry_poly import SINGULAR_POINTS, dis0, dis0_line_check, discriminant_product
    rng = random.Random(seed)
    rats = []
    while len(rats) < n_random:
        a = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
        if a not in (0, -1):
            rats.append(a)
    return {
        "cicy_product": discriminant_product("cicy", 1, 1),
        "dis0_conifold": dis0(Fraction(1, 32), Fraction(1, 32)),
        "line_check": all(dis0_line_check(a) for a in rats),
        "singular_points": {p.name: dis0(p.x, p.y) == 0 for p in SINGULAR_POINTS},
    }


def cmd_discriminant(a) -> int:
    rep = _discriminant_report(a.samples, a.seed)
    ok = (rep["cicy_product"] == 3993 and rep["dis0_conifold"] == 0 and rep["line_check"]
          and all(rep["singular_points"].values()))
    rep["passed"] = ok
    _emit(rep, a.json)
    return 0 if ok else 1


def cmd_plot_data(a) -> int:
    from .geometry_poly import dis0_real_slice
    rows, skipped = dis0_real_slice((a.alpha_min, a.alpha_max), a.resolution)
    out = open(a.out, "w", newline="") if a.out else sys.stdout
    try:
        wr = csv.writer(out)
        wr.writerow(("re_x", "re_y", "im_x", "branch", "alpha"))
        for r in rows:
            wr.writerow(r)
    finally:
        if a.out:
            out.close()
    if skipped:
        print(f"skipped {len(skipped)} alpha values", file=sys.stderr)
    return 0


def cmd_golden(a) -> int:
    data = {"schema": SCHEMA_VERSION, **golden.as_dict()}
    if a.out:
        Path(a.out).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        _emit(data, True)
    return 0


# ---------------------------------------------------------------------------
# reproduce-all
# ---------------------------------------------------------------------------

def _item(report, name, fn: Callable[[], dict], timings: bool):
    t0 = time.perf_counter()
    try:
        res = fn()
        passed = bool(res.pop("passed"))
    except Exception as e:  # a failing check is a report entry, not a crash
        res, passed = {"error": f"{type(e).__name__}: {e}"}, False
    entry = {"name": name, "passed": passed, **res}
    if timings:
        entry["seconds"] = round(time.perf_counter() - t0, 3)
    report["items"].append(entry)


def reproduce_all(cfg: RunConfig) -> dict:
    """Run every check; the report lists per-item pass/fail (and timings on request)."""
    from .continuation import LOOP_NAMES, center_change_of_chart, connection_matrices, monodromy
    from .fp_count import CountCache, assemble_count, certify_h21
    from .hyperseries import axis_monodromy_exact, build_period_vector
    from .pf_local import annihilation_check, operators
    from .symplectic_lattice import (BasisChangeP, RelationLedger, block_decompose,
                                     build_r_matrices, jordan_profile, qmat, verify_relations)

    report = {"schema": SCHEMA_VERSION, "config": _jsonable(asdict(cfg)), "items": []}
    skipped = set(cfg.skip)
    ccfg = cfg.continuation()
    state: Dict[str, object] = {}

    def run(name, group, fn):
        if group in skipped:
            report["items"].append({"name": name, "passed": None, "skipped": True})
        else:
            _item(report, name, fn, cfg.timings)

    def exact():
        Tx, Ty = axis_monodromy_exact("x"), axis_monodromy_exact("y")
        return {"passed": tuple(map(tuple, Tx)) == golden.TX and tuple(map(tuple, Ty)) == golden.TY,
                "Tx": Tx, "Ty": Ty}

    def annihilation():
        res = {ch: annihilation_check(build_period_vector(30, chart=ch), operators(ch))
               for ch in ("A0", "A1", "A2")}
        return {"passed": all(v == 0 for v in res.values()),
                "max_residual": {k: str(v) for k, v in res.items()}}

    def loops():
        got = {n: monodromy(n, ccfg) for n in LOOP_NAMES}
        state["monodromy"] = got
        match = {n: got[n].entries == golden.MONODROMIES[n] for n in LOOP_NAMES}
        return {"passed": all(match.values()), "matches_reference": match,
                "max_residual": max(m.residual for m in got.values()),
                "results": {n: m.to_json() for n, m in got.items()}}

    def center():
        M1, M2 = center_change_of_chart()
        return {"passed": M1 == golden.M1 and M2 == golden.M2, "M1": M1, "M2": M2,
                "transcribed_entries_differ": {"M1": M1 != golden.M1_TRANSCRIBED,
                                               "M2": M2 != golden.M2_TRANSCRIBED}}

    def connection():
        C = connection_matrices(ccfg)
        state["connection"] = C
        neg = tuple(tuple(-v for v in r) for r in golden.C10)
        prod = qmat(C["C10"].entries) * qmat(C["C20"].entries)
        block = qmat(golden.C10_C20_BLOCK)
        return {"passed": C["C20"].entries == golden.C20 and C["C10"].entries == neg
                and prod == -block,
                "C20_matches_reference": C["C20"].entries == golden.C20,
                "C10_equals_minus_reference": C["C10"].entries == neg,
                "C10C20_equals_minus_reference_block": prod == -block,
                "results": {k: v.to_json() for k, v in C.items()}}

    def relations():
        out = {"builtin": verify_relations(RelationLedger.builtin()).to_json()}
        if "monodromy" in state and "connection" in state:
            L = RelationLedger.from_matrices({**state["monodromy"], **state["connection"]})
            out["computed"] = verify_relations(L).to_json()
        return {"passed": all(v["all_passed"] for v in out.values()), **out}

    def blocks():
        R = build_r_matrices(RelationLedger.builtin())
        keys = ("R_alpha1", "R_0", "R_1/32", "R_inf R_alpha2 R_inf^-1", "R_inf")
        dec = {k: block_decompose(BasisChangeP(), R[k]) for k in keys}
        prof = {k: jordan_profile(R[k]) for k in ("R_0", "R_inf")}
        return {"passed": all(v == (4, 2) for v in prof.values()), "jordan": prof,
                "N_blocks": {k: v[1] for k, v in dec.items()}}

    def pointcount():
        reps = {p: assemble_count(p, cfg.threads) for p in cfg.count_primes}
        ok = all(r.n_X == golden.POINT_COUNTS[p] for p, r in reps.items() if p in golden.POINT_COUNTS)
        return {"passed": ok, "reports": {str(p): r.to_json() for p, r in reps.items()}}

    def h21():
        cache = CountCache()
        feas = sorted(certify_h21(cfg.h21_primes, cfg.threads, cache))
        weil = all(r.weil_bound_ok for r in cache.rows.values())
        return {"passed": feas == [golden.H21] and weil, "h21": feas, "weil_bound_ok": weil}

    def discriminant():
        rep = _discriminant_report()
        rep["passed"] = (rep["cicy_product"] == 3993 and rep["dis0_conifold"] == 0
                         and rep["line_check"] and all(rep["singular_points"].values()))
        return rep

    run("exact_axis_monodromy", "exact", exact)
    run("pf_annihilation", "annihilation", annihilation)
    run("numerical_monodromy", "monodromy", loops)
    run("center_change_of_chart", "center", center)
    run("connection_matrices", "connection", connection)
    run("relations", "relations", relations)
    run("block_decomposition", "blocks", blocks)
    run("point_counts", "pointcount", pointcount)
    run("h21_certificate", "h21", h21)
    run("discriminant_identities", "discriminant", discriminant)
    report["all_passed"] = all(it["passed"] for it in report["items"] if not it.get("skipped"))
    return _jsonable(report)


def cmd_reproduce_all(a) -> int:
    cfg = RunConfig.load(a.config, tolerance=a.tolerance, threads=a.threads,
                         skip=tuple(a.skip) if a.skip else None,
                         timings=True if a.timings else None)
    rep = reproduce_all(cfg)
    text = json.dumps(rep, indent=2, sort_keys=True) + "\n"
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if rep["all_passed"] else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reyemirror")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, continuation=False):
        p.add_argument("--json", action="store_true")
        p.add_argument("--config")
        if continuation:
            p.add_argument("--degree", type=int)
            p.add_argument("--digits", type=int)
            p.add_argument("--tolerance", type=float)
        return p

    p = sub.add_parser("periods", help="evaluate Pi near the origin")
    p.add_argument("--x", type=_parse_complex_pair, required=True)
    p.add_argument("--y", type=_parse_complex_pair, required=True)
    p.add_argument("--degree", type=int, default=40)
    p.add_argument("--digits", type=int, default=30)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_periods)

    p = sub.add_parser("pf", help="operator checks and local bases")
    p.add_argument("action", choices=("check", "basis"))
    p.add_argument("--degree", type=int, default=30)
    p.add_argument("--digits", type=int, default=40)
    p.add_argument("--chart", default="all", choices=("A0", "A1", "A2", "all"))
    p.add_argument("--at", type=_parse_point)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_pf)

    p = common(sub.add_parser("monodromy", help="certified monodromy of a catalog loop"), True)
    p.add_argument("--loop", default="all")
    p.set_defaults(fn=cmd_monodromy)

    p = common(sub.add_parser("connect", help="connection matrices C10, C20"), True)
    p.add_argument("--which", default="both", choices=("C10", "C20", "both"))
    p.set_defaults(fn=cmd_connect)

    p = sub.add_parser("relations", help="group identities among the matrices")
    p.add_argument("action", choices=("check",))
    p.add_argument("--source", default="builtin", choices=("builtin", "computed"))
    p.add_argument("--json", action="store_true")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_relations)

    p = sub.add_parser("pointcount", help="point counts over F_p")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--threads", type=int)
    p.add_argument("--cache")
    p.add_argument("--json", action="store_true")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_pointcount)

    p = sub.add_parser("certify-h21", help="h^{2,1} from counts at several primes")
    p.add_argument("--primes", type=_primes, default=golden.H21_PRIMES)
    p.add_argument("--threads", type=int)
    p.add_argument("--cache")
    p.add_argument("--json", action="store_true")
    p.add_argument("--config")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("discriminant", help="exact discriminant identities")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_discriminant)

    p = sub.add_parser("plot-data", help="CSV of the real slice of dis0 = 0")
    p.add_argument("--alpha-min", type=float, default=-2.0)
    p.add_argument("--alpha-max", type=float, default=2.0)
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_plot_data)

    p = sub.add_parser("golden", help="reference data")
    p.add_argument("action", choices=("dump",))
    p.add_argument("--out")
    p.set_defaults(fn=cmd_golden)

    p = sub.add_parser("reproduce-all", help="run every check and write one JSON report")
    p.add_argument("--config")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--threads", type=int)
    p.add_argument("--skip", nargs="*", choices=SKIPPABLE)
    p.add_argument("--timings", action="store_true")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_reproduce_all)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
