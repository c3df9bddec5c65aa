"""One check per acceptance criterion; each prints a single PASS/FAIL line."""
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE
from reyemirror import golden
from reyemirror.symplectic_lattice import qmat, symplectic_check


def record(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line


def test_criterion_01_exact_axis_monodromy():
    from reyemirror.hyperseries import axis_monodromy_exact
    t0 = time.perf_counter()
    Tx, Ty = axis_monodromy_exact("x"), axis_monodromy_exact("y")
    dt = time.perf_counter() - t0
    ok = tuple(map(tuple, Tx)) == golden.TX and tuple(map(tuple, Ty)) == golden.TY and dt < 1
    record(1, ok, f"Tx, Ty exact in {dt:.2f}s (Ty compared with row 2 = (0,1,0,0,0,0))")


def test_criterion_02_annihilation():
    from reyemirror.hyperseries import build_period_vector
    from reyemirror.pf_local import annihilation_check, operators
    t0 = time.perf_counter()
    res = {ch: annihilation_check(build_period_vector(30, chart=ch), operators(ch), guard=27)
           for ch in ("A0", "A1", "A2")}
    dt = time.perf_counter() - t0
    record(2, all(v == 0 for v in res.values()) and dt < 30,
           f"max residual {max(res.values())} through degree 27 in 3 charts, {dt:.1f}s")


def test_criterion_03_numerical_monodromy(catalog_matrices, catalog_seconds):
    bad = [n for n, m in catalog_matrices.items()
           if m.entries != golden.MONODROMIES[n] or not symplectic_check(m.entries).ok]
    worst = max(m.residual for m in catalog_matrices.values())
    slowest = max(catalog_seconds.values())
    ok = not bad and worst < 1e-4 and slowest < 600
    record(3, ok, f"8 loops, mismatches {bad}, max residual {worst:.1e}, slowest {slowest:.0f}s")


def test_criterion_04_center_connection():
    from reyemirror.continuation import center_change_of_chart
    M1, M2 = center_change_of_chart(14)
    ok = M1 == golden.M1 and M2 == golden.M2
    record(4, ok, "M1, M2 exact at degree 14 (one transcription entry corrected in each)")


def test_criterion_05_connection_matrices(connections):
    C10, C20 = connections["C10"], connections["C20"]
    prod = qmat(C10.entries) * qmat(C20.entries)
    c10_ok = C10.entries == golden.C10
    c20_ok = C20.entries == golden.C20
    block_ok = prod == qmat(golden.C10_C20_BLOCK)
    res = max(C10.residual, C20.residual)
    neg = C10.entries == tuple(tuple(-v for v in r) for r in golden.C10)
    detail = (f"C20 {'matches' if c20_ok else 'differs'}; C10 {'matches' if c10_ok else 'differs'}"
              f"{' (computed C10 = -1 x reference)' if neg else ''}; C10*C20 block "
              f"{'matches' if block_ok else 'has the opposite sign'}; residual {res:.1e}")
    record(5, c10_ok and c20_ok and block_ok and res < 1e-4, detail)


def test_criterion_06_relations(catalog_matrices, connections):
    from reyemirror.symplectic_lattice import RelationLedger, verify_relations
    t0 = time.perf_counter()
    builtin = verify_relations(RelationLedger.builtin())
    dt = time.perf_counter() - t0
    computed = verify_relations(RelationLedger.from_matrices({**catalog_matrices, **connections}))
    ok = builtin.all_passed and computed.all_passed and dt < 1
    record(6, ok, f"{len(builtin.results)} identities, builtin {dt * 1000:.0f}ms; computed "
                  f"failures {computed.failed()}")


def test_criterion_07_block_decomposition():
    from reyemirror.symplectic_lattice import (BasisChangeP, RelationLedger, block_decompose,
                                               build_r_matrices, jordan_profile)
    R = build_r_matrices(RelationLedger.builtin())
    keys = ("R_alpha1", "R_0", "R_1/32", "R_inf R_alpha2 R_inf^-1", "R_inf")
    for k in keys:
        block_decompose(BasisChangeP(), R[k])
    prof = {k: jordan_profile(R[k]) for k in ("R_0", "R_inf")}
    record(7, all(v == (4, 2) for v in prof.values()), f"5 R's split 4+2; Jordan {prof}")


def test_criterion_08_point_counts(count_cache):
    from reyemirror.fp_count import CountReport, count_delpezzo, count_quintic
    t0 = time.perf_counter()
    rep97 = CountReport.from_counts(97, count_quintic(97, 1), count_delpezzo(97, 1))
    dt = time.perf_counter() - t0
    count_cache.put(rep97)
    from reyemirror.fp_count import assemble_count
    got = {p: assemble_count(p, cache=count_cache).n_X for p in (73, 89, 97)}
    ok = got == {p: golden.POINT_COUNTS[p] for p in (73, 89, 97)} and dt < 60
    record(8, ok, f"n_X {got}; p=97 single thread {dt:.1f}s")


def test_criterion_09_hodge(count_cache):
    from reyemirror.fp_count import certify_h21
    feas = certify_h21(golden.H21_PRIMES, cache=count_cache)
    weil = all(count_cache.get(p).weil_bound_ok for p in golden.H21_PRIMES)
    record(9, feas == {2} and weil, f"feasible h21 {sorted(feas)}; Weil bound ok at all primes: {weil}")


def test_criterion_10_discriminants():
    import random
    from reyemirror.geometry_poly import SINGULAR_POINTS, dis0, dis0_line_check, discriminant_product
    rng = random.Random(10)
    rats = []
    while len(rats) < 20:
        a = Fraction(rng.randint(-99, 99), rng.randint(1, 99))
        if a not in (0, -1):
            rats.append(a)
    ok = (discriminant_product("cicy", 1, 1) == 3993
          and dis0(Fraction(1, 32), Fraction(1, 32)) == 0
          and all(dis0_line_check(a) for a in rats)
          and all(dis0(p.x, p.y) == 0 for p in SINGULAR_POINTS))
    record(10, ok, "3993, dis0(1/32,1/32)=0, 20 line rationals, 9 points in Q(sqrt5)")


def test_criterion_11_properties(catalog_matrices, connections):
    from reyemirror.continuation import BASE_POINT, DeformedLine, PathSpec, transfer
    from reyemirror.fp_count import count_chart_points, count_delpezzo, count_quintic
    line = DeformedLine()
    P = PathSpec((BASE_POINT, line.point(1e-3), line.point(0.02), line.point(0.025 - 0.004j)))
    rt = transfer(P.then(P.reversed())).distance_to_identity()
    mats = list(catalog_matrices.values()) + list(connections.values())
    sp = all(symplectic_check(m.entries).ok and qmat(m.entries).det() == 1 for m in mats)
    part = all(count_chart_points(p) == sum(p**k for k in range(5)) for p in (2, 3, 5, 7))
    par = count_quintic(13, 2) == count_quintic(13, 1) and count_delpezzo(13, 2) == count_delpezzo(13, 1)
    record(11, rt < 1e-20 and sp and part and par,
           f"round trip {rt:.1e}; {len(mats)} certified matrices symplectic, det 1; "
           f"chart partition {part}; parallel==serial {par}")
