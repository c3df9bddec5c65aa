from dataclasses import replace

import numpy as np
import pytest

from reyemirror import golden
from reyemirror.continuation import (
    BASE_POINT, DEFAULT_CONFIG, LOOP_NAMES, ContinuationConfig, ContinuationError, DeformedLine,
    PathSpec, catalog, center_change_of_chart, center_path, homotopy_is_trivial, monodromy,
    numeric_monodromy, transfer,
)
from reyemirror.symplectic_lattice import CertificationError, qmat, symplectic_check

FAST = ContinuationConfig(degree=40, digits=40)
LINE = DeformedLine()


def _short_path():
    return PathSpec((BASE_POINT, LINE.point(1e-3), LINE.point(0.02), LINE.point(0.025 - 0.004j)))


def test_trivial_path_is_identity():
    res = transfer(PathSpec((BASE_POINT,)), FAST)
    assert res.distance_to_identity() == 0 and res.steps == 0


def test_round_trip_identity():
    P = _short_path()
    res = transfer(P.then(P.reversed()))
    assert res.distance_to_identity() < 1e-20


def test_concatenation():
    P = _short_path()
    a, b = P.split(2)
    whole = transfer(P, FAST).complex_rows()
    ma, mb = transfer(a, FAST).matrix, transfer(b, FAST).matrix
    from flint import ctx
    old = ctx.dps
    ctx.dps = 50
    try:
        prod = (mb * ma)
        comp = [[complex(prod[i, j].mid()) for j in range(6)] for i in range(6)]
    finally:
        ctx.dps = old
    assert max(abs(u - v) for r, s in zip(whole, comp) for u, v in zip(r, s)) < 1e-25


def test_path_helpers():
    P = _short_path()
    assert not P.closed and P.reversed().reversed().waypoints == P.waypoints
    with pytest.raises(ValueError):
        P.then(P)
    assert P.digest() == _short_path().digest() and len(P.digest()) == 16
    with pytest.raises(ValueError):
        PathSpec(())


def test_monodromy_needs_closed_path():
    with pytest.raises(ValueError):
        numeric_monodromy(_short_path(), FAST)


def test_path_through_singularity_refused():
    P = PathSpec((LINE.point(0.02), (1 / 32, 1 / 32)))
    with pytest.raises(ContinuationError):
        transfer(P, FAST)


def test_deformed_line_crossings():
    roots = LINE.crossings()
    assert len(roots) == 5
    assert all(abs(z.imag + 7.5e-3) < 1e-6 for z in roots)
    want = [-0.091945, -0.088310, 0.031170, 11.082473, 11.097862]
    assert all(abs(z.real - w) < 1e-6 for z, w in zip(roots, want))
    assert LINE.admissible()


def test_homotopy_family():
    assert homotopy_is_trivial()
    assert homotopy_is_trivial(0.5, np.linspace(1e-4, 0.1, 60))
    # two crossings near the origin have met and left the axis by delta = 0.2
    assert not homotopy_is_trivial(0.5, [0.2])


def test_catalog_shape():
    cat = catalog()
    assert tuple(cat) == LOOP_NAMES
    for name, P in cat.items():
        assert P.closed and P.start == BASE_POINT and P.homotopy
        assert P.loop is not None
    orient = {n: cat[n].loop.ccw for n in LOOP_NAMES}
    assert orient == {"Tx": True, "Ty": True, "Tp1_1": False, "Tp1_2": True, "Tp2": True,
                      "Tp3_1": True, "Tp3_2": False, "Tz": False}
    assert all(cat[n].loop.arcs == 100 for n in LOOP_NAMES)


def test_base_point_must_be_near_origin():
    cfg = replace(FAST, base_point=(0.02 + 1e-4j, 0.02 + 1e-4j))
    with pytest.raises(ContinuationError):
        monodromy("Tx", cfg)


def test_unknown_loop():
    with pytest.raises(KeyError):
        monodromy("Tq")


def test_center_change_of_chart_exact():
    M1, M2 = center_change_of_chart()
    assert M1 == golden.M1 and M2 == golden.M2
    assert M1[5] == (0, 0, 0, 0, 0, -1)
    assert M2[0][4] == golden.M2[0][4] == pytest.approx(-7 / 11) and str(M2[0][4]) == "-7/11"
    # the transcribed matrices differ in one entry each
    diff1 = [(i, j) for i in range(6) for j in range(6) if M1[i][j] != golden.M1_TRANSCRIBED[i][j]]
    diff2 = [(i, j) for i in range(6) for j in range(6) if M2[i][j] != golden.M2_TRANSCRIBED[i][j]]
    assert len(diff1) >= 1 and len(diff2) >= 1


def test_center_change_higher_degree_consistent():
    assert center_change_of_chart(18) == center_change_of_chart(12)


def test_center_path_ends_at_center():
    assert center_path().end == (-1, -1)


def test_numeric_tp2_low_precision():
    """The conifold loop at reduced settings: rank one unipotent."""
    M = monodromy("Tp2", FAST)
    assert M.entries == golden.TP2
    N = qmat(M.entries) - qmat([[int(i == j) for j in range(6)] for i in range(6)])
    assert N.rank() == 1


def test_base_point_invariance():
    moved = replace(FAST, base_point=(1.3e-3 + 1.5e-4j, 0.8e-3 + 1.2e-4j))
    assert monodromy("Tp2", moved).entries == golden.TP2
    assert monodromy("Tx", moved).entries == golden.TX


def test_reversed_loop_inverts():
    P = catalog(FAST)["Tp2"]
    A = qmat(monodromy(P, FAST).entries)
    B = qmat(monodromy(P.reversed(), FAST).entries)
    assert A * B == qmat([[int(i == j) for j in range(6)] for i in range(6)])


def test_over_tight_tolerance_fails():
    with pytest.raises(CertificationError):
        monodromy("Tp2", replace(FAST, tolerance=1e-80))


# the full catalog at the default settings (session fixture, minutes)

@pytest.mark.slow
@pytest.mark.parametrize("name", LOOP_NAMES)
def test_catalog_loop_matches_reference(catalog_matrices, name):
    M = catalog_matrices[name]
    assert M.entries == golden.MONODROMIES[name]
    assert M.residual < 1e-4 and M.symplectic
    assert symplectic_check(M.entries).ok and qmat(M.entries).det() == 1


@pytest.mark.slow
def test_numeric_axis_loops_match_exact(catalog_matrices):
    from reyemirror.hyperseries import axis_monodromy_exact
    assert [list(r) for r in catalog_matrices["Tx"].entries] == axis_monodromy_exact("x")
    assert [list(r) for r in catalog_matrices["Ty"].entries] == axis_monodromy_exact("y")


@pytest.mark.slow
def test_connection_matrices(connections):
    C10, C20 = connections["C10"], connections["C20"]
    assert C20.entries == golden.C20
    assert C20.entries[5] == (0, 6, 17, 4, -3, 4)
    # overall sign of C10 is opposite to the reference display
    assert C10.entries == tuple(tuple(-v for v in r) for r in golden.C10)
    assert max(C10.residual, C20.residual) < 1e-4


@pytest.mark.slow
def test_connection_swap_symmetry(connections):
    """x <-> y swaps Pi components (1,2) and (3,4) and maps the A1 centre frame onto the A2 one,
    so C20 = C10 S."""
    S = qmat([[1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0], [0, 1, 0, 0, 0, 0],
              [0, 0, 0, 0, 1, 0], [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 1]])
    C10, C20 = qmat(connections["C10"].entries), qmat(connections["C20"].entries)
    assert C20 == C10 * S
    assert C20 != S * C10 * S
    # the reference pair is off by the overall sign
    assert qmat(golden.C20) == -(qmat(golden.C10) * S)


@pytest.mark.slow
def test_connection_product_block(connections):
    prod = qmat(connections["C10"].entries) * qmat(connections["C20"].entries)
    assert prod == -qmat(golden.C10_C20_BLOCK)
