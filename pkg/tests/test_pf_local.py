import time
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from reyemirror.hyperseries import LogSeries, build_period_vector
from reyemirror.pf_local import (
    CENTER_FRAME, DERIVATIVE_FRAME, SingularPointError, annihilation_check, center_basis,
    local_basis, operators,
)


def test_operator_shapes():
    D1, D2 = operators("A0")
    assert (D1.theta_degree, D2.theta_degree) == (3, 2)
    assert D1.coefficient_degree == D2.coefficient_degree == 1


def test_constants_are_not_killed():
    # the x and y terms are Q(theta) composed with x (or y), so they see the constant
    one = LogSeries({(0, 0, 0, 0, 0, 0): Fraction(1)}, 10)
    D1, D2 = operators("A0")
    assert D1.apply(one).terms == {(1, 0, 0, 0, 0, 0): -2, (0, 1, 0, 0, 0, 0): 2}
    assert D2.apply(one).terms == {(1, 0, 0, 0, 0, 0): -2, (0, 1, 0, 0, 0, 0): -2}


@given(st.integers(1, 8), st.integers(0, 8))
def test_monomials_are_not_solutions(n, m):
    f = LogSeries({(n, m, 0, 0, 0, 0): Fraction(1)}, n + m + 3)
    D1, _ = operators("A0")
    assert not D1.apply(f).is_zero()


def test_operator_needs_enough_terms():
    D1, _ = operators("A0")
    with pytest.raises(ValueError):
        D1.apply(LogSeries({(0, 0, 0, 0, 0, 0): Fraction(1)}, 2))


def test_w0_annihilated_at_low_degree():
    v = build_period_vector(20)
    D1, D2 = operators("A0")
    for D in (D1, D2):
        assert D.apply(v[0]).truncate(17).is_zero()


def test_annihilation_all_charts_degree_30():
    t0 = time.perf_counter()
    for chart in ("A0", "A1", "A2"):
        v = build_period_vector(30, chart=chart)
        assert annihilation_check(v, operators(chart)) == 0
    assert time.perf_counter() - t0 < 30


def test_gauge_mismatch_detected():
    v = build_period_vector(12, chart="A1")
    assert annihilation_check(v, operators("A0")) != 0


def test_gauge_is_conjugation():
    D1 = operators("A0")[0]
    assert D1.gauge(1).gauge(-1).terms == D1.terms
    assert operators("A1")[0].terms == D1.gauge(1).terms


def test_center_basis_leading_monomials():
    B = center_basis(8)
    assert B.frame == CENTER_FRAME == ((0, 0), (0, 1), (1, 0), (2, 0), (0, 2), (3, 0))
    for i, f in enumerate(B.series):
        for j, m in enumerate(CENTER_FRAME):
            assert f.get(m, 0) == (1 if i == j else 0)
        low = min(p + q for (p, q), c in f.items() if c)
        assert low == sum(CENTER_FRAME[i])
    # phi_0 = 1 + c st + ...: the s t coefficient is a determined rational
    assert isinstance(B.series[0][(1, 1)], Fraction)


def test_center_basis_exact_residual():
    for chart in ("A0", "A1"):
        assert center_basis(10, chart).residual(chart) == 0


def test_center_gauge_factor():
    B0, B1 = center_basis(6), center_basis(6, "A1")
    for f, g in zip(B0.series, B1.series):
        assert g[(0, 0)] == -f[(0, 0)]
        assert g.get((1, 0), 0) == f.get((0, 0), 0) - f.get((1, 0), 0)


def test_center_degree_guard():
    with pytest.raises(ValueError):
        center_basis(2)


def test_center_degree2_regression():
    B = center_basis(4)
    got = [B.series[i].get((1, 1), 0) for i in range(6)]
    again = [center_basis(6).series[i].get((1, 1), 0) for i in range(6)]
    assert got == again          # independent of truncation


@pytest.mark.parametrize("point", [(0.3 + 0.2j, -0.4 + 0.1j), (-2 + 0.5j, 1.5 - 0.3j)])
def test_local_basis_numeric(point):
    B = local_basis(point, 14, dps=40)
    assert B.residual() < 1e-28
    assert B.frame == DERIVATIVE_FRAME
    for i, f in enumerate(B.series):
        for j, m in enumerate(B.frame):
            want = B.scale[i] if i == j else 0
            assert abs(f[m] - want) < 1e-35


def _frame_coords(f, s, t, frame):
    """(g, g_s, g_t, g_ss, ...) of the polynomial f at (s, t)."""
    from math import factorial
    out = []
    for a, b in frame:
        acc = 0
        for (p, q), c in f.items():
            if p >= a and q >= b:
                acc += c * (factorial(p) // factorial(p - a)) * (factorial(q) // factorial(q - b)) \
                    * s ** (p - a) * t ** (q - b)
        out.append(acc)
    return out


def test_local_basis_round_trip():
    """Express phi_i in the basis at a nearby point, then re-expand back: identity frame."""
    p0 = (0.3 + 0.2j, -0.4 + 0.1j)
    ds, dt = 0.01 + 0.005j, -0.008j
    B = local_basis(p0, 20, dps=40)
    B2 = local_basis((p0[0] + ds, p0[1] + dt), 20, dps=40)
    assert B.frame == B2.frame
    back = [_frame_coords(g, -ds, -dt, B2.frame) for g in B2.series]
    for i, f in enumerate(B.series):
        c = _frame_coords(f, ds, dt, B.frame)
        recon = [sum(c[j] * back[j][k] for j in range(6)) for k in range(6)]
        for k in range(6):
            assert abs(recon[k] - (1 if i == k else 0)) < 1e-15


def test_local_basis_rejects_singular_points():
    with pytest.raises(SingularPointError):
        local_basis((Fraction(1, 32), Fraction(1, 32)), 6)
    with pytest.raises(SingularPointError):
        local_basis((0.0, 0.3), 6)


def test_solution_space_dimension():
    """A seventh frame monomial is already determined: forcing it gives an inconsistent system."""
    B = local_basis((Fraction(-1), Fraction(-2)), 6, exact=True)
    assert B.residual() == 0
    assert len(B.series) == 6
