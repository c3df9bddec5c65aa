"""Picard-Fuchs operators of the family, their Pfaffian form, and local
power-series solution bases at ordinary points.

Operators are stored in theta normal form::

    D = sum_{i,j} x^i y^j Q_ij(theta_x, theta_y)

where the theta's act first.  Charts A1 and A2 use the same operators
conjugated by their first coordinate, ``x1 D x1^{-1}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Mapping, Sequence, Tuple

import mpmath
import sympy as sp
from flint import acb, fmpq, fmpq_mat
from sympy.polys.matrices import DomainMatrix

from .hyperseries import LogSeries, PeriodVector

Poly2 = Dict[Tuple[int, int], Fraction]

# theta-monomials of the frame, in frame order
THETA_FRAME = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0))


class SingularPointError(ValueError):
    """Expansion point too close to the singular locus."""


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _poly_from_expr(expr, X, Y) -> Poly2:
    P = sp.Poly(sp.expand(expr), X, Y)
    return {k: Fraction(int(sp.numer(c)), int(sp.denom(c))) for k, c in P.terms()}


@dataclass(frozen=True)
class PFOperator:
    name: str
    terms: Mapping[Tuple[int, int], Poly2]
    chart: str = "A0"

    @property
    def theta_degree(self) -> int:
        return max(a + b for Q in self.terms.values() for (a, b) in Q)

    @property
    def coefficient_degree(self) -> int:
        return max(i + j for i, j in self.terms)

    def gauge(self, a: int, b: int = 0, chart: str | None = None) -> "PFOperator":
        """x^a y^b D x^-a y^-b, i.e. theta -> theta - (a, b)."""
        X, Y = sp.symbols("X Y")
        out = {}
        for ij, Q in self.terms.items():
            expr = sum(c * (X - a) ** p * (Y - b) ** q for (p, q), c in Q.items())
            out[ij] = _poly_from_expr(expr, X, Y)
        return PFOperator(self.name + "'", out, chart or self.chart)

    def apply(self, f: LogSeries) -> LogSeries:
        if f.degree < self.theta_degree:
            raise ValueError("series truncation below operator order")
        # theta_x^p x^n L1^a = sum_i C(p,i) n^(p-i) a!/(a-i)! tau^i x^n L1^(a-i), so
        # Q(theta) acts through the divided derivatives of Q at (n, m)
        derivs = {ij: _divided_derivatives(Q) for ij, Q in self.terms.items()}
        out: Dict[tuple, fmpq] = {}
        for (n, m, a, b, j, z), c in f.terms.items():
            c = fmpq(c.numerator, c.denominator)
            for (di, dj), table in derivs.items():
                if n + m + di + dj > f.degree:
                    continue
                for (i, k), P in table.items():
                    if i > a or k > b:
                        continue
                    v = sum(cc * n**p * m**q for (p, q), cc in P.items())
                    if not v:
                        continue
                    v *= _falling(a, i) * _falling(b, k)
                    key = (n + di, m + dj, a - i, b - k, j + i + k, z)
                    out[key] = out.get(key, 0) + v * c
        return LogSeries({k: Fraction(int(v.p), int(v.q)) for k, v in out.items() if v},
                         f.degree)


@lru_cache(maxsize=64)
def _divided_derivatives_cached(items):
    Q = dict(items)
    X, Y = sp.symbols("X Y")
    expr = sum(c * X**p * Y**q for (p, q), c in Q.items())
    deg = max(p + q for p, q in Q)
    out = {}
    for i in range(deg + 1):
        for k in range(deg + 1 - i):
            d = sp.diff(expr, X, i, Y, k) / (factorial(i) * factorial(k))
            if d != 0:
                out[(i, k)] = {e: int(c) for e, c in _poly_from_expr(d, X, Y).items()}
    return out


def _divided_derivatives(Q: Poly2):
    return _divided_derivatives_cached(tuple(sorted(Q.items())))


def _base_operators():
    X, Y = sp.symbols("X Y")
    d1 = {
        (0, 0): 2 * X**3 - 3 * X**2 * Y + 3 * X * Y**2 - 2 * Y**3,
        (1, 0): -(X + 1 + Y) ** 2 * (2 * (X + 1) + 3 * Y),
        (0, 1): (X + Y + 1) ** 2 * (3 * X + 2 * (Y + 1)),
    }
    d2 = {
        (0, 0): 2 * X**2 - 3 * X * Y + 2 * Y**2,
        (1, 0): -(2 * (X + 1) ** 2 + 7 * (X + 1) * Y + 7 * Y**2),
        (0, 1): -(7 * X**2 + 7 * X * (Y + 1) + 2 * (Y + 1) ** 2),
    }
    D1 = PFOperator("D1", {k: _poly_from_expr(v, X, Y) for k, v in d1.items()})
    D2 = PFOperator("D2", {k: _poly_from_expr(v, X, Y) for k, v in d2.items()})
    return D1, D2


@lru_cache(maxsize=4)
def operators(chart: str = "A0") -> Tuple[PFOperator, PFOperator]:
    """(D1, D2) for a chart; A1/A2 are conjugated by the first coordinate."""
    D1, D2 = _base_operators()
    if chart == "A0":
        return D1, D2
    if chart not in ("A1", "A2"):
        raise ValueError(f"unknown chart {chart!r}")
    return D1.gauge(1, 0, chart), D2.gauge(1, 0, chart)


def annihilation_check(v: PeriodVector | Sequence[LogSeries], ops=None, guard: int | None = None
                       ) -> Fraction:
    """Largest |coefficient| of D f through the guard degree, over all components."""
    comps = list(v)
    if ops is None:
        ops = operators(v.chart if isinstance(v, PeriodVector) else "A0")
    deg = min(c.degree for c in comps)
    guard = deg - 3 if guard is None else guard
    worst = Fraction(0)
    for f in comps:
        for D in ops:
            r = D.apply(f)
            for k, c in r.terms.items():
                if k[0] + k[1] <= guard:
                    worst = max(worst, abs(c))
    return worst


# ---------------------------------------------------------------------------
# Pfaffian system in the theta frame
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pfaffian:
    """theta_x F = (A/den) F, theta_y F = (B/den) F for the theta frame F.

    ``normal_forms`` maps each order <= 4 theta-monomial to its row
    (numerators over ``den``) in the frame.
    """
    den: Poly2
    normal_forms: Mapping[Tuple[int, int], Tuple[Poly2, ...]]
    A: Tuple[Tuple[Poly2, ...], ...]
    B: Tuple[Tuple[Poly2, ...], ...]


def _int_poly(expr, x, y) -> Poly2:
    P = sp.Poly(sp.expand(expr), x, y)
    return {k: Fraction(int(c)) for k, c in P.terms()}


@lru_cache(maxsize=1)
def pfaffian() -> Pfaffian:
    x, y, X, Y = sp.symbols("x y X Y")
    D1, D2 = _base_operators()

    def lmul(a, b, D):
        rows = {}
        for (i, j), Q in D.terms.items():
            q = sum(c * X**p * Y**r for (p, r), c in Q.items())
            expr = sp.expand((X + i) ** a * (Y + j) ** b * q)
            for (p, r), c in sp.Poly(expr, X, Y).terms():
                rows[(p, r)] = rows.get((p, r), 0) + c * x**i * y**j
        return rows

    rels = [lmul(a, b, D2) for a, b in ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))]
    rels += [lmul(a, b, D1) for a, b in ((0, 0), (1, 0), (0, 1))]
    mons = [(a, d - a) for d in range(5) for a in range(d, -1, -1)]
    nf = [m for m in mons if m not in THETA_FRAME]
    Mnf = DomainMatrix.from_Matrix(sp.Matrix([[r.get(m, 0) for m in nf] for r in rels]))
    Mf = DomainMatrix.from_Matrix(sp.Matrix([[r.get(m, 0) for m in THETA_FRAME] for r in rels]))
    sol, den = Mnf.solve_den(Mf)
    sol = sol.to_Matrix()
    den_expr = den.as_expr() if hasattr(den, "as_expr") else Mnf.domain.to_sympy(den)
    zero = {}
    forms = {}
    for k, m in enumerate(THETA_FRAME):
        forms[m] = tuple(_int_poly(den_expr, x, y) if i == k else zero for i in range(6))
    for r, m in enumerate(nf):
        forms[m] = tuple(_int_poly(-sol[r, c], x, y) for c in range(6))

    def shifted(m, axis):
        return (m[0] + 1, m[1]) if axis == 0 else (m[0], m[1] + 1)

    A = tuple(forms[shifted(m, 0)] for m in THETA_FRAME)
    B = tuple(forms[shifted(m, 1)] for m in THETA_FRAME)
    return Pfaffian(_int_poly(den_expr, x, y), forms, A, B)


def eval_poly(p: Poly2, x, y):
    if isinstance(x, acb) or isinstance(y, acb):
        return sum((acb(c.numerator) / c.denominator * x**i * y**j for (i, j), c in p.items()), acb(0))
    return sum((c * x**i * y**j for (i, j), c in p.items()), 0)


# ---------------------------------------------------------------------------
# d-form of the operators around a point, local bases
# ---------------------------------------------------------------------------

def _stirling2(n: int, k: int) -> int:
    return sum((-1) ** (k - j) * comb(k, j) * j**n for j in range(k + 1)) // factorial(k)


def _partial_form(D: PFOperator, x0, y0, one=Fraction(1)):
    """D as sum over (k, l) of P_kl(s, t) d_s^k d_t^l with s = x - x0, t = y - y0.

    Returns {(k, l): {(alpha, beta): coefficient}}.
    """
    out: Dict[Tuple[int, int], Dict[Tuple[int, int], object]] = {}
    for (i, j), Q in D.terms.items():
        for (a, b), c in Q.items():
            for k in range(a + 1):
                sa = _stirling2(a, k)
                if not sa:
                    continue
                for l in range(b + 1):
                    sb = _stirling2(b, l)
                    if not sb:
                        continue
                    slot = out.setdefault((k, l), {})
                    # x^(i+k) y^(j+l) expanded around (x0, y0)
                    ex, ey = i + k, j + l
                    for al in range(ex + 1):
                        cx = comb(ex, al) * x0 ** (ex - al)
                        for be in range(ey + 1):
                            v = c * sa * sb * cx * comb(ey, be) * y0 ** (ey - be) * one
                            slot[(al, be)] = slot.get((al, be), 0) + v
    return out


def _apply_partial(form, coeffs: Mapping[Tuple[int, int], object], p: int, q: int):
    """Coefficient of s^p t^q in D f, given the Taylor coefficients of f."""
    total = 0
    for (k, l), P in form.items():
        for (al, be), c in P.items():
            u, v = p - al + k, q - be + l
            if u < 0 or v < 0 or p < al or q < be:
                continue
            a = coeffs.get((u, v))
            if a is None or not a:
                continue
            total += c * a * _falling(u, k) * _falling(v, l)
    return total


def _falling(n, k):
    out = 1
    for i in range(k):
        out *= n - i
    return out


def _unknown_columns(form, p, q, d):
    """Linear dependence of the (p,q) equation on the degree-d coefficients."""
    cols = {}
    for (k, l), P in form.items():
        for (al, be), c in P.items():
            u, v = p - al + k, q - be + l
            if u < 0 or v < 0 or p < al or q < be or u + v != d:
                continue
            cols[(u, v)] = cols.get((u, v), 0) + c * _falling(u, k) * _falling(v, l)
    return cols


# frame descriptions: the Taylor monomials fixed by hand, in frame order
DERIVATIVE_FRAME = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0))
FALLBACK_FRAMES = (
    ((0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (3, 0)),
    ((0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (0, 3)),
    ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (2, 1)),
    ((0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (0, 3)),
)
CENTER_FRAME = ((0, 0), (0, 1), (1, 0), (2, 0), (0, 2), (3, 0))


@dataclass
class LocalBasis:
    """Six series solutions around ``point`` in s = x - x0, t = y - y0.

    ``series[i]`` maps (p, q) to the coefficient of s^p t^q.  ``frame``
    lists the Taylor monomials used for normalisation: solution i has
    coefficient ``scale[i]`` at ``frame[i]`` and 0 at the other frame
    monomials.
    """
    point: Tuple[object, object]
    degree: int
    frame: Tuple[Tuple[int, int], ...]
    series: List[Dict[Tuple[int, int], object]]
    exact: bool
    condition: float = 1.0
    scale: Tuple[object, ...] = field(default=(1, 1, 1, 1, 1, 1))

    def evaluate(self, s, t):
        return [sum(c * s**p * t**q for (p, q), c in f.items()) for f in self.series]

    def residual(self, chart: str = "A0") -> float:
        """Largest |coefficient| of D f through degree N-3."""
        worst = 0
        for D in operators(chart):
            form = _partial_form(D, *self.point, one=Fraction(1) if self.exact else mpmath.mpf(1))
            for f in self.series:
                for d in range(self.degree - 2):
                    for p in range(d + 1):
                        worst = max(worst, abs(_apply_partial(form, f, p, d - p)))
        return worst


def _solve(rows, rhs, exact):
    if exact:
        nr, nc = len(rows), len(rows[0])
        k = len(rhs[0])
        aug = fmpq_mat(nr, nc + k, [fmpq(Fraction(v).numerator, Fraction(v).denominator)
                                    for r, b in zip(rows, rhs) for v in list(r) + list(b)])
        red, rank = aug.rref()
        piv = []
        for i in range(rank):
            for j in range(nc + k):
                if red[i, j] != 0:
                    piv.append(j)
                    break
        if any(p >= nc for p in piv) or len(piv) != nc:
            raise SingularPointError("degree system inconsistent or degenerate")
        X = [[Fraction(0)] * k for _ in range(nc)]
        for i, p in enumerate(piv):
            for c in range(k):
                v = red[i, nc + c]
                X[p][c] = Fraction(int(v.p), int(v.q))
        return X
    A = mpmath.matrix(rows)
    out = []
    for c in range(len(rhs[0])):
        b = mpmath.matrix([r[c] for r in rhs])
        # lu_solve falls back to normal equations when overdetermined; qr_solve
        # breaks down on complex matrices with a zero leading diagonal entry
        out.append(mpmath.lu_solve(A, b))
    return [[out[c][i] for c in range(len(out))] for i in range(len(rows[0]))]


def _min_singular(rows) -> float:
    import numpy as np
    M = np.array([[complex(v) for v in r] for r in rows])
    if M.size == 0:
        return 1.0
    s = np.linalg.svd(M, compute_uv=False)
    return float(s[-1] / max(s[0], 1e-300))


def _frame_conditioning(forms, frame) -> float:
    """Smallest relative singular value of the degree 2 and 3 systems."""
    worst = 1.0
    for d in (2, 3):
        free = [m for m in frame if m[0] + m[1] == d]
        unknown = [(p, d - p) for p in range(d, -1, -1) if (p, d - p) not in free]
        rows = []
        for form, order in forms:
            e = d - order
            for p in range(e + 1):
                cols = _unknown_columns(form, p, e - p, d)
                rows.append([cols.get(u, 0) for u in unknown])
        if unknown:
            worst = min(worst, _min_singular(rows))
    return worst


def local_basis(point, degree: int, chart: str = "A0", frame=None, exact: bool | None = None,
                dps: int = 60, scale: str = "derivative") -> LocalBasis:
    """Series solution basis at an ordinary point, solved degree by degree.

    With ``scale='derivative'`` the frame matrix in derivative coordinates
    (f, f_s, f_t, f_ss, f_st, f_sss) is the identity; with ``'monomial'``
    each solution has Taylor coefficient 1 at its frame monomial.
    """
    x0, y0 = point
    if exact is None:
        exact = all(isinstance(v, (int, Fraction)) for v in point)
    if exact:
        x0, y0 = Fraction(x0), Fraction(y0)
        one = Fraction(1)
        from .geometry_poly import dis0
        margin = abs(dis0(x0, y0))
    else:
        mpmath.mp.dps = dps
        x0, y0 = mpmath.mpc(x0), mpmath.mpc(y0)
        one = mpmath.mpf(1)
        from .geometry_poly import dis0
        margin = abs(dis0(x0, y0)) / (1 + abs(x0) + abs(y0)) ** 5
    if x0 == 0 or y0 == 0 or margin < (0 if exact else 1e-8):
        raise SingularPointError(f"{point} is on or too near the singular locus")
    forms = [(_partial_form(D, x0, y0, one), D.theta_degree) for D in operators(chart)]
    # D1 is order 3, D2 order 2 (as a pair ordered (D1, D2))
    if frame is None:
        frame = DERIVATIVE_FRAME
        cond = _frame_conditioning(forms, frame)
        if cond < 1e-10:
            best = max(FALLBACK_FRAMES, key=lambda fr: _frame_conditioning(forms, fr))
            frame, cond = best, _frame_conditioning(forms, best)
    else:
        cond = _frame_conditioning(forms, frame)
    if cond < 1e-30:
        raise SingularPointError("no usable frame at this point")
    if scale == "derivative":
        scales = tuple(one / (factorial(p) * factorial(q)) for p, q in frame)
    else:
        scales = tuple(one for _ in frame)
    series = [{m: (scales[i] if m == fm else 0 * one) for m in frame if m[0] + m[1] <= 1}
              for i, fm in enumerate(frame)]
    for i, fm in enumerate(frame):
        for m in frame:
            series[i][m] = scales[i] if m == fm else 0 * one
    for d in range(2, degree + 1):
        free = [m for m in frame if m[0] + m[1] == d]
        unknown = [(p, d - p) for p in range(d, -1, -1) if (p, d - p) not in free]
        rows, rhs = [], []
        for form, order in forms:
            e = d - order
            if e < 0:
                continue
            for p in range(e + 1):
                q = e - p
                cols = _unknown_columns(form, p, q, d)
                rows.append([cols.get(u, 0) for u in unknown])
                rhs.append([-_apply_partial(form, {k: v for k, v in f.items() if k[0] + k[1] < d
                                                   or k in free}, p, q) for f in series])
        if not unknown:
            continue
        X = _solve(rows, rhs, exact)
        for i, f in enumerate(series):
            for r, u in enumerate(unknown):
                f[u] = X[r][i]
    return LocalBasis((x0, y0), degree, tuple(frame), series, exact, cond, scales)


def center_basis(degree: int, chart: str = "A0") -> LocalBasis:
    """Exact basis at (x, y) = (-1, -1) with leading monomials 1, t, s, s^2, t^2, s^3.

    Each phi_i has coefficient 1 at its own leading monomial and 0 at the
    other five, so the s^3 coefficient vanishes except in phi_5.  For A1/A2
    the series carry the gauge factor (s - 1).
    """
    if degree < 3:
        raise ValueError("degree must be at least 3")
    base = local_basis((Fraction(-1), Fraction(-1)), degree, "A0", CENTER_FRAME,
                       exact=True, scale="monomial")
    if chart == "A0":
        return base
    gauged = [_series_mul(f, {(0, 0): Fraction(-1), (1, 0): Fraction(1)}, degree)
              for f in base.series]
    return LocalBasis(base.point, degree, base.frame, gauged, True, base.condition, base.scale)


def _series_mul(f, g, degree):
    out = {}
    for (p1, q1), a in f.items():
        for (p2, q2), b in g.items():
            if p1 + p2 + q1 + q2 <= degree:
                k = (p1 + p2, q1 + q2)
                out[k] = out.get(k, 0) + a * b
    return out


def frame_values(pf: Pfaffian, F, point):
    """Taylor data (f, f_s, f_t, f_ss/2, f_st, f_tt/2, f_sss/6) from a theta frame vector."""
    x, y = point
    den = eval_poly(pf.den, x, y)

    def nf(m):
        return sum(eval_poly(p, x, y) * v for p, v in zip(pf.normal_forms[m], F)) / den

    f, tx, ty, txx, txy, txxx = F
    tyy = nf((0, 2))
    return {
        (0, 0): f,
        (1, 0): tx / x,
        (0, 1): ty / y,
        (2, 0): (txx - tx) / x**2 / 2,
        (1, 1): txy / (x * y),
        (0, 2): (tyy - ty) / y**2 / 2,
        (3, 0): (txxx - 3 * txx + 2 * tx) / x**3 / 6,
    }
