"""Exact Frobenius expansion of the period vector around the large complex
structure point x = y = 0 (and its two gauge charts).

A term of a :class:`LogSeries` is stored under the key ``(n, m, k1, k2, j, z)``
and stands for::

    coeff * tau**j * Z**z * x**n * y**m * L1**k1 * L2**k2

with ``tau = 1/(2 pi i)``, ``L1 = tau log x``, ``L2 = tau log y`` and
``Z = zeta(3) tau**3``.  Euler's constant cancels out of the Gamma quotient and
``zeta(2) tau**2 = -1/24`` is rational, so every coefficient of the period
vector is an exact rational in this bookkeeping.  The only transcendental
constant that survives is ``zeta(3)``, and it enters linearly through the
w^(3) component (the familiar ``-chi zeta(3)/(2 pi i)^3`` constant, chi = -100).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from flint import acb, arb, ctx, fmpq, fmpq_mat

Key = Tuple[int, int, int, int, int, int]

# cohomology data of the mirror: (J1^3, J1^2 J2, J1 J2^2, J2^3) and c2.J_k
INTERSECTIONS = (5, 10, 10, 5)
C2_DOT_J = (50, 50)

CHARTS = ("A0", "A1", "A2")


class ConvergenceError(ValueError):
    """Raised when a series is evaluated outside its trusted disc."""


class NonIntegralMonodromy(ValueError):
    """Raised when a formal monodromy comes out with non-integer entries."""


@dataclass(frozen=True)
class CouplingConstants:
    c11: Fraction = Fraction(-1, 2)
    c12: Fraction = Fraction(0)
    c21: Fraction = Fraction(0)
    c22: Fraction = Fraction(-1, 2)

    def __post_init__(self):
        for name in ("c11", "c12", "c21", "c22"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.c12 != self.c21:
            raise ValueError("coupling constants must be symmetric: C12 == C21")


# ---------------------------------------------------------------------------
# hypergeometric coefficients
# ---------------------------------------------------------------------------

def hg_coeff(n: int, m: int) -> int:
    """((n+m)!/(n! m!))**5, the coefficient of x^n y^m in w0."""
    if n < 0 or m < 0:
        raise ValueError("indices must be non-negative")
    return comb(n + m, n) ** 5


@lru_cache(maxsize=None)
def harmonic(k: int, r: int = 1) -> Fraction:
    """Generalized harmonic number H_k^(r) = sum_{j<=k} j^-r."""
    if k <= 0:
        return Fraction(0)
    return harmonic(k - 1, r) + Fraction(1, k ** r)


# truncated polynomials in two variables (total degree <= 3), dict (a, b) -> c
_MAXDEG = 3


def _tmul(p, q):
    out = {}
    for (a1, b1), c1 in p.items():
        for (a2, b2), c2 in q.items():
            a, b = a1 + a2, b1 + b2
            if a + b <= _MAXDEG:
                out[(a, b)] = out.get((a, b), 0) + c1 * c2
    return out


def _texp(p):
    """exp of a truncated polynomial without constant term."""
    out = {(0, 0): Fraction(1)}
    term = {(0, 0): Fraction(1)}
    for k in range(1, _MAXDEG + 1):
        term = _tmul(term, p)
        for key, c in term.items():
            out[key] = out.get(key, 0) + c / factorial(k)
    return out


@lru_cache(maxsize=None)
def pochhammer_jet(n: int, m: int) -> Dict[Tuple[int, int], Fraction]:
    """Taylor coefficients (total degree <= 3) in (e1, e2) of

        (1+e1+e2)_{n+m}^5 / ((1+e1)_n^5 (1+e2)_m^5) * hg_coeff(n, m)

    i.e. the Gamma quotient with its n,m-independent factor removed.
    """
    logr = {}
    for r in range(1, _MAXDEG + 1):
        sign = Fraction((-1) ** (r + 1) * 5, r)
        hnm, hn, hm = harmonic(n + m, r), harmonic(n, r), harmonic(m, r)
        for a in range(r + 1):
            coef = sign * comb(r, a) * hnm
            if a == r:
                coef -= sign * hn
            if a == 0:
                coef -= sign * hm
            if coef:
                logr[(a, r - a)] = logr.get((a, r - a), 0) + coef
    c = hg_coeff(n, m)
    return {k: v * c for k, v in _texp(logr).items() if v}


def frobenius_coeff(n: int, m: int, k1: int, k2: int) -> Fraction:
    """(k1, k2)-th derivative in (e1, e2) of the normalized Gamma quotient at 0.

    With e = rho/(2 pi i) this is the rho-derivative rescaled by
    (2 pi i)^(k1+k2).  Only the Pochhammer part enters; the global factor
    Gamma(1+e1+e2)^5/(Gamma(1+e1)Gamma(1+e2))^5 is handled by
    :func:`gamma_class_jet`.
    """
    if k1 + k2 > _MAXDEG:
        raise ValueError("only third-order Frobenius data is supported")
    return pochhammer_jet(n, m).get((k1, k2), Fraction(0)) * factorial(k1) * factorial(k2)


# coefficient ring Q[tau, Z]: dict (j, z) -> Fraction
def gamma_class_jet() -> Dict[Tuple[int, int], Dict[Tuple[int, int], Fraction]]:
    """Taylor coefficients in rho of Gamma(1+e1+e2)^5/(Gamma(1+e1)Gamma(1+e2))^5,
    e = tau*rho, with coefficients in Q[tau, Z].

    log Gamma(1+e) = -gamma e + zeta(2) e^2/2 - zeta(3) e^3/3 + ..., so the
    quotient is 1 + 5 zeta(2) e1 e2 - 5 zeta(3) (e1^2 e2 + e1 e2^2) + O(e^4).
    """
    return {
        (0, 0): {(0, 0): Fraction(1)},
        (1, 1): {(0, 0): Fraction(-5, 24)},  # 5 zeta(2) tau^2
        (2, 1): {(0, 1): Fraction(-5)},
        (1, 2): {(0, 1): Fraction(-5)},
    }


# ---------------------------------------------------------------------------
# LogSeries
# ---------------------------------------------------------------------------

class LogSeries:
    """Truncated bivariate series with polylogarithmic coefficients (see module doc)."""

    __slots__ = ("terms", "degree")

    def __init__(self, terms: Mapping[Key, Fraction] | None = None, degree: int = 0):
        self.degree = degree
        self.terms: Dict[Key, Fraction] = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    # basic algebra -----------------------------------------------------
    def copy(self) -> "LogSeries":
        return LogSeries(dict(self.terms), self.degree)

    def __add__(self, other: "LogSeries") -> "LogSeries":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return LogSeries(out, min(self.degree, other.degree))

    def __neg__(self):
        return LogSeries({k: -v for k, v in self.terms.items()}, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LogSeries":
        c = Fraction(c)
        return LogSeries({k: v * c for k, v in self.terms.items()}, self.degree)

    __rmul__ = scale

    def __mul__(self, other: "LogSeries") -> "LogSeries":
        if not isinstance(other, LogSeries):
            return self.scale(other)
        deg = min(self.degree, other.degree)
        out: Dict[Key, Fraction] = {}
        for (n1, m1, a1, b1, j1, z1), c1 in self.terms.items():
            for (n2, m2, a2, b2, j2, z2), c2 in other.terms.items():
                if n1 + n2 + m1 + m2 > deg or z1 + z2 > 1:
                    continue
                k = (n1 + n2, m1 + m2, a1 + a2, b1 + b2, j1 + j2, z1 + z2)
                out[k] = out.get(k, 0) + c1 * c2
        return LogSeries(out, deg)

    def __eq__(self, other):
        if not isinstance(other, LogSeries):
            return NotImplemented
        return self.truncate(min(self.degree, other.degree)).terms == other.truncate(
            min(self.degree, other.degree)).terms

    def __repr__(self):
        return f"LogSeries(degree={self.degree}, nterms={len(self.terms)})"

    def truncate(self, degree: int) -> "LogSeries":
        return LogSeries({k: v for k, v in self.terms.items() if k[0] + k[1] <= degree}, degree)

    def is_zero(self) -> bool:
        return not self.terms

    # structure ---------------------------------------------------------
    def log_degree(self) -> int:
        return max((k[2] + k[3] for k in self.terms), default=0)

    def coefficient(self, n, m, k1=0, k2=0, j=0, z=0) -> Fraction:
        return self.terms.get((n, m, k1, k2, j, z), Fraction(0))

    def monomial_shift(self, dn: int, dm: int) -> "LogSeries":
        """Multiply by x^dn y^dm (the gauge factor of the other charts)."""
        return LogSeries({(n + dn, m + dm) + k[2:]: v for k, v in self.terms.items()
                          for n, m in [k[:2]]}, self.degree + dn + dm)

    def swap(self) -> "LogSeries":
        """Exchange (x, L1) <-> (y, L2)."""
        return LogSeries({(m, n, b, a, j, z): v for (n, m, a, b, j, z), v in self.terms.items()},
                         self.degree)

    def theta(self, axis: int) -> "LogSeries":
        """Apply x d/dx (axis 0) or y d/dy (axis 1)."""
        out: Dict[Key, Fraction] = {}
        for (n, m, a, b, j, z), c in self.terms.items():
            e, k = (n, a) if axis == 0 else (m, b)
            if e:
                key = (n, m, a, b, j, z)
                out[key] = out.get(key, 0) + e * c
            if k:
                key = (n, m, a - 1, b, j + 1, z) if axis == 0 else (n, m, a, b - 1, j + 1, z)
                out[key] = out.get(key, 0) + k * c
        return LogSeries(out, self.degree)

    def shift_log(self, d1: int = 0, d2: int = 0) -> "LogSeries":
        """Substitute L1 -> L1 + d1, L2 -> L2 + d2 (continuation around the axes)."""
        out: Dict[Key, Fraction] = {}
        for (n, m, a, b, j, z), c in self.terms.items():
            for i in range(a + 1):
                ci = comb(a, i) * d1 ** (a - i)
                if not ci:
                    continue
                for l in range(b + 1):
                    cl = comb(b, l) * d2 ** (b - l)
                    if not cl:
                        continue
                    key = (n, m, i, l, j, z)
                    out[key] = out.get(key, 0) + c * ci * cl
        return LogSeries(out, self.degree)

    def leading_part(self) -> Dict[Tuple[int, int, int, int], Fraction]:
        """Coefficients at the lowest power x^n y^m present, keyed (k1, k2, j, z)."""
        if not self.terms:
            return {}
        low = min((k[0] + k[1], k[0]) for k in self.terms)
        return {k[2:]: v for k, v in self.terms.items() if (k[0] + k[1], k[0]) == low}

    # numerics ----------------------------------------------------------
    def evaluate(self, x, y, branch: Tuple[int, int] = (0, 0), dps: int | None = None):
        """Numerical value at complex (x, y) with L_i = log(.)/(2 pi i) + branch_i.

        Returns an acb ball.  Zero x (or y) is allowed only if no term needs
        log x (log y) or negative powers.
        """
        return _evaluate_many([self], x, y, branch, dps)[0]


def _as_acb(v) -> acb:
    if isinstance(v, acb):
        return v
    if isinstance(v, complex):
        return acb(v.real, v.imag)
    if isinstance(v, tuple):
        return acb(*v)
    return acb(v)


def _evaluate_many(series: Sequence[LogSeries], x, y, branch=(0, 0), dps=None):
    old = ctx.dps
    if dps is not None:
        ctx.dps = dps
    try:
        x, y = _as_acb(x), _as_acb(y)
        tau = 1 / (2 * acb.pi() * acb(0, 1))
        zeta3 = acb(3).zeta()
        consts = [tau ** 0, tau, tau ** 2, tau ** 3, tau ** 4, tau ** 5, tau ** 6]
        zc = zeta3 * tau ** 3
        need1 = any(k[2] or k[0] < 0 for s in series for k in s.terms)
        need2 = any(k[3] or k[1] < 0 for s in series for k in s.terms)
        if (need1 and x == 0) or (need2 and y == 0):
            raise ValueError("log or negative power demanded at a zero coordinate")
        L1 = tau * x.log() + branch[0] if x != 0 else acb(0)
        L2 = tau * y.log() + branch[1] if y != 0 else acb(0)
        xp, yp = _PowerCache(x), _PowerCache(y)
        l1p, l2p = _PowerCache(L1), _PowerCache(L2)
        out = []
        for s in series:
            # group by log/tau structure, sum power series part first
            groups: Dict[Tuple[int, int, int, int], acb] = {}
            for (n, m, a, b, j, z), c in s.terms.items():
                g = (a, b, j, z)
                v = acb(fmpq(c.numerator, c.denominator)) * xp[n] * yp[m]
                groups[g] = groups.get(g, acb(0)) + v
            total = acb(0)
            for (a, b, j, z), v in groups.items():
                total += v * l1p[a] * l2p[b] * consts[j] * (zc if z else 1)
            out.append(total)
        return out
    finally:
        ctx.dps = old


class _PowerCache(dict):
    def __init__(self, base):
        super().__init__()
        self.base = base

    def __missing__(self, k):
        if k == 0:
            v = acb(1)
        elif k > 0:
            v = self[k - 1] * self.base
        else:
            v = self[k + 1] / self.base
        self[k] = v
        return v


# ---------------------------------------------------------------------------
# the period vector
# ---------------------------------------------------------------------------

def pi_operators(C: CouplingConstants = CouplingConstants()) -> list:
    """The six derivative polynomials P_i(d_rho1, d_rho2) with Pi_i = P_i(d_rho) w|_0.

    Ordering (w0, w1^(1), w2^(1), w2^(2), w1^(2), w^(3)).
    """
    F = Fraction
    j111, j112, j122, j222 = INTERSECTIONS
    c2 = F(C2_DOT_J[0], 12)
    return [
        {(0, 0): F(1)},
        {(1, 0): F(1)},
        {(0, 1): F(1)},
        _clean({(2, 0): F(j112, 2), (1, 1): F(j122), (0, 2): F(j222, 2),
                (1, 0): C.c21, (0, 1): C.c22}),
        _clean({(2, 0): F(j111, 2), (1, 1): F(j112), (0, 2): F(j122, 2),
                (1, 0): C.c11, (0, 1): C.c12}),
        _clean({(3, 0): F(-j111, 6), (0, 3): F(-j222, 6), (2, 1): F(-j112, 2),
                (1, 2): F(-j122, 2), (1, 0): -c2, (0, 1): -c2}),
    ]


def _clean(d):
    return {k: v for k, v in d.items() if v}


@lru_cache(maxsize=16)
def _derivative_table(degree: int):
    """d_rho^alpha w for |alpha| <= 3 as LogSeries (keyed by alpha)."""
    G = gamma_class_jet()
    alphas = [(a, d - a) for d in range(4) for a in range(d, -1, -1)]
    tables = {al: {} for al in alphas}
    for n in range(degree + 1):
        for m in range(degree + 1 - n):
            R = pochhammer_jet(n, m)
            # Q_beta = coefficient of rho^beta in G(tau rho) R(tau rho), in Q[tau, Z]
            Q: Dict[Tuple[int, int], Dict[Tuple[int, int], Fraction]] = {}
            for bg, gv in G.items():
                for br, rv in R.items():
                    b = (bg[0] + br[0], bg[1] + br[1])
                    if b[0] + b[1] > 3:
                        continue
                    slot = Q.setdefault(b, {})
                    for (j, z), g in gv.items():
                        key = (j + br[0] + br[1], z)
                        slot[key] = slot.get(key, 0) + g * rv
            for al in alphas:
                tab = tables[al]
                for b, qv in Q.items():
                    if b[0] > al[0] or b[1] > al[1]:
                        continue
                    mult = comb(al[0], b[0]) * comb(al[1], b[1]) * factorial(b[0]) * factorial(b[1])
                    k1, k2 = al[0] - b[0], al[1] - b[1]
                    for (j, z), q in qv.items():
                        if q:
                            key = (n, m, k1, k2, j, z)
                            tab[key] = tab.get(key, 0) + mult * q
    return {al: LogSeries(t, degree) for al, t in tables.items()}


@dataclass
class PeriodVector:
    components: Tuple[LogSeries, ...]
    chart: str = "A0"
    couplings: CouplingConstants = CouplingConstants()

    def __post_init__(self):
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")
        if len(self.components) != 6:
            raise ValueError("a period vector has six components")

    @property
    def degree(self) -> int:
        return min(c.degree for c in self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]


def build_period_vector(degree: int = 60, C: CouplingConstants = CouplingConstants(),
                        chart: str = "A0") -> PeriodVector:
    """Pi (chart A0) or the gauged Pi', Pi'' (A1, A2) to total degree ``degree``.

    The chart variants are the same series in their own coordinates times the
    first coordinate, so their stored degree is ``degree + 1``.
    """
    if degree < 3:
        raise ValueError("degree must be at least 3")
    table = _derivative_table(degree)
    comps = []
    for P in pi_operators(C):
        acc = LogSeries({}, degree)
        for al, c in P.items():
            acc = acc + table[al].scale(c)
        if chart != "A0":
            acc = acc.monomial_shift(1, 0)
        comps.append(acc)
    return PeriodVector(tuple(comps), chart, C)


def eval_period(v: PeriodVector, x, y, branch: Tuple[int, int] = (0, 0), dps: int = 60,
                safety: float = 0.9):
    """Evaluate the six components at (x, y).

    Returns ``(values, error_estimates)``; the estimate is the magnitude of the
    last retained homogeneous degree, a heuristic for the truncation error.
    """
    ax, ay = abs(complex(x)), abs(complex(y))
    if max(ax, ay) >= safety / 32:
        raise ConvergenceError(f"|x|,|y| must stay below {safety}/32 (got {max(ax, ay):.3g})")
    vals = _evaluate_many(list(v.components), x, y, branch, dps)
    deg = v.degree
    tails = [LogSeries({k: c for k, c in s.terms.items() if k[0] + k[1] == s.degree}, deg)
             for s in v.components]
    errs = [abs(complex(t)) for t in _evaluate_many(tails, x, y, branch, 20)]
    return vals, errs


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------

def solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Sequence[Fraction]]):
    """Solve A X = B exactly for a consistent (possibly overdetermined) system.

    Raises ValueError if inconsistent or if A has a nontrivial kernel.
    """
    nr, nc = len(rows), len(rows[0])
    k = len(rhs[0])
    aug = fmpq_mat(nr, nc + k, [_q(v) for r, b in zip(rows, rhs) for v in list(r) + list(b)])
    red, rank = aug.rref()
    pivots = []
    for i in range(rank):
        for jj in range(nc + k):
            if red[i, jj] != 0:
                pivots.append(jj)
                break
    if any(p >= nc for p in pivots):
        raise ValueError("inconsistent linear system")
    if len(pivots) != nc:
        raise ValueError("linear system does not determine the solution uniquely")
    X = [[Fraction(0)] * k for _ in range(nc)]
    for i, p in enumerate(pivots):
        for col in range(k):
            q = red[i, nc + col]
            X[p][col] = Fraction(int(q.p), int(q.q))
    return X


def _q(v) -> fmpq:
    v = Fraction(v)
    return fmpq(v.numerator, v.denominator)


def express_in_basis(targets: Sequence[LogSeries], basis: Sequence[LogSeries]):
    """Exact matrix T with targets[i] == sum_j T[i][j] basis[j] as series."""
    keys = sorted(set().union(*(b.terms.keys() for b in basis), *(t.terms.keys() for t in targets)))
    rows = [[b.terms.get(key, Fraction(0)) for b in basis] for key in keys]
    rhs = [[t.terms.get(key, Fraction(0)) for t in targets] for key in keys]
    X = solve_exact(rows, rhs)
    return [[X[j][i] for j in range(len(basis))] for i in range(len(targets))]


def axis_monodromy_exact(axis: str, C: CouplingConstants = CouplingConstants(),
                         degree: int = 6):
    """Integer matrix M with Pi(e^{2 pi i} x, y) = M Pi(x, y) (axis 'x'), or the y analogue."""
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    v = build_period_vector(degree, C)
    shift = (1, 0) if axis == "x" else (0, 1)
    moved = [c.shift_log(*shift) for c in v.components]
    T = express_in_basis(moved, list(v.components))
    if any(e.denominator != 1 for row in T for e in row):
        raise NonIntegralMonodromy(f"T_{axis} is not integral for couplings {C}: {T}")
    return [[int(e) for e in row] for row in T]
