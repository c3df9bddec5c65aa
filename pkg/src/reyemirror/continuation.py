"""Analytic continuation of the period vector along paths in the (x, y) plane.

The system is carried in the theta frame F = (f, tx f, ty f, tx^2 f,
tx ty f, tx^3 f).  Along a straight segment (x, y) = P0 + u (dx, dy) it is
the linear ODE

    q(u) F'(u) = C(u) F(u),   q = x y den,   C = dx y A + dy x B

with polynomial q and C, solved by a Taylor recurrence in ball arithmetic.
Each step has length 1/ratio of the distance to the nearest root of q on the
line, so the series converges geometrically.  The roots of ``den`` other
than dis0 are apparent singularities of the frame, not of the solutions.

Convention: the transfer matrix Phi of a path maps frame column vectors,
F(end) = Phi F(start).  Rows of W are solutions, so W(end) = W(start) Phi^T,
and the monodromy acting on Pi is T = W0 Phi^T W0^-1.
"""
from __future__ import annotations

import cmath
import hashlib
import math
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from flint import acb, acb_mat, acb_poly, ctx, fmpq
from numpy.polynomial import polynomial as npp

from .hyperseries import _evaluate_many, build_period_vector
from .pf_local import CENTER_FRAME, _series_mul, center_basis, frame_values, pfaffian
from .symplectic_lattice import CertifiedMatrix, certify

Point = Tuple[complex, complex]

BASE_POINT: Point = (complex(1e-3, 1e-4), complex(1e-3, 1e-4 * (1 - 1e-6)))
CENTER_POINT: Point = (complex(-1), complex(-1))

LOOP_NAMES = ("Tx", "Ty", "Tp1_1", "Tp1_2", "Tp2", "Tp3_1", "Tp3_2", "Tz")


class ContinuationError(RuntimeError):
    """A path runs into the singular locus or a step fails to converge."""


@dataclass(frozen=True)
class ContinuationConfig:
    degree: int = 60          # truncation of Pi at the base point
    digits: int = 60
    guard_digits: int = 10
    step_ratio: float = 3.0   # step = distance to nearest singularity / ratio
    max_terms: int = 4000
    tolerance: float = 1e-4   # certification
    delta: float = 1e-2       # Im x on the deformed line
    eps: float = 0.5          # Im y = eps * Im x
    leg_start: float = 1e-3
    loop_fraction: float = 1e-2
    arcs: int = 100
    far_radius: float = 30.0
    base_point: Point = BASE_POINT


DEFAULT_CONFIG = ContinuationConfig()


@contextmanager
def _precision(digits: int):
    old = ctx.dps
    ctx.dps = digits
    try:
        yield
    finally:
        ctx.dps = old


def _acb(z) -> acb:
    if isinstance(z, acb):
        return z
    z = complex(z)
    return acb(z.real, z.imag)


def _eye() -> acb_mat:
    return acb_mat([[int(i == j) for j in range(6)] for i in range(6)])


def _complex_rows(M: acb_mat) -> List[List[complex]]:
    return [[complex(M[i, j].mid()) for j in range(M.ncols())] for i in range(M.nrows())]


def _mid_rows(M: acb_mat) -> Tuple[Tuple[acb, ...], ...]:
    # full-precision midpoints; float rows would hide residuals below 1e-16
    return tuple(tuple(M[i, j].mid() for j in range(M.ncols())) for i in range(M.nrows()))


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LoopDescriptor:
    center: complex           # parameter r of the loop centre on the deformed line
    radius: float
    arcs: int
    ccw: bool


@dataclass(frozen=True)
class PathSpec:
    """Polygonal path through ``waypoints``; segments are straight in (x, y)."""
    waypoints: Tuple[Point, ...]
    name: str = ""
    homotopy: str = ""
    loop: Optional[LoopDescriptor] = None

    def __post_init__(self):
        pts = tuple((complex(x), complex(y)) for x, y in self.waypoints)
        if not pts:
            raise ValueError("a path needs at least one point")
        object.__setattr__(self, "waypoints", pts)

    @property
    def start(self) -> Point:
        return self.waypoints[0]

    @property
    def end(self) -> Point:
        return self.waypoints[-1]

    @property
    def closed(self) -> bool:
        return self.start == self.end

    def reversed(self) -> "PathSpec":
        loop = replace(self.loop, ccw=not self.loop.ccw) if self.loop else None
        name = f"{self.name}^-1" if self.name else ""
        return PathSpec(self.waypoints[::-1], name, self.homotopy, loop)

    def then(self, other: "PathSpec") -> "PathSpec":
        """This path followed by ``other``."""
        if self.end != other.start:
            raise ValueError("paths do not connect")
        name = " * ".join(n for n in (self.name, other.name) if n)
        return PathSpec(self.waypoints + other.waypoints[1:], name, self.homotopy or other.homotopy)

    def split(self, k: int) -> Tuple["PathSpec", "PathSpec"]:
        return PathSpec(self.waypoints[:k + 1]), PathSpec(self.waypoints[k:])

    def digest(self) -> str:
        h = hashlib.sha256()
        for x, y in self.waypoints:
            h.update(f"{x.real.hex()},{x.imag.hex()},{y.real.hex()},{y.imag.hex()};".encode())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class DeformedLine:
    """The real line x = r + i delta, y = r + i eps delta running just above the diagonal."""
    delta: float = 1e-2
    eps: float = 0.5

    def point(self, r) -> Point:
        r = complex(r)
        return (r + 1j * self.delta, r + 1j * self.eps * self.delta)

    def _xy(self):
        return np.array([1j * self.delta, 1]), np.array([1j * self.eps * self.delta, 1])

    def dis0_polynomial(self) -> np.ndarray:
        X, Y = self._xy()
        return _dis0_poly(X, Y)

    def crossings(self) -> List[complex]:
        """Values of r where the line meets dis0 = 0, by increasing real part."""
        c = self.dis0_polynomial()
        roots = npp.polyroots(c)
        dc = npp.polyder(c)
        polished = []
        for r in roots:
            for _ in range(4):
                r = r - npp.polyval(r, c) / npp.polyval(r, dc)
            polished.append(complex(r))
        return sorted(polished, key=lambda z: z.real)

    def punctures(self) -> List[complex]:
        """All points of the line on the singular locus: dis0 and both axes."""
        return self.crossings() + [-1j * self.delta, -1j * self.eps * self.delta]

    def admissible(self) -> bool:
        """Every puncture lies strictly below the real r axis."""
        return all(z.imag < 0 for z in self.punctures())


def _dis0_poly(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    one = np.array([1 + 0j])
    s = npp.polysub(npp.polysub(one, X), Y)
    xy = npp.polymul(X, Y)
    d = npp.polysub(npp.polypow(s, 5), 625 * npp.polymul(xy, npp.polypow(s, 2)))
    return npp.polyadd(d, 3125 * npp.polymul(xy, npp.polysub(npp.polysub(xy, X), Y)))


def homotopy_is_trivial(eps: float = 0.5, deltas: Sequence[float] = ()) -> bool:
    """True when the punctures move without colliding and stay below the path.

    In r' = r + i(1+eps)delta/2 the dis0 crossings are the roots of a real
    polynomial, so they can only meet by leaving the real r' axis in a pair.
    Keeping all of them on that axis over the sampled family (and below the
    path) means loops built on any two members are homotopic.
    """
    if len(deltas) == 0:
        deltas = np.geomspace(1e-4, 1e-2, 25)
    for d in deltas:
        line = DeformedLine(d, eps)
        shift = (1 + eps) * d / 2
        if not line.admissible():
            return False
        if any(abs(z.imag + shift) > 1e-8 * (1 + abs(z)) for z in line.crossings()):
            return False
    return True


def _circle(center: complex, radius: float, arcs: int, ccw: bool, start_angle: float) -> List[complex]:
    sgn = 1 if ccw else -1
    pts = [center + radius * cmath.exp(1j * (start_angle + sgn * 2 * math.pi * k / arcs))
           for k in range(arcs)]
    return pts + [pts[0]]


def _axis_loop(axis: int, cfg: ContinuationConfig) -> PathSpec:
    x0, y0 = cfg.base_point
    ring = _circle(0, 1.0, cfg.arcs, True, 0.0)
    pts = [(x0 * z, y0) if axis == 0 else (x0, y0 * z) for z in ring]
    name = "Tx" if axis == 0 else "Ty"
    return PathSpec(tuple(pts), name, "circle around the axis at fixed other coordinate",
                    LoopDescriptor(0j, abs(x0 if axis == 0 else y0), cfg.arcs, True))


def _point_loop(name: str, line: DeformedLine, idx: int, ccw: bool, far: bool,
                cfg: ContinuationConfig) -> PathSpec:
    punct = line.punctures()
    rstar = punct[idx]
    rho = cfg.loop_fraction * min(abs(rstar - p) for i, p in enumerate(punct) if i != idx)
    leg = [cfg.leg_start]
    if far:
        # out to the left and back in from the right through the lower half plane
        R = cfg.far_radius
        semi = [R * cmath.exp(1j * math.pi * (1 + k / 50)) for k in range(51)]
        leg += [-R] + semi[1:-1] + [R]
    leg += [rstar.real, rstar + 1j * rho]
    ring = _circle(rstar, rho, cfg.arcs, ccw, math.pi / 2)
    rs = leg + ring[1:] + leg[::-1][1:]
    pts = [cfg.base_point] + [line.point(r) for r in rs] + [cfg.base_point]
    tag = ("over the diagonal with Im y = eps Im x"
           + ("; approached from r = +inf through Im r < 0" if far else ""))
    return PathSpec(tuple(pts), name, tag, LoopDescriptor(rstar, rho, cfg.arcs, ccw))


def _infinity_loop(line: DeformedLine, cfg: ContinuationConfig) -> PathSpec:
    R = cfg.far_radius
    ring = _circle(0, R, cfg.arcs, False, 0.0)
    rs = [cfg.leg_start] + ring + [cfg.leg_start]
    pts = [cfg.base_point] + [line.point(r) for r in rs] + [cfg.base_point]
    return PathSpec(tuple(pts), "Tz", "clockwise circle |r| = R enclosing every puncture",
                    LoopDescriptor(0j, R, cfg.arcs, False))


def catalog(cfg: ContinuationConfig = DEFAULT_CONFIG) -> Dict[str, PathSpec]:
    """The eight loops based at ``cfg.base_point``.

    Punctures on the deformed line, by increasing real part: two near p1,
    p2, two near p3.  Loop orientations are fixed by matching the reference
    matrices; see the tests.
    """
    line = DeformedLine(cfg.delta, cfg.eps)
    if not line.admissible():
        raise ContinuationError("deformed line has a puncture above the path")
    return {
        "Tx": _axis_loop(0, cfg),
        "Ty": _axis_loop(1, cfg),
        "Tp1_1": _point_loop("Tp1_1", line, 1, False, False, cfg),
        "Tp1_2": _point_loop("Tp1_2", line, 0, True, False, cfg),
        "Tp2": _point_loop("Tp2", line, 2, True, False, cfg),
        "Tp3_1": _point_loop("Tp3_1", line, 3, True, True, cfg),
        "Tp3_2": _point_loop("Tp3_2", line, 4, False, True, cfg),
        "Tz": _infinity_loop(line, cfg),
    }


def center_path(cfg: ContinuationConfig = DEFAULT_CONFIG) -> PathSpec:
    """From the base point over the diagonal to the centre (-1, -1)."""
    line = DeformedLine(cfg.delta, cfg.eps)
    pts = (cfg.base_point, line.point(cfg.leg_start), line.point(-1.0), CENTER_POINT)
    return PathSpec(pts, "to-center", "over the diagonal with Im y = eps Im x")


# ---------------------------------------------------------------------------
# Taylor stepping
# ---------------------------------------------------------------------------

@dataclass
class StepRecord:
    position: float
    length: float
    terms: int
    tail: float


@dataclass
class TransferResult:
    """Frame transfer matrix of a path: F(end) = matrix F(start)."""
    matrix: acb_mat
    digits: int
    steps: int = 0
    growth: float = 1.0
    log: List[StepRecord] = field(default_factory=list)

    def complex_rows(self) -> List[List[complex]]:
        return _complex_rows(self.matrix)

    def distance_to_identity(self) -> float:
        return max(abs(v - (i == j)) for i, r in enumerate(self.complex_rows())
                   for j, v in enumerate(r))


def _singular_distance(xc: complex, yc: complex, dx: complex, dy: complex) -> float:
    """Distance in u to the nearest root of x y den on the line (xc, yc) + u (dx, dy)."""
    pf = pfaffian()
    X = np.array([xc, dx])
    Y = np.array([yc, dy])
    den = np.zeros(1, dtype=complex)
    for (i, j), c in pf.den.items():
        den = npp.polyadd(den, float(c) * npp.polymul(npp.polypow(X, i), npp.polypow(Y, j)))
    roots = list(npp.polyroots(npp.polytrim(den, 0)))
    if dx:
        roots.append(-xc / dx)
    if dy:
        roots.append(-yc / dy)
    return min(abs(r) for r in roots) if roots else math.inf


def _eval_on_line(P, xp, yp) -> acb_poly:
    out = acb_poly([])
    for (i, j), c in P.items():
        out += (xp[i] * yp[j]) * acb(int(c))
    return out


def _taylor_step(xc: acb, yc: acb, dx: acb, dy: acb, h: acb, tol: float, max_terms: int):
    """Transfer matrix from u = 0 to u = h along the direction (dx, dy)."""
    pf = pfaffian()
    dxh, dyh = dx * h, dy * h
    X, Y = acb_poly([xc, dxh]), acb_poly([yc, dyh])
    xp, yp = [acb_poly([1])], [acb_poly([1])]
    for _ in range(12):
        xp.append(xp[-1] * X)
        yp.append(yp[-1] * Y)
    q = X * Y * _eval_on_line(pf.den, xp, yp)
    Cp = [[(dxh * Y * _eval_on_line(pf.A[r][c], xp, yp) + dyh * X * _eval_on_line(pf.B[r][c], xp, yp))
           if (pf.A[r][c] or pf.B[r][c]) else acb_poly([]) for c in range(6)] for r in range(6)]
    dq = q.degree()
    dC = max(Cp[r][c].degree() for r in range(6) for c in range(6))
    qs = [q[j] for j in range(dq + 1)]
    Cs = [acb_mat([[Cp[r][c][j] if j <= Cp[r][c].degree() else 0 for c in range(6)]
                   for r in range(6)]) for j in range(dC + 1)]
    Phi = [_eye()]
    total = _eye()
    inv_q0 = 1 / qs[0]
    small, k, mag = 0, 0, 0.0
    while small < 3:
        acc = acb_mat(6, 6)
        for j in range(min(k, dC) + 1):
            acc += Cs[j] * Phi[k - j]
        for j in range(1, min(k + 1, dq) + 1):
            acc -= Phi[k + 1 - j] * (qs[j] * (k + 1 - j))
        # midpoint arithmetic: ball radii from the recurrence are pessimistic
        nxt = (acc * (inv_q0 / (k + 1))).mid()
        Phi.append(nxt)
        total += nxt
        mag = max(abs(complex(nxt[r, c].mid())) for r in range(6) for c in range(6))
        k += 1
        small = small + 1 if mag < tol else 0
        if k > max_terms:
            raise ContinuationError("Taylor series failed to converge within the step")
    return total, k, mag


def _segment(P0: Point, P1: Point, cfg: ContinuationConfig, log: List[StepRecord]) -> acb_mat:
    x0, y0 = map(_acb, P0)
    dx, dy = _acb(P1[0]) - x0, _acb(P1[1]) - y0
    cdx, cdy = complex(dx.mid()), complex(dy.mid())
    tol = 10.0 ** (-cfg.digits - 5)
    pos = fmpq(0)
    M = _eye()
    while pos < 1:
        fp = float(pos.p) / float(pos.q)
        xc = complex(x0.mid()) + fp * cdx
        yc = complex(y0.mid()) + fp * cdy
        r = _singular_distance(xc, yc, cdx, cdy)
        if r < 1e-14:
            raise ContinuationError(f"segment passes through the singular locus near ({xc}, {yc})")
        h = fmpq(int(r / cfg.step_ratio * 2**50), 2**50)
        if h >= 1 - pos:
            h = 1 - pos
        # exact rational positions keep consecutive steps glued at full precision
        xa = x0 + dx * acb(pos)
        ya = y0 + dy * acb(pos)
        T, k, tail = _taylor_step(xa, ya, dx, dy, acb(h), tol, cfg.max_terms)
        M = (T * M).mid()
        log.append(StepRecord(fp, float(h.p) / float(h.q), k, tail))
        pos = pos + h
    return M


def transfer(path: PathSpec, cfg: ContinuationConfig = DEFAULT_CONFIG) -> TransferResult:
    """Continue the theta frame along ``path``."""
    with _precision(cfg.digits + cfg.guard_digits):
        M = _eye()
        log: List[StepRecord] = []
        growth = 1.0
        for a, b in zip(path.waypoints[:-1], path.waypoints[1:]):
            if a == b:
                continue
            M = (_segment(a, b, cfg, log) * M).mid()
            growth = max(growth, max(abs(v) for r in _complex_rows(M) for v in r))
        return TransferResult(M, cfg.digits, len(log), growth, log)


# ---------------------------------------------------------------------------
# period vector at the base point
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _theta_series(degree: int):
    series = []
    for f in build_period_vector(degree):
        tx, ty = f.theta(0), f.theta(1)
        txx = tx.theta(0)
        series += [f, tx, ty, txx, tx.theta(1), txx.theta(0)]
    return series


@lru_cache(maxsize=16)
def _base_frame_cached(point: Point, degree: int, digits: int) -> acb_mat:
    vals = _evaluate_many(_theta_series(degree), point[0], point[1], (0, 0), digits)
    return acb_mat([[vals[6 * i + j] for j in range(6)] for i in range(6)])


def base_frame(point: Point, cfg: ContinuationConfig = DEFAULT_CONFIG) -> acb_mat:
    """Rows: the six components of Pi; columns: the theta frame at ``point``."""
    x, y = map(complex, point)
    if max(abs(x), abs(y)) * 32 > 0.5:
        raise ContinuationError("base point must be well inside the convergence domain of Pi")
    return _base_frame_cached((x, y), cfg.degree, cfg.digits + cfg.guard_digits)


def numeric_monodromy(path: PathSpec, cfg: ContinuationConfig = DEFAULT_CONFIG
                      ) -> Tuple[List[List[complex]], TransferResult]:
    if not path.closed:
        raise ValueError("monodromy needs a closed path")
    res = transfer(path, cfg)
    with _precision(cfg.digits + cfg.guard_digits):
        W0 = base_frame(path.start, cfg)
        T = W0 * res.matrix.transpose() * W0.inv()
    return _complex_rows(T), res


def _untoleranced(cfg: ContinuationConfig) -> ContinuationConfig:
    return replace(cfg, tolerance=DEFAULT_CONFIG.tolerance)


@lru_cache(maxsize=None)
def _catalog_approx(name: str, cfg: ContinuationConfig):
    # deterministic, so one run per (loop, config) is enough; tolerance is applied afterwards
    path = catalog(cfg)[name]
    res = transfer(path, cfg)
    with _precision(cfg.digits + cfg.guard_digits):
        W0 = base_frame(path.start, cfg)
        return _mid_rows(W0 * res.matrix.transpose() * W0.inv()), path.digest()


def monodromy(loop: Union[str, PathSpec], cfg: ContinuationConfig = DEFAULT_CONFIG) -> CertifiedMatrix:
    """Certified matrix rho(loop) with continuation of Pi along the loop = rho Pi."""
    if isinstance(loop, str):
        if loop not in LOOP_NAMES:
            raise KeyError(f"unknown loop {loop!r}; catalog has {LOOP_NAMES}")
        approx, digest = _catalog_approx(loop, _untoleranced(cfg))
        return certify(loop, approx, cfg.tolerance, digest)
    approx, _ = numeric_monodromy(loop, cfg)
    return certify(loop.name or "loop", approx, cfg.tolerance, loop.digest())


# ---------------------------------------------------------------------------
# the centre (-1, -1)
# ---------------------------------------------------------------------------

def _geometric(var: int, N: int) -> Dict[Tuple[int, int], Fraction]:
    return {((k, 0) if var == 0 else (0, k)): Fraction(1) for k in range(1, N + 1)}


def _chart_series(which: int, basis, N: int):
    """phi'_i(s1(s,t), t1(s,t)) as series in (s, t), gauge factor included."""
    g = _geometric(0 if which == 1 else 1, N)
    inv = {(0, 0): Fraction(1), **g}                      # 1/(1-s) or 1/(1-t)
    s1 = {k: -v for k, v in g.items()}                    # -s/(1-s) = 1 - 1/(1-s)
    num = {(0, 1): Fraction(1), (1, 0): Fraction(-1)} if which == 1 else \
        {(1, 0): Fraction(1), (0, 1): Fraction(-1)}
    t1 = _series_mul(num, inv, N)
    gauge = {k: -v for k, v in inv.items()}               # s1 - 1 = -1/(1-s)
    sp_, tp_ = [{(0, 0): Fraction(1)}], [{(0, 0): Fraction(1)}]
    for _ in range(N):
        sp_.append(_series_mul(sp_[-1], s1, N))
        tp_.append(_series_mul(tp_[-1], t1, N))
    out = []
    for f in basis.series:
        acc: Dict[Tuple[int, int], Fraction] = {}
        for (p, q), c in f.items():
            if c:
                for k, v in _series_mul(sp_[p], tp_[q], N).items():
                    acc[k] = acc.get(k, 0) + c * v
        out.append(_series_mul(gauge, acc, N))
    return out


@lru_cache(maxsize=4)
def center_change_of_chart(degree: int = 14):
    """Exact M1, M2 with phi'(s1, t1) = M1 phi(s, t) and phi''(s2, t2) = M2 phi(s, t).

    The matrix is read off the frame monomials and then checked against every
    coefficient through ``degree``.
    """
    if degree < 6:
        raise ValueError("degree must be at least 6")
    basis = center_basis(degree)
    result = []
    for which in (1, 2):
        composed = _chart_series(which, basis, degree)
        M = tuple(tuple(L.get(m, Fraction(0)) for m in CENTER_FRAME) for L in composed)
        for i, L in enumerate(composed):
            keys = set(L) | {k for f in basis.series for k in f}
            for k in keys:
                rhs = sum((M[i][j] * basis.series[j].get(k, 0) for j in range(6)), Fraction(0))
                if L.get(k, 0) != rhs:
                    raise ContinuationError(f"M{which}: coefficient match fails at {k}")
        result.append(M)
    return tuple(result)


def center_coefficients(cfg: ContinuationConfig = DEFAULT_CONFIG) -> Tuple[acb_mat, TransferResult]:
    """K with Pi = K phi(s, t) after continuation to the centre."""
    path = center_path(cfg)
    res = transfer(path, cfg)
    pf = pfaffian()
    with _precision(cfg.digits + cfg.guard_digits):
        W = base_frame(path.start, cfg) * res.matrix.transpose()
        pt = (acb(-1), acb(-1))
        rows = []
        for i in range(6):
            tv = frame_values(pf, [W[i, j] for j in range(6)], pt)
            rows.append([tv[m] for m in CENTER_FRAME])
        return acb_mat(rows), res


def _rational_acb(M) -> acb_mat:
    return acb_mat([[acb(v.numerator) / v.denominator for v in r] for r in M])


def connection_matrices(cfg: ContinuationConfig = DEFAULT_CONFIG) -> Dict[str, CertifiedMatrix]:
    """C10, C20 with Pi' = C10 Pi and Pi'' = C20 Pi.

    Continuing Pi' along the first-chart copy of the same path gives the same
    coefficient matrix K, since Pi'(x1, y1) = x1 Pi(x1, y1) and the gauge
    factor is already inside phi'.  Hence C = K M K^-1.
    """
    approx, path_hash = _connection_approx(_untoleranced(cfg))
    return {name: certify(name, approx[name], cfg.tolerance, path_hash) for name in ("C10", "C20")}


@lru_cache(maxsize=None)
def _connection_approx(cfg: ContinuationConfig):
    K, res = center_coefficients(cfg)
    M1, M2 = center_change_of_chart()
    out = {}
    with _precision(cfg.digits + cfg.guard_digits):
        Ki = K.inv()
        for name, M in (("C10", M1), ("C20", M2)):
            out[name] = _mid_rows(K * _rational_acb(M) * Ki)
    return out, center_path(cfg).digest()
