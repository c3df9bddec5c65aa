"""Defining polynomials and discriminants of the family, evaluated exactly.

Scalars may be ints, Fractions, complex floats, elements of Q(mu) with
mu a primitive 5th root of unity (:class:`Cyclo5`), or of Q(sqrt 5)
(:class:`QSqrt5`).  Passing ``p`` reduces integer/rational evaluations
modulo a prime.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence, Tuple

import mpmath


# ---------------------------------------------------------------------------
# small exact number fields
# ---------------------------------------------------------------------------

class Cyclo5:
    """Element c0 + c1 mu + c2 mu^2 + c3 mu^3 of Q(mu), 1+mu+mu^2+mu^3+mu^4 = 0."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence = (0,)):
        c = _reduce_long([Fraction(v) for v in coeffs])
        # eliminate mu^4
        self.c = tuple(c[i] - c[4] for i in range(4))

    @classmethod
    def mu(cls, k: int = 1) -> "Cyclo5":
        out = [0] * 5
        out[k % 5] = 1
        return cls(out)

    @staticmethod
    def _lift(v) -> "Cyclo5":
        return v if isinstance(v, Cyclo5) else Cyclo5((v,))

    def __add__(self, other):
        o = self._lift(other)
        return Cyclo5([a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo5([-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        prod = [Fraction(0)] * 7
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    prod[i + j] += a * b
        return Cyclo5(_reduce_long(prod))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out, base = Cyclo5((1,)), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclo5((other,))
        return isinstance(other, Cyclo5) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.c[0]

    def __repr__(self):
        return f"Cyclo5{tuple(str(v) for v in self.c)}"


def _reduce_long(coeffs):
    """Reduce a coefficient list modulo mu^5 = 1 to length 5."""
    out = [Fraction(0)] * 5
    for i, v in enumerate(coeffs):
        out[i % 5] += v
    return out


@dataclass(frozen=True)
class QSqrt5:
    """u + v sqrt(5) with rational u, v."""
    u: Fraction
    v: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "u", Fraction(self.u))
        object.__setattr__(self, "v", Fraction(self.v))

    @staticmethod
    def _lift(o) -> "QSqrt5":
        return o if isinstance(o, QSqrt5) else QSqrt5(Fraction(o))

    def __add__(self, o):
        o = self._lift(o)
        return QSqrt5(self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt5(-self.u, -self.v)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return QSqrt5(self.u * o.u + 5 * self.v * o.v, self.u * o.v + self.v * o.u)

    __rmul__ = __mul__

    def inverse(self) -> "QSqrt5":
        n = self.u**2 - 5 * self.v**2
        return QSqrt5(self.u / n, -self.v / n)

    def __truediv__(self, o):
        return self * self._lift(o).inverse()

    def __rtruediv__(self, o):
        return self._lift(o) * self.inverse()

    def __pow__(self, n: int):
        out = QSqrt5(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = QSqrt5(o)
        return isinstance(o, QSqrt5) and (self.u, self.v) == (o.u, o.v)

    def __hash__(self):
        return hash((self.u, self.v))

    def __float__(self):
        return float(self.u) + float(self.v) * 5 ** 0.5

    def __complex__(self):
        return complex(float(self))

    def mpf(self):
        return mpmath.mpf(self.u.numerator) / self.u.denominator + \
            mpmath.mpf(self.v.numerator) / self.v.denominator * mpmath.sqrt(5)


SQRT5 = QSqrt5(0, 1)
RHO_MINUS = QSqrt5(Fraction(11, 2), Fraction(-5, 2))
RHO_PLUS = QSqrt5(Fraction(11, 2), Fraction(5, 2))


# ---------------------------------------------------------------------------
# defining polynomials
# ---------------------------------------------------------------------------

def cicy(z, w, a, b):
    """The five bilinear equations f_k = z_k w_k + a z_{k+1} w_k + b z_k w_{k+1}."""
    return [z[k] * w[k] + a * z[(k + 1) % 5] * w[k] + b * z[k] * w[(k + 1) % 5] for k in range(5)]


def steinerian_Fw(w, a, b):
    prod = 1
    for k in range(5):
        prod = prod * (w[k] + b * w[(k + 1) % 5])
    return a**5 * w[0] * w[1] * w[2] * w[3] * w[4] + prod


def hessian_Flambda(lam, a, b):
    l1, l2, l3, l4, l5 = lam
    L = (l1, l2, l3, l4, l5)

    def cyc(f):
        return sum(f(*[L[(i + k) % 5] for i in range(5)]) for k in range(5))

    return ((1 + a**5 + b**5) * l1 * l2 * l3 * l4 * l5
            + a**2 * b**2 * cyc(lambda p, q, r, s, t: p * q**2 * s**2)
            - a * b * cyc(lambda p, q, r, s, t: p * q * r * s**2))


def delpezzo_g1(v, a=1, b=1):
    s, t, u, vv, w = v
    return a * t * (u + a * vv) + b**3 * u * w


def delpezzo_g2(v, a=1, b=1):
    s, t, u, vv, w = v
    return a * w * (vv + a * s) - b**2 * s * vv


def dis0(x, y):
    return (1 - x - y) ** 5 - 625 * x * y * (1 - x - y) ** 2 + 3125 * x * y * (x * y - x - y)


# name -> (arity, degree, evaluator taking (point, a, b))
DEFINING = {
    **{f"cicy_f{k + 1}": (10, 2, (lambda k: lambda pt, a, b: cicy(pt[:5], pt[5:], a, b)[k])(k))
       for k in range(5)},
    "steinerian_Fw": (5, 5, lambda pt, a, b: steinerian_Fw(pt, a, b)),
    "hessian_Flambda": (5, 5, lambda pt, a, b: hessian_Flambda(pt, a, b)),
    "delpezzo_g1": (5, 2, lambda pt, a, b: delpezzo_g1(pt, a, b)),
    "delpezzo_g2": (5, 2, lambda pt, a, b: delpezzo_g2(pt, a, b)),
    "dis0": (2, 5, lambda pt, a, b: dis0(*pt)),
}


@dataclass(frozen=True)
class ParameterPair:
    a: object
    b: object

    @property
    def x(self):
        return -self.a**5

    @property
    def y(self):
        return -self.b**5


def eval_defining(name: str, point: Sequence, params: ParameterPair | Tuple = (1, 1),
                  p: int | None = None):
    if name not in DEFINING:
        raise KeyError(f"unknown polynomial {name!r}")
    arity, _, fn = DEFINING[name]
    if len(point) != arity:
        raise ValueError(f"{name} takes {arity} coordinates, got {len(point)}")
    a, b = (params.a, params.b) if isinstance(params, ParameterPair) else params
    val = fn(tuple(point), a, b)
    if p is not None:
        val = Fraction(val)
        return val.numerator * pow(val.denominator, -1, p) % p
    return val


# ---------------------------------------------------------------------------
# discriminants
# ---------------------------------------------------------------------------

def _roots_of_unity(a, b):
    if isinstance(a, (complex, float)) or isinstance(b, (complex, float)):
        return [cmath.exp(2j * cmath.pi * k / 5) for k in range(5)], complex
    return [Cyclo5.mu(k) for k in range(5)], Cyclo5


def discriminant_product(which: str, a, b):
    """prod_{k,l}(mu^k a + mu^l b + 1), with the extra factors of the variant.

    ``steinerian`` multiplies by a^5, ``hessian`` by prod_k (a - mu^k b)^2.
    Exact inputs give an exact rational; complex inputs a complex float.
    """
    mus, kind = _roots_of_unity(a, b)
    total = 1
    for mk in mus:
        for ml in mus:
            total = total * (mk * a + ml * b + 1)
    if which == "steinerian":
        total = total * a**5
    elif which == "hessian":
        for mk in mus:
            total = total * (a - mk * b) ** 2
    elif which != "cicy":
        raise ValueError(f"unknown discriminant {which!r}")
    if kind is Cyclo5:
        return Cyclo5._lift(total).rational()
    return total


def dis0_line_check(a) -> bool:
    """dis0(-a^5, -b^5) == 0 with b = -1 - a (the rational parametrisation)."""
    a = Fraction(a)
    if a in (0, -1):
        raise ValueError("a must avoid 0 and -1")
    b = -1 - a
    return dis0(-a**5, -b**5) == 0


def dis0_real_slice(alpha_range=(-2.0, 2.0), resolution: int = 200, dps: int = 50):
    """Points of dis0 = 0 with Im x = Im y, parametrised along a + b + 1 = 0.

    a = -1/2 + (alpha + i beta), b = -1/2 - (alpha + i beta); for each alpha the
    real roots beta of Im(a^5) = Im(b^5) give up to five branches.  Returns
    (rows, skipped) with rows (re_x, re_y, im_x, branch_id, alpha).
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    rows, skipped = [], []
    with mpmath.workdps(dps):
        lo, hi = mpmath.mpf(alpha_range[0]), mpmath.mpf(alpha_range[1])
        for i in range(resolution):
            al = lo + (hi - lo) * i / (resolution - 1)
            try:
                betas = _slice_betas(al)
            except (mpmath.libmp.libhyper.NoConvergence, ZeroDivisionError):
                skipped.append(float(al))
                continue
            for bid, be in enumerate(betas):
                z = al + 1j * be
                a, b = -mpmath.mpf(1) / 2 + z, -mpmath.mpf(1) / 2 - z
                x, y = -a**5, -b**5
                if abs(dis0(x, y)) > mpmath.mpf(10) ** (-20) * (1 + abs(x) + abs(y)) ** 5:
                    skipped.append(float(al))
                    continue
                rows.append((float(x.real), float(y.real), float(x.imag), bid, float(al)))
    return rows, skipped


def _slice_betas(al):
    """Real beta solving Im((-1/2+z)^5 - (-1/2-z)^5) = 0, z = al + i beta, sorted."""
    # (-1/2+z)^5 - (-1/2-z)^5 = (z-1/2)^5 + (z+1/2)^5 = 2 z^5 + 5 z^3 + (5/8) z  (odd terms)
    # Im of that as a polynomial in beta
    B = mpmath.mpf(1)
    coeffs = []  # highest degree first in beta
    # expand via binomials: z^k = sum_j C(k,j) al^(k-j) (i beta)^j
    poly = [mpmath.mpf(0)] * 6
    for k, c in ((5, 2), (3, 5), (1, mpmath.mpf(5) / 8)):
        for j in range(k + 1):
            if j % 4 == 1:
                sgn = 1
            elif j % 4 == 3:
                sgn = -1
            else:
                continue
            poly[j] += c * mpmath.binomial(k, j) * al ** (k - j) * sgn * B
    coeffs = [poly[j] for j in range(5, -1, -1)]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=60)
    real = [mpmath.re(r) for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-30)]
    # branch 0 is the obvious beta = 0 solution
    return sorted(real, key=lambda b: (abs(b) > mpmath.mpf(10) ** (-30), b))


# ---------------------------------------------------------------------------
# special points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularPoint:
    name: str
    x: QSqrt5
    y: QSqrt5
    line: str

    def complex(self) -> Tuple[complex, complex]:
        return complex(self.x), complex(self.y)


def _sp(name, x, y, line):
    return SingularPoint(name, QSqrt5._lift(x), QSqrt5._lift(y), line)


# affine (x, y); the bracket notation [-x : -y : 1] of the projective plane
# is translated here once.  l0 = {x = y}, l1 = {y = -1}, l2 = {x = -1}.
SINGULAR_POINTS = (
    _sp("p1", RHO_MINUS, RHO_MINUS, "l0"),
    _sp("p2", Fraction(1, 32), Fraction(1, 32), "l0"),
    _sp("p3", RHO_PLUS, RHO_PLUS, "l0"),
    _sp("p1'", -RHO_PLUS, -1, "l1"),
    _sp("p2'", 32, -1, "l1"),
    _sp("p3'", -RHO_MINUS, -1, "l1"),
    _sp("p1''", -1, -RHO_PLUS, "l2"),
    _sp("p2''", -1, 32, "l2"),
    _sp("p3''", -1, -RHO_MINUS, "l2"),
)

CENTER = (Fraction(-1), Fraction(-1))


def singular_point(name: str) -> SingularPoint:
    for p in SINGULAR_POINTS:
        if p.name == name:
            return p
    raise KeyError(name)


def singular_locus(x, y):
    """x * y * dis0(x, y); its zero set is the affine part of the singular locus."""
    return x * y * dis0(x, y)
