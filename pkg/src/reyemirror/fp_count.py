"""Point counts over F_p for the quintic Z and the del Pezzo surface E1 at a = b = 1.

Projective points are enumerated chart by chart: chart k has w_k = 1,
w_j = 0 for j > k and w_0..w_{k-1} free, so the charts partition P^4(F_p).
The quintic has degree at most 2 in every single coordinate, which lets the
last free coordinate be solved through a Legendre symbol instead of a loop.
"""
from __future__ import annotations

import csv
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from sympy import isprime

from .geometry_poly import delpezzo_g1, delpezzo_g2, steinerian_Fw

BAD_PRIMES = frozenset({2, 3, 5, 11})
H_RANGE = range(0, 53)
THREADS_ENV = "REYEMIRROR_THREADS"


@dataclass(frozen=True)
class PrimeField:
    p: int
    chi: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"{self.p} is not prime")
        chi = np.full(self.p, -1, dtype=np.int64)
        chi[0] = 0
        chi[(np.arange(1, self.p, dtype=np.int64) ** 2) % self.p] = 1
        object.__setattr__(self, "chi", chi)


@lru_cache(maxsize=64)
def field_of(p: int) -> PrimeField:
    return PrimeField(p)


def good_prime(p: int) -> bool:
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    return p not in BAD_PRIMES


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# vectorised polynomials mod p
# ---------------------------------------------------------------------------

def _quintic(w, p):
    mono = w[0]
    for k in range(1, 5):
        mono = mono * w[k] % p
    prod = (w[0] + w[1]) % p
    for k in range(1, 5):
        prod = prod * ((w[k] + w[(k + 1) % 5]) % p) % p
    return (mono + prod) % p


def _quintic_partials(w, p):
    """The five partial derivatives of the quintic, mod p."""
    lin = [(w[k] + w[(k + 1) % 5]) % p for k in range(5)]
    out = []
    for j in range(5):
        mono = 1
        for i in range(5):
            if i != j:
                mono = mono * w[i] % p
        # w_j sits in the factors j-1 and j
        a = 1
        for i in range(5):
            if i != j:
                a = a * lin[i] % p
        b = 1
        for i in range(5):
            if i != (j - 1) % 5:
                b = b * lin[i] % p
        out.append((mono + a + b) % p)
    return out


def _delpezzo(w, p):
    s, t, u, v, x = w
    return (t * ((u + v) % p) + u * x) % p, (x * ((v + s) % p) - s * v) % p


# ---------------------------------------------------------------------------
# chart enumeration
# ---------------------------------------------------------------------------

def chart_sizes(p: int, n: int = 5) -> List[int]:
    return [p**k for k in range(n)]


def _grid(p: int, nfree: int, first: Optional[int]):
    """Free coordinates of one chart as int64 columns; ``first`` pins w_0."""
    if nfree == 0:
        return []
    if first is None:
        axes = [np.arange(p, dtype=np.int64)] * nfree
    else:
        axes = [np.array([first], dtype=np.int64)] + [np.arange(p, dtype=np.int64)] * (nfree - 1)
    mesh = np.meshgrid(*axes, indexing="ij")
    return [m.ravel() for m in mesh]


def _chart_coords(p: int, k: int, free_cols, size: int):
    ones = np.ones(size, dtype=np.int64)
    zeros = np.zeros(size, dtype=np.int64)
    return list(free_cols) + [ones] + [zeros] * (4 - k)


def _count_quintic_slice(p: int, k: int, first: Optional[int]) -> int:
    """Chart k points with the quintic zero, w_{k-1} solved as a quadratic."""
    if k == 0:
        return int(_quintic([np.ones(1, dtype=np.int64)] + [np.zeros(1, dtype=np.int64)] * 4, p)[0] == 0)
    chi = field_of(p).chi
    others = _grid(p, k - 1, first if k > 1 else None)
    size = len(others[0]) if others else 1
    vals = []
    for v in (0, 1, p - 1):
        col = np.full(size, v, dtype=np.int64)
        vals.append(_quintic(_chart_coords(p, k, others + [col], size), p))
    f0, f1, fm = vals
    inv2 = (p + 1) // 2
    A = ((f1 + fm) * inv2 - f0) % p
    B = ((f1 - fm) * inv2) % p
    C = f0
    disc = (B * B - 4 * A * C) % p
    roots = np.where(A != 0, 1 + chi[disc], np.where(B != 0, 1, np.where(C == 0, p, 0)))
    return int(roots.sum())


def _count_grid_slice(p: int, k: int, first: Optional[int], equations: str) -> int:
    """Chart k points where every equation vanishes, by full enumeration."""
    cols = _grid(p, k, first)
    size = len(cols[0]) if cols else 1
    w = _chart_coords(p, k, cols, size)
    if equations == "quintic":
        ok = _quintic(w, p) == 0
    elif equations == "delpezzo":
        g1, g2 = _delpezzo(w, p)
        ok = (g1 == 0) & (g2 == 0)
    elif equations == "none":
        ok = np.ones(size, dtype=bool)
    else:
        raise ValueError(equations)
    return int(np.count_nonzero(ok))


def _slices(p: int, split_from: int = 2):
    """Work units: small charts whole, larger ones split along w_0."""
    units = []
    for k in range(5):
        if k < split_from:
            units.append((k, None))
        else:
            units += [(k, a) for a in range(p)]
    return units


def _run(tasks: Sequence[Tuple[Callable, tuple]], threads: int) -> int:
    if threads <= 1:
        return sum(fn(*args) for fn, args in tasks)
    with ProcessPoolExecutor(max_workers=threads) as ex:
        futures = [ex.submit(fn, *args) for fn, args in tasks]
        return sum(f.result() for f in futures)


def count_chart_points(p: int, equations: str = "none", threads: int = 1) -> int:
    """Generic chart enumeration; with ``equations='none'`` it counts all of P^4."""
    field_of(p)
    tasks = [(_count_grid_slice, (p, k, a, equations)) for k, a in _slices(p)]
    return _run(tasks, threads)


def count_quintic(p: int, threads: int = 1) -> int:
    """#{[w] in P^4(F_p) : F_w(w) = 0} at a = b = 1."""
    field_of(p)
    if p == 2:
        return count_chart_points(p, "quintic", threads)
    tasks = [(_count_quintic_slice, (p, k, a if k > 1 else None)) for k, a in _slices(p, 2)]
    return _run(tasks, threads)


def count_delpezzo(p: int, threads: int = 1) -> int:
    """#{[S:T:U:V:W] in P^4(F_p) : g1 = g2 = 0} at a = b = 1."""
    return count_chart_points(p, "delpezzo", threads)


# ---------------------------------------------------------------------------
# brute-force oracles, independent of the chart code
# ---------------------------------------------------------------------------

def _projective_brute(p: int, pred: Callable[[Tuple[int, ...]], bool]) -> int:
    hits = 0
    for v in itertools.product(range(p), repeat=5):
        if any(v) and pred(v):
            hits += 1
    assert hits % (p - 1) == 0
    return hits // (p - 1)


def count_quintic_brute(p: int) -> int:
    return _projective_brute(p, lambda v: steinerian_Fw(v, 1, 1) % p == 0)


def count_delpezzo_brute(p: int) -> int:
    return _projective_brute(p, lambda v: delpezzo_g1(v) % p == 0 and delpezzo_g2(v) % p == 0)


# ---------------------------------------------------------------------------
# singular points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularityProbe:
    p: int
    singular_points: int
    expected: int

    @property
    def excess(self) -> int:
        return self.singular_points - self.expected


def singularity_probe(p: int) -> SingularityProbe:
    """Count F_p points where the quintic and its five partials vanish.

    At good primes the count is 15(p - 1); extra points mark a degenerate
    reduction.  Enumerates all of P^4, so it is meant for small p.
    """
    field_of(p)
    total = 0
    for k in range(5):
        cols = _grid(p, k, None)
        size = len(cols[0]) if cols else 1
        w = _chart_coords(p, k, cols, size)
        ok = _quintic(w, p) == 0
        for d in _quintic_partials(w, p):
            ok &= d == 0
        total += int(np.count_nonzero(ok))
    return SingularityProbe(p, total, 15 * (p - 1))


# ---------------------------------------------------------------------------
# assembly and the Hodge number certificate
# ---------------------------------------------------------------------------

def assembled_count(p: int, n_z: int, n_e1: int) -> int:
    return n_z + 10 * n_e1 + 30 * p * p + 40 * p - 10


def weil_ok(p: int, h21: int, n_x: int) -> bool:
    """|1 + (50 + h)(p + p^2) + p^3 - n_X| <= (2 + 2h) p^(3/2), in integers."""
    d = 1 + (50 + h21) * (p + p * p) + p**3 - n_x
    return d * d <= (2 + 2 * h21) ** 2 * p**3


@dataclass(frozen=True)
class CountReport:
    p: int
    n_Z: int
    n_E1: int
    n_X: int
    t3: int
    feasible_h21: Tuple[int, ...]

    @classmethod
    def from_counts(cls, p: int, n_z: int, n_e1: int) -> "CountReport":
        n_x = assembled_count(p, n_z, n_e1)
        t3 = 1 + 52 * (p + p * p) + p**3 - n_x
        feas = tuple(h for h in H_RANGE if weil_ok(p, h, n_x))
        return cls(p, n_z, n_e1, n_x, t3, feas)

    @property
    def weil_bound_ok(self) -> bool:
        """|t3| <= 6 p^(3/2), the bound for b3 = 6."""
        return self.t3 * self.t3 <= 36 * self.p**3

    def to_json(self) -> dict:
        return {"p": self.p, "n_Z": self.n_Z, "n_E1": self.n_E1, "n_X": self.n_X,
                "t3": self.t3, "feasible_h21": list(self.feasible_h21),
                "weil_bound_ok": self.weil_bound_ok}


class CountCache:
    """CSV rows (p, n_Z, n_E1, n_X, t3)."""

    header = ("p", "n_Z", "n_E1", "n_X", "t3")

    def __init__(self, path: Optional[os.PathLike] = None):
        self.path = Path(path) if path else None
        self.rows: Dict[int, CountReport] = {}
        if self.path and self.path.exists():
            with open(self.path, newline="") as fh:
                for r in csv.DictReader(fh):
                    rep = CountReport.from_counts(int(r["p"]), int(r["n_Z"]), int(r["n_E1"]))
                    if rep.n_X != int(r["n_X"]) or rep.t3 != int(r["t3"]):
                        raise ValueError(f"inconsistent cache row for p={r['p']}")
                    self.rows[rep.p] = rep

    def get(self, p: int) -> Optional[CountReport]:
        return self.rows.get(p)

    def put(self, rep: CountReport) -> None:
        self.rows[rep.p] = rep
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w", newline="") as fh:
                wr = csv.writer(fh)
                wr.writerow(self.header)
                for q in sorted(self.rows):
                    r = self.rows[q]
                    wr.writerow((r.p, r.n_Z, r.n_E1, r.n_X, r.t3))


class BadPrimeError(ValueError):
    pass


def assemble_count(p: int, threads: int = 1, cache: Optional[CountCache] = None) -> CountReport:
    if not good_prime(p):
        raise BadPrimeError(f"{p} is not a good prime")
    if cache is not None and cache.get(p) is not None:
        return cache.get(p)
    rep = CountReport.from_counts(p, count_quintic(p, threads), count_delpezzo(p, threads))
    if cache is not None:
        cache.put(rep)
    return rep


class EmptyFeasibleSet(ValueError):
    pass


def certify_h21(primes: Iterable[int], threads: int = 1, cache: Optional[CountCache] = None) -> Set[int]:
    """Values of h^{2,1} in [0, 52] compatible with the counts at every prime."""
    feasible = set(H_RANGE)
    for p in primes:
        feasible &= set(assemble_count(p, threads, cache).feasible_h21)
    if not feasible:
        raise EmptyFeasibleSet("no h^{2,1} is compatible with the counts")
    return feasible
