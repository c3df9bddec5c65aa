"""Exact integer/rational matrix algebra over the symplectic form Sigma0.

Monodromy matrices act on the period vector from the left and the map from
loops to matrices reverses products: continuing along g1 then g2 gives the
matrix rho(g2) @ rho(g1).  Every identity below is written directly as a
matrix identity with that order already applied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from flint import acb, ctx, fmpq, fmpq_mat

from . import golden

Rows = Tuple[Tuple[int, ...], ...]


def qmat(rows) -> fmpq_mat:
    """fmpq_mat from nested sequences of ints, Fractions or fmpq."""
    rows = [list(r) for r in rows]
    flat = []
    for r in rows:
        for v in r:
            if isinstance(v, fmpq):
                flat.append(v)
            else:
                v = Fraction(v)
                flat.append(fmpq(v.numerator, v.denominator))
    return fmpq_mat(len(rows), len(rows[0]) if rows else 0, flat)


def to_rows(m: fmpq_mat, integral: bool = False):
    out = []
    for i in range(m.nrows()):
        row = []
        for j in range(m.ncols()):
            v = m[i, j]
            f = Fraction(int(v.p), int(v.q))
            row.append(int(f) if integral else f)
        out.append(tuple(row))
    return tuple(out)


def identity(n: int = 6) -> fmpq_mat:
    return qmat([[int(i == j) for j in range(n)] for i in range(n)])


def is_integral(m: fmpq_mat) -> bool:
    return all(m[i, j].q == 1 for i in range(m.nrows()) for j in range(m.ncols()))


# ---------------------------------------------------------------------------
# symplectic form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymplecticForm:
    matrix: Rows = golden.SIGMA0

    def as_qmat(self) -> fmpq_mat:
        return qmat(self.matrix)

    def check_invariants(self) -> bool:
        S = self.as_qmat()
        return S.transpose() == -S and S * S == -identity(len(self.matrix))


SIGMA0 = SymplecticForm()


@dataclass(frozen=True)
class SymplecticCheck:
    ok: bool
    defect: Tuple[Tuple[Fraction, ...], ...]

    def __bool__(self):
        return self.ok


def symplectic_check(M, form: SymplecticForm = SIGMA0) -> SymplecticCheck:
    """Exact test of tM S M == S; the defect tM S M - S is the witness."""
    M = M if isinstance(M, fmpq_mat) else qmat(M)
    if M.nrows() != 6 or M.ncols() != 6:
        raise ValueError("expected a 6x6 matrix")
    S = form.as_qmat()
    D = M.transpose() * S * M - S
    return SymplecticCheck(D == fmpq_mat(6, 6), to_rows(D))


# ---------------------------------------------------------------------------
# certification of numerically obtained matrices
# ---------------------------------------------------------------------------

class CertificationError(ValueError):
    """A numerical matrix failed to round to an integral symplectic matrix."""


@dataclass(frozen=True)
class CertifiedMatrix:
    name: str
    entries: Rows
    residual: float
    symplectic: bool
    path_hash: Optional[str] = None

    def as_qmat(self) -> fmpq_mat:
        return qmat(self.entries)

    @property
    def det(self) -> int:
        return int(self.as_qmat().det().p)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "matrix": [list(r) for r in self.entries],
            "residual": float(f"{self.residual:.3e}"),
            "symplectic": self.symplectic,
            "path_hash": self.path_hash,
        }


def _acb_distance(v: acb, k: int) -> float:
    old = ctx.prec
    ctx.prec = 4096       # the midpoint - k subtraction must not round
    try:
        return float(abs(v.mid() - k).mid())
    finally:
        ctx.prec = old


def certify(name: str, approx: Sequence[Sequence[complex]], tolerance: float = 1e-4,
            path_hash: Optional[str] = None) -> CertifiedMatrix:
    """Round to integers; refuse when the rounding residual reaches ``tolerance``.

    The residual counts the imaginary parts too.  A rounded matrix that is
    not symplectic with determinant 1 is also refused.
    """
    rows, worst = [], 0.0
    for r in approx:
        row = []
        for v in r:
            if isinstance(v, acb):
                k = round(float(v.real.mid()))
                worst = max(worst, _acb_distance(v, k))
            else:
                v = complex(v)
                k = round(v.real)
                worst = max(worst, abs(v - k))
            row.append(int(k))
        rows.append(tuple(row))
    rows = tuple(rows)
    if not worst < tolerance or math.isnan(worst):
        raise CertificationError(f"{name}: rounding residual {worst:.3e} >= {tolerance:.1e}")
    chk = symplectic_check(rows)
    if not chk.ok:
        raise CertificationError(f"{name}: rounded matrix is not symplectic")
    if qmat(rows).det() != 1:
        raise CertificationError(f"{name}: determinant is not 1")
    return CertifiedMatrix(name, rows, worst, True, path_hash)


# ---------------------------------------------------------------------------
# relation ledger
# ---------------------------------------------------------------------------

LEDGER_NAMES = ("Tx", "Ty", "Tp1_1", "Tp1_2", "Tp2", "Tp3_1", "Tp3_2", "Tz", "C10", "C20")


@dataclass
class RelationLedger:
    matrices: Dict[str, fmpq_mat]
    source: str = "builtin"

    def __getitem__(self, k) -> fmpq_mat:
        return self.matrices[k]

    @classmethod
    def builtin(cls) -> "RelationLedger":
        mats = {k: qmat(v) for k, v in golden.MONODROMIES.items()}
        mats["C10"] = qmat(golden.C10)
        mats["C20"] = qmat(golden.C20)
        return cls(mats, "builtin")

    @classmethod
    def from_matrices(cls, mats: Mapping[str, object], source: str = "computed") -> "RelationLedger":
        out = {}
        for k in LEDGER_NAMES:
            v = mats[k]
            if isinstance(v, CertifiedMatrix):
                v = v.entries
            out[k] = v if isinstance(v, fmpq_mat) else qmat(v)
        return cls(out, source)


@dataclass(frozen=True)
class RelationResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class RelationReport:
    source: str
    results: List[RelationResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failed(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]

    def to_json(self) -> dict:
        return {"source": self.source, "all_passed": self.all_passed,
                "results": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                            for r in self.results]}


def _primed(L: RelationLedger, which: str) -> Callable[[fmpq_mat], fmpq_mat]:
    C = L["C10"] if which == "'" else L["C20"]
    Ci = C.inv()
    return lambda T: Ci * T * C


def build_r_matrices(L: RelationLedger) -> Dict[str, fmpq_mat]:
    """The five matrices around the points of the diagonal line, plus R_alpha2."""
    inv = {k: L[k].inv() for k in ("Tp1_1", "Tp3_2", "Tz")}
    Ra2 = L["Tp3_1"] * inv["Tp3_2"]
    return {
        "R_alpha1": L["Tp1_2"] * inv["Tp1_1"],
        "R_0": L["Ty"] * L["Tx"],
        "R_1/32": L["Tp2"],
        "R_alpha2": Ra2,
        "R_inf R_alpha2 R_inf^-1": L["Tz"] * Ra2 * inv["Tz"],
        "R_inf": L["Tz"],
    }


PRODUCT_ORDER = ("R_inf", "R_alpha2", "R_alpha1", "R_0", "R_1/32")


def product_identity(L: RelationLedger, order: Sequence[str] = PRODUCT_ORDER) -> bool:
    R = build_r_matrices(L)
    acc = identity()
    for k in order:
        acc = acc * R[k]
    return acc == identity()


def verify_relations(L: RelationLedger, compare_r_display: bool = True) -> RelationReport:
    """Check every group identity in exact arithmetic; failures become report entries."""
    rep = RelationReport(L.source)
    Tx, Ty, Tz, Tp2 = L["Tx"], L["Ty"], L["Tz"], L["Tp2"]
    Tp11, Tp12, Tp31, Tp32 = L["Tp1_1"], L["Tp1_2"], L["Tp3_1"], L["Tp3_2"]
    C10, C20 = L["C10"], L["C20"]
    Txi, Tyi, Tp2i = Tx.inv(), Ty.inv(), Tp2.inv()
    p1, p2 = _primed(L, "'"), _primed(L, "''")

    def add(name, ok, detail=""):
        rep.results.append(RelationResult(name, bool(ok), detail))

    for k in LEDGER_NAMES:
        M = L[k]
        add(f"{k} in Sp(6,Z)", is_integral(M) and symplectic_check(M).ok and M.det() == 1)

    # generated from the conifold loop by the axis loops
    add("Tp1_1 = Ty Tp2^-1 Ty^-1", Tp11 == Ty * Tp2i * Tyi)
    add("Tp1_2 = Tx Tp2 Tx^-1", Tp12 == Tx * Tp2 * Txi)
    add("Tp3_1 = C10 Tx^-1 Ty Tp2 Ty^-1 Tx C10^-1",
        Tp31 == C10 * Txi * Ty * Tp2 * Tyi * Tx * C10.inv())
    add("Tp3_2 = C20^-1 Tx^-1 Ty Tp2^-1 Ty^-1 Tx C20",
        Tp32 == C20.inv() * Txi * Ty * Tp2i * Tyi * Tx * C20)
    # the loop around infinity seen from the other two charts
    for tag, f in (("'", p1), ("''", p2)):
        A = f(Tp12)
        add(f"Tz = Tp1{tag}_2 Tx{tag} Tp1{tag}_2^-1", Tz == A * f(Tx) * A.inv())
    add("Tp1_1^-1 Ty Tp1_1 = Tz''", Tp11.inv() * Ty * Tp11 == p2(Tz))
    add("Tz Tp3_1 Tz^-1 = Tp1'_1^-1", Tz * Tp31 * Tz.inv() == p1(Tp11).inv())
    add("Tz'' Tp3''_2 Tz''^-1 = Tp3_2", p2(Tz) * p2(Tp32) * p2(Tz).inv() == Tp32)
    add("Tp1_1 C10 C20 Tp1_2 = C10 C20", Tp11 * C10 * C20 * Tp12 == C10 * C20)

    R = build_r_matrices(L)
    add("R_inf R_alpha2 R_alpha1 R_0 R_1/32 = id", product_identity(L))
    if compare_r_display:
        for k, v in golden.R_MATRICES.items():
            add(f"{k} matches reference", R[k] == qmat(v))
    return rep


# ---------------------------------------------------------------------------
# basis change and block structure
# ---------------------------------------------------------------------------

class BlockDecompositionError(ValueError):
    def __init__(self, offending):
        super().__init__(f"nonzero off-block entries: {offending}")
        self.offending = offending


@dataclass(frozen=True)
class BasisChangeP:
    rows: Tuple[Tuple[Fraction, ...], ...] = golden.BASIS_CHANGE_P

    def as_qmat(self) -> fmpq_mat:
        return qmat(self.rows)

    def is_invertible(self) -> bool:
        return self.as_qmat().det() != 0

    def kills_diagonal(self) -> bool:
        """The last two rows vanish on vectors with w1 = w2 in both pairs."""
        P = self.as_qmat()
        for v in ((1, 0, 0, 0, 0, 0), (0, 1, 1, 0, 0, 0), (0, 0, 0, 1, 1, 0), (0, 0, 0, 0, 0, 1)):
            w = P * qmat([[c] for c in v])
            if w[4, 0] != 0 or w[5, 0] != 0:
                return False
        return True


def block_decompose(P: BasisChangeP, R) -> Tuple[Tuple[Tuple[Fraction, ...], ...],
                                                  Tuple[Tuple[Fraction, ...], ...]]:
    """Split P R P^-1 into its 4x4 and 2x2 diagonal blocks."""
    Pm = P.as_qmat()
    R = R if isinstance(R, fmpq_mat) else qmat(R)
    Rt = to_rows(Pm * R * Pm.inv())
    bad = [(i, j, Rt[i][j]) for i in range(6) for j in range(6)
           if (i < 4) != (j < 4) and Rt[i][j] != 0]
    if bad:
        raise BlockDecompositionError(bad)
    return tuple(r[:4] for r in Rt[:4]), tuple(r[4:] for r in Rt[4:])


def jordan_profile(M) -> Tuple[int, ...]:
    """Sizes of the Jordan blocks of a unipotent matrix, largest first."""
    M = M if isinstance(M, fmpq_mat) else qmat(M)
    n = M.nrows()
    N = M - identity(n)
    ranks = [n]
    P = identity(n)
    for _ in range(n):
        P = P * N
        ranks.append(P.rank())
    if ranks[-1] != 0:
        raise ValueError("matrix is not unipotent")
    # blocks of size >= k: ranks[k-1] - ranks[k]
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, n + 1)]
    sizes = []
    for k in range(n, 0, -1):
        exact = at_least[k - 1] - (at_least[k] if k < n else 0)
        sizes += [k] * exact
    return tuple(sizes)
