"""Reference matrices and point counts the computations are checked against.

Entries are transcribed verbatim.  Three transcribed matrices contain entries
that contradict identities holding for everything else (``TY_TRANSCRIBED``,
``M1_TRANSCRIBED``, ``M2_TRANSCRIBED``); the corrected versions sit next to
them and the test-suite proves each correction.
"""
from __future__ import annotations

from fractions import Fraction as F
from typing import Dict, Tuple

Rows = Tuple[Tuple[int, ...], ...]

SIGMA0: Rows = (
    (0, 0, 0, 0, 0, 1),
    (0, 0, 0, 0, 1, 0),
    (0, 0, 0, 1, 0, 0),
    (0, 0, -1, 0, 0, 0),
    (0, -1, 0, 0, 0, 0),
    (-1, 0, 0, 0, 0, 0),
)

TX: Rows = (
    (1, 0, 0, 0, 0, 0),
    (1, 1, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0),
    (5, 10, 10, 1, 0, 0),
    (2, 5, 10, 0, 1, 0),
    (-5, -3, -5, 0, -1, 1),
)

# second row as transcribed; the x <-> y mirror of TX forces (0, 1, 0, 0, 0, 0)
TY_TRANSCRIBED: Rows = (
    (1, 0, 0, 0, 0, 0),
    (1, 1, 0, 0, 0, 0),
    (1, 0, 1, 0, 0, 0),
    (2, 10, 5, 1, 0, 0),
    (5, 10, 10, 0, 1, 0),
    (-5, -5, -3, -1, 0, 1),
)
TY: Rows = (TY_TRANSCRIBED[0], (0, 1, 0, 0, 0, 0)) + TY_TRANSCRIBED[2:]

TZ: Rows = (
    (41, -17, -17, 6, 6, 15),
    (4, 0, -6, -2, 3, 1),
    (4, -6, 0, 3, -2, 1),
    (-72, 28, 23, -13, -9, -28),
    (-72, 23, 28, -9, -13, -28),
    (-30, 18, 18, -4, -4, -9),
)

TP1_1: Rows = (
    (-4, 5, 2, -1, 0, -1),
    (0, 1, 0, 0, 0, 0),
    (-5, 5, 3, -1, 0, -1),
    (-10, 10, 4, -1, 0, -2),
    (-25, 25, 10, -5, 1, -5),
    (25, -25, -10, 5, 0, 6),
)

TP1_2: Rows = (
    (6, -2, -5, 0, 1, 1),
    (5, -1, -5, 0, 1, 1),
    (0, 0, 1, 0, 0, 0),
    (25, -10, -25, 1, 5, 5),
    (10, -4, -10, 0, 3, 2),
    (-25, 10, 25, 0, -5, -4),
)

TP2: Rows = (
    (1, 0, 0, 0, 0, 1),
    (0, 1, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0),
    (0, 0, 0, 1, 0, 0),
    (0, 0, 0, 0, 1, 0),
    (0, 0, 0, 0, 0, 1),
)

TP3_1: Rows = (
    (41, -4, -20, 0, 12, 16),
    (30, -2, -15, 0, 9, 12),
    (0, 0, 1, 0, 0, 0),
    (50, -5, -25, 1, 15, 20),
    (10, -1, -5, 0, 4, 4),
    (-100, 10, 50, 0, -30, -39),
)

TP3_2: Rows = (
    (-39, 20, 4, -12, 0, -16),
    (0, 1, 0, 0, 0, 0),
    (-30, 15, 4, -9, 0, -12),
    (-10, 5, 1, -2, 0, -4),
    (-50, 25, 5, -15, 1, -20),
    (100, -50, -10, 30, 0, 41),
)

MONODROMIES: Dict[str, Rows] = {
    "Tx": TX, "Ty": TY, "Tp1_1": TP1_1, "Tp1_2": TP1_2, "Tp2": TP2,
    "Tp3_1": TP3_1, "Tp3_2": TP3_2, "Tz": TZ,
}

C10: Rows = (
    (-4, 8, 4, -2, 1, 0),
    (-4, 4, 2, -1, 0, -1),
    (3, 2, 1, 0, 1, 2),
    (6, 4, 0, 1, 2, 4),
    (17, 0, -4, 2, 4, 8),
    (0, -17, -6, 3, -4, -4),
)

C20: Rows = (
    (4, -4, -8, -1, 2, 0),
    (4, -2, -4, 0, 1, 1),
    (-3, -1, -2, -1, 0, -2),
    (-6, 0, -4, -2, -1, -4),
    (-17, 4, 0, -4, -2, -8),
    (0, 6, 17, 4, -3, 4),
)

# C10 @ C20 as transcribed: (-1) + antidiag(-1,-1) + antidiag(-1,-1) + (-1)
C10_C20_BLOCK: Rows = (
    (-1, 0, 0, 0, 0, 0),
    (0, 0, -1, 0, 0, 0),
    (0, -1, 0, 0, 0, 0),
    (0, 0, 0, 0, -1, 0),
    (0, 0, 0, -1, 0, 0),
    (0, 0, 0, 0, 0, -1),
)

M1_TRANSCRIBED = (
    (F(-1), F(0), F(-1), F(-7, 11), F(0), F(-58, 121)),
    (F(0), F(-1), F(1), F(0), F(0), F(-3, 11)),
    (F(0), F(0), F(0), F(1), F(0), F(-6, 11)),
    (F(0), F(0), F(0), F(1), F(0), F(26, 11)),
    (F(0), F(0), F(0), F(1), F(-1), F(13, 11)),
    (F(0), F(0), F(0), F(0), F(0), F(-1)),
)
M1 = M1_TRANSCRIBED[:2] + ((F(0), F(0), F(1), F(0), F(0), F(-6, 11)),) + M1_TRANSCRIBED[3:]

M2_TRANSCRIBED = (
    (F(-1), F(-1), F(0), F(0), F(-7, 11), F(0)),
    (F(0), F(1), F(-1), F(0), F(0), F(3, 11)),
    (F(0), F(1), F(0), F(0), F(0), F(-3)),
    (F(0), F(0), F(0), F(0), F(1), F(13, 11)),
    (F(0), F(0), F(0), F(-1), F(1), F(-13, 11)),
    (F(0), F(0), F(0), F(0), F(0), F(-1)),
)
M2 = M2_TRANSCRIBED[:2] + ((F(0), F(1), F(0), F(0), F(0), F(-3, 11)),) + M2_TRANSCRIBED[3:]

R_ALPHA1: Rows = (
    (11, -7, -7, 1, 1, 2),
    (5, -1, -5, 0, 1, 1),
    (5, -5, -1, 1, 0, 1),
    (35, -20, -29, 3, 5, 7),
    (35, -29, -20, 5, 3, 7),
    (-50, 35, 35, -5, -5, -9),
)

R_0: Rows = (
    (1, 0, 0, 0, 0, 0),
    (1, 1, 0, 0, 0, 0),
    (1, 0, 1, 0, 0, 0),
    (17, 20, 15, 1, 0, 0),
    (17, 15, 20, 0, 1, 0),
    (-20, -18, -18, -1, -1, 1),
)

R_CONIFOLD: Rows = TP2

# R_inf R_alpha2 R_inf^-1, the form used for the block decomposition
R_ALPHA2_CONJ: Rows = (
    (1, 5, 5, 0, 0, 2),
    (0, 2, -1, -2, 2, 0),
    (0, -1, 2, 2, -2, 0),
    (0, -12, -13, 0, 1, -5),
    (0, -13, -12, 1, 0, -5),
    (0, 0, 0, 0, 0, 1),
)

R_INF: Rows = TZ

R_MATRICES: Dict[str, Rows] = {
    "R_alpha1": R_ALPHA1, "R_0": R_0, "R_1/32": R_CONIFOLD,
    "R_inf R_alpha2 R_inf^-1": R_ALPHA2_CONJ, "R_inf": R_INF,
}

_h = F(1, 2)
# Pi~ = P Pi with Pi ordered (w0, w1^(1), w2^(1), w2^(2), w1^(2), w^(3))
BASIS_CHANGE_P = (
    (F(1), F(0), F(0), F(0), F(0), F(0)),
    (F(0), _h, _h, F(0), F(0), F(0)),
    (F(0), F(0), F(0), _h, _h, F(0)),
    (F(0), F(0), F(0), F(0), F(0), _h),
    (F(0), _h, -_h, F(0), F(0), F(0)),
    (F(0), F(0), F(0), -_h, _h, F(0)),
)

POINT_COUNTS: Dict[int, int] = {73: 669880, 89: 1118250, 97: 1408330}
H21_PRIMES: Tuple[int, ...] = (59, 61, 71, 73, 89, 97)
H11 = 52
H21 = 2


def as_dict() -> dict:
    """Everything above as plain JSON-ready data."""
    def enc(rows):
        return [[str(v) if isinstance(v, F) and v.denominator != 1 else int(v) for v in r]
                for r in rows]

    return {
        "sigma0": enc(SIGMA0),
        "monodromy": {k: enc(v) for k, v in MONODROMIES.items()},
        "monodromy_transcribed": {"Ty": enc(TY_TRANSCRIBED)},
        "connection": {"C10": enc(C10), "C20": enc(C20), "C10C20": enc(C10_C20_BLOCK)},
        "center": {"M1": enc(M1), "M2": enc(M2)},
        "center_transcribed": {"M1": enc(M1_TRANSCRIBED), "M2": enc(M2_TRANSCRIBED)},
        "R": {k: enc(v) for k, v in R_MATRICES.items()},
        "P": enc(BASIS_CHANGE_P),
        "point_counts": {str(p): n for p, n in POINT_COUNTS.items()},
        "h21_primes": list(H21_PRIMES),
        "hodge": {"h11": H11, "h21": H21},
    }
