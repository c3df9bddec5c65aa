import time
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from reyemirror import golden
from reyemirror.symplectic_lattice import (
    PRODUCT_ORDER, SIGMA0, BasisChangeP, BlockDecompositionError, CertificationError,
    RelationLedger, block_decompose, build_r_matrices, certify, identity, jordan_profile,
    product_identity, qmat, symplectic_check, to_rows, verify_relations,
)

R_KEYS = ("R_alpha1", "R_0", "R_1/32", "R_inf R_alpha2 R_inf^-1", "R_inf")


@pytest.fixture(scope="module")
def ledger():
    return RelationLedger.builtin()


def test_form_invariants():
    assert SIGMA0.check_invariants()


def test_symplectic_examples():
    assert symplectic_check(identity()).ok
    assert symplectic_check(golden.TZ).ok
    bad = symplectic_check([[2 if i == j == 0 else int(i == j) for j in range(6)] for i in range(6)])
    assert not bad and any(v != 0 for r in bad.defect for v in r)


@pytest.mark.parametrize("name", list(golden.MONODROMIES) + ["C10", "C20"])
def test_reference_matrices_in_sp6z(name):
    M = qmat(golden.MONODROMIES.get(name) or getattr(golden, name))
    assert symplectic_check(M).ok and M.det() == 1


def test_transcribed_ty_is_not_symplectic():
    assert not symplectic_check(golden.TY_TRANSCRIBED).ok
    assert symplectic_check(golden.TY).ok


def test_wrong_shape():
    with pytest.raises(ValueError):
        symplectic_check([[1, 0], [0, 1]])


def test_relations_builtin_fast(ledger):
    t0 = time.perf_counter()
    rep = verify_relations(ledger)
    assert time.perf_counter() - t0 < 1.0
    assert rep.all_passed, rep.failed()
    assert len(rep.results) >= 25


def test_conjugation_direction_of_tp32(ledger):
    """Conjugating the other way round does not give Tp3_2."""
    L = ledger
    C20 = L["C20"]
    inner = L["Tx"].inv() * L["Ty"] * L["Tp2"].inv() * L["Ty"].inv() * L["Tx"]
    assert L["Tp3_2"] == C20.inv() * inner * C20
    assert L["Tp3_2"] != C20 * inner * C20.inv()


def test_tp12_relation_order(ledger):
    L = ledger
    assert L["Tp1_2"] == L["Tx"] * L["Tp2"] * L["Tx"].inv()
    assert L["Tp1_2"] != L["Tx"].inv() * L["Tp2"] * L["Tx"]


def test_product_identity_order(ledger):
    assert product_identity(ledger)
    assert not product_identity(ledger, tuple(reversed(PRODUCT_ORDER)))


def test_broken_ledger_reports_failures(ledger):
    mats = dict(ledger.matrices)
    mats["Tp2"] = identity()
    rep = verify_relations(RelationLedger(mats, "broken"))
    assert not rep.all_passed
    assert "Tp1_2 = Tx Tp2 Tx^-1" in rep.failed()


def test_r_matrices(ledger):
    R = build_r_matrices(ledger)
    for k in R_KEYS:
        assert R[k] == qmat(golden.R_MATRICES[k])
    assert R["R_0"] == ledger["Ty"] * ledger["Tx"]
    assert to_rows(R["R_0"], True)[3] == (17, 20, 15, 1, 0, 0)
    assert (R["R_1/32"] - identity()).rank() == 1
    assert R["R_inf"] == ledger["Tz"]


def test_basis_change():
    P = BasisChangeP()
    assert P.is_invertible() and P.kills_diagonal()
    # the uncorrected reading (w1 - w1) has a zero row
    rows = [list(r) for r in P.rows]
    rows[4] = [Fraction(0)] * 6
    assert qmat(rows).det() == 0


@pytest.mark.parametrize("key", R_KEYS)
def test_block_decomposition(ledger, key):
    R = build_r_matrices(ledger)[key]
    M, N = block_decompose(BasisChangeP(), R)
    assert len(M) == 4 and len(N) == 2


def test_block_regressions(ledger):
    R = build_r_matrices(ledger)
    N = {k: block_decompose(BasisChangeP(), R[k])[1] for k in R}
    assert N["R_alpha1"] == ((4, 1), (-9, -2))
    assert N["R_0"] == ((1, 0), (-5, 1))
    assert N["R_1/32"] == ((1, 0), (0, 1))
    assert N["R_inf R_alpha2 R_inf^-1"] == ((3, 4), (-1, -1))
    assert N["R_inf"] == ((6, 5), (-5, -4))
    M = block_decompose(BasisChangeP(), R["R_1/32"])[0]
    off = [(i, j) for i in range(4) for j in range(4) if M[i][j] != (i == j)]
    assert off == [(0, 3)] and M[0][3] == 2


@pytest.mark.parametrize("key", ["R_0", "R_inf"])
def test_maximal_unipotent_blocks(ledger, key):
    R = build_r_matrices(ledger)[key]
    M = qmat(block_decompose(BasisChangeP(), R)[0])
    N = M - identity(4)
    assert N * N * N != qmat([[0] * 4] * 4)
    assert N * N * N * N == qmat([[0] * 4] * 4)
    assert jordan_profile(R) == (4, 2)


def test_block_failure_reports_entries():
    with pytest.raises(BlockDecompositionError) as e:
        block_decompose(BasisChangeP(), golden.TX)
    assert e.value.offending


def test_jordan_examples():
    assert jordan_profile(identity()) == (1,) * 6
    with pytest.raises(ValueError):
        jordan_profile(qmat([[2 if i == j else 0 for j in range(6)] for i in range(6)]))


@given(st.lists(st.sampled_from(list(golden.MONODROMIES)), min_size=1, max_size=6))
def test_words_stay_symplectic(word):
    M = identity()
    for w in word:
        M = M * qmat(golden.MONODROMIES[w])
    assert symplectic_check(M).ok and M.det() == 1


@given(st.lists(st.lists(st.floats(-1e-6, 1e-6), min_size=6, max_size=6), min_size=6, max_size=6))
def test_certify_rounds_small_noise(noise):
    approx = [[golden.TZ[i][j] + noise[i][j] for j in range(6)] for i in range(6)]
    c = certify("Tz", approx)
    assert c.entries == golden.TZ and c.symplectic and c.residual < 1e-4
    assert c.to_json()["matrix"][0] == [41, -17, -17, 6, 6, 15]


def test_certify_refuses():
    noisy = [[v + 0.3 for v in r] for r in golden.TZ]
    with pytest.raises(CertificationError):
        certify("Tz", noisy)
    with pytest.raises(CertificationError):
        certify("diag", [[2 if i == j == 0 else int(i == j) for j in range(6)] for i in range(6)])
    with pytest.raises(CertificationError):
        certify("Tz", golden.TZ, tolerance=0.0)
