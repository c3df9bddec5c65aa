import pytest
from hypothesis import given, settings, strategies as st
from sympy import isprime

from reyemirror import golden
from reyemirror.fp_count import (
    BadPrimeError, CountCache, CountReport, EmptyFeasibleSet, PrimeField, assemble_count,
    assembled_count, certify_h21, count_chart_points, count_delpezzo, count_delpezzo_brute,
    count_quintic, count_quintic_brute, default_threads, good_prime, singularity_probe, weil_ok,
)

SMALL = [2, 3, 5, 7]


def test_good_prime_examples():
    assert not good_prime(11) and good_prime(73) and not good_prime(2)
    assert [p for p in range(2, 40) if isprime(p) and not good_prime(p)] == [2, 3, 5, 11]
    with pytest.raises(ValueError):
        good_prime(9)


def test_prime_field():
    F = PrimeField(7)
    assert [int(F.chi[a]) for a in range(7)] == [0, 1, 1, -1, 1, -1, -1]
    with pytest.raises(ValueError):
        PrimeField(15)


@pytest.mark.parametrize("p", SMALL)
def test_chart_partition(p):
    assert count_chart_points(p, "none") == 1 + p + p**2 + p**3 + p**4


@pytest.mark.parametrize("p", SMALL)
def test_quintic_matches_brute(p):
    assert count_quintic(p) == count_quintic_brute(p)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_delpezzo_matches_brute(p):
    assert count_delpezzo(p) == count_delpezzo_brute(p)


@pytest.mark.parametrize("p", [7, 13, 17, 19, 23])
def test_delpezzo_band(p):
    n = count_delpezzo(p)
    assert abs(n - p * p) <= 7 * p
    assert n == p * p + 3 * p + 1


def test_delpezzo_nodes_counted():
    from reyemirror.geometry_poly import delpezzo_g1, delpezzo_g2
    for v in [(1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0)]:
        assert delpezzo_g1(v) == delpezzo_g2(v) == 0


@pytest.mark.parametrize("p", [7, 13])
def test_parallel_equals_serial(p):
    assert count_quintic(p, threads=2) == count_quintic(p, threads=1)
    assert count_delpezzo(p, threads=2) == count_delpezzo(p, threads=1)
    assert count_chart_points(p, "none", threads=3) == count_chart_points(p, "none")


def test_threads_env(monkeypatch):
    monkeypatch.setenv("REYEMIRROR_THREADS", "4")
    assert default_threads() == 4
    monkeypatch.setenv("REYEMIRROR_THREADS", "junk")
    assert default_threads() == 1


def test_singularity_probe():
    assert singularity_probe(7).excess == 0
    assert singularity_probe(13).excess == 0
    assert singularity_probe(3).excess > 0
    assert singularity_probe(11).excess > 0


@given(st.integers(60, 400), st.integers(0, 10**6), st.integers(0, 10**4))
def test_assembly_formula(p, nz, ne):
    assert assembled_count(p, nz, ne) == nz + 10 * ne + 30 * p * p + 40 * p - 10


@given(st.sampled_from([59, 61, 71, 73, 89, 97]), st.integers(0, 52), st.integers(-10**4, 10**4))
def test_weil_ok_matches_float_bound(p, h, t):
    n = 1 + (50 + h) * (p + p * p) + p**3 - t
    exact = weil_ok(p, h, n)
    slack = abs(abs(t) - (2 + 2 * h) * p**1.5)
    if slack > 1e-6:
        assert exact == (abs(t) <= (2 + 2 * h) * p**1.5)


def test_bad_prime_refused():
    with pytest.raises(BadPrimeError):
        assemble_count(11)


@pytest.mark.parametrize("p", [73, 89, 97])
def test_point_counts(p, count_cache):
    rep = assemble_count(p, cache=count_cache)
    assert rep.n_X == golden.POINT_COUNTS[p]
    assert rep.weil_bound_ok
    assert 2 in rep.feasible_h21


def test_per_piece_regression(count_cache):
    pieces = {p: (assemble_count(p, cache=count_cache).n_Z, assemble_count(p, cache=count_cache).n_E1)
              for p in (73, 89, 97)}
    assert pieces == {73: (451610, 5549), 89: (795180, 8189), 97: (1025180, 9701)}
    assert assemble_count(73, cache=count_cache).t3 == 42


def test_certify_h21(count_cache):
    assert certify_h21(golden.H21_PRIMES, cache=count_cache) == {2}
    assert all(count_cache.get(p).weil_bound_ok for p in golden.H21_PRIMES)


def test_certify_edge_cases(count_cache):
    assert certify_h21([], cache=count_cache) == set(range(53))
    assert 2 in certify_h21([73], cache=count_cache)


def test_empty_feasible_set_signals_bug():
    cache = CountCache()
    cache.put(CountReport.from_counts(73, 0, 0))
    with pytest.raises(EmptyFeasibleSet):
        certify_h21([73], cache=cache)


def test_cache_round_trip(tmp_path, count_cache):
    path = tmp_path / "counts.csv"
    c = CountCache(path)
    c.put(assemble_count(73, cache=count_cache))
    again = CountCache(path)
    assert again.get(73) == count_cache.get(73)
    assert path.read_text().splitlines()[0] == "p,n_Z,n_E1,n_X,t3"


def test_cache_rejects_inconsistent_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("p,n_Z,n_E1,n_X,t3\n73,451610,5549,1,42\n")
    with pytest.raises(ValueError):
        CountCache(path)
