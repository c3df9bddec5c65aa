import pytest
from hypothesis import settings

settings.register_profile("repo", deadline=None, max_examples=40)
settings.load_profile("repo")


CATALOG_SECONDS = {}


@pytest.fixture(scope="session")
def catalog_matrices():
    """All eight catalog loops at the default config (several minutes, computed once)."""
    import time
    from reyemirror.continuation import LOOP_NAMES, monodromy
    out = {}
    for n in LOOP_NAMES:
        t0 = time.perf_counter()
        out[n] = monodromy(n)
        CATALOG_SECONDS[n] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def catalog_seconds(catalog_matrices):
    return dict(CATALOG_SECONDS)


@pytest.fixture(scope="session")
def connections():
    from reyemirror.continuation import connection_matrices
    return connection_matrices()


@pytest.fixture(scope="session")
def count_cache():
    """In-memory cache so the large primes are counted once per session."""
    from reyemirror.fp_count import CountCache
    return CountCache()


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
