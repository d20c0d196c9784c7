import time

import numpy as np
import pytest

from loopcount.cocycles import extend_vector
from loopcount.loops import CayleyTable, cyclic_group, direct_product


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("LOOPCOUNT_CACHE", str(tmp_path / "cache"))


@pytest.fixture(scope="session")
def z6():
    return cyclic_group(6)


@pytest.fixture(scope="session")
def q3_extensions():
    return [extend_vector(3, v) for v in range(16)]


def _timed_oracle(q):
    from loopcount import oracle

    start = time.perf_counter()
    result = oracle.classify(q)
    result.elapsed = time.perf_counter() - start
    oracle._CACHE[q] = result
    return result


@pytest.fixture(scope="session")
def oracle3():
    return _timed_oracle(3)


@pytest.fixture(scope="session")
def oracle5():
    return _timed_oracle(5)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_relabel(table: CayleyTable, rng: np.random.Generator) -> CayleyTable:
    """Relabel by a random permutation fixing 0."""
    perm = np.concatenate([[0], 1 + rng.permutation(table.n - 1)])
    return table.relabel(perm)


def klein_four():
    z2 = cyclic_group(2)
    return direct_product(z2, z2)
