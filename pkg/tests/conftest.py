import numpy as np
import pytest

from schattenlab.hamiltonian import SparseHermitian, random_local_hamiltonian


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cycle(n):
    return SparseHermitian.from_edges(n, [(i, (i + 1) % n, 1) for i in range(n)])


def complete(n):
    return SparseHermitian.from_edges(n, [(i, j, 1) for i in range(n) for j in range(i + 1, n)])


def prescaled_fixtures(count, seed=7, n_choices=(1, 2, 3, 4), norm=np.pi - 0.1):
    """Random log-local Hamiltonians rescaled to a fixed operator norm."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = n_choices[i % len(n_choices)]
        m = int(rng.integers(1, 5))
        k = int(min(n, rng.integers(1, 3)))
        out.append(random_local_hamiltonian(n, m, rng, k=k, target_norm=float(norm * rng.uniform(0.3, 1.0))))
    return out


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record and print one PASS/FAIL line per acceptance criterion."""

    def record(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
