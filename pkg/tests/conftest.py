import itertools

import numpy as np
import pytest

from qubokit.core import QuboInstance


def naive_energy(m, x) -> float:
    """Loop-based energy, independent of the vectorized path."""
    n = len(x)
    return float(sum(m[i][j] * x[i] * x[j] for i in range(n) for j in range(i, n)))


def all_vectors(n):
    """All vectors in index order (x_0 least significant), via itertools."""
    return [tuple(reversed(bits)) for bits in itertools.product((0, 1), repeat=n)]


def naive_minimum(q: QuboInstance, tol=1e-9):
    """(min energy, sorted list of minimizer indices) by full enumeration."""
    m = q.m.tolist()
    energies = [naive_energy(m, x) for x in all_vectors(q.n)]
    best = min(energies)
    return best, [k for k, e in enumerate(energies) if e <= best + tol]


def random_instances(count, n_range, densities=(0.3, 0.8), seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        d = float(densities[k % len(densities)])
        out.append(QuboInstance.random(n, density=d, seed=int(rng.integers(2**31))))
    return out


def random_assignment_constraints(n, rng, k=None):
    """Random constraint list that is conflict-free by construction (checked
    against a hidden witness vector)."""
    witness = rng.integers(0, 2, n)
    k = int(rng.integers(0, n + 1)) if k is None else k
    cons = []
    for _ in range(k):
        i = int(rng.integers(n))
        if rng.random() < 0.4:
            cons.append((i, None, int(witness[i])))
        else:
            j = int(rng.integers(n))
            cons.append((i, j, int(witness[i] ^ witness[j])))
    return cons


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
