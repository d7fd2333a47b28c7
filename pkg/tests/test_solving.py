import numpy as np
import pytest

from conftest import naive_minimum, random_instances
from qubokit import _kernels as K
from qubokit.bitvec import from_index, to_string
from qubokit.core import QuboInstance
from qubokit.errors import InstanceError, ResourceCapError
from qubokit.solving import brute_force, local_search, simulated_annealing


class TestBruteForce:
    def test_small(self):
        sol = brute_force(QuboInstance([[-1, 2], [0, 0]]))
        assert sol.x.tolist() == [1, 0] and sol.energy == -1

    def test_tie_smallest_index(self):
        sol = brute_force(QuboInstance([[1, -2], [0, 1]]), return_ties=True)
        assert sol.x.tolist() == [0, 0] and sol.energy == 0
        assert sol.meta["ties"] == [0, 3]

    def test_zero_matrix(self):
        sol = brute_force(QuboInstance.zeros(5))
        assert sol.energy == 0 and not sol.x.any()
        assert brute_force(QuboInstance.zeros(5), return_ties=True, tie_cap=8).meta["num_ties"] == 32

    def test_empty(self):
        assert brute_force(QuboInstance.zeros(0)).energy == 0

    def test_oracle(self):
        for q in random_instances(50, (1, 12), densities=(0.2, 0.5, 1.0), seed=3):
            best, argmins = naive_minimum(q)
            sol = brute_force(q, return_ties=True)
            assert sol.energy == pytest.approx(best, abs=1e-9)
            assert sol.meta["index"] == argmins[0]
            assert sol.meta["ties"] == argmins

    @pytest.mark.parametrize("n", [3, 12, 16])
    def test_thread_invariance(self, n):
        q = QuboInstance.random(n, density=0.5, seed=n)
        ref = brute_force(q, threads=1)
        for t in (2, 3, 8):
            sol = brute_force(q, threads=t)
            assert sol.energy == ref.energy and np.array_equal(sol.x, ref.x)

    def test_more_threads_than_bits(self):
        q = QuboInstance([[-1, 2], [0, 0]])
        assert brute_force(q, threads=8).x.tolist() == [1, 0]

    def test_cap(self):
        with pytest.raises(ResourceCapError):
            brute_force(QuboInstance.zeros(31))
        with pytest.raises(InstanceError):
            brute_force(QuboInstance.zeros(2), threads=0)

    def test_incremental_energy_matches_recompute(self):
        n = 20
        q = QuboInstance.random(n, density=0.6, seed=5)
        energies = K.gray_energies(*K.prepare(q.m), n)
        ks = np.arange(0, 1 << n, 1 << 10)
        X = ((ks[:, None] >> np.arange(n)) & 1).astype(float)
        np.testing.assert_allclose(energies[ks], q(X), atol=1e-9)


class TestLocalSearch:
    def test_one_opt(self):
        for q in random_instances(20, (1, 30), seed=7):
            sol = local_search(q, restarts=3, seed=1)
            assert np.min(q.dx(sol.x)) >= -1e-9
            assert sol.energy == pytest.approx(q(sol.x))

    def test_single_basin(self):
        q = QuboInstance([[-3, 1], [0, -2]])
        for seed in range(5):
            sol = local_search(q, restarts=1, seed=seed)
            assert sol.x.tolist() == [1, 1] and sol.energy == -4

    def test_zero(self):
        sol = local_search(QuboInstance.zeros(6), restarts=1, seed=0)
        assert sol.energy == 0 and sol.meta["steps"] == 0

    def test_deterministic(self):
        q = QuboInstance.random(20, seed=1)
        assert to_string(local_search(q, 5, seed=3).x) == to_string(local_search(q, 5, seed=3).x)

    def test_bad_restarts(self):
        with pytest.raises(InstanceError):
            local_search(QuboInstance.zeros(2), restarts=0)


class TestAnnealing:
    def test_zero(self):
        assert simulated_annealing(QuboInstance.zeros(4), steps=100, seed=0).energy == 0

    def test_finds_optimum(self):
        hits = 0
        instances = random_instances(20, (2, 10), seed=11)
        for k, q in enumerate(instances):
            sol = simulated_annealing(q, steps=20 * 2**q.n, seed=k)
            best, _ = naive_minimum(q)
            assert sol.energy >= best - 1e-9
            hits += sol.energy <= best + 1e-9
        assert hits >= 0.9 * len(instances)

    def test_best_not_worse_than_start(self):
        q = QuboInstance.random(12, seed=2)
        rng = np.random.default_rng(5)
        rng.integers(2**63)  # auto temperature seed
        start = rng.integers(0, 2, 12)
        sol = simulated_annealing(q, steps=50, seed=5)
        assert sol.energy <= q(start) + 1e-12

    def test_deterministic(self):
        q = QuboInstance.random(15, seed=2)
        a = simulated_annealing(q, steps=5000, seed=9)
        b = simulated_annealing(q, steps=5000, seed=9)
        assert np.array_equal(a.x, b.x) and a.energy == b.energy

    def test_chunking_invariant(self):
        q = QuboInstance.random(10, seed=3)
        a = simulated_annealing(q, steps=3000, seed=1, t0=2.0, alpha=0.999)
        b = simulated_annealing(q, steps=3000, seed=1, t0=2.0, alpha=0.999, chunk=3000)
        assert a.energy == b.energy

    @pytest.mark.parametrize("kwargs", [{"steps": 0}, {"alpha": 1.0}, {"alpha": 0.0}, {"t0": -1.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(InstanceError):
            simulated_annealing(QuboInstance.zeros(2), **{"seed": 0, **kwargs})


def test_heuristics_never_beat_exact():
    for q in random_instances(15, (1, 14), seed=21):
        exact = brute_force(q).energy
        assert local_search(q, 2, seed=0).energy >= exact - 1e-9
        assert simulated_annealing(q, steps=500, seed=0).energy >= exact - 1e-9


def test_from_index_consistency():
    q = QuboInstance.random(9, seed=4)
    sol = brute_force(q)
    assert np.array_equal(from_index(sol.meta["index"], 9), sol.x)
