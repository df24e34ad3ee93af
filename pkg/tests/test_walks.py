import itertools
import math

import numpy as np
import pytest

from schattenlab.experiment import random_sparse_graph
from schattenlab.hamiltonian import MatrixClass, SparseHermitian
from schattenlab.walks import (
    WalkPlan,
    count_walks_estimate,
    count_walks_exact,
    diagonal_bound,
    diagonal_estimate,
    exact_diagonal,
    plan_for,
    plan_samples,
    return_weight_estimate,
    trace_power_estimate,
)

from conftest import complete, cycle


def enumerate_walks(a, j, p):
    """All length-p walks from j as lists of (vertex sequence, weight product)."""
    out = []
    for seq in itertools.product(range(a.dim), repeat=p):
        cur, w = j, 1.0
        for v in seq:
            e = a.entry(cur, v)
            if e == 0:
                break
            w *= e.real
            cur = v
        else:
            out.append((seq, w))
    return out


def irregular():
    # triangle 0-1-2 with a pendant path 2-3-4 and a chord 1-3
    return SparseHermitian.from_edges(5, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 4, 1), (1, 3, 1)])


def small_plan(a, p, k, kp):
    return WalkPlan(p, k, kp, 0.5, 0.5, 0.1, a.d, a.matrix_class)


class TestPlan:
    def test_k_example(self):
        assert plan_samples(0.1, 0.1, 0.05).k == 185 == math.ceil(math.log(40) / 0.02)

    def test_halving_quadruples(self):
        for eps in (0.2, 0.1, 0.05):
            k1, k2 = plan_samples(eps, eps, 0.05).k, plan_samples(eps / 2, eps / 2, 0.05).k
            assert 4 * k1 - 4 <= k2 <= 4 * k1

    def test_signed_nominal_constants_double(self):
        z = plan_samples(0.1, 0.1, 0.05, MatrixClass.ZeroOne, constants="nominal")
        s = plan_samples(0.1, 0.1, 0.05, MatrixClass.SignedUnit, constants="nominal")
        assert s.k_prime == math.ceil(math.log(40) / 0.01)
        assert abs(s.k_prime - 2 * z.k_prime) <= 1

    def test_strict_constants(self):
        z = plan_samples(0.1, 0.1, 0.05, MatrixClass.ZeroOne)
        s = plan_samples(0.1, 0.1, 0.05, MatrixClass.SignedUnit)
        w = plan_samples(0.1, 0.1, 0.05, MatrixClass.WeightedReal)
        assert s.k_prime == w.k_prime == math.ceil(2 * math.log(40) / 0.01)
        # every strict count satisfies the minimal invariants
        assert z.k_prime >= math.ceil(math.log(40) / 0.02) and s.k_prime >= math.ceil(math.log(40) / 0.01)

    def test_validation(self):
        for bad in ((0.0, 0.1, 0.1), (0.1, 1.0, 0.1), (0.1, 0.1, 0.0)):
            with pytest.raises(ValueError):
                plan_samples(*bad)

    def test_vertex_samples(self):
        plan = plan_samples(0.1, 0.1, 0.05)
        assert plan.delta == pytest.approx(0.21)
        assert plan.vertex_samples() == math.ceil(2 * math.log(40) / 0.21**2)


class TestCountWalks:
    def test_isolated(self):
        a = SparseHermitian.from_edges(3, [(1, 2, 1)])
        assert count_walks_estimate(a, 0, 3, 50, 0) == 0.0

    def test_c4_exhaustive(self):
        est = diagonal_estimate(cycle(4), 0, 2, plan_for(cycle(4), 2, 0.1, 0.1, 0.05), exhaustive=True)
        assert est.x_bar == 4

    def test_star_center(self):
        star = SparseHermitian.from_edges(6, [(0, i, 1) for i in range(1, 6)])
        est = diagonal_estimate(star, 0, 1, plan_for(star, 1, 0.1, 0.1, 0.05), exhaustive=True)
        assert est.x_bar == 5
        # every candidate from the centre is realisable
        assert count_walks_estimate(star, 0, 1, 100, 1) == 5.0

    def test_exact_counter(self):
        a = irregular()
        for j in range(5):
            assert count_walks_exact(a, j, 3) == len(enumerate_walks(a, j, 3))


class TestReturnWeight:
    def test_c4(self):
        est = diagonal_estimate(cycle(4), 0, 2, plan_for(cycle(4), 2, 0.1, 0.1, 0.05), exhaustive=True)
        assert est.y_bar == 0.5

    def test_signed_triangle(self):
        tri = SparseHermitian.from_edges(3, [(0, 1, 1), (1, 2, -1), (2, 0, 1)])
        walks = enumerate_walks(tri, 0, 3)
        closed = sum(w for seq, w in walks if seq[-1] == 0)
        est = diagonal_estimate(tri, 0, 3, plan_for(tri, 3, 0.1, 0.1, 0.05), exhaustive=True)
        assert est.y_bar == pytest.approx(closed / len(walks))
        assert closed == pytest.approx(exact_diagonal(tri, 0, 3)) and closed < 0

    def test_p0(self):
        assert return_weight_estimate(cycle(4), 0, 0, 10, 0).value == 1.0

    def test_isolated_flag(self):
        a = SparseHermitian.from_edges(3, [(1, 2, 1)])
        r = return_weight_estimate(a, 0, 2, 10, 0)
        assert r.value == 0.0 and r.isolated

    def test_literal_mode_targets_degree_weighted_mean(self):
        a = irregular()
        j, p = 0, 3
        deg = [a.degree(v) for v in range(5)]
        want = 0.0
        for seq, w in enumerate_walks(a, j, p):
            prob = 1.0
            cur = j
            for v in seq:
                prob /= deg[cur]
                cur = v
            want += prob * w * (seq[-1] == j)
        got = return_weight_estimate(a, j, p, 200_000, 3, mode="literal").value
        assert got == pytest.approx(want, abs=4 * math.sqrt(0.25 / 200_000))
        # differs from the uniform-over-walks mean that the corrected mode targets
        corrected = exact_diagonal(a, j, p) / count_walks_exact(a, j, p)
        assert abs(want - corrected) > 0.01

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            return_weight_estimate(cycle(4), 0, 2, 10, 0, mode="nope")


class TestDiagonal:
    @pytest.mark.parametrize("cls", list(MatrixClass))
    def test_exhaustive_exact(self, rng, cls):
        for n in (4, 6, 8):
            a = random_sparse_graph(n, 3, cls, rng)
            for p in (1, 2, 3, 4):
                plan = plan_for(a, p, 0.1, 0.1, 0.05)
                for j in range(n):
                    assert diagonal_estimate(a, j, p, plan, exhaustive=True).value == pytest.approx(exact_diagonal(a, j, p), abs=1e-10)

    def test_p0(self, rng):
        a = random_sparse_graph(8, 3, MatrixClass.WeightedReal, rng)
        assert diagonal_estimate(a, 2, 0, plan_for(a, 0, 0.1, 0.1, 0.05), 0).value == 1.0

    def test_k4_hoeffding(self):
        a = complete(4)
        plan = plan_for(a, 3, 0.05, 0.05, 0.05)
        bound = diagonal_bound(plan, 1.0)
        hits = sum(abs(diagonal_estimate(a, 0, 3, plan, s).value - 6.0) <= bound for s in range(100))
        assert hits >= 90

    def test_bound_formula(self, rng):
        a = random_sparse_graph(16, 3, MatrixClass.WeightedReal, rng)
        plan = plan_for(a, 3, 0.1, 0.2, 0.05)
        est = diagonal_estimate(a, 0, 3, plan, 0)
        assert est.bound == pytest.approx((0.1 + 0.2 + 0.02) * a.d**3 * a.max_entry**3)

    def test_signed_relabel_identical(self, rng):
        a = random_sparse_graph(12, 3, MatrixClass.ZeroOne, rng)
        b = a.with_class(MatrixClass.SignedUnit)
        plan = plan_for(a, 3, 0.1, 0.1, 0.05)
        for s in range(10):
            assert diagonal_estimate(a, 1, 3, plan, s).value == diagonal_estimate(b, 1, 3, plan, s).value


class TestUnbiased:
    def test_count_walks(self):
        a = irregular()
        j, p = 4, 3
        xs = np.array([count_walks_estimate(a, j, p, 4, s) for s in range(10_000)])
        assert abs(xs.mean() - count_walks_exact(a, j, p)) <= 3 * xs.std(ddof=1) / math.sqrt(len(xs))

    def test_product(self):
        a = irregular()
        j, p = 3, 3
        plan = small_plan(a, p, 4, 4)
        vals = np.array([diagonal_estimate(a, j, p, plan, s).value for s in range(10_000)])
        assert abs(vals.mean() - exact_diagonal(a, j, p)) <= 3 * vals.std(ddof=1) / math.sqrt(len(vals))


class TestTrace:
    def test_self_loops(self):
        a = SparseHermitian.from_edges(5, [(i, i, 1) for i in range(5)])
        rep = trace_power_estimate(a, 3, plan_for(a, 3, 0.2, 0.2, 0.1), seed=0)
        assert rep.value == pytest.approx(1.0)

    def test_c8(self):
        a = cycle(8)
        plan = plan_for(a, 2, 0.1, 0.1, 0.05)
        hits = sum(abs(trace_power_estimate(a, 2, plan, seed=s).value - 2.0) <= plan.delta * 4 for s in range(100))
        assert hits >= 90

    def test_signed_random(self, rng):
        a = random_sparse_graph(64, 4, MatrixClass.SignedUnit, rng)
        truth = np.mean(np.linalg.eigvalsh(a.dense().real) ** 4)
        plan = plan_for(a, 4, 0.1, 0.1, 0.05)
        reps = [trace_power_estimate(a, 4, plan, seed=s) for s in range(30)]
        assert sum(abs(r.value - truth) <= r.claimed_bound for r in reps) >= 27

    def test_too_few_vertices(self):
        a = cycle(8)
        with pytest.raises(ValueError):
            trace_power_estimate(a, 2, plan_for(a, 2, 0.1, 0.1, 0.05), n_vertices=5)

    def test_reproducible(self):
        a = cycle(8)
        plan = plan_for(a, 2, 0.2, 0.2, 0.1)
        assert trace_power_estimate(a, 2, plan, seed=4).value == trace_power_estimate(a, 2, plan, seed=4).value
