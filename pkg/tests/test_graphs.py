import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schattenlab.errors import InfeasibleParameters, InvalidModel
from schattenlab.graphs import (
    DegreeModel,
    SampleStats,
    accuracy_advantage_report,
    chung_lu_adjacency,
    chung_lu_sample,
    degree_exponent_fit,
    eigenvalue_regime_check,
    largest_eigenvalue,
    power_law_weights,
    regime,
    uniform_weights,
)
from schattenlab.hamiltonian import MatrixClass, SparseHermitian

from conftest import cycle


class TestModel:
    def test_d_tilde(self):
        m = DegreeModel([1.0, 2.0, 3.0])
        assert m.d_tilde == pytest.approx(14 / 6) and m.d == 3 and m.d_bar == 2

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0.01, 100), min_size=1, max_size=50))
    def test_cauchy_schwarz(self, w):
        m = DegreeModel(w)
        assert m.d_bar * (1 - 1e-12) <= m.d_tilde <= m.d * (1 + 1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidModel):
            DegreeModel([-1.0, 2.0])
        m = DegreeModel([5.0, 5.0, 0.1])
        assert not m.is_valid()
        with pytest.raises(InvalidModel):
            chung_lu_sample(m, 0, strict=True)
        stats = SampleStats()
        chung_lu_sample(m, 0, stats=stats)
        assert stats.clipped_pairs == 1


class TestSample:
    def test_zero_weights(self):
        assert chung_lu_sample(DegreeModel(np.zeros(10)), 0).nnz == 0

    def test_two_vertices(self):
        m = DegreeModel([1.0, 1.0])
        trials = 10_000
        hits = sum(chung_lu_adjacency(m, s).nnz == 2 for s in range(trials))
        assert abs(hits / trials - 0.5) <= 3 * math.sqrt(0.25 / trials)

    def test_uniform_mean_degree(self):
        m = uniform_weights(256, 8.0)
        a = chung_lu_adjacency(m, 1)
        deg = np.diff(a.indptr)
        # each degree is a sum of 255 Bernoulli(8/256) draws
        var = 255 * (8 / 256) * (1 - 8 / 256)
        assert abs(deg.mean() - 8 * 255 / 256) <= 3 * math.sqrt(2 * var / 256)

    def test_symmetric_zero_diagonal(self):
        m = power_law_weights(500, 2.5, 40, 4)
        a = chung_lu_adjacency(m, 2)
        assert (a != a.T).nnz == 0 and a.diagonal().sum() == 0
        s = chung_lu_sample(m, 2)
        assert s.matrix_class is MatrixClass.ZeroOne


class TestPowerLaw:
    def test_targets(self):
        m = power_law_weights(1024, 3, 30, 4)
        assert m.d == pytest.approx(30, rel=0.05) and m.d_bar == pytest.approx(4, rel=0.05)

    def test_large_beta_near_uniform(self):
        m = power_law_weights(200, 200.0, 5.0, 4.99)
        assert np.ptp(m.weights) / m.d < 0.02
        assert np.allclose(power_law_weights(100, 3, 5.0, 5.0).weights, 5.0)

    def test_infeasible(self):
        with pytest.raises(InfeasibleParameters):
            power_law_weights(100, 2.0, 10, 2)
        with pytest.raises(InfeasibleParameters):
            power_law_weights(100, 3, 2, 5)
        with pytest.raises(InfeasibleParameters):
            power_law_weights(10, 3, 100, 5)

    def test_exponent_of_sampled_degrees(self):
        m = power_law_weights(4096, 3, 200, 8)
        deg = np.diff(chung_lu_adjacency(m, 5).indptr)
        assert degree_exponent_fit(deg, k_min=5) == pytest.approx(3, abs=0.3)


class TestEigen:
    def test_two_vertices_exact(self):
        for s in range(20):
            lam = largest_eigenvalue(chung_lu_adjacency(DegreeModel([1.0, 1.0]), s))
            assert lam in (0.0, pytest.approx(1.0))

    def test_iterative_matches_dense(self):
        from schattenlab import config

        a = chung_lu_adjacency(power_law_weights(600, 3, 30, 3), 0)
        dense = float(np.linalg.eigvalsh(a.toarray())[-1])
        assert config.get().eig_dense_max < 600
        assert largest_eigenvalue(a) == pytest.approx(dense, rel=1e-6)

    def test_regime_labels(self):
        assert regime(uniform_weights(2048, 256))["regime"] == "d_tilde"
        assert regime(power_law_weights(4096, 3, 64, 2))["regime"] == "neither"

    def test_uniform_regime(self):
        rep = eigenvalue_regime_check(uniform_weights(2048, 64), 5, 0)
        assert rep.regime == "d_tilde" and 0.8 <= rep.ratio <= 1.2

    def test_size_limit(self):
        with pytest.raises(InvalidModel):
            eigenvalue_regime_check(uniform_weights(5000, 2), 1, 0)


class TestAdvantage:
    def test_regular_no_advantage(self):
        rep = accuracy_advantage_report(cycle(16), 3)
        assert rep["ratio"] == pytest.approx(1.0)

    def test_empty(self):
        rep = accuracy_advantage_report(SparseHermitian(4, ((),) * 4), 2)
        assert rep["quantum_bound"] == 0.0

    def test_near_regular_sample(self):
        a = chung_lu_sample(uniform_weights(512, 64), 0)
        rep = accuracy_advantage_report(a, 1)
        assert 0.6 <= rep["ratio"] <= 1.0

    def test_ratio_monotone_in_p(self):
        a = chung_lu_sample(power_law_weights(2048, 3, 64, 2), 3)
        ratios = [accuracy_advantage_report(a, p)["ratio"] for p in range(1, 7)]
        assert all(x > y for x, y in zip(ratios, ratios[1:]))
