import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schattenlab import config
from schattenlab.errors import DimensionTooLarge, LocalityViolation, NotHermitian
from schattenlab.hamiltonian import (
    PAULI_X,
    PAULI_Z,
    LocalTerm,
    LogLocalHamiltonian,
    MatrixClass,
    SparseHermitian,
    assemble_dense,
    check_dense_size,
    embed,
    operator_norm,
    pauli_term,
    random_hermitian,
    random_local_hamiltonian,
    sparse_from_dense,
)


def embed_bruteforce(matrix, qubits, n):
    """Element-by-element embedding from bit strings; qubit 0 is the MSB."""
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    rest = [q for q in range(n) if q not in qubits]
    for row in range(dim):
        rbits = [(row >> (n - 1 - q)) & 1 for q in range(n)]
        for col in range(dim):
            cbits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
            if any(rbits[q] != cbits[q] for q in rest):
                continue
            r = int("".join(str(rbits[q]) for q in qubits), 2)
            c = int("".join(str(cbits[q]) for q in qubits), 2)
            out[row, col] = matrix[r, c]
    return out


def power_iteration_norm(m, iters=5000):
    v = np.ones(m.shape[0]) / np.sqrt(m.shape[0])
    m2 = m.conj().T @ m
    for _ in range(iters):
        v = m2 @ v
        v /= np.linalg.norm(v)
    return float(np.sqrt(np.real(v.conj() @ m2 @ v)))


class TestAssemble:
    def test_single_z(self):
        h = LogLocalHamiltonian(1, (pauli_term("Z", [0]),))
        assert np.allclose(assemble_dense(h), np.diag([1, -1]))

    def test_additive(self):
        h = LogLocalHamiltonian(1, (pauli_term("Z", [0]), pauli_term("Z", [0])))
        assert np.allclose(assemble_dense(h), np.diag([2, -2]))

    def test_x_on_q1_is_i_kron_x(self):
        h = LogLocalHamiltonian(2, (pauli_term("X", [1]),))
        assert np.array_equal(assemble_dense(h), np.kron(np.eye(2), PAULI_X))
        assert np.array_equal(assemble_dense(h), embed_bruteforce(PAULI_X, [1], 2))

    @pytest.mark.parametrize("qubits,n", [([0], 3), ([2], 3), ([2, 0], 3), ([1, 3], 4), ([3, 0, 2], 4)])
    def test_embed_matches_bruteforce(self, rng, qubits, n):
        m = random_hermitian(2 ** len(qubits), rng)
        assert np.allclose(embed(m, qubits, n), embed_bruteforce(m, qubits, n), atol=1e-14)

    def test_linear_in_terms(self, rng):
        h = random_local_hamiltonian(4, 3, rng)
        extra = LocalTerm((1, 3), random_hermitian(4, rng))
        h2 = LogLocalHamiltonian(4, h.terms + (extra,))
        assert np.allclose(assemble_dense(h2), assemble_dense(h) + extra.dense(4), atol=1e-13)

    def test_dimension_limit(self):
        with pytest.raises(DimensionTooLarge):
            check_dense_size(config.get().n_dense_max + 1)


class TestInvariants:
    def test_nonhermitian_rejected(self):
        with pytest.raises(NotHermitian):
            LocalTerm((0,), np.array([[0, 1], [0, 0]]))

    def test_symmetrize_on_request(self):
        t = LocalTerm((0,), np.array([[0, 1], [0, 0]]), symmetrize=True)
        assert np.allclose(t.matrix, [[0, 0.5], [0.5, 0]])

    def test_locality(self):
        kmax = config.get().k_max(8)
        with pytest.raises(LocalityViolation):
            LogLocalHamiltonian(8, (LocalTerm(tuple(range(kmax + 1)), np.eye(2 ** (kmax + 1))),))
        LogLocalHamiltonian(8, (LocalTerm(tuple(range(kmax)), np.eye(2**kmax)),))

    def test_qubit_range_and_empty(self):
        with pytest.raises(ValueError):
            LogLocalHamiltonian(2, (pauli_term("Z", [2]),))
        with pytest.raises(ValueError):
            LogLocalHamiltonian(2, ())

    def test_zeta(self):
        h = LogLocalHamiltonian(2, (pauli_term("Z", [0], 0.5), pauli_term("XX", [0, 1], -2.0)))
        assert h.term_norm_bound == pytest.approx(2.0)
        assert h.norm_bound() == pytest.approx(2.5)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 2**31))
    def test_norm_bound_dominates(self, n, m, seed):
        h = random_local_hamiltonian(n, m, np.random.default_rng(seed), k=min(2, n))
        assert operator_norm(assemble_dense(h)) <= h.norm_bound() * (1 + 1e-12)


class TestSparse:
    def test_diag(self):
        a = sparse_from_dense(np.diag([1.0, -1.0]))
        assert a.rows == (((0, 1 + 0j),), ((1, -1 + 0j),))
        assert a.d == 1
        assert a.matrix_class is MatrixClass.SignedUnit

    def test_zero(self):
        a = sparse_from_dense(np.zeros((3, 3)))
        assert a.d == 0 and all(len(r) == 0 for r in a.rows)

    def test_roundtrip(self, rng):
        m = random_hermitian(4, rng)
        assert np.array_equal(sparse_from_dense(m).dense(), m)

    def test_threshold(self):
        m = np.array([[1.0, 1e-9], [1e-9, 2.0]])
        assert sparse_from_dense(m, threshold=1e-6).nnz == 2
        assert sparse_from_dense(m).nnz == 4

    def test_conjugate_symmetry_enforced(self):
        with pytest.raises(NotHermitian):
            SparseHermitian(2, (((1, 1j),), ((0, 1j),)))

    def test_class_tags(self):
        with pytest.raises(ValueError):
            SparseHermitian.from_edges(2, [(0, 1, -1)], MatrixClass.ZeroOne)
        a = SparseHermitian.from_edges(3, [(0, 1, 1), (1, 2, -1)])
        assert a.matrix_class is MatrixClass.SignedUnit
        assert SparseHermitian.from_edges(2, [(0, 1, 0.5)]).matrix_class is MatrixClass.WeightedReal
        assert a.with_class(MatrixClass.WeightedReal).matrix_class is MatrixClass.WeightedReal

    def test_complex_entries(self):
        a = SparseHermitian.from_edges(2, [(0, 1, 1 + 2j)])
        assert a.entry(1, 0) == 1 - 2j
        assert np.allclose(a.dense(), a.dense().conj().T)
        assert np.allclose(a.to_scipy().toarray(), a.dense())

    def test_neighbour_table(self):
        a = SparseHermitian.from_edges(3, [(0, 1, 1), (0, 2, 1)])
        cols, vals, deg = a.neighbour_table()
        assert deg.tolist() == [2, 1, 1]
        assert cols[0].tolist() == [1, 2] and cols[1].tolist() == [0, -1]


class TestOperatorNorm:
    def test_simple(self):
        assert operator_norm(PAULI_Z) == 1.0
        assert operator_norm(2 * np.eye(3)) == 2.0

    def test_power_iteration(self, rng):
        m = random_hermitian(8, rng)
        assert operator_norm(m) == pytest.approx(power_iteration_norm(m), abs=1e-10)


def test_all_constructor_paths_conjugate_symmetric(rng):
    from schattenlab.experiment import random_sparse_graph

    for a in (
        sparse_from_dense(random_hermitian(5, rng)),
        SparseHermitian.from_edges(4, [(0, 1, 2 - 1j), (2, 2, 1.0)]),
        random_sparse_graph(16, 3, MatrixClass.WeightedReal, rng),
    ):
        d = a.dense()
        assert np.array_equal(d, d.conj().T)
        for i, j in itertools.product(range(a.dim), repeat=2):
            assert a.entry(i, j) == np.conj(a.entry(j, i))
