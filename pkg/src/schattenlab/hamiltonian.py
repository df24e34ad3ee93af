"""Matrix and Hamiltonian representations.

Qubit ordering: qubit 0 is the most significant bit of a computational-basis
index, so for ``n = 2`` the operator ``X`` on qubit 1 is ``kron(I, X)``.
Every module in the package follows this convention.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import config
from .errors import DimensionTooLarge, LocalityViolation, NotHermitian

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def hermiticity_residual(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(m: np.ndarray, tol: float | None = None, symmetrize: bool = False) -> np.ndarray:
    """Return ``m`` as a complex array, raising NotHermitian outside ``tol``.

    With ``symmetrize=True`` the input is replaced by ``(m + m^dagger)/2``
    instead of being checked.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {m.shape}")
    if symmetrize:
        return (m + m.conj().T) / 2
    tol = config.get().tol_herm if tol is None else tol
    res = hermiticity_residual(m)
    if res > tol:
        raise NotHermitian(f"max |M - M^dagger| = {res:.3e} exceeds {tol:.1e}")
    return m


def check_dense_size(n: int) -> None:
    limit = config.get().n_dense_max
    if n > limit:
        raise DimensionTooLarge(f"{n} qubits exceeds n_dense_max={limit} (2^{n} dimensional)")


def embed(matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Embed a 2^k x 2^k block acting on ``qubits`` into the full 2^n space."""
    qubits = list(qubits)
    k = len(qubits)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2**k, 2**k):
        raise ValueError(f"block shape {matrix.shape} does not match {k} qubits")
    if k == n and qubits == list(range(n)):
        return matrix.copy()
    rest = [q for q in range(n) if q not in qubits]
    full = np.kron(matrix, np.eye(2 ** len(rest), dtype=complex))
    order = qubits + rest
    inv = list(np.argsort(order))
    t = full.reshape([2] * (2 * n))
    t = t.transpose(inv + [n + i for i in inv])
    return t.reshape(2**n, 2**n)


@dataclass(frozen=True)
class LocalTerm:
    qubits: tuple[int, ...]
    matrix: np.ndarray

    def __init__(self, qubits, matrix, symmetrize: bool = False):
        qubits = tuple(int(q) for q in qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated qubit index in {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {qubits}")
        m = check_hermitian(matrix, symmetrize=symmetrize)
        if m.shape != (2 ** len(qubits),) * 2:
            raise ValueError(f"matrix shape {m.shape} does not match {len(qubits)} qubits")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "matrix", m)

    @property
    def k(self) -> int:
        return len(self.qubits)

    @property
    def norm(self) -> float:
        return operator_norm(self.matrix)

    def scaled(self, s: float) -> "LocalTerm":
        return LocalTerm(self.qubits, s * self.matrix)

    def dense(self, n: int) -> np.ndarray:
        return embed(self.matrix, self.qubits, n)


@dataclass(frozen=True)
class LogLocalHamiltonian:
    """A = sum_j A_j with each A_j a LocalTerm on at most k_max(n) qubits."""

    n: int
    terms: tuple[LocalTerm, ...]
    enforce_locality: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.terms:
            raise ValueError("a Hamiltonian needs at least one term")
        kmax = config.get().k_max(self.n)
        for t in self.terms:
            if max(t.qubits, default=-1) >= self.n:
                raise ValueError(f"term on {t.qubits} exceeds n={self.n}")
            if self.enforce_locality and t.k > kmax:
                raise LocalityViolation(f"term on {t.k} qubits exceeds k_max={kmax} for n={self.n}")

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def term_norm_bound(self) -> float:
        """zeta = max_j ||A_j||."""
        return max(t.norm for t in self.terms)

    def norm_bound(self) -> float:
        """sum_j ||A_j||, an upper bound on ||A||."""
        return float(sum(t.norm for t in self.terms))

    def scaled(self, s: float) -> "LogLocalHamiltonian":
        return LogLocalHamiltonian(self.n, tuple(t.scaled(s) for t in self.terms), self.enforce_locality)

    def dense(self) -> np.ndarray:
        return assemble_dense(self)


def assemble_dense(h: LogLocalHamiltonian) -> np.ndarray:
    check_dense_size(h.n)
    out = np.zeros((2**h.n, 2**h.n), dtype=complex)
    for t in h.terms:
        out += t.dense(h.n)
    return out


def operator_norm(m: np.ndarray) -> float:
    """max |lambda| of a Hermitian matrix."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(m))))


class MatrixClass(enum.Enum):
    ZeroOne = "ZeroOne"
    SignedUnit = "SignedUnit"
    WeightedReal = "WeightedReal"


def classify(values) -> MatrixClass:
    vals = np.asarray(list(values), dtype=complex)
    if np.any(np.abs(vals.imag) > 0):
        raise ValueError("complex entries have no matrix class")
    re = vals.real
    if np.all(re == 1):
        return MatrixClass.ZeroOne
    if np.all(np.abs(re) == 1):
        return MatrixClass.SignedUnit
    return MatrixClass.WeightedReal


@dataclass(frozen=True)
class SparseHermitian:
    """Row-indexed Hermitian matrix; also the weighted adjacency of a graph.

    ``rows[i]`` is a tuple of ``(column, value)`` pairs sorted by column with
    no explicit zeros.  The neighbour rank used by the walk estimators is the
    position within that tuple.
    """

    dim: int
    rows: tuple[tuple[tuple[int, complex], ...], ...]
    matrix_class: MatrixClass | None = None

    def __post_init__(self):
        rows = tuple(tuple(sorted(((int(c), complex(v)) for c, v in r), key=lambda cv: cv[0])) for r in self.rows)
        if len(rows) != self.dim:
            raise ValueError(f"{len(rows)} rows for dim {self.dim}")
        lookup = [dict(r) for r in rows]
        for i, r in enumerate(rows):
            if len(lookup[i]) != len(r):
                raise ValueError(f"duplicate column in row {i}")
            for j, v in r:
                if not 0 <= j < self.dim:
                    raise ValueError(f"column {j} out of range in row {i}")
                if v == 0:
                    raise ValueError(f"explicit zero at ({i},{j})")
                back = lookup[j].get(i)
                if back is None or abs(back - np.conj(v)) > config.get().tol_herm:
                    raise NotHermitian(f"entry ({i},{j}) has no conjugate partner")
        object.__setattr__(self, "rows", rows)
        values = [v for r in rows for _, v in r]
        cls = self.matrix_class
        if cls is None:
            if not values:
                cls = MatrixClass.ZeroOne
            elif all(v.imag == 0 for v in values):
                cls = classify(values)
            else:
                cls = MatrixClass.WeightedReal
        else:
            cls = MatrixClass(cls)
            _check_class(values, cls)
        object.__setattr__(self, "matrix_class", cls)

    @property
    def d(self) -> int:
        return max((len(r) for r in self.rows), default=0)

    @property
    def max_entry(self) -> float:
        return max((abs(v) for r in self.rows for _, v in r), default=0.0)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_real(self) -> bool:
        return all(v.imag == 0 for r in self.rows for _, v in r)

    def entry(self, i: int, j: int) -> complex:
        for c, v in self.rows[i]:
            if c == j:
                return v
        return 0j

    def degree(self, i: int) -> int:
        return len(self.rows[i])

    def dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i, r in enumerate(self.rows):
            for j, v in r:
                out[i, j] = v
        return out

    def to_scipy(self):
        import scipy.sparse as sp

        ii = [i for i, r in enumerate(self.rows) for _ in r]
        jj = [j for r in self.rows for j, _ in r]
        vv = [v for r in self.rows for _, v in r]
        dtype = float if self.is_real() else complex
        vv = np.real(vv) if dtype is float else np.asarray(vv)
        return sp.csr_matrix((vv, (ii, jj)), shape=(self.dim, self.dim), dtype=dtype)

    def neighbour_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(cols, vals, degree) padded to width d; missing slots hold -1 / 0."""
        d = max(self.d, 1)
        cols = np.full((self.dim, d), -1, dtype=np.int64)
        vals = np.zeros((self.dim, d), dtype=float if self.is_real() else complex)
        deg = np.zeros(self.dim, dtype=np.int64)
        for i, r in enumerate(self.rows):
            deg[i] = len(r)
            for rank, (j, v) in enumerate(r):
                cols[i, rank] = j
                vals[i, rank] = v.real if self.is_real() else v
        return cols, vals, deg

    def with_class(self, cls: MatrixClass) -> "SparseHermitian":
        return SparseHermitian(self.dim, self.rows, cls)

    @classmethod
    def from_edges(cls, dim, edges, matrix_class=None) -> "SparseHermitian":
        """Build from (i, j, value) triples given once per unordered pair."""
        rows: list[dict[int, complex]] = [dict() for _ in range(dim)]
        for i, j, v in edges:
            v = complex(v)
            if v == 0:
                continue
            rows[i][j] = v
            rows[j][i] = np.conj(v)
        return cls(dim, tuple(tuple(r.items()) for r in rows), matrix_class)


def _check_class(values, cls: MatrixClass) -> None:
    allowed = {MatrixClass.ZeroOne: {1.0}, MatrixClass.SignedUnit: {1.0, -1.0}}.get(cls)
    if allowed is None:
        if any(v.imag != 0 for v in values):
            raise ValueError("WeightedReal matrices must be real")
        return
    for v in values:
        if v.imag != 0 or v.real not in allowed:
            raise ValueError(f"entry {v} not allowed in class {cls.value}")


def sparse_from_dense(m: np.ndarray, threshold: float = 0.0, matrix_class=None) -> SparseHermitian:
    """Convert a dense Hermitian matrix; entries with |m_ij| <= threshold are dropped.

    The default threshold keeps every nonzero so the round trip is exact.
    """
    m = check_hermitian(m)
    rows = []
    for i in range(m.shape[0]):
        nz = np.nonzero(np.abs(m[i]) > threshold)[0]
        rows.append(tuple((int(j), complex(m[i, j])) for j in nz))
    return SparseHermitian(m.shape[0], tuple(rows), matrix_class)


def pauli_term(label: str, qubits: Sequence[int], coeff: float = 1.0) -> LocalTerm:
    """LocalTerm for a Pauli string such as ``"XZ"`` on the given qubits."""
    table = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
    m = np.array([[1.0 + 0j]])
    for ch in label:
        m = np.kron(m, table[ch])
    return LocalTerm(qubits, coeff * m)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (g + g.conj().T) / 2


def random_local_hamiltonian(
    n: int,
    m: int,
    rng: np.random.Generator,
    k: int = 2,
    target_norm: float | None = None,
) -> LogLocalHamiltonian:
    """m random Hermitian terms on random k-subsets of n qubits.

    With ``target_norm`` the whole operator is rescaled so that ||A|| equals it.
    """
    terms = []
    for _ in range(m):
        kk = min(k, n)
        qubits = tuple(sorted(rng.choice(n, size=kk, replace=False).tolist()))
        terms.append(LocalTerm(qubits, random_hermitian(2**kk, rng)))
    h = LogLocalHamiltonian(n, tuple(terms))
    if target_norm is not None:
        norm = operator_norm(assemble_dense(h))
        h = h.scaled(target_norm / norm)
    return h


def dense_size_ok(n: int) -> bool:
    return n <= config.get().n_dense_max


def log2_int(x: int) -> int:
    """Exact log2 of a power of two."""
    k = int(round(math.log2(x)))
    if 2**k != x:
        raise ValueError(f"{x} is not a power of two")
    return k
