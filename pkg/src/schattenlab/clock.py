"""Clock construction tying Tr(A^M) of a Hermitian matrix to Re Tr(U).

For a gate sequence U = U_{M-1} ... U_0 on n qubits, W = sum_l |l+1><l| (x) U_l
(clock addition mod M) and A = (W + W^dagger)/2 acts on log2(M) + n qubits,
clock register first.  W^M is block diagonal with cyclic products of the
gates, so Tr(W^M) = M Tr(U).

Because W and W^dagger commute, A^M = 2^-M sum_j C(M, j) W^(2j - M).  Only
the powers 0 and +-M have nonzero trace, which gives

    Re Tr(U) / 2^n = (2^M Tr(A^M)/dim - C(M, M/2)) / 2.

The binomial offset from the W^0 term is part of the identity; dropping it
leaves a residual of exactly C(M, M/2)/2 on every circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config, oracle
from .dqc1 import estimate_schatten_trace
from .hamiltonian import (
    LocalTerm,
    LogLocalHamiltonian,
    check_dense_size,
    check_hermitian,
    embed,
    operator_norm,
)
from .report import EstimateReport, stopwatch

UNITARY_TOL = 1e-10


def _is_pow2(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class GateSequence:
    """Gates applied in list order: ``gates[0]`` is U_0 and acts first."""

    n: int
    gates: tuple

    def __post_init__(self):
        gates = []
        for qubits, mat in self.gates:
            qubits = tuple(int(q) for q in qubits)
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != (2 ** len(qubits),) * 2:
                raise ValueError(f"gate on {qubits} has shape {mat.shape}")
            if any(not 0 <= q < self.n for q in qubits) or len(set(qubits)) != len(qubits):
                raise ValueError(f"bad qubit list {qubits} for n = {self.n}")
            dev = np.max(np.abs(mat.conj().T @ mat - np.eye(len(mat))))
            if dev > UNITARY_TOL:
                raise ValueError(f"gate on {qubits} is not unitary (deviation {dev:.2e})")
            gates.append((qubits, mat))
        if not gates:
            raise ValueError("empty gate sequence")
        object.__setattr__(self, "gates", tuple(gates))

    @property
    def M(self) -> int:
        return len(self.gates)

    @property
    def M_pow2(self) -> bool:
        return _is_pow2(self.M)

    @property
    def clock_qubits(self) -> int:
        return int(math.ceil(math.log2(self.M))) if self.M > 1 else 0

    def is_real(self) -> bool:
        return all(np.all(m.imag == 0) for _, m in self.gates)

    def padded(self, target: int | None = None) -> "GateSequence":
        """Append identity gates up to ``target`` (default: next power of two)."""
        target = 1 << max(1, (self.M - 1).bit_length()) if target is None else target
        if target < self.M:
            raise ValueError("cannot pad to fewer gates")
        ident = ((0,), np.eye(2))
        return GateSequence(self.n, self.gates + (ident,) * (target - self.M))

    def full_gates(self) -> list[np.ndarray]:
        return [embed(m, q, self.n) for q, m in self.gates]

    def circuit_unitary(self) -> np.ndarray:
        """U_{M-1} ... U_1 U_0."""
        out = np.eye(2**self.n, dtype=complex)
        for g in self.full_gates():
            out = g @ out
        return out


def _ready(seq: GateSequence) -> GateSequence:
    seq = seq if seq.M_pow2 and seq.M >= 2 else seq.padded()
    check_dense_size(seq.n + seq.clock_qubits)
    return seq


def _shift(M: int, l: int) -> np.ndarray:
    e = np.zeros((M, M))
    e[(l + 1) % M, l] = 1.0
    return e


def build_clock_unitary(seq: GateSequence) -> np.ndarray:
    """W = sum_l |l+1 mod M><l| (x) U_l, padded to a power of two first."""
    seq = _ready(seq)
    M = seq.M
    return sum(np.kron(_shift(M, l), g) for l, g in enumerate(seq.full_gates()))


@dataclass(frozen=True)
class ClockHamiltonian:
    base: np.ndarray
    M: int
    n: int
    sequence: GateSequence

    @property
    def n_total(self) -> int:
        return self.n + int(math.log2(self.M))

    def as_local(self) -> LogLocalHamiltonian:
        """One term (|l+1><l| (x) U_l + h.c.)/2 per gate on clock + gate qubits.

        Each term touches all log2(M) clock qubits plus the gate's support, so
        the locality grows with log M; the check is skipped for that reason.
        """
        c = int(math.log2(self.M))
        terms = []
        for l, (qubits, mat) in enumerate(self.sequence.gates):
            blk = np.kron(_shift(self.M, l), mat)
            blk = (blk + blk.conj().T) / 2
            terms.append(LocalTerm(tuple(range(c)) + tuple(q + c for q in qubits), blk))
        return LogLocalHamiltonian(self.n_total, tuple(terms), enforce_locality=False)


def clock_hamiltonian(seq: GateSequence) -> ClockHamiltonian:
    seq = _ready(seq)
    w = build_clock_unitary(seq)
    a = check_hermitian((w + w.conj().T) / 2)
    return ClockHamiltonian(a, seq.M, seq.n, seq)


def identity_offset(M: int) -> float:
    """C(M, M/2): the normalised trace of the W^0 term in 2^M A^M."""
    return float(math.comb(M, M // 2))


def hardness_identity_check(seq: GateSequence) -> dict:
    """Both sides of the Tr(A^M) / Re Tr(U) identity.

    ``lhs`` inverts the identity including the binomial offset;
    ``literal_lhs`` is 2^M Tr(A^M)/dim alone, kept so the size of the
    offset stays visible.
    """
    ch = clock_hamiltonian(seq)
    M = ch.M
    w = oracle.spectrum(ch.base).eigenvalues
    tr_am = float(np.sum(w**M) / len(w))
    literal = 2**M * tr_am
    lhs = (literal - identity_offset(M)) / 2
    rhs = float(np.trace(ch.sequence.circuit_unitary()).real / 2**ch.n)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "residual": abs(lhs - rhs),
        "literal_lhs": literal,
        "literal_residual": abs(literal - rhs),
        "trace_A_M": tr_am,
        "M": M,
        "n": ch.n,
    }


def clock_trace_check(seq: GateSequence) -> float:
    """|Tr(W^M) - M Tr(U)|."""
    seq = _ready(seq)
    w = build_clock_unitary(seq)
    lhs = np.trace(np.linalg.matrix_power(w, seq.M))
    return float(abs(lhs - seq.M * np.trace(seq.circuit_unitary())))


def reduction_pipeline(
    seq: GateSequence,
    eps: float,
    mode: str = "exact_submatrix",
    seed=None,
    simulation: str = "trotter",
) -> EstimateReport:
    """Recover Re Tr(U)/2^n from a one-clean-qubit estimate of Tr(A^M)/dim.

    An error e on Tr(A^M)/dim becomes 2^(M-1) e on the recovered value.  The
    trace estimator claims eps_s ||A||^M / 2, so eps_s = eps / (2^(M-2) ||A||^M)
    keeps the final claim at eps.
    """
    ch = clock_hamiltonian(seq)
    M = ch.M
    with stopwatch() as ms:
        h = ch.as_local()
        norm = operator_norm(ch.base)
        inner = min(eps / (2 ** (M - 2) * norm**M), 0.5)
        rep = estimate_schatten_trace(h, M, inner, kind="pow", mode=mode, seed=seed, norm=norm, simulation=simulation)
        value = (2**M * rep.value - identity_offset(M)) / 2
    bound = 2 ** (M - 1) * rep.claimed_bound
    params = {"M": M, "n": ch.n, "eps": eps, "trace_eps": inner, "trace_report": rep.to_dict()}
    return EstimateReport(value, bound, "dqc1", mode, params, seed, rep.shots, ms[0])


def random_real_circuit(n: int, M: int, rng: np.random.Generator, max_support: int = 2) -> GateSequence:
    """M random orthogonal gates on random 1- or 2-qubit supports."""
    from scipy.stats import ortho_group

    gates = []
    for _ in range(M):
        k = int(rng.integers(1, min(max_support, n) + 1))
        qubits = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
        gates.append((qubits, ortho_group.rvs(2**k, random_state=rng)))
    return GateSequence(n, tuple(gates))
