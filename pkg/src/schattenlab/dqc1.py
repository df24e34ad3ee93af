"""One-clean-qubit simulation: trace estimation and the Tr(f(A)) circuit.

Register layout of the Tr(f(A)) program, most significant qubit first::

    [ target b | system (n qubits) | estimate register (a ancillas) ]

The circuit is U~ = PE^dagger . D . PE where PE is phase estimation of
V ~ exp(iA) and D multiplies |b>|k> by exp(+-i arccos f(phi(k))) (sign + for
b = 0).  The quantity read out is the trace of the block of U~ with the
estimate register fixed to |0>.  The target qubit and the system are
maximally mixed; the a ancillas are clean, and the trace readout adds one
more clean control qubit.

Two routes compute that block trace.  ``dense`` builds U~ gate by gate and
is limited to small registers.  ``spectral`` uses the eigenphases of V and
the closed-form phase-estimation amplitudes; it agrees with the dense route
to rounding and scales to the ancilla counts the error budget asks for.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from . import config
from .errors import BudgetInfeasible, DimensionTooLarge, SpectrumOutOfRange
from .functions import SpectralFunction, abs_pow_p, pow_p
from .hamiltonian import LogLocalHamiltonian, assemble_dense, embed, operator_norm
from .report import EstimateReport, stopwatch
from .trotter import TrotterPlan, exact_unitary, plan_trotter, trotter_unitary, unitary_power

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _ceil_log2(x: float) -> int:
    # tolerate rounding when x is an exact power of two
    return math.ceil(math.log2(x) - 1e-12)


# ---------------------------------------------------------------------------
# baseline trace estimation


class TraceEstimate(NamedTuple):
    re: float
    im: float
    shots: int | None


def clean_qubit_probability(u: np.ndarray, imaginary: bool = False, simulate_max_qubits: int = 8) -> float:
    """Probability that the clean qubit reads 0 after controlled-U and H.

    For small registers the density matrix is evolved explicitly; above
    ``simulate_max_qubits`` the closed form 1/2 + Re(c Tr U)/2^(n+1) is used
    (c = 1, or -i for the imaginary-part preparation).
    """
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    nq = int(round(math.log2(dim)))
    if nq + 1 > simulate_max_qubits:
        tr = np.trace(u) / dim
        return float(0.5 + 0.5 * (tr.imag if imaginary else tr.real))
    ket = np.array([1, -1j]) / math.sqrt(2) if imaginary else np.array([1, 1]) / math.sqrt(2)
    rho = np.kron(np.outer(ket, ket.conj()), np.eye(dim) / dim)
    cu = np.block([[np.eye(dim), np.zeros((dim, dim))], [np.zeros((dim, dim)), u]])
    h = np.kron(HADAMARD, np.eye(dim))
    rho = h @ cu @ rho @ cu.conj().T @ h.conj().T
    return float(np.trace(rho[:dim, :dim]).real)


def dqc1_trace_estimate(u: np.ndarray, shots: int | None = None, rng_seed=None) -> TraceEstimate:
    """Estimate Tr(U)/2^n from clean-qubit measurement statistics.

    ``shots=None`` returns the exact expectation (exact-probability mode);
    otherwise each of the real and imaginary parts is estimated from
    ``shots`` Bernoulli outcomes as 2 (freq0 - 1/2).
    """
    p_re = clean_qubit_probability(u)
    p_im = clean_qubit_probability(u, imaginary=True)
    if shots is None:
        return TraceEstimate(2 * p_re - 1, 2 * p_im - 1, None)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng_seed)
    f_re = rng.binomial(shots, min(max(p_re, 0.0), 1.0)) / shots
    f_im = rng.binomial(shots, min(max(p_im, 0.0), 1.0)) / shots
    return TraceEstimate(2 * (f_re - 0.5), 2 * (f_im - 0.5), shots)


# ---------------------------------------------------------------------------
# phase-estimation budget


def ancilla_count(eta: float, phi: float) -> int:
    """ceil(log2(1/eta)) + ceil(log2(2 + 1/(2 phi)))."""
    return _ceil_log2(1 / eta) + _ceil_log2(2 + 1 / (2 * phi))


@dataclass(frozen=True)
class PhaseEstimationBudget:
    eps: float
    eta: float
    phi: float
    a: int
    delta_sim: float

    @classmethod
    def from_epsilon(cls, eps: float) -> "PhaseEstimationBudget":
        """Largest eta <= eps/(8 pi) and phi <= eps/8 reachable with whole qubits."""
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        a_eta = _ceil_log2(8 * math.pi / eps)
        a_phi = _ceil_log2(2 + 4 / eps)
        eta = 2.0**-a_eta
        phi = 1 / (2 * (2**a_phi - 2))
        return cls(eps, eta, phi, ancilla_count(eta, phi), eps / (2 * math.pi))

    @classmethod
    def with_ancillas(cls, eps: float, a: int, delta_sim: float | None = None) -> "PhaseEstimationBudget":
        """Explicit register size, for fixtures that fall outside the rules."""
        return cls(eps, 2.0**-a, 0.5, a, eps / (2 * math.pi) if delta_sim is None else delta_sim)

    def violations(self) -> list[str]:
        out = []
        if self.eta > self.eps / (8 * math.pi):
            out.append("eta > eps/(8 pi)")
        if self.phi > self.eps / 8:
            out.append("phi > eps/8")
        if self.delta_sim > self.eps / (2 * math.pi) * (1 + 1e-12):
            out.append("delta_sim > eps/(2 pi)")
        if self.a < ancilla_count(self.eta, self.phi):
            out.append("a below the ancilla formula")
        return out

    def to_dict(self) -> dict:
        return asdict(self)


def phase_of_index(k, a: int):
    """Map register value k to an eigenvalue estimate; k <= 2^(a-1) is the positive branch."""
    n = 2**a
    k = np.asarray(k, dtype=float)
    out = 2 * math.pi * k / n
    return np.where(k <= n / 2, out, out - 2 * math.pi)


def rotation_angles(f: SpectralFunction, a: int, ks=None) -> np.ndarray:
    """arccos f(phi(k)) with phi(k) clamped into f's interval."""
    ks = np.arange(2**a) if ks is None else ks
    vals = np.clip(f.clamped(phase_of_index(ks, a)), -1.0, 1.0)
    return np.arccos(vals)


def pe_distribution(theta: float, a: int, ks=None) -> np.ndarray:
    """|gamma_{k|theta}|^2 for the register values ks (default all 2^a).

    gamma_{k|theta} = (1/N) sum_{w<N} exp(2 pi i w (theta - k/N)), N = 2^a.
    """
    n = 2**a
    ks = np.arange(n) if ks is None else np.asarray(ks)
    u = (theta % 1.0) * n
    nearest = round(u)
    if abs(u - nearest) < 1e-12:
        return (ks == nearest % n).astype(float)
    num = math.sin(math.pi * (u - nearest)) ** 2
    den = np.sin(math.pi * (u - ks) / n) ** 2
    return num / (n * n * den)


def pe_distribution_matrix(thetas, a: int, ks) -> np.ndarray:
    """Rows of |gamma_{k|theta}|^2 for several eigenphases at once."""
    n = 2**a
    thetas = np.asarray(thetas, dtype=float)
    ks = np.asarray(ks)
    u = (thetas % 1.0) * n
    nearest = np.round(u)
    exact = np.abs(u - nearest) < 1e-12
    num = np.sin(np.pi * (u - nearest)) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        den = np.sin(np.pi * (u[:, None] - ks[None, :]) / n) ** 2
        out = num[:, None] / (n * n * den)
    if exact.any():
        out[exact] = (ks[None, :] == (nearest[exact] % n)[:, None]).astype(float)
    return out


def pe_expectation(thetas, a: int, values_fn, block: int = 1 << 22) -> np.ndarray:
    """sum_k |gamma_{k|theta}|^2 values_fn(k) for each theta, streamed over k."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    n = 2**a
    chunk = max(1, block // max(1, len(thetas)))
    total = np.zeros(len(thetas))
    for start in range(0, n, chunk):
        ks = np.arange(start, min(n, start + chunk))
        total += pe_distribution_matrix(thetas, a, ks) @ values_fn(ks)
    return total


# ---------------------------------------------------------------------------
# the Tr(f(A)) program


@dataclass
class DQC1Program:
    n_sys: int
    n_anc: int
    f: SpectralFunction
    budget: PhaseEstimationBudget
    sim_unitary: np.ndarray
    plan: TrotterPlan | None = None
    shot_count: int | None = None
    readout_accuracy: float | None = None
    _eigenphases: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_qubits(self) -> int:
        return 1 + self.n_sys + self.n_anc

    @property
    def clean_qubits(self) -> int:
        # estimate register plus the trace-readout control
        return self.n_anc + 1

    def eigenphases(self) -> np.ndarray:
        """theta_j in [0, 1) with V psi_j = exp(2 pi i theta_j) psi_j."""
        if self._eigenphases is None:
            ev = np.linalg.eigvals(self.sim_unitary)
            self._eigenphases = (np.angle(ev) / (2 * math.pi)) % 1.0
        return self._eigenphases

    def _f_of_index(self, ks):
        return np.clip(self.f.clamped(phase_of_index(ks, self.n_anc)), -1.0, 1.0)

    def submatrix_trace(self, route: str = "spectral") -> complex:
        """Tr(U') where U' is U~ with the estimate register fixed to |0>."""
        if route == "dense":
            return complex(np.trace(self.submatrix()))
        if route != "spectral":
            raise ValueError(f"unknown route {route!r}")
        per_eig = pe_expectation(self.eigenphases(), self.n_anc, self._f_of_index)
        return complex(2 * per_eig.sum())

    def pe_weighted_sum(self) -> float:
        """sum_{j,k} |gamma_{k|j}|^2 f(phi(k)); equals Tr(U')/2."""
        return self.submatrix_trace().real / 2

    # dense gate-level construction ---------------------------------------

    def _check_dense(self):
        limit = config.get().circuit_qubits_max
        if self.n_qubits > limit:
            raise DimensionTooLarge(f"{self.n_qubits}-qubit circuit exceeds circuit_qubits_max={limit}")

    def phase_estimation_unitary(self) -> np.ndarray:
        """PE on (system, estimate register): H^a, controlled V^(2^l), inverse QFT."""
        self._check_dense()
        n, a = self.n_sys, self.n_anc
        total = n + a
        nn = 2**a
        had = np.array([[1.0]])
        for _ in range(a):
            had = np.kron(had, HADAMARD)
        x = np.arange(nn)
        qft = np.exp(2j * math.pi * np.outer(x, x) / nn) / math.sqrt(nn)
        pe = np.kron(np.eye(2**n), had)
        eye = np.eye(2**n)
        for l in range(a):
            vpow = unitary_power(self.sim_unitary, 2**l)
            ctrl = np.kron(np.diag([1.0, 0.0]), eye) + np.kron(np.diag([0.0, 1.0]), vpow)
            # the qubit carrying weight 2^l sits at register position a-1-l
            gate = embed(ctrl, [n + a - 1 - l] + list(range(n)), total)
            pe = gate @ pe
        return np.kron(eye, qft.conj().T) @ pe

    def unitary(self) -> np.ndarray:
        """U~ on [b | system | register]."""
        pe = self.phase_estimation_unitary()
        theta = rotation_angles(self.f, self.n_anc)
        d_sys = 2**self.n_sys
        phase0 = np.tile(np.exp(1j * theta), d_sys)
        phase1 = np.tile(np.exp(-1j * theta), d_sys)
        diag = np.concatenate([phase0, phase1])
        full_pe = np.kron(np.eye(2), pe)
        return full_pe.conj().T @ (diag[:, None] * full_pe)

    def submatrix(self) -> np.ndarray:
        u = self.unitary()
        idx = np.arange(2 ** (1 + self.n_sys)) * 2**self.n_anc
        return u[np.ix_(idx, idx)]


def _checked_norm(h: LogLocalHamiltonian) -> float:
    return operator_norm(assemble_dense(h))


def build_trace_f_circuit(
    h: LogLocalHamiltonian,
    f: SpectralFunction,
    budget: PhaseEstimationBudget,
    simulation: str = "trotter",
    enforce_ancilla_limit: bool = True,
) -> DQC1Program:
    """Assemble the Tr(f(A)) program for a pre-scaled Hamiltonian.

    Raises SpectrumOutOfRange unless ||A|| <= pi - margin and the spectrum lies
    inside f's interval, and BudgetInfeasible when a exceeds a_max(n).
    """
    cfg = config.get()
    if f.f_max > 1 + 1e-12:
        raise ValueError("f must map into [-1, 1]; normalise it first")
    norm = _checked_norm(h)
    if norm > cfg.phase_limit + 1e-12:
        raise SpectrumOutOfRange(f"||A|| = {norm:.4g} exceeds pi - {cfg.spectral_margin}")
    if norm > f.b + 1e-9:
        raise SpectrumOutOfRange(f"||A|| = {norm:.4g} outside f interval [-{f.b:.4g}, {f.b:.4g}]")
    if enforce_ancilla_limit and budget.a > cfg.a_max(h.n):
        raise BudgetInfeasible(f"a = {budget.a} exceeds a_max({h.n}) = {cfg.a_max(h.n)}")
    if simulation == "trotter":
        plan = plan_trotter(h, 1.0, min(budget.delta_sim, 1.0))
        v = trotter_unitary(h, plan)
    elif simulation == "exact":
        plan = None
        v = exact_unitary(h, 1.0)
    else:
        raise ValueError(f"unknown simulation {simulation!r}")
    return DQC1Program(h.n, budget.a, f, budget, v, plan)


def audit_clean_qubits(program: DQC1Program) -> dict:
    cfg = config.get()
    b = program.budget
    bound = ancilla_count(b.eta, b.phi)
    a_max = cfg.a_max(program.n_sys)
    return {
        "a": program.n_anc,
        "formula": bound,
        "a_max": a_max,
        "clean_qubits": program.clean_qubits,
        "pass": program.n_anc <= a_max,
    }


def readout_shots(eps: float, fail_prob: float) -> int:
    """Shots so that Tr(U')/2^n is within eps/2 with probability 1 - fail_prob.

    Tr(U')/2^n = 4 p0 - 2, so p0 is needed to eps/8; Hoeffding gives the count.
    """
    return math.ceil(math.log(2 / fail_prob) / (2 * (eps / 8) ** 2))


def run_trace_f(
    h: LogLocalHamiltonian,
    f: SpectralFunction,
    eps: float,
    mode: str = "exact_submatrix",
    seed=None,
    simulation: str = "trotter",
    budget: PhaseEstimationBudget | None = None,
    route: str = "spectral",
    fail_prob: float | None = None,
) -> EstimateReport:
    """Estimate Tr(f(A))/2^n with the one-clean-qubit circuit.

    f is divided by f_max first when it leaves [-1, 1]; the claimed bound is
    eps (K + 1)/2 in units of the normalised function, scaled back by f_max.
    In ``sampled`` mode the trace readout is simulated with Bernoulli shots
    sized for readout accuracy eps/2 on Tr(U')/2^n.
    """
    if mode not in ("exact_submatrix", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    cfg = config.get()
    scale = 1.0
    fn = f
    if f.f_max > 1:
        scale = f.f_max
        fn = f.normalized()
    budget = PhaseEstimationBudget.from_epsilon(eps) if budget is None else budget
    with stopwatch() as ms:
        prog = build_trace_f_circuit(h, fn, budget, simulation=simulation)
        half = prog.submatrix_trace(route).real / 2 ** (h.n + 1)
        shots = None
        if mode == "sampled":
            fail_prob = cfg.readout_fail_prob if fail_prob is None else fail_prob
            shots = readout_shots(eps, fail_prob)
            prog.shot_count = shots
            prog.readout_accuracy = eps / 2
            p0 = min(max(0.5 + half / 2, 0.0), 1.0)
            rng = np.random.default_rng(seed)
            half = 2 * rng.binomial(shots, p0) / shots - 1
    bound = eps * (fn.lipschitz + 1) / 2 * scale
    params = {
        "f": f.describe(),
        "eps": eps,
        "budget": budget.to_dict(),
        "simulation": simulation,
        "route": route,
        "plan": prog.plan.to_dict() if prog.plan else None,
        "audit": audit_clean_qubits(prog),
    }
    return EstimateReport(half * scale, bound, "dqc1", mode, params, seed, shots, ms[0])


def estimate_schatten_trace(
    h: LogLocalHamiltonian,
    p: int,
    eps: float,
    kind: str = "abs",
    mode: str = "exact_submatrix",
    seed=None,
    norm: float | None = None,
    simulation: str = "trotter",
    fail_prob: float | None = None,
) -> EstimateReport:
    """Tr(|A|^p)/2^n (``kind="abs"``) or Tr(A^p)/2^n (``kind="pow"``) to eps ||A||^p.

    A is first rescaled so that its norm is pi - margin; the bound eps ||A||^p
    is invariant under that rescaling.  The normalised function |x|^p/b^p on
    [-b, b] has K = p/b, so the inner run uses eps/(p/b + 1).  ``norm`` may
    supply an upper bound on ||A|| instead of the exact value.
    """
    if p < 1 or int(p) != p:
        raise ValueError("p must be a positive integer")
    if kind not in ("abs", "pow"):
        raise ValueError("kind must be 'abs' or 'pow'")
    norm = _checked_norm(h) if norm is None else float(norm)
    if norm == 0:
        return EstimateReport(0.0, 0.0, "dqc1", mode, {"p": p, "eps": eps, "kind": kind, "norm": 0.0}, seed)
    s = config.get().phase_limit / norm
    hs = h.scaled(s)
    b = norm * s
    base = abs_pow_p(p, b) if kind == "abs" else pow_p(p, b)
    fbar = base.normalized()
    inner_eps = eps / (p / b + 1)
    rep = run_trace_f(hs, fbar, inner_eps, mode=mode, seed=seed, simulation=simulation, fail_prob=fail_prob)
    factor = norm**p
    rep.value *= factor
    rep.claimed_bound *= factor
    rep.parameters.update({"p": p, "kind": kind, "outer_eps": eps, "norm": norm, "rescale": s, "inner_eps": inner_eps})
    return rep
