"""First-order Lie-Trotter simulation of exp(iAt) for log-local A.

The step count follows r >= C m^3 t^2 zeta^2 / delta with zeta the largest
term norm.  C is not given analytically; :func:`calibrate_constant` finds it
empirically and the result is pinned in :mod:`schattenlab.config`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from . import config
from .hamiltonian import LogLocalHamiltonian, assemble_dense, check_dense_size, embed


@dataclass(frozen=True)
class TrotterPlan:
    t: float
    delta: float
    steps: int
    constant: float
    zeta: float
    m: int
    tau: float

    def to_dict(self) -> dict:
        return asdict(self)


def required_steps(m: int, t: float, zeta: float, delta: float, constant: float) -> int:
    return max(1, math.ceil(constant * m**3 * t**2 * zeta**2 / delta))


def plan_trotter(h: LogLocalHamiltonian, t: float, delta: float, constant: float | None = None) -> TrotterPlan:
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    c = config.get().trotter_c if constant is None else constant
    zeta = h.term_norm_bound
    r = required_steps(h.m, t, zeta, delta, c)
    return TrotterPlan(t=t, delta=delta, steps=r, constant=c, zeta=zeta, m=h.m, tau=abs(t) * h.norm_bound())


def step_unitary(h: LogLocalHamiltonian, t: float, steps: int) -> np.ndarray:
    """prod_j exp(i A_j t / r), applied A_1 first on the left as written."""
    check_dense_size(h.n)
    out = np.eye(2**h.n, dtype=complex)
    for term in h.terms:
        out = out @ term_exponential(term, t / steps, h.n)
    return out


def term_exponential(term, s: float, n: int) -> np.ndarray:
    """exp(i s A_j) embedded, exponentiated on the 2^k block."""
    w, v = np.linalg.eigh(np.asarray(term.matrix))
    block = (v * np.exp(1j * s * w)) @ v.conj().T
    return embed(block, term.qubits, n)


def unitary_power(u: np.ndarray, k: int) -> np.ndarray:
    """u^k for unitary u via its complex Schur form.

    Repeated squaring lets rounding drift away from unitarity by roughly k
    ulps; powering unit-modulus Schur eigenvalues keeps the result unitary
    to machine precision.
    """
    t, z = scipy.linalg.schur(np.asarray(u, dtype=complex), output="complex")
    lam = np.diag(t)
    lam = lam / np.abs(lam)
    return (z * lam**k) @ z.conj().T


def trotter_unitary(h: LogLocalHamiltonian, plan: TrotterPlan) -> np.ndarray:
    """(prod_j exp(i A_j t / r))^r."""
    step = step_unitary(h, plan.t, plan.steps)
    return unitary_power(step, plan.steps)


def exact_unitary(h: LogLocalHamiltonian, t: float) -> np.ndarray:
    a = assemble_dense(h)
    w, v = np.linalg.eigh(a)
    return (v * np.exp(1j * t * w)) @ v.conj().T


def certify_simulation(h: LogLocalHamiltonian, v: np.ndarray, t: float) -> float:
    """Operator-norm distance ||V - exp(iAt)||."""
    target = scipy.linalg.expm(1j * t * assemble_dense(h))
    return float(np.linalg.norm(v - target, 2))


def eigenphase_deviation(h: LogLocalHamiltonian, v: np.ndarray, t: float) -> float:
    """Largest |mu_j - lambda_j t| after pairing sorted eigenphases.

    Requires ||A|| |t| < pi so that the phases of exp(iAt) do not wrap.
    """
    lam = np.sort(np.linalg.eigvalsh(assemble_dense(h)) * t)
    mu = np.sort(np.angle(np.linalg.eigvals(v)))
    return float(np.max(np.abs(mu - lam)))


def calibrate_constant(fixtures, start: float = 1.0, max_doublings: int = 20) -> float:
    """Smallest C = start * 2^k for which every fixture certifies.

    ``fixtures`` is an iterable of ``(hamiltonian, t, delta)``.
    """
    fixtures = list(fixtures)
    c = start
    for _ in range(max_doublings + 1):
        ok = True
        for h, t, delta in fixtures:
            plan = plan_trotter(h, t, delta, constant=c)
            if certify_simulation(h, trotter_unitary(h, plan), t) > delta:
                ok = False
                break
        if ok:
            return c
        c *= 2
    raise RuntimeError(f"no constant up to {c} certifies all fixtures")
