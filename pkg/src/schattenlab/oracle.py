"""Ground truth by full eigendecomposition, plus the exact term-expansion trace.

Everything else in the package is validated against the functions here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import ConditionInfinite, EigensolverFailure, SpectrumOutsideInterval, WorkBudgetExceeded
from .functions import SpectralFunction
from .hamiltonian import (
    LogLocalHamiltonian,
    SparseHermitian,
    check_dense_size,
    check_hermitian,
    embed,
)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    norm: float
    min_abs_eig: float
    condition: float

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "norm": self.norm,
            "min_abs_eig": self.min_abs_eig,
            "condition": self.condition if math.isfinite(self.condition) else "inf",
        }


def _as_dense(a) -> np.ndarray:
    if isinstance(a, SparseHermitian):
        return a.dense()
    if isinstance(a, LogLocalHamiltonian):
        return a.dense()
    return np.asarray(a)


def spectrum(a, check_reconstruction: bool = True) -> SpectrumReport:
    """Sorted eigenvalues with norm, smallest |lambda| and condition number."""
    m = check_hermitian(_as_dense(a))
    dim = m.shape[0]
    if dim > 2 ** config.get().n_dense_max:
        check_dense_size(int(math.ceil(math.log2(dim))))
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    if check_reconstruction and dim:
        resid = np.max(np.abs((v * w) @ v.conj().T - m))
        if resid > 1e-9 * max(1.0, float(np.max(np.abs(w)))):
            raise EigensolverFailure(f"reconstruction residual {resid:.2e}")
    absw = np.abs(w)
    norm = float(absw.max()) if dim else 0.0
    lmin = float(absw.min()) if dim else 0.0
    cond = norm / lmin if lmin > 0 else math.inf
    return SpectrumReport(w, norm, lmin, cond)


def _eigs(a) -> np.ndarray:
    if isinstance(a, SpectrumReport):
        return a.eigenvalues
    return spectrum(a).eigenvalues


def trace_f(a, f: SpectralFunction, tol: float = 1e-9) -> float:
    """sum_j f(lambda_j) / dim."""
    w = _eigs(a)
    lo, hi = f.interval
    if w.size and (w.min() < lo - tol or w.max() > hi + tol):
        raise SpectrumOutsideInterval(f"spectrum [{w.min():.4g}, {w.max():.4g}] not inside [{lo:.4g}, {hi:.4g}]")
    return float(np.sum(f.clamped(w)) / len(w))


def schatten_p_norm(a, p: float) -> float:
    """Normalised Schatten p-norm (sum |lambda|^p / dim)^(1/p); p may be inf."""
    if p < 1:
        raise ValueError("p must be >= 1")
    w = np.abs(_eigs(a))
    if math.isinf(p):
        return float(w.max())
    top = w.max()
    if top == 0:
        return 0.0
    # factor out the largest magnitude to keep large p finite
    return float(top * np.mean((w / top) ** p) ** (1.0 / p))


def graph_energy(a) -> float:
    """Tr|A| / N for a real symmetric adjacency."""
    if isinstance(a, SparseHermitian) and not a.is_real():
        raise ValueError("graph energy needs a real symmetric matrix")
    w = _eigs(a)
    return float(np.mean(np.abs(w))) if w.size else 0.0


def _multiply_local(left, right, n):
    (sa, ma), (sb, mb) = left, right
    support = tuple(sorted(set(sa) | set(sb)))
    pos = {q: i for i, q in enumerate(support)}
    k = len(support)
    ea = embed(ma, [pos[q] for q in sa], k)
    eb = embed(mb, [pos[q] for q in sb], k)
    return support, ea @ eb


def trace_power_exact_local(h: LogLocalHamiltonian, p: int, budget: int | None = None) -> float:
    """Tr(A^p) / 2^n by expanding into m^p products of local blocks.

    Each product is carried on the union of its factors' supports; a trace
    over a support of size s is weighted by 2^(n - s), i.e. divided by 2^s
    after normalisation.  The 2^n matrix is never formed.
    """
    if p < 0 or int(p) != p:
        raise ValueError("p must be a non-negative integer")
    p = int(p)
    if p == 0:
        return 1.0
    budget = config.get().exact_work_budget if budget is None else budget
    work = h.m**p
    if work > budget:
        raise WorkBudgetExceeded(f"m^p = {h.m}^{p} = {work} exceeds budget {budget}")
    blocks = [(t.qubits, np.asarray(t.matrix)) for t in h.terms]

    # depth-first over index tuples so that shared prefixes are multiplied once
    def walk(cur, depth):
        if depth == p:
            support, mat = cur
            return np.trace(mat) / 2 ** len(support)
        return sum(walk(_multiply_local(cur, b, h.n), depth + 1) for b in blocks)

    total = sum(walk(b, 1) for b in blocks)
    return float(total.real)


@dataclass(frozen=True)
class RootErrorReport:
    best_factor: float
    worst_factor: float
    eps_for_target: float | None
    condition: float


def pth_root_error_report(
    trace_est: float,
    eps: float,
    p: float,
    spec: SpectrumReport,
    target_delta: float | None = None,
) -> RootErrorReport:
    """Relative-error bracket when ||A||_p is recovered as (estimate)^(1/p).

    The best case (1 + eps)^(1/p) applies when Tr|A|^p is near its maximum;
    the worst case (1 + eps kappa^p)^(1/p) uses kappa = ||A|| / min|lambda|.
    For ``target_delta`` the accuracy eps' = ((1 + delta)^p - 1) / kappa^p
    that guarantees relative error (1 + delta) is also returned.
    """
    if trace_est <= 0:
        raise ValueError("trace estimate must be positive")
    kappa = spec.condition
    if not math.isfinite(kappa):
        raise ConditionInfinite("matrix is singular; worst-case bracket undefined")
    best = (1 + eps) ** (1 / p)
    worst = (1 + eps * kappa**p) ** (1 / p)
    eps_t = None
    if target_delta is not None:
        eps_t = ((1 + target_delta) ** p - 1) / kappa**p
    return RootErrorReport(best, worst, eps_t, kappa)
