"""Chung-Lu random graphs, power-law weight sequences and spectral-radius checks.

A model assigns expected degrees w_v; each pair (i, j), i < j, is an edge
independently with probability w_i w_j / sum(w).  The second-order average
degree d~ = sum(w^2)/sum(w) and the largest weight d govern the largest
adjacency eigenvalue: roughly d~ when d~ >> sqrt(d) ln N, roughly sqrt(d)
when sqrt(d) >> d~ ln^2 N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import eigsh

from . import config
from .errors import InfeasibleParameters, InvalidModel
from .hamiltonian import MatrixClass, SparseHermitian

ROW_CHUNK_PAIRS = 1 << 22


@dataclass(frozen=True)
class DegreeModel:
    weights: np.ndarray
    beta: float | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InvalidModel("weights must be a non-empty vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InvalidModel("weights must be finite and non-negative")
        object.__setattr__(self, "weights", w)

    @property
    def N(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def d(self) -> float:
        return float(self.weights.max())

    @property
    def d_bar(self) -> float:
        return float(self.weights.mean())

    @property
    def d_tilde(self) -> float:
        s = self.total
        return float(np.sum(self.weights**2) / s) if s > 0 else 0.0

    def max_pair_probability(self) -> float:
        if self.total == 0 or self.N < 2:
            return 0.0
        top = np.sort(self.weights)[-2:]
        return float(top[0] * top[1] / self.total)

    def is_valid(self) -> bool:
        return self.max_pair_probability() <= 1.0

    def to_dict(self) -> dict:
        return {"N": self.N, "d": self.d, "d_bar": self.d_bar, "d_tilde": self.d_tilde, "beta": self.beta}


@dataclass
class SampleStats:
    clipped_pairs: int = 0


def chung_lu_adjacency(model: DegreeModel, rng=None, strict: bool = False, stats: SampleStats | None = None) -> sp.csr_matrix:
    """Sampled adjacency as a scipy CSR matrix (symmetric, zero diagonal).

    Pair probabilities above 1 are clipped and counted in ``stats``; with
    ``strict`` they raise InvalidModel instead.
    """
    rng = np.random.default_rng(rng)
    w = model.weights
    n, total = model.N, model.total
    if strict and not model.is_valid():
        raise InvalidModel(f"pair probability {model.max_pair_probability():.3g} exceeds 1")
    ii, jj = [], []
    if total > 0:
        rows_per_chunk = max(1, ROW_CHUNK_PAIRS // n)
        for start in range(0, n - 1, rows_per_chunk):
            rows = np.arange(start, min(n - 1, start + rows_per_chunk))
            prob = np.outer(w[rows], w) / total
            upper = np.arange(n)[None, :] > rows[:, None]
            if stats is not None:
                stats.clipped_pairs += int(np.count_nonzero((prob > 1) & upper))
            hit = (rng.random(prob.shape) < prob) & upper
            r, c = np.nonzero(hit)
            ii.append(rows[r])
            jj.append(c)
    i = np.concatenate(ii) if ii else np.zeros(0, dtype=np.int64)
    j = np.concatenate(jj) if jj else np.zeros(0, dtype=np.int64)
    data = np.ones(2 * len(i))
    return sp.csr_matrix((data, (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(n, n))


def csr_to_sparse_hermitian(m: sp.spmatrix, matrix_class=None) -> SparseHermitian:
    m = sp.csr_matrix(m)
    rows = tuple(
        tuple(zip(m.indices[m.indptr[r] : m.indptr[r + 1]].tolist(), m.data[m.indptr[r] : m.indptr[r + 1]].tolist()))
        for r in range(m.shape[0])
    )
    return SparseHermitian(m.shape[0], rows, matrix_class)


def chung_lu_sample(model: DegreeModel, rng=None, strict: bool = False, stats: SampleStats | None = None) -> SparseHermitian:
    return csr_to_sparse_hermitian(chung_lu_adjacency(model, rng, strict, stats), MatrixClass.ZeroOne)


def _power_law_sequence(n: int, alpha: float, d: float, i0: float) -> np.ndarray:
    return d * ((np.arange(n) + i0) / i0) ** (-alpha)


def power_law_weights(N: int, beta: float, d: float, d_bar: float) -> DegreeModel:
    """w_i = d ((i + i0)/i0)^(-1/(beta-1)), i0 solved so the mean is d_bar.

    This is w_i = c (i + i0)^(-1/(beta-1)) with c fixed by w_0 = d.  The mean
    decreases monotonically as i0 shrinks, from d (i0 -> inf) towards d/N
    (i0 -> 0), so a solution exists iff d/N < d_bar <= d.
    """
    if beta <= 2:
        raise InfeasibleParameters("beta must exceed 2")
    if not 0 < d_bar <= d:
        raise InfeasibleParameters("need 0 < d_bar <= d")
    if d_bar * N <= d:
        raise InfeasibleParameters(f"mean {d_bar} unreachable with max {d} on {N} vertices")
    alpha = 1 / (beta - 1)
    if d_bar == d or N == 1:
        return DegreeModel(np.full(N, float(d)), beta)

    def gap(log_i0):
        return _power_law_sequence(N, alpha, d, math.exp(log_i0)).mean() - d_bar

    lo, hi = -40.0, 0.0
    while gap(hi) < 0:
        hi += 10.0
        if hi > 200:
            raise InfeasibleParameters("could not bracket i0")
    log_i0 = brentq(gap, lo, hi, xtol=1e-14, rtol=1e-14)
    return DegreeModel(_power_law_sequence(N, alpha, d, math.exp(log_i0)), beta)


def uniform_weights(N: int, c: float) -> DegreeModel:
    return DegreeModel(np.full(N, float(c)))


def largest_eigenvalue(m) -> float:
    """lambda_max of a real symmetric matrix; dense below the configured size."""
    if isinstance(m, SparseHermitian):
        m = m.to_scipy()
    n = m.shape[0]
    if n == 0 or (sp.issparse(m) and m.nnz == 0):
        return 0.0
    if n <= config.get().eig_dense_max:
        dense = m.toarray() if sp.issparse(m) else np.asarray(m)
        return float(np.linalg.eigvalsh(dense)[-1])
    v0 = np.ones(n) / math.sqrt(n)
    val = eigsh(sp.csr_matrix(m, dtype=float), k=1, which="LA", tol=1e-6, v0=v0, return_eigenvectors=False)
    return float(val[0])


def spectral_norm(m) -> float:
    """Largest |lambda| of a real symmetric matrix."""
    if isinstance(m, SparseHermitian):
        m = m.to_scipy()
    n = m.shape[0]
    if n == 0 or (sp.issparse(m) and m.nnz == 0):
        return 0.0
    if n <= config.get().eig_dense_max:
        dense = m.toarray() if sp.issparse(m) else np.asarray(m)
        return float(np.max(np.abs(np.linalg.eigvalsh(dense))))
    v0 = np.ones(n) / math.sqrt(n)
    val = eigsh(sp.csr_matrix(m, dtype=float), k=1, which="LM", tol=1e-6, v0=v0, return_eigenvectors=False)
    return float(abs(val[0]))


def regime(model: DegreeModel) -> dict:
    """Which largest-eigenvalue condition the model satisfies, and by what margin."""
    ln_n = math.log(model.N) if model.N > 1 else 0.0
    sd, dt = math.sqrt(model.d), model.d_tilde
    m_tilde = dt / (sd * ln_n) if sd * ln_n > 0 else math.inf
    m_sqrt = sd / (dt * ln_n**2) if dt * ln_n > 0 else math.inf
    if m_tilde > 1:
        name = "d_tilde"
    elif m_sqrt > 1:
        name = "sqrt_d"
    else:
        name = "neither"
    return {"regime": name, "margin_d_tilde": m_tilde, "margin_sqrt_d": m_sqrt}


@dataclass
class RegimeReport:
    model: dict
    lambdas: list
    mean_lambda: float
    std_lambda: float
    predicted: float
    ratio: float
    regime: str
    margins: dict
    clipped_pairs: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def eigenvalue_regime_check(model: DegreeModel, samples: int, rng=None) -> RegimeReport:
    """Sample graphs and compare mean lambda_max with max(sqrt(d), d~)."""
    if model.N > 4096:
        raise InvalidModel("regime check is limited to N <= 4096")
    seq = np.random.SeedSequence(rng if not isinstance(rng, np.random.SeedSequence) else rng.entropy)
    stats = SampleStats()
    lams = [largest_eigenvalue(chung_lu_adjacency(model, np.random.default_rng(s), stats=stats)) for s in seq.spawn(samples)]
    pred = max(math.sqrt(model.d), model.d_tilde)
    mean = float(np.mean(lams))
    reg = regime(model)
    return RegimeReport(
        model.to_dict(),
        lams,
        mean,
        float(np.std(lams, ddof=1)) if samples > 1 else 0.0,
        pred,
        mean / pred if pred > 0 else math.nan,
        reg["regime"],
        {k: v for k, v in reg.items() if k != "regime"},
        stats.clipped_pairs,
    )


def accuracy_advantage_report(a, p: float, eps: float = 1.0, norm: float | None = None) -> dict:
    """Quantum bound eps ||A||^p against the walk bound eps d^p ||A||_max^p."""
    if isinstance(a, SparseHermitian):
        d, amax = a.d, a.max_entry
        norm = spectral_norm(a) if norm is None else norm
    else:
        m = sp.csr_matrix(a)
        d = int(np.diff(m.indptr).max()) if m.shape[0] else 0
        amax = float(np.abs(m.data).max()) if m.nnz else 0.0
        norm = spectral_norm(m) if norm is None else norm
    quantum = eps * norm**p
    classical = eps * (d * amax) ** p
    ratio = quantum / classical if classical > 0 else (0.0 if quantum == 0 else math.inf)
    return {
        "p": p,
        "eps": eps,
        "norm": norm,
        "d": d,
        "max_entry": amax,
        "quantum_bound": quantum,
        "classical_bound": classical,
        "ratio": ratio,
        "sqrt_d_ratio": (1 / math.sqrt(d)) ** p if d > 0 else math.nan,
    }


def degree_exponent_fit(degrees, k_min: int = 1) -> float:
    """Power-law exponent from a log-log fit of the degree CCDF.

    If #{deg >= k} ~ k^(1 - beta), the fitted slope s gives beta = 1 - s.
    """
    deg = np.asarray(degrees)
    ks = np.unique(deg[deg >= k_min])
    if len(ks) < 3:
        raise ValueError("too few distinct degrees to fit")
    ccdf = np.array([(deg >= k).sum() for k in ks], dtype=float)
    slope = np.polyfit(np.log(ks), np.log(ccdf), 1)[0]
    return float(1 - slope)
