"""Random-walk estimation of (A^p)_jj and Tr(A^p)/N for sparse symmetric A.

Step 1 estimates W_p, the number of length-p walks leaving j: draw candidate
rank sequences uniformly from {0..d-1}^p, follow the ranked neighbour at each
step, and scale the realisable fraction by d^p.  Step 2 estimates the mean
weight of a closed walk, Y(w) = 1[w ends at j] * prod of edge values.  The
product X * Y estimates (A^p)_jj.

Two step-2 samplers are offered.  ``corrected`` (default) draws realisable
walks uniformly by rejection from the same candidate generator, so E[Y] is
exactly (A^p)_jj / W_p.  ``literal`` walks to a uniformly chosen neighbour at
each step; on irregular graphs that weights walks by 1/prod(deg) and the
product estimator is biased.

Sample counts come from Hoeffding's inequality.  With ``constants="strict"``
each count accounts for the range of the averaged variable (Y in [-1, 1] has
range 2); ``constants="nominal"`` uses exp(-2 eps^2 k) for {0,1} and weighted
classes and exp(-eps^2 k) for signed ones.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import WorkBudgetExceeded
from .hamiltonian import MatrixClass, SparseHermitian
from .report import EstimateReport, stopwatch

EXHAUSTIVE_MAX = 1 << 20
REJECTION_MAX = 1 << 24


@dataclass(frozen=True)
class WalkPlan:
    p: int
    k: int
    k_prime: int
    eps: float
    eps_prime: float
    fail_prob: float
    d: int
    matrix_class: MatrixClass
    constants: str = "strict"

    @property
    def delta(self) -> float:
        return self.eps + self.eps_prime + self.eps * self.eps_prime

    def vertex_samples(self) -> int:
        """k'' = ceil(2 ln(2/fail_prob) / delta^2) for the trace estimate."""
        return math.ceil(2 * math.log(2 / self.fail_prob) / self.delta**2)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["matrix_class"] = self.matrix_class.value
        out["delta"] = self.delta
        return out


def _hoeffding(eps: float, fail_prob: float, rate: float) -> int:
    """Smallest k with 2 exp(-rate eps^2 k) <= fail_prob."""
    return math.ceil(math.log(2 / fail_prob) / (rate * eps**2))


def plan_samples(
    eps: float,
    eps_prime: float,
    fail_prob: float,
    matrix_class: MatrixClass = MatrixClass.ZeroOne,
    p: int = 0,
    d: int = 0,
    constants: str = "strict",
) -> WalkPlan:
    """Minimal k and k' for accuracy eps d^p on X and eps' ||A||_max^p on Y."""
    for name, v in (("eps", eps), ("eps_prime", eps_prime), ("fail_prob", fail_prob)):
        if not 0 < v < 1:
            raise ValueError(f"{name} must lie in (0, 1)")
    cls = MatrixClass(matrix_class)
    k = _hoeffding(eps, fail_prob, 2.0)
    if constants == "strict":
        rate = 2.0 if cls is MatrixClass.ZeroOne else 0.5
    elif constants == "nominal":
        rate = 1.0 if cls is MatrixClass.SignedUnit else 2.0
    else:
        raise ValueError(f"unknown constants {constants!r}")
    kp = _hoeffding(eps_prime, fail_prob, rate)
    return WalkPlan(int(p), k, kp, eps, eps_prime, fail_prob, int(d), cls, constants)


def plan_for(a: SparseHermitian, p: int, eps: float, eps_prime: float, fail_prob: float, constants: str = "strict") -> WalkPlan:
    return plan_samples(eps, eps_prime, fail_prob, a.matrix_class, p, a.d, constants)


# ---------------------------------------------------------------------------
# walk primitives


class _Table:
    """Neighbour table of A, cached per matrix."""

    def __init__(self, a: SparseHermitian):
        self.cols, self.vals, self.deg = a.neighbour_table()
        self.d = a.d
        self.max_entry = a.max_entry


_TABLES: dict[int, tuple[SparseHermitian, _Table]] = {}


def _table(a: SparseHermitian) -> _Table:
    hit = _TABLES.get(id(a))
    if hit is None or hit[0] is not a:
        if len(_TABLES) > 32:
            _TABLES.clear()
        hit = (a, _Table(a))
        _TABLES[id(a)] = hit
    return hit[1]


def _follow(t: _Table, j: int, ranks: np.ndarray):
    """Follow rank sequences from j.  Returns (realisable, end vertex, weight product)."""
    count = ranks.shape[0]
    cur = np.full(count, j, dtype=np.int64)
    ok = np.ones(count, dtype=bool)
    weight = np.ones(count, dtype=t.vals.dtype)
    for step in range(ranks.shape[1]):
        r = ranks[:, step]
        ok &= r < t.deg[cur]
        rr = np.where(ok, r, 0)
        weight = weight * np.where(ok, t.vals[cur, rr], 0)
        cur = np.where(ok, t.cols[cur, rr], cur)
    return ok, cur, weight


def _closed_weight(ok, end, weight, j):
    return np.where(ok & (end == j), weight, 0).real


def count_walks_estimate(a: SparseHermitian, j: int, p: int, k: int, rng) -> float:
    """X = d^p (#realisable candidates)/k with ranks uniform on {0..d-1}^p."""
    if p == 0:
        return 1.0
    t = _table(a)
    if t.d == 0 or t.deg[j] == 0:
        return 0.0
    rng = np.random.default_rng(rng)
    ranks = rng.integers(0, t.d, size=(k, p))
    ok, _, _ = _follow(t, j, ranks)
    return float(t.d**p * ok.sum() / k)


@dataclass
class ReturnWeight:
    value: float
    isolated: bool = False
    attempts: int = 0


def return_weight_estimate(
    a: SparseHermitian,
    j: int,
    p: int,
    k_prime: int,
    rng,
    mode: str = "corrected",
) -> ReturnWeight:
    """Mean of Y over k' walks of length p from j; see the module notes for modes."""
    if p == 0:
        return ReturnWeight(1.0)
    t = _table(a)
    if t.deg[j] == 0:
        return ReturnWeight(0.0, isolated=True)
    rng = np.random.default_rng(rng)
    if mode == "literal":
        cur = np.full(k_prime, j, dtype=np.int64)
        weight = np.ones(k_prime, dtype=t.vals.dtype)
        for _ in range(p):
            rr = np.floor(rng.random(k_prime) * t.deg[cur]).astype(np.int64)
            weight = weight * t.vals[cur, rr]
            cur = t.cols[cur, rr]
        return ReturnWeight(float(np.mean(np.where(cur == j, weight, 0).real)), attempts=k_prime)
    if mode != "corrected":
        raise ValueError(f"unknown mode {mode!r}")
    got: list[np.ndarray] = []
    need, attempts = k_prime, 0
    batch = k_prime
    while need > 0:
        if attempts > REJECTION_MAX:
            raise WorkBudgetExceeded(f"rejection sampling at vertex {j} exceeded {REJECTION_MAX} candidates")
        ranks = rng.integers(0, t.d, size=(batch, p))
        ok, end, weight = _follow(t, j, ranks)
        attempts += batch
        y = _closed_weight(ok, end, weight, j)[ok][:need]
        got.append(y)
        need -= len(y)
        rate = max(ok.mean(), 1.0 / batch)
        batch = int(min(REJECTION_MAX, math.ceil(1.2 * need / rate) + 16))
    return ReturnWeight(float(np.mean(np.concatenate(got))), attempts=attempts)


def diagonal_bound(plan: WalkPlan, max_entry: float) -> float:
    return plan.delta * plan.d**plan.p * max_entry**plan.p


@dataclass
class DiagonalEstimate:
    j: int
    value: float
    bound: float
    plan: WalkPlan
    seed: object = None
    x_bar: float = 0.0
    y_bar: float = 0.0
    flags: list = field(default_factory=list)


def _all_ranks(d: int, p: int) -> np.ndarray:
    if d**p > EXHAUSTIVE_MAX:
        raise WorkBudgetExceeded(f"d^p = {d**p} candidates exceeds {EXHAUSTIVE_MAX}")
    return np.array(list(itertools.product(range(d), repeat=p)), dtype=np.int64).reshape(-1, p)


def diagonal_estimate(
    a: SparseHermitian,
    j: int,
    p: int,
    plan: WalkPlan,
    rng=None,
    mode: str = "corrected",
    exhaustive: bool = False,
) -> DiagonalEstimate:
    """X * Y for vertex j.

    With ``exhaustive=True`` all d^p rank sequences are enumerated instead of
    sampled: X is then W_p exactly and Y the exact mean over realisable walks,
    so the product equals (A^p)_jj.
    """
    plan = replace(plan, p=p, d=a.d) if (plan.p != p or plan.d != a.d) else plan
    bound = diagonal_bound(plan, a.max_entry)
    if p == 0:
        return DiagonalEstimate(j, 1.0, 0.0, plan, rng, 1.0, 1.0)
    t = _table(a)
    if t.deg[j] == 0:
        return DiagonalEstimate(j, 0.0, bound, plan, rng, 0.0, 0.0, ["isolated"])
    if exhaustive:
        ranks = _all_ranks(t.d, p)
        ok, end, weight = _follow(t, j, ranks)
        x = float(ok.sum())
        y = float(_closed_weight(ok, end, weight, j)[ok].mean()) if ok.any() else 0.0
        return DiagonalEstimate(j, x * y, 0.0, plan, None, x, y, ["exhaustive"])
    seq = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    sx, sy = seq.spawn(2)
    x = count_walks_estimate(a, j, p, plan.k, np.random.default_rng(sx))
    flags = []
    if x == 0 and mode == "corrected":
        # no realisable candidate seen; the product is zero whatever Y is
        y = 0.0
        flags.append("no_walks_sampled")
    else:
        rw = return_weight_estimate(a, j, p, plan.k_prime, np.random.default_rng(sy), mode)
        y = rw.value
    return DiagonalEstimate(j, x * y, bound, plan, getattr(rng, "entropy", rng), x, y, flags)


def trace_power_estimate(
    a: SparseHermitian,
    p: int,
    plan: WalkPlan,
    n_vertices: int | None = None,
    seed=None,
    mode: str = "corrected",
) -> EstimateReport:
    """Mean of diagonal estimates over k'' uniformly drawn vertices.

    Each diagonal estimate lies in [-(d M)^p, (d M)^p] and is unbiased for
    (A^p)_jj given j, so Hoeffding on the k'' vertex draws alone gives the
    claimed bound delta d^p M^p with failure probability fail_prob.
    """
    plan = replace(plan, p=p, d=a.d)
    need = plan.vertex_samples()
    kpp = need if n_vertices is None else int(n_vertices)
    if kpp < need:
        raise ValueError(f"k'' = {kpp} below the Hoeffding minimum {need}")
    with stopwatch() as ms:
        root = np.random.SeedSequence(seed)
        vs, *streams = root.spawn(kpp + 1)
        js = np.random.default_rng(vs).integers(0, a.dim, size=kpp)
        vals = [diagonal_estimate(a, int(j), p, plan, s, mode).value for j, s in zip(js, streams)]
        value = math.fsum(vals) / kpp
    bound = diagonal_bound(plan, a.max_entry)
    params = {"p": p, "mode": mode, "plan": plan.to_dict(), "k_vertices": kpp}
    return EstimateReport(value, bound, "walker", mode, params, seed, None, ms[0])


def exact_diagonal(a: SparseHermitian, j: int, p: int) -> float:
    """(A^p)_jj by repeated sparse products on e_j."""
    m = a.to_scipy()
    v = np.zeros(a.dim, dtype=m.dtype)
    v[j] = 1
    for _ in range(p):
        v = m @ v
    return float(np.real(v[j]))


def count_walks_exact(a: SparseHermitian, j: int, p: int) -> int:
    """W_p by dynamic programming on degrees."""
    t = _table(a)
    c = np.ones(a.dim, dtype=object)
    for _ in range(p):
        nxt = np.zeros(a.dim, dtype=object)
        for v in range(a.dim):
            nxt[v] = sum(c[u] for u in t.cols[v, : t.deg[v]])
        c = nxt
    return int(c[j])
