"""Experiment runner: one JSON spec in, EstimateReport rows and a CSV out.

Spec layout::

    {
      "task": "schatten_trace",
      "input": {"file": "ham.json"}            # or {"generator": {...}} / {"inline": {...}}
      "estimators": ["exact", "dqc1"],
      "params": {"p": 2, "eps": 0.1, "seeds": [0, 1, 2]},
      "output": {"csv": "out.csv", "json": "out.json", "plots": "plots"}
    }

Relative paths resolve against the experiment file's directory.  The environment
variable SCHATTEN_SEED replaces the seed list with consecutive seeds starting
at its value.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import clock, config, dqc1, graphs, oracle, walks
from . import io as fio
from .errors import ConfigError, InputError
from .functions import by_name
from .hamiltonian import (
    LocalTerm,
    LogLocalHamiltonian,
    MatrixClass,
    SparseHermitian,
    pauli_term,
    random_local_hamiltonian,
    sparse_from_dense,
)
from .report import EstimateReport

TASKS = ("schatten_trace", "trace_power", "graph_energy", "trace_f", "clock_reduction", "regime_check", "advantage_report")
ESTIMATORS = ("exact", "dqc1", "walker")
CSV_COLUMNS = ("estimator", "value", "truth", "bound", "pass", "seed", "ms")
BOUND_CLAIMING = ("dqc1", "walker", "sampler")


@dataclass
class ExperimentSpec:
    task: str
    input: dict
    estimators: list
    params: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path.cwd)

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if not self.estimators:
            raise ConfigError("at least one estimator is required")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad:
            raise ConfigError(f"unknown estimators {bad}")
        if not isinstance(self.input, dict) or not ({"file", "generator", "inline"} & set(self.input)):
            raise ConfigError("input needs one of 'file', 'generator' or 'inline'")

    @classmethod
    def from_dict(cls, doc: dict, base_dir=None) -> "ExperimentSpec":
        try:
            return cls(
                task=doc["task"],
                input=doc["input"],
                estimators=list(doc.get("estimators", [])),
                params=dict(doc.get("params", {})),
                output=dict(doc.get("output", {})),
                base_dir=Path(base_dir) if base_dir else Path.cwd(),
            )
        except KeyError as exc:
            raise ConfigError(f"spec is missing {exc}") from None

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise InputError(str(exc), path) from None
        except json.JSONDecodeError as exc:
            raise InputError(exc.msg, path, exc.lineno) from None
        return cls.from_dict(doc, path.parent)

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    def seeds(self) -> list:
        seeds = self.params.get("seeds")
        if seeds is None:
            seeds = list(range(int(self.params.get("n_seeds", 1))))
        env = os.environ.get("SCHATTEN_SEED")
        if env is not None:
            try:
                base = int(env)
            except ValueError:
                raise ConfigError(f"SCHATTEN_SEED={env!r} is not an integer") from None
            seeds = [base + i for i in range(len(seeds))]
        return [int(s) for s in seeds]


# ---------------------------------------------------------------------------
# inputs


def _generate(gen: dict):
    kind = gen.get("kind")
    rng = np.random.default_rng(gen.get("seed", 0))
    if kind == "random_local":
        return random_local_hamiltonian(gen["n"], gen["m"], rng, gen.get("k", 2), gen.get("norm"))
    if kind == "pauli":
        terms = tuple(pauli_term(lbl, q, c) for lbl, q, c in gen["terms"])
        return LogLocalHamiltonian(int(gen["n"]), terms)
    if kind == "cycle":
        n = int(gen["N"])
        return SparseHermitian.from_edges(n, [(i, (i + 1) % n, 1) for i in range(n)])
    if kind == "complete":
        n = int(gen["N"])
        return SparseHermitian.from_edges(n, [(i, j, 1) for i in range(n) for j in range(i + 1, n)])
    if kind == "random_graph":
        return random_sparse_graph(int(gen["N"]), int(gen["d"]), MatrixClass(gen.get("class", "ZeroOne")), rng)
    if kind == "degree_model":
        return fio.model_from_dict(gen["model"])
    if kind == "chung_lu":
        model = fio.model_from_dict(gen["model"])
        return graphs.chung_lu_sample(model, rng)
    if kind == "random_circuit":
        return clock.random_real_circuit(int(gen["n"]), int(gen["M"]), rng)
    raise ConfigError(f"unknown generator kind {kind!r}")


def random_sparse_graph(n: int, d: int, cls: MatrixClass, rng) -> SparseHermitian:
    """Random graph with every degree <= d; edge values follow ``cls``."""
    deg = np.zeros(n, dtype=int)
    edges, seen = [], set()
    for _ in range(n * d):
        i, j = rng.integers(0, n, size=2)
        key = (int(min(i, j)), int(max(i, j)))
        if i == j or deg[i] >= d or deg[j] >= d or key in seen:
            continue
        seen.add(key)
        if cls is MatrixClass.ZeroOne:
            v = 1.0
        elif cls is MatrixClass.SignedUnit:
            v = float(rng.choice([-1.0, 1.0]))
        else:
            v = float(rng.normal())
        edges.append((int(min(i, j)), int(max(i, j)), v))
        deg[i] += 1
        deg[j] += 1
    return SparseHermitian.from_edges(n, edges, cls)


def load_input(spec: ExperimentSpec):
    src = spec.input
    if "generator" in src:
        return _generate(src["generator"])
    if "inline" in src:
        doc = src["inline"]
        if "gates" in doc:
            return fio.gates_from_dict(doc)
        if "terms" in doc:
            return fio.hamiltonian_from_dict(doc)
        return fio.model_from_dict(doc)
    path = spec.resolve(src["file"])
    if path.suffix == ".json":
        doc = fio._load_json(path)
        if "gates" in doc:
            return fio.gates_from_dict(doc, path)
        if "terms" in doc:
            return fio.hamiltonian_from_dict(doc, path)
        return fio.model_from_dict(doc, path)
    return fio.read_sparse(path)


def as_hamiltonian(obj) -> LogLocalHamiltonian:
    """View a sparse matrix of power-of-two size as a one-term Hamiltonian."""
    if isinstance(obj, LogLocalHamiltonian):
        return obj
    if isinstance(obj, SparseHermitian):
        n = int(round(math.log2(obj.dim))) if obj.dim > 0 else -1
        if n < 1 or 2**n != obj.dim:
            raise ConfigError("dqc1 needs a matrix whose size is a power of two")
        return LogLocalHamiltonian(n, (LocalTerm(tuple(range(n)), obj.dense()),), enforce_locality=False)
    raise ConfigError(f"cannot use {type(obj).__name__} as a Hamiltonian")


def as_sparse(obj) -> SparseHermitian:
    if isinstance(obj, SparseHermitian):
        return obj
    if isinstance(obj, LogLocalHamiltonian):
        return sparse_from_dense(obj.dense())
    raise ConfigError(f"cannot use {type(obj).__name__} as a sparse matrix")


def _dense_ok(obj) -> bool:
    if isinstance(obj, LogLocalHamiltonian):
        return obj.n <= config.get().n_dense_max
    if isinstance(obj, SparseHermitian):
        return obj.dim <= 2 ** config.get().n_dense_max
    return True


# ---------------------------------------------------------------------------
# tasks


def _exact_row(value, **params) -> EstimateReport:
    return EstimateReport(float(value), 0.0, "exact", "exact", params)


def _task_rows(spec: ExperimentSpec, obj, estimator: str, seed: int, truth):
    p = spec.params
    eps = float(p.get("eps", 0.1))
    mode = p.get("mode", "exact_submatrix")
    task = spec.task
    if task == "schatten_trace":
        if estimator == "dqc1":
            return [dqc1.estimate_schatten_trace(as_hamiltonian(obj), int(p["p"]), eps, mode=mode, seed=seed, simulation=p.get("simulation", "trotter"))]
    elif task == "trace_f":
        if estimator == "dqc1":
            f = by_name(p.get("f", "abs_pow_p"), float(p["p"]), float(p.get("b", config.get().phase_limit)))
            return [dqc1.run_trace_f(as_hamiltonian(obj), f, eps, mode=mode, seed=seed)]
    elif task == "trace_power":
        if estimator == "walker":
            a = as_sparse(obj)
            plan = walks.plan_for(a, int(p["p"]), eps, float(p.get("eps_prime", eps)), float(p.get("fail_prob", 0.05)), p.get("constants", "strict"))
            return [walks.trace_power_estimate(a, int(p["p"]), plan, p.get("k_vertices"), seed, p.get("walk_mode", "corrected"))]
        if estimator == "dqc1":
            return [dqc1.estimate_schatten_trace(as_hamiltonian(obj), int(p["p"]), eps, kind="pow", mode=mode, seed=seed)]
    elif task == "graph_energy":
        if estimator == "dqc1":
            return [dqc1.estimate_schatten_trace(as_hamiltonian(obj), 1, eps, mode=mode, seed=seed)]
    elif task == "clock_reduction":
        if estimator == "dqc1":
            return [clock.reduction_pipeline(obj, eps, mode=mode, seed=seed)]
    elif task == "regime_check":
        model = obj
        rep = graphs.eigenvalue_regime_check(model, int(p.get("samples", 30)), seed)
        tol = float(p.get("tolerance", 0.25))
        return [EstimateReport(rep.mean_lambda, tol * rep.predicted, "sampler", rep.regime, rep.to_dict(), seed, None, 0.0, rep.predicted)]
    elif task == "advantage_report":
        a = obj if isinstance(obj, SparseHermitian) else graphs.chung_lu_sample(obj, seed)
        rows = []
        for pp in p.get("p_values", [p.get("p", 2)]):
            r = graphs.accuracy_advantage_report(a, pp, eps)
            rows.append(EstimateReport(r["ratio"], 0.0, "advantage", "ratio", r, seed))
        return rows
    if estimator == "exact":
        return []
    raise ConfigError(f"estimator {estimator!r} does not apply to task {task!r}")


def ground_truth(spec: ExperimentSpec, obj):
    """Exact value for the task, or None when the dense oracle is out of reach."""
    p = spec.params
    task = spec.task
    if not _dense_ok(obj):
        return None
    if task == "schatten_trace":
        w = oracle.spectrum(as_hamiltonian(obj)).eigenvalues
        return float(np.mean(np.abs(w) ** int(p["p"])))
    if task == "trace_f":
        f = by_name(p.get("f", "abs_pow_p"), float(p["p"]), float(p.get("b", config.get().phase_limit)))
        return oracle.trace_f(as_hamiltonian(obj), f)
    if task == "trace_power":
        w = oracle.spectrum(obj if isinstance(obj, LogLocalHamiltonian) else as_sparse(obj)).eigenvalues
        return float(np.mean(w ** int(p["p"])))
    if task == "graph_energy":
        return oracle.graph_energy(as_sparse(obj) if not isinstance(obj, LogLocalHamiltonian) else obj)
    if task == "clock_reduction":
        return clock.hardness_identity_check(obj)["rhs"]
    return None


@dataclass
class ExperimentResult:
    reports: list
    spec: ExperimentSpec

    @property
    def failed(self) -> bool:
        return any(r.estimator in BOUND_CLAIMING and r.passed is False for r in self.reports)

    def csv_text(self, include_ms: bool = True) -> str:
        buf = _io.StringIO()
        cols = CSV_COLUMNS if include_ms else CSV_COLUMNS[:-1]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.reports:
            row = [r.estimator, _fmt(r.value), _fmt(r.truth), _fmt(r.claimed_bound), "" if r.passed is None else str(r.passed).lower(), "" if r.seed is None else r.seed]
            if include_ms:
                row.append(f"{r.wallclock_ms:.3f}")
            w.writerow(row)
        return buf.getvalue()

    def table(self) -> str:
        lines = [f"{'estimator':<10} {'value':>14} {'truth':>14} {'bound':>12} {'pass':>6} {'seed':>6}"]
        for r in self.reports:
            truth = "" if r.truth is None else f"{r.truth:.8g}"
            ok = "" if r.passed is None else str(r.passed).lower()
            seed = "" if r.seed is None else str(r.seed)
            lines.append(f"{r.estimator:<10} {r.value:>14.8g} {truth:>14} {r.claimed_bound:>12.4g} {ok:>6} {seed:>6}")
        return "\n".join(lines)


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def run_experiment(spec: ExperimentSpec, jobs: int = 1, write: bool = True) -> ExperimentResult:
    obj = load_input(spec)
    estimators = list(dict.fromkeys(spec.estimators))
    truth = ground_truth(spec, obj)
    if truth is not None and "exact" not in estimators and spec.task not in ("regime_check", "advantage_report"):
        estimators.insert(0, "exact")
    if spec.task in ("regime_check", "advantage_report"):
        # graph-model tasks sample once per seed whatever estimators are listed
        tasks = [("sampler", seed) for seed in spec.seeds()]
    else:
        tasks = [(est, seed) for est in sorted(estimators, key=ESTIMATORS.index) if est != "exact" for seed in spec.seeds()]

    def one(item):
        est, seed = item
        return _task_rows(spec, obj, est, seed, truth)

    if jobs > 1:
        # pool.map keeps the (estimator, seed) order
        with ThreadPoolExecutor(jobs) as pool:
            chunks = list(pool.map(one, tasks))
    else:
        chunks = [one(t) for t in tasks]
    reports = []
    if "exact" in estimators and truth is not None:
        reports.append(_exact_row(truth, task=spec.task).with_truth(truth))
    for rows in chunks:
        for r in rows:
            reports.append(r.with_truth(truth) if truth is not None and r.truth is None else r)
    result = ExperimentResult(reports, spec)
    if write:
        write_outputs(result)
    return result


def write_outputs(result: ExperimentResult) -> list:
    spec = result.spec
    out = []
    if "csv" in spec.output:
        path = spec.resolve(spec.output["csv"])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(result.csv_text())
        out.append(path)
    if "json" in spec.output:
        path = spec.resolve(spec.output["json"])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps([r.to_dict() for r in result.reports], indent=1))
        out.append(path)
    if "plots" in spec.output:
        from .plots import emit_plots

        out += emit_plots(result.reports, spec.resolve(spec.output["plots"]))
    return out
