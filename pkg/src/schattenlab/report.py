"""EstimateReport: one estimate with its claimed bound and provenance."""

from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

import numpy as np


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


@dataclass
class EstimateReport:
    value: float
    claimed_bound: float
    estimator: str  # "exact" | "dqc1" | "walker"
    mode: str = ""
    parameters: dict = field(default_factory=dict)
    seed: int | None = None
    shots: int | None = None
    wallclock_ms: float = 0.0
    truth: float | None = None

    @property
    def passed(self) -> bool | None:
        if self.truth is None:
            return None
        return abs(self.value - self.truth) <= self.claimed_bound

    @property
    def error(self) -> float | None:
        return None if self.truth is None else abs(self.value - self.truth)

    def with_truth(self, truth: float) -> "EstimateReport":
        return replace(self, truth=float(truth))

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "claimed_bound": self.claimed_bound,
            "estimator": self.estimator,
            "mode": self.mode,
            "shots": self.shots,
            "seed": self.seed,
            "parameters": self.parameters,
            "wallclock_ms": self.wallclock_ms,
        }
        if self.truth is not None:
            out["truth"] = self.truth
            out["pass"] = self.passed
        return _plain(out)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


@contextmanager
def stopwatch():
    """Yields a one-element list that receives elapsed milliseconds on exit."""
    box = [0.0]
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = (time.perf_counter() - t0) * 1e3
