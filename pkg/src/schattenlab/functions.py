"""Spectral functions f: [-b, b] -> R with their Lipschitz data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SpectralFunction:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    b: float
    lipschitz: float
    f_max: float

    @property
    def interval(self) -> tuple[float, float]:
        return (-self.b, self.b)

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def clamped(self, x):
        """Evaluate after clipping arguments into the interval."""
        return self.fn(np.clip(np.asarray(x, dtype=float), -self.b, self.b))

    def normalized(self) -> "SpectralFunction":
        """f / f_max, mapping into [-1, 1]; Lipschitz constant scales by 1/f_max."""
        if self.f_max == 0:
            return self
        s = self.f_max
        return SpectralFunction(f"{self.name}/fmax", lambda x, g=self.fn: g(x) / s, self.b, self.lipschitz / s, 1.0)

    def describe(self) -> dict:
        return {"name": self.name, "b": self.b, "K": self.lipschitz, "f_max": self.f_max}


def pow_p(p: float, b: float) -> SpectralFunction:
    """x^p on [-b, b]; K = p b^(p-1), f_max = b^p."""
    if p == 0:
        return constant(1.0, b)
    return SpectralFunction(f"pow_{p}", lambda x: np.power(x, p), b, p * b ** (p - 1), b**p)


def abs_pow_p(p: float, b: float) -> SpectralFunction:
    """|x|^p on [-b, b]; same constants as x^p."""
    if p == 0:
        return constant(1.0, b)
    return SpectralFunction(f"abs_pow_{p}", lambda x: np.abs(x) ** p, b, p * b ** (p - 1), b**p)


def constant(c: float, b: float) -> SpectralFunction:
    return SpectralFunction(f"const_{c}", lambda x: np.full(np.shape(x), float(c)), b, 0.0, abs(c))


def linear(scale: float, b: float) -> SpectralFunction:
    """x * scale."""
    return SpectralFunction(f"linear_{scale}", lambda x: scale * x, b, abs(scale), abs(scale) * b)


def table(xs, ys, name: str = "table") -> SpectralFunction:
    """Piecewise-linear interpolant of a user-supplied table.

    The interval is symmetrised to [-b, b] with b = max |x|; outside the
    tabulated range the end values are held.  K is the steepest segment slope.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    if len(xs) < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("table needs at least two distinct abscissae")
    slopes = np.abs(np.diff(ys) / np.diff(xs))
    b = float(np.max(np.abs(xs)))
    return SpectralFunction(name, lambda x: np.interp(x, xs, ys), b, float(slopes.max()), float(np.abs(ys).max()))


REGISTRY = {"pow_p": pow_p, "abs_pow_p": abs_pow_p}


def by_name(name: str, p: float, b: float) -> SpectralFunction:
    try:
        return REGISTRY[name](p, b)
    except KeyError:
        raise ValueError(f"unknown spectral function {name!r}; known: {sorted(REGISTRY)}") from None
