"""Process-wide numerical settings.

The defaults below are what the test-suite runs with.  ``TROTTER_C`` is the
calibrated Trotter constant: :func:`schattenlab.trotter.calibrate_constant`
starts from 1 and doubles until every certification fixture passes, and the
resulting value is pinned here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Settings:
    n_dense_max: int = 12
    tol_herm: float = 1e-12
    # log-local constraint k <= ceil(locality_c * log2 n) + locality_slack
    locality_c: float = 1.0
    locality_slack: int = 2
    trotter_c: float = 1.0
    # ancilla ceiling a_max(n) = ceil(anc_c * log2(n + 2)) + anc_floor(eps_min)
    anc_c: float = 2.0
    eps_min: float = 1e-3
    spectral_margin: float = 0.1
    exact_work_budget: int = 200_000
    readout_fail_prob: float = 0.01
    eig_dense_max: int = 256
    # dense PE circuit is only materialised up to this many qubits
    circuit_qubits_max: int = 12

    @property
    def phase_limit(self) -> float:
        return math.pi - self.spectral_margin

    def k_max(self, n: int) -> int:
        return math.ceil(self.locality_c * math.log2(max(n, 1))) + self.locality_slack

    def anc_floor(self) -> int:
        eps = self.eps_min
        return math.ceil(math.log2(8 * math.pi / eps)) + math.ceil(math.log2(2 + 4 / eps))

    def a_max(self, n_sys: int) -> int:
        return math.ceil(self.anc_c * math.log2(n_sys + 2)) + self.anc_floor()


SETTINGS = Settings()


def configure(**overrides) -> Settings:
    """Replace the global settings; returns the new object."""
    global SETTINGS
    SETTINGS = replace(SETTINGS, **overrides)
    return SETTINGS


def get() -> Settings:
    return SETTINGS
