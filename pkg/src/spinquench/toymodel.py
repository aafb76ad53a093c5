"""Two-eigenstate entangled toy model with closed-form subsystem distance.

One qubit of subsystem, one of environment, and two Bell-like eigenstates
(|01> +- |10>)/sqrt(2) carrying weights p1, p2. The subsystem trace
distance from its time average is sqrt(p1 p2) |cos(omega t + phi)| and
its long-time law has a single square-root singularity at the upper edge
sqrt(p1 p2). Plugging in the two dominant weights of a real quench gives
a useful estimate of where the sampled D_S distribution piles up.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np

# The ideal model has p1 + p2 = 1; feeding it the two largest weights of
# a real quench leaves a small gap, so the check is deliberately loose.
WEIGHT_SUM_SLACK = 0.1


@dataclass(frozen=True)
class ToyParams:
    p1: float
    p2: float
    omega: float = 1.0
    phi: float = 0.0

    def __post_init__(self):
        if not (0 <= self.p1 <= 1 and 0 <= self.p2 <= 1):
            raise ValueError("weights must lie in [0, 1]")
        if abs(self.p1 + self.p2 - 1) > WEIGHT_SUM_SLACK:
            raise ValueError(
                f"p1 + p2 = {self.p1 + self.p2:g} too far from 1 "
                f"(slack {WEIGHT_SUM_SLACK})")

    @property
    def edge(self) -> float:
        """Upper support edge sqrt(p1 p2) of the distance distribution."""
        return sqrt(self.p1 * self.p2)


def toy_ds(params: ToyParams, t) -> np.ndarray:
    """D_S(t) = sqrt(p1 p2) |cos(omega t + phi)|."""
    t = np.asarray(t, dtype=float)
    return params.edge * np.abs(np.cos(params.omega * t + params.phi))


def toy_ds_density(params: ToyParams, x) -> np.ndarray:
    """(2/pi)/sqrt(p1 p2 - x^2) on [0, sqrt(p1 p2)), zero outside."""
    x = np.asarray(x, dtype=float)
    p12 = params.p1 * params.p2
    out = np.zeros_like(x)
    inside = (x >= 0) & (x * x < p12)
    out[inside] = (2 / pi) / np.sqrt(p12 - x[inside] ** 2)
    return out


def toy_ds_cdf(params: ToyParams, x) -> np.ndarray:
    """Closed-form CDF (2/pi) asin(x / sqrt(p1 p2)), clipped to [0, 1]."""
    x = np.asarray(x, dtype=float)
    if params.edge == 0:
        return (x >= 0).astype(float)
    return (2 / pi) * np.arcsin(np.clip(x / params.edge, 0.0, 1.0))


def toy_ds_mean(params: ToyParams) -> float:
    """Time average of D_S: (2/pi) sqrt(p1 p2)."""
    return (2 / pi) * params.edge


def realization_eigenvectors() -> np.ndarray:
    """The two Bell-like eigenstates in the (N=2, one up spin) sector.

    Sector states in ascending mask order are |01> (mask 1, subsystem
    site 0 up) and |10> (mask 2, environment site up); columns are
    (|01> + |10>)/sqrt(2) and (|01> - |10>)/sqrt(2).
    """
    s = 1 / sqrt(2)
    return np.array([[s, s], [s, -s]])


def realization_state(params: ToyParams, t) -> np.ndarray:
    """Evolved toy state in the sector basis, c1 c2* = sqrt(p1 p2) e^{i phi}."""
    t = np.asarray(t, dtype=float)
    c1 = sqrt(params.p1)
    c2 = sqrt(params.p2) * np.exp(-1j * params.phi)
    v = realization_eigenvectors()
    amps = np.stack([c1 * np.exp(-1j * 0.0 * t),
                     c2 * np.exp(-1j * params.omega * t)])
    return (v @ amps).T if t.ndim else v @ amps
