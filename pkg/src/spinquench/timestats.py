"""Long-time statistics of scalar series: sampling plans, histograms,
moments, and the closed-form overlays for few-mode Loschmidt echoes.

Time is sampled i.i.d. uniformly on [0, t_max] from a seeded generator
(numpy PCG64), with t_max at least a hundred periods of the slowest
populated oscillation so the empirical law approaches the infinite-time
one. Moments go through math.fsum, an error-free accumulation, so
split-and-merge reproduces one-shot results to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum, pi, sqrt
from typing import NamedTuple

import numpy as np

from .quench import QuenchState

DEFAULT_SAMPLES = 400000
WINDOW_PERIODS = 100  # t_max >= this many periods of the smallest gap
GENERATOR_NAME = "numpy-pcg64"


@dataclass(frozen=True)
class SamplingPlan:
    """Seeded uniform time sampling on [0, t_max]."""

    t_max: float
    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0
    delta_min: float = None  # smallest populated gap the window was derived from

    def __post_init__(self):
        if not (np.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be positive and finite, got {self.t_max}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.delta_min is not None:
            need = WINDOW_PERIODS * 2 * pi / self.delta_min
            if self.t_max < need * (1 - 1e-12):
                raise ValueError(
                    f"t_max {self.t_max:g} is under {WINDOW_PERIODS} periods of the "
                    f"smallest gap {self.delta_min:g} (needs {need:g})")

    @classmethod
    def for_gap(cls, delta_min: float, n_samples: int = DEFAULT_SAMPLES,
                seed: int = 0, periods: int = WINDOW_PERIODS) -> "SamplingPlan":
        if delta_min is None or delta_min <= 0:
            raise ValueError("delta_min must be positive")
        periods = max(periods, WINDOW_PERIODS)
        return cls(periods * 2 * pi / delta_min, n_samples, seed, delta_min)

    def times(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.uniform(0.0, self.t_max, self.n_samples)

    def to_dict(self) -> dict:
        return {"t_max": self.t_max, "n_samples": self.n_samples,
                "seed": self.seed, "delta_min": self.delta_min,
                "generator": GENERATOR_NAME}


def sample_series(f, plan: SamplingPlan) -> np.ndarray:
    """Evaluate f at the plan's times; accepts vectorized or scalar f."""
    times = plan.times()
    try:
        values = np.asarray(f(times), dtype=float)
        if values.shape == times.shape:
            return values
    except (TypeError, ValueError):
        pass
    return np.array([float(f(t)) for t in times])


@dataclass(frozen=True)
class Moments:
    """Count and central power sums, mergeable across sample splits."""

    n: int
    mean: float
    m2: float  # sum (x - mean)^2
    m3: float  # sum (x - mean)^3

    @classmethod
    def from_samples(cls, x: np.ndarray) -> "Moments":
        x = np.asarray(x, dtype=float)
        n = len(x)
        mean = fsum(x) / n
        d = x - mean
        return cls(n, mean, fsum(d * d), fsum(d * d * d))

    def merge(self, other: "Moments") -> "Moments":
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta ** 2 * self.n * other.n / n
        m3 = (self.m3 + other.m3
              + delta ** 3 * self.n * other.n * (self.n - other.n) / n ** 2
              + 3 * delta * (self.n * other.m2 - other.n * self.m2) / n)
        return Moments(n, mean, m2, m3)

    @property
    def variance(self) -> float:
        return self.m2 / self.n

    @property
    def skewness(self) -> float:
        if self.m2 <= 0:
            return 0.0
        return (self.m3 / self.n) / (self.m2 / self.n) ** 1.5


@dataclass(frozen=True, eq=False)
class Distribution:
    """Histogram + ECDF + moments of one sampled time series."""

    bin_edges: np.ndarray = field(repr=False)
    densities: np.ndarray = field(repr=False)
    sorted_samples: np.ndarray = field(repr=False)
    mean: float
    variance: float
    skewness: float
    minimum: float
    maximum: float

    @property
    def n_samples(self) -> int:
        return len(self.sorted_samples)

    @property
    def signal_to_noise(self) -> float:
        if self.variance <= 0:
            return float("inf")
        return self.mean / sqrt(self.variance)

    def ecdf(self, x) -> np.ndarray:
        """Empirical CDF evaluated at x (scalar or array)."""
        idx = np.searchsorted(self.sorted_samples, x, side="right")
        return idx / self.n_samples

    def sup_ecdf_distance(self, other: "Distribution") -> float:
        """Two-sample Kolmogorov-Smirnov statistic."""
        grid = np.concatenate([self.sorted_samples, other.sorted_samples])
        return float(np.abs(self.ecdf(grid) - other.ecdf(grid)).max())


def freedman_diaconis_bins(x: np.ndarray, floor: int = 50, cap: int = 2000) -> int:
    q75, q25 = np.quantile(x, [0.75, 0.25])
    iqr = q75 - q25
    span = x.max() - x.min()
    if iqr <= 0 or span <= 0:
        return floor
    width = 2 * iqr / len(x) ** (1 / 3)
    return int(np.clip(np.ceil(span / width), floor, cap))


def histogram(samples, n_bins: int = None) -> Distribution:
    """Distribution of a sample set; Freedman-Diaconis binning by default."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    mom = Moments.from_samples(x)
    lo, hi = float(x.min()), float(x.max())
    if hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        # (numerically) constant series: one unit-width bin on the value
        edges = np.array([lo - 0.5, lo + 0.5])
        dens = np.array([1.0])
    else:
        if n_bins is None:
            n_bins = freedman_diaconis_bins(x)
        counts, edges = np.histogram(x, bins=n_bins, range=(lo, hi))
        dens = counts / (x.size * np.diff(edges))
    return Distribution(edges, dens, np.sort(x), mom.mean, mom.variance,
                        mom.skewness, lo, hi)


class TwoModeDensity(NamedTuple):
    """Both printed forms of the two-mode echo law at the same x."""

    arcsine: np.ndarray        # plain arcsine law of the cosine
    with_background: np.ndarray  # arcsine rescaled over a flat background


def two_mode_edges(p0: float, p1: float) -> tuple:
    """Support edges x_{1,2} = (p0^2 + p1^2) -/+ 2 p0 p1 of the two-mode echo."""
    le = p0 * p0 + p1 * p1
    return le - 2 * p0 * p1, le + 2 * p0 * p1


def two_mode_density(p0: float, p1: float, x) -> TwoModeDensity:
    """Density overlays for a two-mode Loschmidt echo, zero off support.

    The plain arcsine form is the exact law of the truncated two-mode
    series; the background form spreads a constant offset (standing in
    for all neglected modes) and renormalizes the singular part so both
    integrate to one over [x_1, x_2].
    """
    if p0 <= 0 or p1 <= 0:
        raise ValueError("two_mode_density needs strictly positive weights")
    x = np.asarray(x, dtype=float)
    x1, x2 = two_mode_edges(p0, p1)
    le = p0 * p0 + p1 * p1
    inside = (x > x1) & (x < x2)
    core = np.zeros_like(x)
    core[inside] = 1.0 / (pi * np.sqrt((x[inside] - x1) * (x2 - x[inside])))
    background = np.zeros_like(x)
    background[inside] = le + (1 - le * (x2 - x1)) * core[inside]
    return TwoModeDensity(core, background)


def two_mode_variance(p0: float, p1: float) -> float:
    """Standard deviation (x_2 - x_1)/sqrt(8) = 4 p0 p1 / sqrt(8) of the echo."""
    if p0 < 0 or p1 < 0:
        raise ValueError("weights must be non-negative")
    return 4 * p0 * p1 / sqrt(8)


def truncated_le_series(q: QuenchState, n_max: int):
    """Reduced cosine sum: the n_max heaviest block pairs of the echo.

    Returns (callable over time arrays, kept pair list). Pair weights are
    W_ij = P_i P_j over degeneracy blocks; ties break by ascending (i, j).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    pb = q.block_weights()
    eb = q.block_energies()
    nb = len(pb)
    pairs = [(i, j) for i in range(nb) for j in range(i + 1, nb)]
    pairs.sort(key=lambda ij: (-pb[ij[0]] * pb[ij[1]], ij))
    kept = pairs[:n_max]
    weights = np.array([2 * pb[i] * pb[j] for i, j in kept])
    freqs = np.array([eb[j] - eb[i] for i, j in kept])
    base = q.le_mean

    def series(times):
        times = np.atleast_1d(np.asarray(times, dtype=float))
        return base + np.cos(np.outer(times, freqs)) @ weights

    return series, kept


def truncated_le_distribution(q: QuenchState, n_max: int,
                              plan: SamplingPlan) -> Distribution:
    """Sampled law of the echo truncated to its n_max heaviest pairs."""
    series, _ = truncated_le_series(q, n_max)
    return histogram(sample_series(series, plan))
