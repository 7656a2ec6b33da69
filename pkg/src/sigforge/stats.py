"""Normalizations, reference laws, histograms and exact Kolmogorov-Smirnov statistics."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

RAYLEIGH_MEAN = math.sqrt(math.pi / 2)
RAYLEIGH_STD = math.sqrt(2 - math.pi / 2)


class DegenerateSample(ValueError):
    """A sample too small or too constant to normalize."""


class Unit(str, enum.Enum):
    STEPS = "steps"
    SECONDS = "seconds"
    MODEL_UNITS = "model_units"
    NORMALIZED = "normalized"


@dataclass
class SampleSet:
    """An ordered list of raw stopping times and where they came from."""

    values: np.ndarray
    unit: Unit = Unit.STEPS
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).ravel()
        self.unit = Unit(self.unit)
        self._sorted: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.values.size

    @property
    def sorted(self) -> np.ndarray:
        if self._sorted is None:
            self._sorted = np.sort(self.values)
        return self._sorted

    def mean(self) -> float:
        return float(self.values.mean())

    def std(self) -> float:
        """Population standard deviation (divides by n)."""
        return float(self.values.std())


def _as_sampleset(s) -> SampleSet:
    return s if isinstance(s, SampleSet) else SampleSet(s)


class ReferenceLaw(str, enum.Enum):
    RAYLEIGH = "rayleigh"
    SHIFTED_EXPONENTIAL = "shifted-exponential"

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self is ReferenceLaw.RAYLEIGH:
            return np.where(x > 0, -np.expm1(-0.5 * np.square(np.maximum(x, 0))), 0.0)
        return np.where(x > -1, -np.expm1(-(np.maximum(x, -1) + 1)), 0.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self is ReferenceLaw.RAYLEIGH:
            xp = np.maximum(x, 0)
            return np.where(x >= 0, xp * np.exp(-0.5 * xp * xp), 0.0)
        return np.where(x >= -1, np.exp(-(np.maximum(x, -1) + 1)), 0.0)


def law_cdf(law: ReferenceLaw, x):
    out = ReferenceLaw(law).cdf(x)
    return float(out) if np.ndim(out) == 0 else out


def law_pdf(law: ReferenceLaw, x):
    out = ReferenceLaw(law).pdf(x)
    return float(out) if np.ndim(out) == 0 else out


def _standardize(s: SampleSet) -> np.ndarray:
    if len(s) < 2:
        raise DegenerateSample("normalization needs at least two samples")
    v = s.values
    sigma = v.std()
    if not sigma > 0:
        raise DegenerateSample("sample is constant (zero standard deviation)")
    return (v - v.mean()) / sigma


def normalize_mean_var(s) -> SampleSet:
    """(T - mean) / sigma: mean 0, standard deviation 1."""
    s = _as_sampleset(s)
    return SampleSet(_standardize(s), Unit.NORMALIZED, dict(s.provenance))


def normalize_rayleigh(s) -> SampleSet:
    """Affine map onto the Rayleigh mean sqrt(pi/2) and std sqrt(2 - pi/2)."""
    s = _as_sampleset(s)
    return SampleSet(RAYLEIGH_STD * _standardize(s) + RAYLEIGH_MEAN, Unit.NORMALIZED, dict(s.provenance))


NORMALIZATIONS = {"eq1": normalize_mean_var, "eq4": normalize_rayleigh}


def ks_one_sample(s, law: ReferenceLaw) -> float:
    """Exact sup |F_n - F| from the sorted sample."""
    x = _as_sampleset(s).sorted
    n = x.size
    if n == 0:
        raise DegenerateSample("empty sample")
    F = ReferenceLaw(law).cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_two_sample(a, b) -> float:
    """Exact sup distance between two empirical CDFs."""
    xa = _as_sampleset(a).sorted
    xb = _as_sampleset(b).sorted
    if xa.size == 0 or xb.size == 0:
        raise DegenerateSample("empty sample")
    grid = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, grid, side="right") / xa.size
    fb = np.searchsorted(xb, grid, side="right") / xb.size
    return float(np.max(np.abs(fa - fb)))


def kolmogorov_pvalue(D: float, n: int) -> float:
    """Asymptotic P(sqrt(n) D_n > sqrt(n) D) from the Kolmogorov law.

    Uses Q(l) = 2 sum (-1)^(k-1) exp(-2 k^2 l^2) for l >= 1, and the
    theta-function form of 1 - Q for smaller l where that series converges
    slowly. Both are truncated once terms fall below 1e-10.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lam = math.sqrt(n) * D
    if lam <= 0:
        return 1.0
    if lam < 1.0:
        c = math.pi**2 / (8 * lam * lam)
        total, k = 0.0, 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * c)
            total += term
            if term < 1e-10:
                break
            k += 1
        return min(1.0, max(0.0, 1.0 - math.sqrt(2 * math.pi) / lam * total))
    total, k = 0.0, 1
    while True:
        term = math.exp(-2 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < 1e-10:
            break
        k += 1
    return min(1.0, max(0.0, 2 * total))


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    densities: np.ndarray
    below: int
    above: int

    def rows(self) -> list[tuple[float, float, float]]:
        return [
            (float(lo), float(hi), float(d))
            for lo, hi, d in zip(self.edges[:-1], self.edges[1:], self.densities)
        ]

    def in_range_mass(self) -> float:
        return float(np.sum(self.densities * np.diff(self.edges)))


def histogram(s, bins: int, range: Sequence[float]) -> Histogram:  # noqa: A002
    """Densities normalized by the full sample size, so they integrate to the in-range mass."""
    lo, hi = float(range[0]), float(range[1])
    if bins < 1 or not lo < hi:
        raise ValueError("need bins >= 1 and lo < hi")
    v = _as_sampleset(s).values
    counts, edges = np.histogram(v, bins=bins, range=(lo, hi))
    n = max(v.size, 1)
    dens = counts / (n * np.diff(edges))
    return Histogram(edges, dens, int(np.sum(v < lo)), int(np.sum(v > hi)))


def ecdf(s) -> tuple[np.ndarray, np.ndarray]:
    x = _as_sampleset(s).sorted
    return x, np.arange(1, x.size + 1) / x.size

