"""Monte Carlo estimators over ensemble summaries.

Probabilities come with binomial standard errors sqrt(p(1-p)/n); variances
with the plug-in standard error sqrt((m4 - s^4)/n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.config.models import HistogramConfig
from app.core.errors import DomainError
from app.core.types import Cdf, FloatArray
from app.limits.laws import ks_critical_value, ks_distance
from app.urn.models import EnsembleSummary

ABSORPTION_LOW = 0.01
ABSORPTION_HIGH = 0.99


@dataclass(frozen=True, slots=True)
class Estimate:
    value: float
    se: float

    def within(self, target: float, k: float = 4.0) -> bool:
        return abs(self.value - target) <= k * max(self.se, 1e-300)


def _probability(mask: np.ndarray) -> Estimate:
    n = mask.size
    if n == 0:
        raise DomainError("no samples")
    p = float(mask.mean())
    return Estimate(p, math.sqrt(p * (1.0 - p) / n))


def estimate_pmax(summary: EnsembleSummary, eps: float, position: int = 0) -> Estimate:
    """max over snapshot times of P(|pi_t/pi_0 - 1| > eps)."""

    if not eps > 0:
        raise DomainError("eps must be positive")
    fractions = summary.exceedance_counts(eps)[:, position] / summary.replicates
    worst = int(np.argmax(fractions))
    p = float(fractions[worst])
    return Estimate(p, math.sqrt(p * (1.0 - p) / summary.replicates))


def estimate_variance(values: FloatArray) -> Estimate:
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    if n < 2:
        raise DomainError("variance needs at least two samples")
    centred = values - values.mean()
    variance = float(centred.var(ddof=1))
    fourth = float(np.mean(centred**4))
    return Estimate(variance, math.sqrt(max(fourth - variance * variance, 0.0) / n))


def estimate_mean(values: FloatArray) -> Estimate:
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        raise DomainError("a standard error needs at least two samples")
    return Estimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size)))


def estimate_deviation(ratios: FloatArray, eps: float) -> Estimate:
    return _probability(np.abs(np.asarray(ratios) - 1.0) > eps)


def estimate_below(ratios: FloatArray, eps: float) -> Estimate:
    return _probability(np.asarray(ratios) < eps)


def estimate_above(ratios: FloatArray, level: float = 2.0) -> Estimate:
    return _probability(np.asarray(ratios) > level)


@dataclass(frozen=True, slots=True)
class Absorption:
    low: Estimate
    high: Estimate
    middle: Estimate


def estimate_absorption(shares: FloatArray) -> Absorption:
    shares = np.asarray(shares)
    return Absorption(
        low=_probability(shares < ABSORPTION_LOW),
        high=_probability(shares > ABSORPTION_HIGH),
        middle=_probability((shares >= ABSORPTION_LOW) & (shares <= ABSORPTION_HIGH)),
    )


@dataclass(frozen=True, slots=True)
class Histogram:
    edges: FloatArray
    mass: FloatArray

    @property
    def widths(self) -> FloatArray:
        return np.diff(self.edges)

    def density(self) -> FloatArray:
        return self.mass / self.widths


def histogram(values: FloatArray, spec: HistogramConfig) -> Histogram:
    """Fixed-bin histogram; values outside the range fall into the end bins so mass sums to one."""

    upper = spec.edges_upper()
    clipped = np.clip(np.asarray(values, dtype=np.float64), spec.lower, upper)
    counts, edges = np.histogram(clipped, bins=spec.bins, range=(spec.lower, upper))
    return Histogram(edges=edges, mass=counts / clipped.size)


@dataclass(frozen=True, slots=True)
class KsResult:
    distance: float
    critical: float

    @property
    def accepted(self) -> bool:
        return self.distance <= self.critical


def estimate_ks(samples: FloatArray, cdf: Cdf, *, level: float = 0.99) -> KsResult:
    samples = np.asarray(samples)
    return KsResult(distance=ks_distance(samples, cdf), critical=ks_critical_value(samples.size, level=level))


def ratio_variance_path(summary: EnsembleSummary, position: int = 0) -> FloatArray:
    ratios = summary.ratios()[:, :, position]
    if summary.replicates < 2:
        return np.zeros(ratios.shape[1])
    return ratios.var(axis=0, ddof=1)


def deviation_path(summary: EnsembleSummary, eps: float, position: int = 0) -> FloatArray:
    return summary.exceedance_counts(eps)[:, position] / summary.replicates


def log_slope(x: FloatArray, y: FloatArray) -> Optional[float]:
    """Least-squares slope of log y against log x; None when any y is not positive."""

    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(y <= 0) or x.size < 2:
        return None
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


__all__ = [
    "ABSORPTION_HIGH",
    "ABSORPTION_LOW",
    "Absorption",
    "Estimate",
    "Histogram",
    "KsResult",
    "deviation_path",
    "estimate_above",
    "estimate_absorption",
    "estimate_below",
    "estimate_deviation",
    "estimate_ks",
    "estimate_mean",
    "estimate_pmax",
    "estimate_variance",
    "histogram",
    "log_slope",
    "ratio_variance_path",
]
