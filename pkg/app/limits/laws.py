"""Closed-form limiting laws of shares and share ratios.

Laws are immutable descriptors with tagged ``to_dict`` forms. Sampling uses
numpy generators seeded explicitly; CDFs and densities come from scipy.stats.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, ClassVar, Dict, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats

from app.core.enums import LawKind
from app.core.errors import DomainError
from app.core.types import Cdf, FloatArray

from .sticks import stick_breaking

SIMPLEX_TOLERANCE = 1e-12


def _positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True, slots=True)
class DirichletLaw:
    """Dir(a_1, ..., a_K) with a_k = n_{k,0}/R."""

    concentration: Tuple[float, ...]
    kind: ClassVar[LawKind] = LawKind.DIRICHLET

    def __post_init__(self) -> None:
        if len(self.concentration) < 2:
            raise DomainError("a Dirichlet law needs at least two coordinates")
        for value in self.concentration:
            _positive("concentration", value)

    def marginal(self, k: int) -> "BetaMarginal":
        total = math.fsum(self.concentration)
        return BetaMarginal(a=self.concentration[k], b=total - self.concentration[k])

    def mean(self) -> FloatArray:
        values = np.asarray(self.concentration)
        return values / values.sum()


@dataclass(frozen=True, slots=True)
class BetaMarginal:
    a: float
    b: float
    kind: ClassVar[LawKind] = LawKind.BETA

    def __post_init__(self) -> None:
        _positive("a", self.a)
        _positive("b", self.b)

    def mean(self) -> float:
        return self.a / (self.a + self.b)

    def cdf(self, x: FloatArray) -> FloatArray:
        return stats.beta.cdf(x, self.a, self.b)

    def pdf(self, x: FloatArray) -> FloatArray:
        return stats.beta.pdf(x, self.a, self.b)


@dataclass(frozen=True, slots=True)
class GammaRatio:
    """Limit of pi_t/pi_0 for a medium investor: Gamma(shape n0/R, scale R/n0)."""

    shape: float
    scale: float
    kind: ClassVar[LawKind] = LawKind.GAMMA_RATIO

    def __post_init__(self) -> None:
        _positive("shape", self.shape)
        _positive("scale", self.scale)

    def mean(self) -> float:
        return self.shape * self.scale

    def cdf(self, x: FloatArray) -> FloatArray:
        return stats.gamma.cdf(x, self.shape, scale=self.scale)

    def pdf(self, x: FloatArray) -> FloatArray:
        return stats.gamma.pdf(x, self.shape, scale=self.scale)

    def sf(self, x: float) -> float:
        return float(stats.gamma.sf(x, self.shape, scale=self.scale))


@dataclass(frozen=True, slots=True)
class TwoPointAbsorption:
    """Share absorbed at 1 with probability p and at 0 otherwise."""

    p: float
    kind: ClassVar[LawKind] = LawKind.TWO_POINT

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p!r}")

    def mean(self) -> float:
        return self.p

    def cdf(self, x: FloatArray) -> FloatArray:
        x = np.asarray(x, dtype=np.float64)
        return np.where(x < 0.0, 0.0, np.where(x < 1.0, 1.0 - self.p, 1.0))


@dataclass(frozen=True, slots=True)
class GEM:
    theta: float
    kind: ClassVar[LawKind] = LawKind.GEM

    def __post_init__(self) -> None:
        _positive("theta", self.theta)

    def mean(self) -> float:
        """Mean of the first stick."""

        return 1.0 / (1.0 + self.theta)


@dataclass(frozen=True, slots=True)
class PitmanYor:
    discount: float
    strength: float
    kind: ClassVar[LawKind] = LawKind.PITMAN_YOR

    def __post_init__(self) -> None:
        if not 0.0 <= self.discount < 1.0:
            raise DomainError(f"discount must lie in [0, 1), got {self.discount!r}")
        if not self.strength > -self.discount:
            raise DomainError("strength must exceed -discount")

    def mean(self) -> float:
        a = 1.0 - self.discount
        return a / (a + self.strength + self.discount)


LimitLaw = Union[DirichletLaw, BetaMarginal, GammaRatio, TwoPointAbsorption, GEM, PitmanYor]

_BY_KIND: Dict[LawKind, type] = {
    LawKind.DIRICHLET: DirichletLaw,
    LawKind.BETA: BetaMarginal,
    LawKind.GAMMA_RATIO: GammaRatio,
    LawKind.TWO_POINT: TwoPointAbsorption,
    LawKind.GEM: GEM,
    LawKind.PITMAN_YOR: PitmanYor,
}


def law_to_dict(law: LimitLaw) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"kind": law.kind.value}
    for key, value in asdict(law).items():
        payload[key] = list(value) if isinstance(value, tuple) else value
    return payload


def law_from_dict(data: Mapping[str, Any]) -> LimitLaw:
    payload = dict(data)
    try:
        cls = _BY_KIND[LawKind(payload.pop("kind"))]
    except (KeyError, ValueError) as exc:
        raise DomainError(f"unknown law descriptor {data!r}") from exc
    if cls is DirichletLaw:
        return DirichletLaw(concentration=tuple(float(v) for v in payload["concentration"]))
    return cls(**{key: float(value) for key, value in payload.items()})


def dirichlet_density(x: Sequence[float], a: Sequence[float]) -> float:
    """Density of Dir(a) at an interior point ``x`` of the simplex."""

    xs = np.asarray(x, dtype=np.float64)
    alphas = np.asarray(a, dtype=np.float64)
    if xs.ndim != 1 or xs.shape != alphas.shape or xs.shape[0] < 2:
        raise DomainError("x and a must be vectors of equal dimension >= 2")
    if np.any(alphas <= 0):
        raise DomainError("concentration parameters must be positive")
    if np.any(xs <= 0) or abs(math.fsum(xs) - 1.0) > SIMPLEX_TOLERANCE * xs.shape[0]:
        raise DomainError(f"{list(x)} is not on the open simplex")
    log_norm = special.gammaln(alphas.sum()) - special.gammaln(alphas).sum()
    return float(np.exp(log_norm + np.dot(alphas - 1.0, np.log(xs))))


def sample_limit(law: LimitLaw, n: int, seed: int, *, j_max: int = 1) -> FloatArray:
    """Draw ``n`` i.i.d. samples; Dirichlet and stick laws return rows of vectors."""

    if n < 1:
        raise DomainError("n must be >= 1")
    rng = np.random.default_rng(int(seed))
    if isinstance(law, DirichletLaw):
        gammas = rng.standard_gamma(np.asarray(law.concentration), size=(n, len(law.concentration)))
        return gammas / gammas.sum(axis=1, keepdims=True)
    if isinstance(law, BetaMarginal):
        return rng.beta(law.a, law.b, size=n)
    if isinstance(law, GammaRatio):
        return rng.gamma(law.shape, law.scale, size=n)
    if isinstance(law, TwoPointAbsorption):
        return (rng.random(n) < law.p).astype(np.float64)
    if isinstance(law, GEM):
        return stick_breaking(np.ones(j_max), np.full(j_max, law.theta), rng, samples=n).weights
    if isinstance(law, PitmanYor):
        k = np.arange(1, j_max + 1, dtype=np.float64)
        return stick_breaking(
            np.full(j_max, 1.0 - law.discount), law.strength + k * law.discount, rng, samples=n
        ).weights
    raise DomainError(f"unsupported law {law!r}")


def ks_distance(samples: Sequence[float], cdf: Cdf) -> float:
    """One-sample Kolmogorov-Smirnov sup-distance between ``samples`` and ``cdf``."""

    values = np.asarray(samples, dtype=np.float64)
    if values.size < 1:
        raise DomainError("at least one sample is required")
    return float(stats.ks_1samp(values, cdf, method="asymp").statistic)


def ks_critical_value(n: int, *, level: float = 0.99) -> float:
    """Asymptotic KS acceptance threshold c(level)/sqrt(n)."""

    return float(stats.kstwobign.ppf(level)) / math.sqrt(n)


__all__ = [
    "BetaMarginal",
    "DirichletLaw",
    "GEM",
    "GammaRatio",
    "LimitLaw",
    "PitmanYor",
    "TwoPointAbsorption",
    "dirichlet_density",
    "ks_critical_value",
    "ks_distance",
    "law_from_dict",
    "law_to_dict",
    "sample_limit",
]
