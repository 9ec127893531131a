"""Typed configuration models for experiments, figures and the lab runtime.

YAML (or JSON) files are validated into these pydantic models; the models
then build the immutable domain objects used by the simulation packages.
"""
from __future__ import annotations

import hashlib
import json
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator, model_validator

from app.core.enums import Estimator
from app.limits.classifier import StakeScaling
from app.schedule import Constant, FloorDecay, FloorPower, PowerDecay, Proportional, RewardSchedule

_FROZEN = ConfigDict(frozen=True, extra="forbid")


# ----------------------------------------------------------------------
# Reward schedules
# ----------------------------------------------------------------------
class ConstantScheduleConfig(BaseModel):
    model_config = _FROZEN

    kind: Literal["constant"] = "constant"
    R: float = Field(..., gt=0)

    def build(self) -> RewardSchedule:
        return Constant(R=self.R)


class FloorDecayScheduleConfig(BaseModel):
    """R_t = floor + excess * q**t, e.g. 1 + 0.999**t."""

    model_config = _FROZEN

    kind: Literal["floor_decay"] = "floor_decay"
    floor: float = Field(..., gt=0)
    excess: float = Field(..., gt=0)
    q: float = Field(..., gt=0, lt=1)

    def build(self) -> RewardSchedule:
        return FloorDecay(floor=self.floor, excess=self.excess, q=self.q)


class FloorPowerScheduleConfig(BaseModel):
    model_config = _FROZEN

    kind: Literal["floor_power"] = "floor_power"
    floor: float = Field(..., gt=0)
    c: float = Field(..., gt=0)
    alpha: float = Field(..., gt=0)

    def build(self) -> RewardSchedule:
        return FloorPower(floor=self.floor, c=self.c, alpha=self.alpha)


class PowerDecayScheduleConfig(BaseModel):
    model_config = _FROZEN

    kind: Literal["power_decay"] = "power_decay"
    c: float = Field(1.0, gt=0)
    alpha: float = Field(..., gt=0)

    def build(self) -> RewardSchedule:
        return PowerDecay(c=self.c, alpha=self.alpha)


class ProportionalScheduleConfig(BaseModel):
    model_config = _FROZEN

    kind: Literal["proportional"] = "proportional"
    rho: float = Field(..., gt=0)
    gamma: float = Field(..., gt=0)

    def build(self) -> RewardSchedule:
        return Proportional(rho=self.rho, gamma=self.gamma)


ScheduleConfig = Annotated[
    Union[
        ConstantScheduleConfig,
        FloorDecayScheduleConfig,
        FloorPowerScheduleConfig,
        PowerDecayScheduleConfig,
        ProportionalScheduleConfig,
    ],
    Field(discriminator="kind"),
]


# ----------------------------------------------------------------------
# Initial-stake rules
# ----------------------------------------------------------------------
class PowerStake(BaseModel):
    """n0 = c * N**beta."""

    model_config = _FROZEN

    kind: Literal["power"] = "power"
    c: float = Field(1.0, gt=0)
    beta: float

    def scaling(self) -> StakeScaling:
        return StakeScaling(c=self.c, beta=self.beta)


class FractionStake(BaseModel):
    """n0 = f * N."""

    model_config = _FROZEN

    kind: Literal["fraction"] = "fraction"
    f: float = Field(..., gt=0, lt=1)

    def scaling(self) -> StakeScaling:
        return StakeScaling.fraction(self.f)


class ConstantStake(BaseModel):
    model_config = _FROZEN

    kind: Literal["constant"] = "constant"
    c: float = Field(..., gt=0)

    def scaling(self) -> StakeScaling:
        return StakeScaling.constant(self.c)


StakeRule = Annotated[Union[PowerStake, FractionStake, ConstantStake], Field(discriminator="kind")]


def stake_value(rule: Union[PowerStake, FractionStake, ConstantStake], N: float) -> float:
    return rule.scaling().value(N)


def stake_label(rule: Union[PowerStake, FractionStake, ConstantStake]) -> str:
    return rule.scaling().describe()


# ----------------------------------------------------------------------
# Experiments
# ----------------------------------------------------------------------
class HistogramConfig(BaseModel):
    """Fixed bin specification; ``upper`` defaults to 1 for shares and 6 for ratios."""

    model_config = _FROZEN

    bins: PositiveInt = 60
    variable: Literal["ratio", "share"] = "ratio"
    lower: float = Field(0.0, ge=0)
    upper: Optional[float] = Field(None, gt=0)

    def edges_upper(self) -> float:
        if self.upper is not None:
            return self.upper
        return 1.0 if self.variable == "share" else 6.0

    @model_validator(mode="after")
    def _check_range(self) -> "HistogramConfig":
        if self.edges_upper() <= self.lower:
            raise ValueError("histogram upper edge must exceed the lower edge")
        return self


class ExperimentConfig(BaseModel):
    """One ensemble experiment: a grid of N values crossed with stake rules.

    The tracked investor (index 0) holds n0; the remaining N - n0 coins are
    split evenly over ``investors - 1`` others.
    """

    model_config = _FROZEN

    name: str = Field(..., min_length=1)
    schedule: ScheduleConfig
    n_grid: List[float] = Field(..., min_length=1)
    stakes: List[StakeRule] = Field(..., min_length=1)
    investors: int = Field(2, ge=2)
    horizon: PositiveInt = 50_000
    replicates: PositiveInt = 10_000
    eps: float = Field(0.05, gt=0)
    estimators: List[Estimator] = Field(default_factory=lambda: [Estimator.P_MAX])
    stride: PositiveInt = 100
    histogram: HistogramConfig = Field(default_factory=HistogramConfig)
    master_seed: int = Field(0, ge=0, lt=2**64)
    theta: Optional[float] = Field(None, ge=0)
    output: Optional[str] = None

    @field_validator("n_grid", mode="before")
    @classmethod
    def _expand_grid(cls, value: Any) -> Any:
        """Accept ``{start, stop, step}`` (stop inclusive) as well as an explicit list."""

        if isinstance(value, dict):
            try:
                start, stop, step = (float(value[key]) for key in ("start", "stop", "step"))
            except KeyError as exc:
                raise ValueError(f"grid range needs start, stop and step: missing {exc}") from exc
            if not step > 0 or stop < start:
                raise ValueError("grid range needs step > 0 and stop >= start")
            count = int(round((stop - start) / step)) + 1
            return [start + i * step for i in range(count)]
        return value

    @model_validator(mode="after")
    def _check_grid(self) -> "ExperimentConfig":
        if any(not N > 0 for N in self.n_grid):
            raise ValueError("all N grid values must be positive")
        for N in self.n_grid:
            for rule in self.stakes:
                n0 = stake_value(rule, N)
                if not 0 < n0 < N:
                    raise ValueError(f"stake {stake_label(rule)} gives n0={n0!r} outside (0, N={N!r})")
        if Estimator.DILUTION in self.estimators and self.theta is None:
            raise ValueError("the dilution estimator needs theta")
        if Estimator.K_T_GROWTH in self.estimators and not isinstance(self.schedule, ConstantScheduleConfig):
            raise ValueError("k_t_growth is defined for constant rewards")
        return self

    def reward_schedule(self) -> RewardSchedule:
        return self.schedule.build()

    def initial_coins(self, N: float, rule: Union[PowerStake, FractionStake, ConstantStake]) -> tuple:
        n0 = stake_value(rule, N)
        others = self.investors - 1
        rest = (N - n0) / others
        return (n0,) + (rest,) * others


class MomentsConfig(BaseModel):
    """Exact moment table request for the ``moments`` subcommand."""

    model_config = _FROZEN

    schedule: ScheduleConfig
    N: float = Field(..., gt=0)
    pi0: float = Field(..., gt=0, lt=1)
    horizon: PositiveInt
    max_order: int = Field(4, ge=1, le=4)
    output: Optional[str] = None


class LabSettings(BaseModel):
    """Runtime defaults from config/lab.yml; CLI flags override them."""

    model_config = _FROZEN

    log_level: str = Field("INFO")
    log_dir: Optional[str] = None
    output_dir: str = Field("results")
    threads: PositiveInt = 1
    batch_size: PositiveInt = 1024


class FigureCatalog(BaseModel):
    model_config = _FROZEN

    figures: Dict[str, ExperimentConfig]

    @model_validator(mode="after")
    def _check_names(self) -> "FigureCatalog":
        for key, figure in self.figures.items():
            if figure.name != key:
                raise ValueError(f"figure {key!r} carries name {figure.name!r}")
        return self


def config_hash(config: BaseModel) -> str:
    """SHA-256 of the canonical JSON of the semantic fields."""

    payload = config.model_dump(mode="json", exclude={"output"})
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


__all__ = [
    "ConstantScheduleConfig",
    "ConstantStake",
    "ExperimentConfig",
    "FigureCatalog",
    "FloorDecayScheduleConfig",
    "FloorPowerScheduleConfig",
    "FractionStake",
    "HistogramConfig",
    "LabSettings",
    "MomentsConfig",
    "PowerDecayScheduleConfig",
    "PowerStake",
    "ProportionalScheduleConfig",
    "ScheduleConfig",
    "StakeRule",
    "config_hash",
    "stake_label",
    "stake_value",
]
