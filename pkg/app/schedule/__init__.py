"""Reward schedules and derived supply quantities."""
from .regimes import classify_regime, reward_floor
from .rewards import (
    Constant,
    FloorDecay,
    FloorPower,
    PowerDecay,
    Proportional,
    RewardSchedule,
    first_reward,
    reward_at,
    schedule_from_dict,
    schedule_to_dict,
)
from .supply import RewardPath, clear_cache, reward_path, supply_after

__all__ = [
    "Constant",
    "FloorDecay",
    "FloorPower",
    "PowerDecay",
    "Proportional",
    "RewardPath",
    "RewardSchedule",
    "classify_regime",
    "clear_cache",
    "first_reward",
    "reward_at",
    "reward_floor",
    "reward_path",
    "schedule_from_dict",
    "schedule_to_dict",
    "supply_after",
]
