from __future__ import annotations

from pathlib import Path
from typing import Any, Callable, Dict, Sequence

import pytest

from app.config.loader import load_figure_catalog
from app.config.models import ExperimentConfig, FigureCatalog
from app.schedule import Constant, PowerDecay, Proportional, RewardSchedule, clear_cache
from app.urn import UrnState


@pytest.fixture(autouse=True)
def _fresh_supply_cache() -> None:
    clear_cache()


@pytest.fixture(scope="session")
def constant_schedule() -> RewardSchedule:
    return Constant(R=1.0)


@pytest.fixture(scope="session")
def fast_decay_schedule() -> RewardSchedule:
    return PowerDecay(c=1.0, alpha=0.6)


@pytest.fixture(scope="session")
def slow_decay_schedule() -> RewardSchedule:
    return PowerDecay(c=1.0, alpha=0.1)


@pytest.fixture(scope="session")
def geometric_schedule() -> RewardSchedule:
    return Proportional(rho=0.001, gamma=1.1)


@pytest.fixture
def urn_state_factory() -> Callable[..., UrnState]:
    def _factory(coins: Sequence[float] = (1.0, 1.0)) -> UrnState:
        return UrnState.initial(coins)

    return _factory


@pytest.fixture
def experiment_config_factory() -> Callable[..., ExperimentConfig]:
    def _factory(**overrides: Any) -> ExperimentConfig:
        payload: Dict[str, Any] = {
            "name": "small",
            "schedule": {"kind": "constant", "R": 1.0},
            "n_grid": [20.0, 40.0],
            "stakes": [{"kind": "fraction", "f": 0.5}],
            "horizon": 200,
            "replicates": 64,
            "stride": 50,
            "eps": 0.5,
            "estimators": ["p_max", "variance"],
            "master_seed": 7,
        }
        payload.update(overrides)
        return ExperimentConfig.model_validate(payload)

    return _factory


@pytest.fixture(scope="session")
def figure_catalog() -> FigureCatalog:
    return load_figure_catalog()


@pytest.fixture
def results_tmpdir(tmp_path_factory: pytest.TempPathFactory) -> Path:
    return tmp_path_factory.mktemp("results")
