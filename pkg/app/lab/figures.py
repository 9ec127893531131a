"""Figure registry: named experiment configurations from config/figures.yml."""
from __future__ import annotations

import logging
from typing import List, Optional

from app.config import FigureCatalog, figure_config, load_figure_catalog
from app.config.models import ExperimentConfig
from app.core.errors import DomainError
from app.telemetry.storage import ResultStorage
from app.urn import DEFAULT_BATCH_SIZE

from .experiments import ExperimentResult, apply_scale, run_experiment

LOGGER = logging.getLogger("stake_lab.lab")

FIGURES = (
    "fig1",
    "fig2a",
    "fig2b",
    "fig3",
    "fig4a",
    "fig4b",
    "fig5",
    "fig6a",
    "fig6b",
    "fig7",
    "fig8a",
    "fig8b",
    "fig9",
    "fig10",
    "fig11a",
    "fig11b",
)


def figure_names(catalog: Optional[FigureCatalog] = None) -> List[str]:
    catalog = catalog or load_figure_catalog()
    return sorted(catalog.figures, key=lambda name: FIGURES.index(name) if name in FIGURES else len(FIGURES))


def resolve_figure(
    name: str,
    *,
    scale: float = 1.0,
    replicates: Optional[int] = None,
    catalog: Optional[FigureCatalog] = None,
) -> ExperimentConfig:
    """Catalogue entry for ``name`` with desk-scale overrides applied.

    An explicit ``replicates`` wins over the scaled replicate count.
    """

    config = apply_scale(figure_config(name, catalog), scale)
    if replicates is not None:
        if replicates < 1:
            raise DomainError("replicates must be >= 1")
        config = config.model_copy(update={"replicates": replicates})
    return config


def run_figure(
    name: str,
    *,
    scale: float = 1.0,
    replicates: Optional[int] = None,
    master_seed: Optional[int] = None,
    threads: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
    storage: Optional[ResultStorage] = None,
    catalog: Optional[FigureCatalog] = None,
) -> ExperimentResult:
    config = resolve_figure(name, scale=scale, replicates=replicates, catalog=catalog)
    LOGGER.info(
        "Running figure",
        extra={"figure": name, "grid_points": len(config.n_grid), "replicates": config.replicates, "scale": scale},
    )
    return run_experiment(config, master_seed=master_seed, threads=threads, batch_size=batch_size, storage=storage)


__all__ = ["FIGURES", "figure_names", "resolve_figure", "run_figure"]
