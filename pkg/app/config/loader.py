"""YAML loaders for the config subsystem.

Each helper consumes one YAML (or JSON) file, validates it via models.py and
returns typed objects. Validation failures surface as
:class:`~app.core.errors.ConfigurationError`.
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping, Optional, Type, TypeVar

import yaml
from pydantic import BaseModel, ValidationError

from app.core.errors import ConfigurationError, UnknownFigure

from .models import ExperimentConfig, FigureCatalog, LabSettings, MomentsConfig

_DEFAULT_CONFIG_DIR = Path(__file__).resolve().parents[2] / "config"

ModelT = TypeVar("ModelT", bound=BaseModel)


def _read_yaml(path: Path) -> Mapping:
    """Read a YAML file and return a mapping (empty dict if file is blank)."""

    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    with path.open("r", encoding="utf-8") as fp:
        data = yaml.safe_load(fp) or {}
    if not isinstance(data, Mapping):
        raise ValueError(f"YAML root must be a mapping in {path}")
    return data


def _validate(model: Type[ModelT], data: Mapping[str, Any], source: str) -> ModelT:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"Invalid {model.__name__} in {source}: {exc}") from exc


def load_experiment_config(path: Path | str) -> ExperimentConfig:
    """Load one experiment description (schedule, N grid, stakes, estimators)."""

    path = Path(path)
    return _validate(ExperimentConfig, _read_yaml(path), str(path))


def load_moments_config(path: Path | str) -> MomentsConfig:
    path = Path(path)
    return _validate(MomentsConfig, _read_yaml(path), str(path))


def load_lab_settings(path: Optional[Path | str] = _DEFAULT_CONFIG_DIR / "lab.yml") -> LabSettings:
    """Load lab.yml; a missing default file yields the built-in defaults."""

    if path is None:
        return LabSettings()
    path = Path(path)
    if not path.exists() and path == _DEFAULT_CONFIG_DIR / "lab.yml":
        return LabSettings()
    return _validate(LabSettings, _read_yaml(path), str(path))


def load_figure_catalog(path: Path | str = _DEFAULT_CONFIG_DIR / "figures.yml") -> FigureCatalog:
    """Load figures.yml, a mapping ``figures: {name: experiment}``.

    Each entry may omit ``name``; it is filled in from its key.
    """

    path = Path(path)
    data = _read_yaml(path)
    raw = data.get("figures")
    if not isinstance(raw, Mapping):
        raise ConfigurationError(f"{path} must contain a `figures:` mapping")
    figures = {key: {"name": key, **dict(entry)} for key, entry in raw.items()}
    return _validate(FigureCatalog, {"figures": figures}, str(path))


def figure_config(name: str, catalog: Optional[FigureCatalog] = None) -> ExperimentConfig:
    catalog = catalog or load_figure_catalog()
    try:
        return catalog.figures[name]
    except KeyError as exc:
        raise UnknownFigure(f"unknown figure {name!r}; known: {', '.join(sorted(catalog.figures))}") from exc


__all__ = [
    "figure_config",
    "load_experiment_config",
    "load_figure_catalog",
    "load_lab_settings",
    "load_moments_config",
]
