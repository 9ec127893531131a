from __future__ import annotations

import json

import pytest

from app.config import config_hash, figure_config
from app.core.errors import DomainError, UnknownFigure
from app.config.models import FigureCatalog
from app.lab import FIGURES, apply_scale, figure_names, limit_table, resolve_figure, run_experiment, run_figure
from app.telemetry.storage import ResultStorage


def test_run_experiment_should_produce_one_row_per_grid_point_and_stake(experiment_config_factory) -> None:
    config = experiment_config_factory(stakes=[{"kind": "fraction", "f": 0.5}, {"kind": "constant", "c": 2.0}])

    result = run_experiment(config)

    assert len(result.rows) == 4
    assert result.column("N") == [20.0, 20.0, 40.0, 40.0]
    row = result.row(40.0, "2*N^0")
    assert row["n0"] == 2.0
    assert row["class"] == "medium"
    assert json.loads(row["limit"]) == {"kind": "gamma_ratio", "shape": 2.0, "scale": 0.5}
    assert 0.0 <= row["p_max"] <= 1.0
    assert row["exact_variance"] > 0.0


def test_run_experiment_should_place_estimate_columns_after_base_columns(experiment_config_factory) -> None:
    result = run_experiment(experiment_config_factory())

    assert result.fieldnames[:3] == ["N", "stake", "n0"]
    assert result.fieldnames[-3:] == ["variance", "variance_se", "exact_variance"]
    assert "p_max" in result.fieldnames


def test_run_experiment_variance_should_agree_with_exact_recursion(experiment_config_factory) -> None:
    config = experiment_config_factory(n_grid=[10.0], replicates=4_000, horizon=300, estimators=["variance"])

    row = run_experiment(config).rows[0]

    assert abs(row["variance"] - row["exact_variance"]) <= 4.0 * row["variance_se"]


def test_run_experiment_should_write_tables_and_manifest(experiment_config_factory, results_tmpdir) -> None:
    config = experiment_config_factory(estimators=["p_max", "variance", "histogram"])

    result = run_experiment(config, storage=ResultStorage(results_tmpdir))

    assert result.outputs == ["small.csv", "small_paths.csv", "small_histogram.csv"]
    for name in result.outputs:
        assert (results_tmpdir / name).exists()
    manifest = json.loads((results_tmpdir / "small.manifest.json").read_text(encoding="utf-8"))
    assert manifest["config_hash"] == config_hash(config)
    assert manifest["master_seed"] == 7
    header = (results_tmpdir / "small.csv").read_bytes().split(b"\r\n")[0]
    assert header.startswith(b"N,stake,n0,pi0,replicates")


def test_run_experiment_output_should_not_depend_on_thread_count(experiment_config_factory, tmp_path) -> None:
    config = experiment_config_factory(replicates=300)

    run_experiment(config, threads=1, batch_size=64, storage=ResultStorage(tmp_path / "one"))
    run_experiment(config, threads=4, batch_size=64, storage=ResultStorage(tmp_path / "four"))

    for name in ("small.csv", "small_paths.csv"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "four" / name).read_bytes()


def test_run_experiment_seed_override_should_change_results(experiment_config_factory) -> None:
    config = experiment_config_factory(estimators=["variance"])

    base = run_experiment(config)
    other = run_experiment(config, master_seed=8)

    assert other.master_seed == 8
    assert other.config.master_seed == 8
    assert base.column("variance") != other.column("variance")


def test_run_experiment_with_dilution_should_compare_against_limit_ratio(experiment_config_factory) -> None:
    config = experiment_config_factory(
        n_grid=[10.0],
        stakes=[{"kind": "constant", "c": 5.0}],
        theta=1.0,
        horizon=400,
        replicates=1_000,
        stride=100,
        estimators=["dilution"],
    )

    row = run_experiment(config).rows[0]

    assert row["expected_ratio"] == pytest.approx(10.0 / 11.0 * 411.0 / 410.0, rel=1e-12)
    assert abs(row["mean_ratio"] - row["expected_ratio"]) <= 4.0 * row["mean_ratio_se"]
    assert row["limit_class"] == "positive"
    assert json.loads(row["limit"])["kind"] == "beta"


def test_run_experiment_should_count_features_for_growth_estimator(experiment_config_factory) -> None:
    config = experiment_config_factory(n_grid=[4.0], replicates=20, horizon=1_000, estimators=["k_t_growth"])

    row = run_experiment(config).rows[0]

    assert row["k_mean"] > 1.0
    assert row["k_expected"] == pytest.approx(4.0 * sum(1.0 / (4.0 + i) for i in range(1_000)))


def test_apply_scale_should_thin_grid_and_replicates(experiment_config_factory) -> None:
    config = experiment_config_factory(n_grid=[float(n) for n in range(10, 110, 10)])

    scaled = apply_scale(config, 0.25)

    assert scaled.n_grid == [10.0, 50.0, 90.0, 100.0]
    assert scaled.replicates == 16
    assert apply_scale(config, 1.0) is config


def test_apply_scale_should_reject_scale_outside_unit_interval(experiment_config_factory) -> None:
    with pytest.raises(DomainError):
        apply_scale(experiment_config_factory(), 0.0)
    with pytest.raises(DomainError):
        apply_scale(experiment_config_factory(), 1.5)


def test_limit_table_should_report_constant_reward_bounds(figure_catalog) -> None:
    config = figure_config("fig1", figure_catalog).model_copy(update={"n_grid": [1_000.0, 10_000.0]})

    _, rows = limit_table(config)

    assert [row["bound"] for row in rows] == pytest.approx([1.0, 0.1])
    assert {row["class"] for row in rows} == {"large"}


def test_figure_catalog_should_list_every_figure(figure_catalog) -> None:
    assert figure_names(figure_catalog) == list(FIGURES)
    assert len(figure_catalog.figures) == 16


def test_figure_catalog_should_encode_caption_parameters(figure_catalog) -> None:
    fig7 = figure_config("fig7", figure_catalog)
    fig9 = figure_config("fig9", figure_catalog)

    assert fig7.eps == 0.25
    assert fig7.schedule.alpha == 0.1
    assert fig9.n_grid == [1000.0]
    assert fig9.schedule.gamma == 1.1
    assert fig9.horizon == 5_000
    assert figure_config("fig1", figure_catalog).n_grid[-1] == 10_000.0


def test_resolve_figure_should_prefer_explicit_replicates(figure_catalog) -> None:
    config = resolve_figure("fig1", scale=0.1, replicates=50, catalog=figure_catalog)

    assert config.replicates == 50
    assert config.n_grid[-1] == 10_000.0
    assert len(config.n_grid) < len(figure_config("fig1", figure_catalog).n_grid)


def test_resolve_figure_should_reject_unknown_name(figure_catalog) -> None:
    with pytest.raises(UnknownFigure):
        resolve_figure("fig12", catalog=figure_catalog)


def test_run_figure_should_write_catalogued_experiment(experiment_config_factory, results_tmpdir) -> None:
    catalog = FigureCatalog(figures={"tiny": experiment_config_factory(name="tiny")})

    result = run_figure("tiny", replicates=8, master_seed=3, storage=ResultStorage(results_tmpdir / "tiny"), catalog=catalog)

    assert result.config.replicates == 8
    assert result.master_seed == 3
    assert (results_tmpdir / "tiny" / "tiny.csv").exists()
    assert (results_tmpdir / "tiny" / "tiny.manifest.json").exists()
