import dataclasses
import json

import numpy as np
import pytest

from zeromat import (
    EvalReport,
    ExperimentConfig,
    LockstateCurve,
    PmfConfig,
    SplitSpec,
    TrainConfig,
    ZipfSpec,
    compare_on_split,
    derive_seeds,
    emit_report,
    generate_zipf_dataset,
    render_curve,
    render_report,
    run_comparison,
    run_lockstate_experiment,
    train_test_split,
)

SMALL_SPEC = ZipfSpec(num_users=40, num_items=25, ratings_per_user=6)
FAST_ZM = TrainConfig(k=4, iterations=400, seed=5)
FAST_PMF = PmfConfig(k=4, epochs=5, seed=6)


def small_config(**overrides):
    base = dict(
        zipf=SMALL_SPEC,
        split=SplitSpec(0.8, seed=1),
        zeromat=FAST_ZM,
        pmf=FAST_PMF,
        seed=42,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def small_split(seed=3):
    dataset = generate_zipf_dataset(SMALL_SPEC, seed=seed)
    return train_test_split(dataset, SplitSpec(0.8, seed=1))


class TestExperimentConfig:
    def test_requires_exactly_one_source(self):
        with pytest.raises(ValueError, match="exactly one"):
            ExperimentConfig()
        with pytest.raises(ValueError, match="exactly one"):
            ExperimentConfig(data_path="x.csv", zipf=SMALL_SPEC)

    def test_validates_report_format(self):
        with pytest.raises(ValueError, match="format"):
            ExperimentConfig(zipf=SMALL_SPEC, report_format="xml")


class TestDeriveSeeds:
    def test_deterministic(self):
        assert derive_seeds(7, 4) == derive_seeds(7, 4)

    def test_distinct_across_masters(self):
        assert derive_seeds(7, 4) != derive_seeds(8, 4)

    def test_returns_python_ints(self):
        seeds = derive_seeds(1, 3)
        assert len(seeds) == 3
        assert all(isinstance(s, int) and 0 <= s < 2**64 for s in seeds)


class TestCompareOnSplit:
    def test_report_schema(self):
        train, test = small_split()
        reports = compare_on_split(
            train, test, zeromat=FAST_ZM, pmf=FAST_PMF, baseline_seed=9
        )
        assert [r.method for r in reports] == ["zeromat", "pmf", "random", "ground_truth"]
        for report in reports:
            assert report.mae >= 0.0
            assert 0.0 <= report.matthew_degree <= 1.0
            assert np.isfinite(report.zipf_slope)
        assert reports[3].mae == 0.0
        assert reports[0].config["iterations"] == 400
        assert reports[1].config["epochs"] == 5

    def test_deterministic(self):
        train, test = small_split()
        a = compare_on_split(train, test, zeromat=FAST_ZM, pmf=FAST_PMF, baseline_seed=9)
        b = compare_on_split(train, test, zeromat=FAST_ZM, pmf=FAST_PMF, baseline_seed=9)
        assert a == b

    def test_train_ratings_only_affect_pmf(self):
        train, test = small_split()
        flipped = dataclasses.replace(train, ratings=train.r_max - train.ratings)
        a = compare_on_split(train, test, zeromat=FAST_ZM, pmf=FAST_PMF, baseline_seed=9)
        b = compare_on_split(flipped, test, zeromat=FAST_ZM, pmf=FAST_PMF, baseline_seed=9)
        assert b[0] == a[0]  # data-free trainer
        assert b[2] == a[2]  # random baseline
        assert b[3] == a[3]  # ground truth
        assert b[1] != a[1]  # pmf saw different history

    def test_empty_test_rejected(self):
        train, test = small_split()
        with pytest.raises(ValueError, match="test split"):
            compare_on_split(
                train, test.drop_ratings(), zeromat=FAST_ZM, pmf=FAST_PMF, baseline_seed=9
            )


class TestRunComparison:
    def test_synthetic_source(self):
        reports = run_comparison(small_config())
        assert len(reports) == 4

    def test_deterministic_end_to_end(self):
        assert run_comparison(small_config()) == run_comparison(small_config())

    def test_file_source(self, tmp_path):
        lines = [f"{u}::{i}::{(u + i) % 5 + 1}::0" for u in range(1, 13) for i in range(1, 9)]
        path = tmp_path / "ratings.dat"
        path.write_text("\n".join(lines) + "\n")
        reports = run_comparison(small_config(zipf=None, data_path=path))
        assert [r.method for r in reports] == ["zeromat", "pmf", "random", "ground_truth"]

    def test_r_max_override_reaches_reports(self, tmp_path):
        lines = [f"{u}::{i}::{(u + i) % 5 + 1}::0" for u in range(1, 13) for i in range(1, 9)]
        path = tmp_path / "ratings.dat"
        path.write_text("\n".join(lines) + "\n")
        reports = run_comparison(
            small_config(zipf=None, data_path=path, r_max_override=10.0)
        )
        assert reports[0].config["r_max"] == 10.0


class TestLockstate:
    def test_curve_shape(self):
        curve = run_lockstate_experiment(
            SMALL_SPEC, [0.0, 0.5, 1.0], replicates=2,
            zeromat=FAST_ZM, pmf=FAST_PMF, seed=3,
        )
        assert curve.lambdas == (0.0, 0.5, 1.0)
        assert len(curve.zeromat_mae) == 3
        assert len(curve.pmf_mae) == 3
        assert len(curve.random_mae) == 3
        assert curve.replicates == 2
        assert len(curve.seeds) == 2

    def test_single_point_matches_run_comparison(self):
        curve = run_lockstate_experiment(
            SMALL_SPEC, [0.0], replicates=1, zeromat=FAST_ZM, pmf=FAST_PMF, seed=17
        )
        rep_seed = derive_seeds(17, 1)[0]
        s_split, s_zm, s_pmf, s_cfg = derive_seeds(rep_seed, 4)
        reports = run_comparison(
            ExperimentConfig(
                zipf=SMALL_SPEC,
                split=SplitSpec(seed=s_split),
                zeromat=dataclasses.replace(FAST_ZM, seed=s_zm),
                pmf=dataclasses.replace(FAST_PMF, seed=s_pmf),
                seed=s_cfg,
            )
        )
        by_method = {r.method: r.mae for r in reports}
        assert curve.zeromat_mae[0] == pytest.approx(by_method["zeromat"], abs=1e-15)
        assert curve.pmf_mae[0] == pytest.approx(by_method["pmf"], abs=1e-15)
        assert curve.random_mae[0] == pytest.approx(by_method["random"], abs=1e-15)

    def test_rejects_unsorted_lambdas(self):
        with pytest.raises(ValueError, match="ascending"):
            run_lockstate_experiment(
                SMALL_SPEC, [0.5, 0.0], replicates=1, zeromat=FAST_ZM, pmf=FAST_PMF
            )

    def test_rejects_out_of_range_lambda(self):
        with pytest.raises(ValueError, match="uniform_mix"):
            run_lockstate_experiment(
                SMALL_SPEC, [0.0, 1.5], replicates=1, zeromat=FAST_ZM, pmf=FAST_PMF
            )

    def test_rejects_zero_replicates(self):
        with pytest.raises(ValueError, match="replicates"):
            run_lockstate_experiment(
                SMALL_SPEC, [0.0], replicates=0, zeromat=FAST_ZM, pmf=FAST_PMF
            )


SAMPLE_REPORTS = [
    EvalReport(
        "zeromat", 1.23456789, 0.5, -1.0, seed=11,
        config={"k": 10, "learning_rate": 0.001, "iterations": 500},
    ),
    EvalReport(
        "pmf", 0.5, 0.75, -1.5, seed=12,
        config={"k": 10, "learning_rate": 0.005, "reg": 0.05, "epochs": 30},
    ),
    EvalReport("random", 2.0, 0.6, -1.2, seed=13, config={"r_max": 5.0}),
    EvalReport("ground_truth", 0.0, 0.8, -1.1),
]


class TestRendering:
    def test_empty_report_list_is_header_only(self):
        assert render_report([], "csv") == "method,mae,matthew_degree,zipf_slope,seed,k,eta,iterations\n"

    def test_one_row_gives_two_lines(self):
        text = render_report(SAMPLE_REPORTS[:1], "csv")
        lines = text.splitlines()
        assert len(lines) == 2
        assert lines[1] == "zeromat,1.234568,0.500000,-1.000000,11,10,0.001000,500"

    def test_pmf_row_reports_epochs_in_iterations_column(self):
        lines = render_report(SAMPLE_REPORTS, "csv").splitlines()
        assert lines[2].endswith(",12,10,0.005000,30")

    def test_blank_columns_for_random_and_truth(self):
        lines = render_report(SAMPLE_REPORTS, "csv").splitlines()
        assert lines[3] == "random,2.000000,0.600000,-1.200000,13,,,"
        assert lines[4] == "ground_truth,0.000000,0.800000,-1.100000,,,,"

    def test_json_round_trip(self):
        parsed = json.loads(render_report(SAMPLE_REPORTS, "json"))
        assert [row["method"] for row in parsed] == [r.method for r in SAMPLE_REPORTS]
        for row, report in zip(parsed, SAMPLE_REPORTS):
            assert row["mae"] == pytest.approx(report.mae, abs=5e-7)
            assert row["matthew_degree"] == pytest.approx(report.matthew_degree, abs=5e-7)
            assert row["zipf_slope"] == pytest.approx(report.zipf_slope, abs=5e-7)
            assert row["seed"] == report.seed
            assert row["matthew_metric"] == "gini_of_item_rating_mass"
            for key, value in report.config.items():
                assert row["config"][key] == pytest.approx(value, abs=5e-7)

    def test_curve_csv(self):
        curve = LockstateCurve((0.0, 1.0), (1.5, 2.5), (0.2, 3.0), (1.9, 2.0), 2, (7, 8))
        lines = render_curve(curve, "csv").splitlines()
        assert lines[0] == "lambda,zeromat_mae,pmf_mae,random_mae,replicates"
        assert lines[1] == "0.000000,1.500000,0.200000,1.900000,2"
        assert lines[2] == "1.000000,2.500000,3.000000,2.000000,2"

    def test_curve_json_round_trip(self):
        curve = LockstateCurve((0.0, 1.0), (1.5, 2.5), (0.2, 3.0), (1.9, 2.0), 2, (7, 8))
        parsed = json.loads(render_curve(curve, "json"))
        assert parsed["lambdas"] == [0.0, 1.0]
        assert parsed["replicates"] == 2
        assert parsed["seeds"] == [7, 8]

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError, match="format"):
            render_report(SAMPLE_REPORTS, "xml")

    def test_emit_writes_file(self, tmp_path):
        path = emit_report(SAMPLE_REPORTS, "csv", tmp_path / "report.csv")
        text = path.read_text()
        assert text == render_report(SAMPLE_REPORTS, "csv")
        assert text.endswith("\n")

    def test_emit_curve(self, tmp_path):
        curve = LockstateCurve((0.0,), (1.0,), (1.0,), (1.0,), 1, (3,))
        path = emit_report(curve, "json", tmp_path / "curve.json")
        assert json.loads(path.read_text())["replicates"] == 1


class TestCurveValidation:
    def test_rejects_descending_lambdas(self):
        with pytest.raises(ValueError, match="ascending"):
            LockstateCurve((0.5, 0.0), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0), 1, (1,))

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError, match="MAE triple"):
            LockstateCurve((0.0, 1.0), (1.0,), (1.0, 2.0), (1.0, 2.0), 1, (1,))
