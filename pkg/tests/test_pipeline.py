"""
End-to-end tests of the command-line pipeline on a small synthetic corpus.
"""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from main import main
from src.calibration.schemas import CalibrationResult
from src.config.config_loader import ConfigLoader
from src.evaluation.reports import read_summary
from src.ingest.heart_rate import hr_to_peaks
from src.ingest.peak_loader import RECORDS_FILE, read_prepared, write_peak_files
from src.pipeline.evaluate import CALIBRATION_FILE
from src.pipeline.prepare import UNSPLIT, prepare_dataset
from src.pipeline.train import CHECKPOINT_FILE, MANIFEST_FILE, RUN_INDEX_FILE, TRAIN_LOG_FILE, plan_runs


def edit_config(path: Path, **sections) -> Path:
    raw = json.loads(path.read_text(encoding="utf-8"))
    for name, values in sections.items():
        raw.setdefault(name, {}).update(values)
    path.write_text(json.dumps(raw, indent=2), encoding="utf-8")
    return path


def runs_dir_of(config_path: Path) -> Path:
    return Path(json.loads(config_path.read_text(encoding="utf-8"))["output"]["runs_dir"])


@pytest.fixture
def trained(synthetic_config_file):
    """Config whose corpus has been generated, prepared and trained."""
    config = str(synthetic_config_file)
    for step in ("synth", "prepare", "train"):
        assert main([step, "--config", config, "-q"]) == 0
    return synthetic_config_file


class TestPlanRuns:
    """Run grid layout."""

    def test_default_grid(self, tmp_path, monkeypatch):
        monkeypatch.delenv("HRBENCH_OUTPUT_DIR", raising=False)
        config = ConfigLoader(str(tmp_path)).load()
        runs = plan_runs(config)
        assert len(runs) == 2 * 2 * 3 + 3
        assert runs[0].run_id == "grud-classification-s0"
        assert [r.run_id for r in runs if r.sweep] == [
            "grud-classification-h32-s0", "grud-classification-h64-s0", "grud-classification-h128-s0",
        ]

    def test_transformer_sweep(self, tmp_path, monkeypatch):
        monkeypatch.delenv("HRBENCH_OUTPUT_DIR", raising=False)
        config = ConfigLoader(str(tmp_path)).load(
            overrides={"models.sweep_transformer": True, "models.sweep_seeds": [0, 1]})
        sweep = [r for r in plan_runs(config) if r.sweep]
        assert len(sweep) == 2 * 3 * 2
        assert {r.kind for r in sweep} == {"grud", "transformer"}


class TestPipeline:
    """synth -> prepare -> train -> evaluate -> report."""

    def test_train_outputs(self, trained):
        runs_dir = runs_dir_of(trained)
        index = json.loads((runs_dir / RUN_INDEX_FILE).read_text(encoding="utf-8"))
        assert [r["run_id"] for r in index] == ["grud-classification-s0", "grud-forecasting-s0"]
        for run in index:
            run_dir = runs_dir / run["run_id"]
            assert (run_dir / CHECKPOINT_FILE).exists()
            assert (run_dir / TRAIN_LOG_FILE).exists()
            manifest = json.loads((run_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
            assert manifest["splits_read"] == ["train", "val"]

    def test_evaluate_and_report(self, trained):
        runs_dir = runs_dir_of(trained)
        assert main(["evaluate", "--config", str(trained), "-q"]) == 0

        report = pd.read_csv(runs_dir / "report.csv")
        assert list(report.columns) == ["task", "model", "seed", "metric", "point", "ci_low", "ci_high",
                                        "n_valid_draws"]
        assert set(report["model"]) == {"grud", "always_negative", "persistence"}
        classification = set(report[(report["model"] == "grud") & (report["task"] == "classification")]["metric"])
        assert {"auroc", "auprc", "brier", "ece", "f1_at_thr", "brier_uncal", "ece_uncal"} <= classification
        forecasting = set(report[(report["model"] == "grud") & (report["task"] == "forecasting")]["metric"])
        assert {"mae", "rmse", "crps", "coverage90", "mean_sigma", "val_nll"} <= forecasting

        baseline = report[report["model"] == "always_negative"].set_index("metric")
        assert baseline.loc["auroc", "point"] == pytest.approx(0.5)
        assert pd.isna(baseline.loc["ece", "point"])
        assert pd.isna(baseline.loc["auroc", "seed"])

        calibration = CalibrationResult.model_validate_json(
            (runs_dir / "grud-classification-s0" / CALIBRATION_FILE).read_text(encoding="utf-8"))
        assert calibration.temperature > 0
        assert set(calibration.thresholds_by_beta) == {"1", "2"}

        assert main(["report", "--runs", str(runs_dir), "-q"]) == 0
        summary = read_summary(runs_dir / "summary.csv")
        assert list(summary.columns) == ["task", "model", "metric", "mean", "std", "n_seeds"]
        assert (summary["std"].fillna(0.0) == 0.0).all()

    def test_evaluate_is_deterministic(self, trained):
        runs_dir = runs_dir_of(trained)
        assert main(["evaluate", "--config", str(trained), "-q"]) == 0
        first = (runs_dir / "report.csv").read_bytes()
        assert main(["evaluate", "--config", str(trained), "-q"]) == 0
        assert (runs_dir / "report.csv").read_bytes() == first

    def test_training_is_deterministic(self, trained, tmp_path):
        runs_dir = runs_dir_of(trained)
        again = tmp_path / "again"
        assert main(["train", "--config", str(trained), "--output-dir", str(again), "--workers", "2", "-q"]) == 0
        for run_id in ("grud-classification-s0", "grud-forecasting-s0"):
            assert (again / run_id / CHECKPOINT_FILE).read_bytes() == (runs_dir / run_id / CHECKPOINT_FILE).read_bytes()

    def test_run_command(self, synthetic_config_file):
        argv = ["run", "--config", str(synthetic_config_file), "-q",
                "--steps", "synth", "prepare", "train", "evaluate", "report"]
        assert main(argv) == 0
        assert (runs_dir_of(synthetic_config_file) / "summary.csv").exists()


class TestExitCodes:
    """Failures map to documented exit codes."""

    def test_empty_manifest(self, synthetic_config_file, tmp_path):
        manifest = tmp_path / "empty.csv"
        manifest.write_text("record_id,path\n", encoding="utf-8")
        edit_config(synthetic_config_file, data={"peaks_path": str(manifest)})
        assert main(["prepare", "--config", str(synthetic_config_file), "-q"]) == 2

    def test_zero_byte_manifest(self, synthetic_config_file, tmp_path):
        manifest = tmp_path / "zero.csv"
        manifest.write_bytes(b"")
        edit_config(synthetic_config_file, data={"peaks_path": str(manifest)})
        assert main(["prepare", "--config", str(synthetic_config_file), "-q"]) == 2

    def test_guard_unsatisfied(self, synthetic_config_file):
        edit_config(synthetic_config_file, windows={"min_positive_windows": 100000})
        config = str(synthetic_config_file)
        assert main(["synth", "--config", config, "-q"]) == 0
        assert main(["prepare", "--config", config, "-q"]) == 2

    def test_evaluate_without_runs(self, synthetic_config_file, tmp_path):
        empty = tmp_path / "no-runs"
        empty.mkdir()
        assert main(["evaluate", "--config", str(synthetic_config_file), "--runs", str(empty), "-q"]) == 2

    def test_report_without_reports(self, tmp_path):
        assert main(["report", "--runs", str(tmp_path / "missing"), "-q"]) == 2

    def test_missing_config(self, tmp_path):
        assert main(["prepare", "--config", str(tmp_path / "absent.json"), "-q"]) == 2


@pytest.mark.slow
class TestDeskScale:
    """Behavior on the default 20-record synthetic corpus (slow)."""

    @pytest.fixture(scope="class")
    def desk(self, tmp_path_factory):
        root = tmp_path_factory.mktemp("desk")
        raw = {
            "data": {"peaks_path": str(root / "synthetic" / "manifest.csv"), "prepared_dir": str(root / "prepared")},
            "models": {"run_capacity_sweep": False},
            "evaluation": {"n_bootstrap": 200},
            "synthetic": {"out_dir": str(root / "synthetic")},
            "output": {"runs_dir": str(root / "runs"), "workers": 4},
        }
        config = root / "desk.json"
        config.write_text(json.dumps(raw), encoding="utf-8")
        assert main(["run", "--config", str(config), "-q",
                     "--steps", "synth", "prepare", "train", "evaluate"]) == 0
        assert main(["train", "--config", str(config), "--target-mode", "absolute",
                     "--output-dir", str(root / "absolute"), "-q"]) == 0
        assert main(["evaluate", "--config", str(config), "--runs", str(root / "absolute"), "-q"]) == 0
        residual = pd.read_csv(root / "runs" / "report.csv")
        absolute = pd.read_csv(root / "absolute" / "report.csv")
        return residual, absolute

    @staticmethod
    def _point(frame, task, model, metric, seed=None):
        rows = frame[(frame["task"] == task) & (frame["model"] == model) & (frame["metric"] == metric)]
        if seed is not None:
            rows = rows[rows["seed"] == seed]
        return float(rows["point"].iloc[0])

    @pytest.mark.parametrize("kind", ["grud", "transformer"])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_classifiers_beat_always_negative(self, desk, kind, seed):
        report, _ = desk
        prevalence = self._point(report, "classification", "always_negative", "auprc")
        assert self._point(report, "classification", kind, "auroc", seed) > 0.80
        assert self._point(report, "classification", kind, "auprc", seed) > 2.0 * prevalence

    @pytest.mark.parametrize("kind", ["grud", "transformer"])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    @pytest.mark.parametrize("metric", ["mae", "rmse", "crps"])
    def test_forecasters_beat_persistence(self, desk, kind, seed, metric):
        report, _ = desk
        assert self._point(report, "forecasting", kind, metric, seed) < \
            self._point(report, "forecasting", "persistence", metric)

    @pytest.mark.parametrize("kind", ["grud", "transformer"])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_calibration_does_not_hurt_ece(self, desk, kind, seed):
        report, _ = desk
        assert self._point(report, "classification", kind, "ece", seed) <= \
            self._point(report, "classification", kind, "ece_uncal", seed)

    @pytest.mark.parametrize("kind", ["grud", "transformer"])
    def test_residual_target_fits_better(self, desk, kind):
        residual, absolute = desk

        def mean_nll(frame):
            return frame[(frame["model"] == kind) & (frame["metric"] == "val_nll")]["point"].mean()

        assert mean_nll(residual) <= mean_nll(absolute)


class TestPrepareShortRecords:
    """Records too short for a single window stay out of the split."""

    @pytest.fixture
    def corpus_config(self, tmp_path, monkeypatch):
        monkeypatch.delenv("HRBENCH_OUTPUT_DIR", raising=False)
        t = np.arange(200.0)
        peaks = {f"long{k}": hr_to_peaks(70.0 + k + 5.0 * np.sin(t / 7.0)) for k in range(7)}
        peaks.update({f"short{k}": hr_to_peaks(np.full(30, 72.0)) for k in range(4)})
        manifest = write_peak_files(peaks, tmp_path / "peaks")
        return ConfigLoader(str(tmp_path)).load(overrides={
            "data.peaks_path": str(manifest),
            "data.prepared_dir": str(tmp_path / "prepared"),
            "windows.min_positive_records": 0,
            "windows.min_positive_windows": 0,
            "split.seed": 3,
        })

    def test_short_records_are_not_split(self, corpus_config):
        result = prepare_dataset(corpus_config)
        assert set(result.split.assignment) == {f"long{k}" for k in range(7)}
        assert result.n_windows == 7 * 3

    def test_every_split_has_windows(self, corpus_config):
        prepare_dataset(corpus_config)
        dataset = read_prepared(corpus_config.prepared_dir)
        for name in ("train", "val", "test"):
            assert dataset.has_split(name)
            assert len(dataset.split(name)) > 0

    def test_record_summary_labels_short_records(self, corpus_config):
        prepare_dataset(corpus_config)
        records = pd.read_csv(corpus_config.prepared_dir / RECORDS_FILE, dtype={"split": str},
                              keep_default_na=False).set_index("record_id")
        short = records.loc[[f"short{k}" for k in range(4)]]
        assert (short["split"] == UNSPLIT).all()
        assert (short["n_windows"] == 0).all()
        assert set(records.loc[[f"long{k}" for k in range(7)], "split"]) == {"train", "val", "test"}
