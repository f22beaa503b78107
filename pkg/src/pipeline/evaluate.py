"""
Evaluate step: calibration on validation, test metrics with grouped bootstrap
intervals, baselines alongside.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.calibration.schemas import CalibrationResult
from src.calibration.temperature import apply_temperature, fit_temperature
from src.calibration.threshold import select_threshold_fbeta
from src.config.config_loader import BenchConfig
from src.evaluation import metrics
from src.evaluation.bootstrap import estimate
from src.evaluation.reports import RELIABILITY_CSV, write_reliability, write_report
from src.evaluation.schemas import MetricEstimate, MetricReport, PredictionSet
from src.ingest.dataset import WindowedDataset
from src.ingest.peak_loader import read_prepared, read_sidecar
from src.models.baselines import baseline_always_negative, baseline_persistence
from src.models.model import SequenceModel
from src.pipeline.train import CHECKPOINT_FILE, RunSpec, read_run_index
from src.training.trainer import evaluate_loss
from src.utils.errors import CalibrationSkipped, ConfigError, ThresholdUndefined

logger = logging.getLogger(__name__)

CALIBRATION_FILE = "calibration.json"
ALWAYS_NEGATIVE = "always_negative"
PERSISTENCE = "persistence"


@dataclass
class EvaluationResult:
    reports: List[MetricReport] = field(default_factory=list)
    calibrations: Dict[str, CalibrationResult] = field(default_factory=dict)
    report_path: Optional[Path] = None


class Evaluator:
    """
    Scores trained runs on the test split.

    Validation data is used only to fit the temperature and pick the
    operating point; test data only for the reported metrics.
    """

    def __init__(self, config: BenchConfig, dataset: WindowedDataset, fc_diff_std: float):
        self.config = config
        self.dataset = dataset
        self.fc_diff_std = fc_diff_std
        self.val = dataset.split("val")
        self.test = dataset.split("test")
        self.reliability_rows: List[dict] = []

    def _estimate(self, predictions: PredictionSet, name: str, fn) -> MetricEstimate:
        ev = self.config.evaluation
        return estimate(predictions, fn, name, ev.n_bootstrap, ev.bootstrap_seed, ev.workers)

    # --- classification ---

    def calibrate(self, model: SequenceModel) -> Tuple[CalibrationResult, np.ndarray]:
        """Fit T* and the F-beta thresholds on validation; returns them and the test logits."""
        cal_cfg = self.config.calibration
        val_logits = model.predict(self.val.x_tilde)["logit"]

        temperature, calibrated = 1.0, False
        if cal_cfg.enabled:
            try:
                temperature, calibrated = fit_temperature(val_logits, self.val.cls_label), True
            except CalibrationSkipped as e:
                logger.warning(str(e))
                temperature = e.temperature

        val_probs = apply_temperature(val_logits, temperature)
        thresholds: Dict[str, Optional[float]] = {}
        for beta in sorted(set(cal_cfg.report_betas) | {cal_cfg.beta}):
            try:
                thresholds[f"{beta:g}"] = select_threshold_fbeta(val_probs, self.val.cls_label, beta)
            except ThresholdUndefined as e:
                logger.warning(str(e))
                thresholds[f"{beta:g}"] = None

        result = CalibrationResult(
            temperature=temperature,
            threshold=thresholds[f"{cal_cfg.beta:g}"],
            beta=cal_cfg.beta,
            calibrated=calibrated,
            thresholds_by_beta=thresholds,
        )
        return result, model.predict(self.test.x_tilde)["logit"]

    def classification_metrics(self, probs: np.ndarray, threshold: Optional[float],
                               uncalibrated: Optional[np.ndarray] = None) -> List[MetricEstimate]:
        test = self.test
        bins = self.config.evaluation.ece_bins
        preds = PredictionSet(test.record_id, probs=probs, labels=test.cls_label)
        rows = [
            self._estimate(preds, "auroc", lambda p: metrics.auroc(p.probs, p.labels)),
            self._estimate(preds, "auprc", lambda p: metrics.auprc(p.probs, p.labels)),
            self._estimate(preds, "brier", lambda p: metrics.brier(p.probs, p.labels)),
            self._estimate(preds, "ece", lambda p: metrics.ece(p.probs, p.labels, bins)),
        ]
        if threshold is None:
            rows.append(MetricEstimate(metric="f1_at_thr"))
        else:
            rows.append(self._estimate(preds, "f1_at_thr",
                                       lambda p: metrics.f1_at_threshold(p.probs, p.labels, threshold)))
        if uncalibrated is not None:
            raw = PredictionSet(test.record_id, probs=uncalibrated, labels=test.cls_label)
            rows.append(self._estimate(raw, "brier_uncal", lambda p: metrics.brier(p.probs, p.labels)))
            rows.append(self._estimate(raw, "ece_uncal", lambda p: metrics.ece(p.probs, p.labels, bins)))
        return rows

    def evaluate_classifier(self, run: RunSpec, model: SequenceModel, model_name: str,
                            run_dir: Path) -> Tuple[MetricReport, CalibrationResult]:
        calibration, test_logits = self.calibrate(model)
        with open(run_dir / CALIBRATION_FILE, "w", encoding="utf-8") as f:
            f.write(calibration.model_dump_json(indent=2))

        probs = apply_temperature(test_logits, calibration.temperature)
        uncalibrated = apply_temperature(test_logits, 1.0)
        bins = self.config.evaluation.ece_bins
        for stage, p in (("uncalibrated", uncalibrated), ("calibrated", probs)):
            for row in metrics.reliability_bins(p, self.test.cls_label, bins):
                self.reliability_rows.append({"model": model_name, "seed": run.seed, "stage": stage, **row})

        report = MetricReport(task="classification", model=model_name, seed=run.seed,
                              metrics=self.classification_metrics(probs, calibration.threshold, uncalibrated))
        return report, calibration

    # --- forecasting ---

    def forecast_metrics(self, mu_bpm: np.ndarray, sigma_bpm: np.ndarray) -> List[MetricEstimate]:
        test = self.test
        level = self.config.evaluation.coverage_level
        preds = PredictionSet(test.record_id, mu=mu_bpm, sigma=sigma_bpm, target=test.fc_target)
        return [
            self._estimate(preds, "mae", lambda p: metrics.mae_rmse(p.mu, p.target)[0]),
            self._estimate(preds, "rmse", lambda p: metrics.mae_rmse(p.mu, p.target)[1]),
            self._estimate(preds, "crps", lambda p: metrics.mean_crps(p.mu, p.sigma, p.target)),
            self._estimate(preds, "coverage90",
                           lambda p: metrics.interval_coverage(p.mu, p.sigma, p.target, level)),
            self._estimate(preds, "mean_sigma", lambda p: float(np.mean(p.sigma))),
        ]

    def evaluate_forecaster(self, run: RunSpec, model: SequenceModel, model_name: str) -> MetricReport:
        out = model.predict(self.test.x_tilde)
        stats = self.dataset.stats
        rows = self.forecast_metrics(stats.inverse(out["mu_tilde"]), stats.inverse_scale(out["sigma_n"]))
        rows.append(MetricEstimate(metric="val_nll", point=evaluate_loss(model, self.val, None)))
        return MetricReport(task="forecasting", model=model_name, seed=run.seed, metrics=rows)

    # --- baselines ---

    def baseline_reports(self, tasks: List[str]) -> List[MetricReport]:
        reports = []
        if "classification" in tasks:
            preds = PredictionSet(self.test.record_id, probs=baseline_always_negative(len(self.test)),
                                  labels=self.test.cls_label)
            rows = [
                self._estimate(preds, "auroc", lambda p: metrics.auroc(p.probs, p.labels)),
                self._estimate(preds, "auprc", lambda p: metrics.auprc(p.probs, p.labels)),
                self._estimate(preds, "brier", lambda p: metrics.brier(p.probs, p.labels)),
                # not reported for the constant predictor
                MetricEstimate(metric="ece"),
                MetricEstimate(metric="f1_at_thr"),
            ]
            reports.append(MetricReport(task="classification", model=ALWAYS_NEGATIVE, metrics=rows))
        if "forecasting" in tasks:
            mu, sigma = baseline_persistence(self.test.context, self.fc_diff_std)
            reports.append(MetricReport(task="forecasting", model=PERSISTENCE,
                                        metrics=self.forecast_metrics(mu, sigma)))
        return reports


def model_name(run: RunSpec) -> str:
    return f"{run.kind}-h{run.capacity}" if run.sweep else run.kind


def discover_runs(runs_dir: Path) -> List[RunSpec]:
    runs = read_run_index(runs_dir)
    if not runs:
        raise ConfigError(f"no training runs recorded in {runs_dir}; run `train` first")
    missing = [r.run_id for r in runs if not (Path(runs_dir) / r.run_id / CHECKPOINT_FILE).exists()]
    if missing:
        raise ConfigError(f"missing checkpoints for runs: {', '.join(missing)}")
    return runs


def evaluate_runs(config: BenchConfig, runs_dir: Optional[Path] = None) -> EvaluationResult:
    """
    Evaluate every run in ``runs_dir`` plus the baselines and write
    ``report.csv``/``report.json``, ``reliability.csv`` and one
    ``calibration.json`` per classification run.

    Raises:
        MissingSplit: validation or test split is empty
        ConfigError: no runs or missing checkpoints
    """
    runs_dir = Path(runs_dir or config.runs_dir)
    runs = discover_runs(runs_dir)
    dataset = read_prepared(config.prepared_dir)
    sidecar = read_sidecar(config.prepared_dir)
    evaluator = Evaluator(config, dataset, sidecar.fc_diff_std)
    logger.info(f"Evaluating {len(runs)} runs on {len(evaluator.test)} test windows "
                f"(prevalence {evaluator.test.prevalence:.4f})")

    result = EvaluationResult()
    for run in runs:
        run_dir = runs_dir / run.run_id
        model = SequenceModel.load(run_dir / CHECKPOINT_FILE)
        name = model_name(run)
        if run.task == "classification":
            report, calibration = evaluator.evaluate_classifier(run, model, name, run_dir)
            result.calibrations[run.run_id] = calibration
        else:
            report = evaluator.evaluate_forecaster(run, model, name)
        result.reports.append(report)
        logger.info(f"Evaluated {run.run_id}: " + ", ".join(
            f"{m.metric}={m.point:.4f}" for m in report.metrics if m.point is not None))

    result.reports.extend(evaluator.baseline_reports(sorted({r.task for r in runs})))
    result.report_path = write_report(runs_dir, result.reports)
    if evaluator.reliability_rows:
        write_reliability(runs_dir / RELIABILITY_CSV, evaluator.reliability_rows)
    return result
