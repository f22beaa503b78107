"""
Report files: per-seed metric tables, reliability data and the seed summary.
"""

import json
import logging
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np
import pandas as pd

from src.evaluation.schemas import REPORT_COLUMNS, SUMMARY_COLUMNS, MetricReport
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

REPORT_CSV = "report.csv"
REPORT_JSON = "report.json"
RELIABILITY_CSV = "reliability.csv"
SUMMARY_CSV = "summary.csv"
FLOAT_FORMAT = "%.10g"
SUMMARY_HEADER = "# std: sample standard deviation (n-1) of per-seed point estimates; 0 when n_seeds = 1\n"


def reports_frame(reports: Iterable[MetricReport]) -> pd.DataFrame:
    rows = [row for report in reports for row in report.rows()]
    frame = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    frame["seed"] = frame["seed"].astype("Int64")
    frame["n_valid_draws"] = frame["n_valid_draws"].astype("Int64")
    return frame


def write_report(out_dir: Path, reports: Sequence[MetricReport]) -> Path:
    """
    Write ``report.csv`` and its JSON mirror; undefined values become empty cells / null.

    Returns:
        Path of the CSV file
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / REPORT_CSV
    reports_frame(reports).to_csv(csv_path, index=False, float_format=FLOAT_FORMAT)
    with open(out_dir / REPORT_JSON, "w", encoding="utf-8") as f:
        json.dump([r.model_dump() for r in reports], f, indent=2)
    logger.info(f"Wrote {sum(len(r.metrics) for r in reports)} metric rows to {csv_path}")
    return csv_path


def write_reliability(path: Path, rows: List[dict]) -> Path:
    """Reliability-diagram data; one row per (model, seed, stage, bin)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = ["model", "seed", "stage", "bin_low", "bin_high", "count", "mean_conf", "accuracy"]
    pd.DataFrame(rows, columns=columns).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_reports(run_dirs: Sequence[Path]) -> pd.DataFrame:
    """Concatenate the ``report.csv`` of every run directory."""
    frames = []
    for run_dir in run_dirs:
        path = Path(run_dir) / REPORT_CSV
        if not path.exists():
            raise ConfigError(f"no {REPORT_CSV} in {run_dir}; run evaluate first")
        frames.append(pd.read_csv(path))
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=REPORT_COLUMNS)


def _sample_std(values: pd.Series) -> float:
    values = values.dropna()
    return float(values.std(ddof=1)) if len(values) > 1 else 0.0


def aggregate_reports(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Mean and sample std of point estimates across seeds per (task, model, metric).

    Seeds with a missing point are left out; ``n_seeds`` counts the seeds
    that contributed.
    """
    if frame.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    grouped = frame.groupby(["task", "model", "metric"], sort=True)["point"]
    summary = grouped.agg(mean="mean", std=_sample_std, n_seeds="count").reset_index()
    summary["mean"] = summary["mean"].where(summary["n_seeds"] > 0, np.nan)
    return summary[SUMMARY_COLUMNS]


def write_summary(path: Path, summary: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(SUMMARY_HEADER)
        summary.to_csv(f, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote seed summary ({len(summary)} rows) to {path}")
    return path


def read_summary(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")
