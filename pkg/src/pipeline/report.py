"""
Report step: aggregate per-seed reports into mean and std across seeds.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

from src.evaluation.reports import SUMMARY_CSV, aggregate_reports, read_reports, write_summary

logger = logging.getLogger(__name__)


def report_runs(run_dirs: Sequence[Path], out_path: Optional[Path] = None) -> pd.DataFrame:
    """
    Aggregate the ``report.csv`` of each run directory and write ``summary.csv``
    (next to the first run directory's report unless ``out_path`` is given).
    """
    run_dirs = [Path(d) for d in run_dirs]
    frame = read_reports(run_dirs)
    summary = aggregate_reports(frame)
    out_path = Path(out_path) if out_path else run_dirs[0] / SUMMARY_CSV
    write_summary(out_path, summary)
    incomplete = summary[summary["n_seeds"] < summary["n_seeds"].max()] if not summary.empty else summary
    for row in incomplete.itertuples(index=False):
        logger.warning(f"{row.task}/{row.model}/{row.metric}: aggregated over {row.n_seeds} seed(s)")
    return summary
