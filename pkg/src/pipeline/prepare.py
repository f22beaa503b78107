"""
Prepare step: R-peaks to a standardized, split window dataset on disk.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List

import numpy as np

from src.config.config_loader import BenchConfig
from src.ingest.dataset import standardize
from src.ingest.heart_rate import derive_hr
from src.ingest.peak_loader import PeakLoader, write_prepared, write_record_summary
from src.ingest.schemas import (
    LabeledWindow,
    PreparedSidecar,
    RecordSummary,
    RPeakRecord,
    SplitAssignment,
    StandardizationStats,
    ThresholdGuardResult,
)
from src.ingest.splits import split_records
from src.ingest.windows import build_windows, select_threshold
from src.utils.errors import DataError

logger = logging.getLogger(__name__)

# records.csv split label of records that give no windows
UNSPLIT = "none"


@dataclass
class PrepareResult:
    """What prepare selected and wrote."""
    guard: ThresholdGuardResult
    split: SplitAssignment
    stats: StandardizationStats
    dataset_path: Path
    n_windows: int
    records: List[RecordSummary] = field(default_factory=list)


def load_records(config: BenchConfig) -> List[RPeakRecord]:
    peaks = PeakLoader(config.peaks_path, config.data.exclude_records).load()
    records = []
    for record_id, times in peaks.items():
        try:
            records.append(RPeakRecord(record_id=record_id, peak_times=times))
        except ValueError as e:
            raise DataError(str(e)) from e
    return records


def prepare_dataset(config: BenchConfig) -> PrepareResult:
    """
    derive_hr, select_threshold, build_windows, split_records and standardize
    in order, then write ``dataset.csv``, ``dataset.json`` and ``records.csv``
    to the prepared directory.

    Raises:
        EmptySignal, GuardUnsatisfied, SplitInfeasible, DegenerateScale, NoRecords
    """
    windows_cfg = config.windows
    candidates = tuple(windows_cfg.theta_candidates)
    series = [derive_hr(record) for record in load_records(config)]

    guard = select_threshold(
        series, candidates, windows_cfg.T, windows_cfg.H,
        windows_cfg.min_positive_records, windows_cfg.min_positive_windows,
    )
    logger.info(f"Selected theta={guard.theta:g}: {guard.n_windows} windows, "
                f"{guard.n_positive_windows} positives ({guard.n_positive_records} positive records)")

    per_record: Dict[str, List[LabeledWindow]] = {
        s.record_id: build_windows(s, windows_cfg.T, windows_cfg.H, guard.theta, candidates) for s in series
    }
    windows = [w for record_windows in per_record.values() for w in record_windows]
    unwindowed = sorted(rid for rid, ws in per_record.items() if not ws)
    if unwindowed:
        logger.warning(f"{len(unwindowed)} record(s) shorter than T + H give no windows and are left out "
                       f"of the split: {', '.join(unwindowed)}")
    positive = {rid: any(w.cls_label for w in ws) for rid, ws in per_record.items() if ws}

    split = split_records(positive, tuple(config.split.ratios), config.split.seed)
    dataset, stats = standardize(windows, split)

    sidecar = PreparedSidecar(
        mu=stats.mu,
        sigma=stats.sigma,
        theta=guard.theta,
        T=windows_cfg.T,
        H=windows_cfg.H,
        split=split.assignment,
        n_windows=len(windows),
        n_positive_windows=guard.n_positive_windows,
        n_positive_records=guard.n_positive_records,
        fc_diff_std=dataset.one_step_diff_std() or 1.0,
    )
    out_dir = config.prepared_dir
    dataset_path = write_prepared(out_dir, windows, sidecar)

    summaries = []
    for s in series:
        ws = per_record[s.record_id]
        summaries.append(RecordSummary(
            record_id=s.record_id,
            n_seconds=len(s),
            mean_hr=float(np.mean(s.hr)) if len(s) else float("nan"),
            max_hr=float(np.max(s.hr)) if len(s) else float("nan"),
            n_windows=len(ws),
            n_positive=sum(w.cls_label for w in ws),
            split=split.assignment.get(s.record_id, UNSPLIT),
        ))
    write_record_summary(out_dir, [vars(r) for r in summaries])

    return PrepareResult(
        guard=guard,
        split=split,
        stats=stats,
        dataset_path=dataset_path,
        n_windows=len(windows),
        records=summaries,
    )
