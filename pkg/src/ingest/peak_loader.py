"""
Readers and writers for R-peak inputs and the prepared window dataset.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.ingest.dataset import WindowedDataset
from src.ingest.schemas import LabeledWindow, PreparedSidecar, SplitAssignment, StandardizationStats
from src.utils.errors import ConfigError, NoRecords

logger = logging.getLogger(__name__)

DATASET_FILE = "dataset.csv"
SIDECAR_FILE = "dataset.json"
RECORDS_FILE = "records.csv"


class PeakLoader:
    """
    Loads R-peak times for every record.

    Two layouts are accepted: a manifest CSV ``record_id,path`` whose paths
    point to one-column text files of peak times, or a single CSV
    ``record_id,peak_time``.
    """

    def __init__(self, path: Path, exclude: Optional[Sequence[str]] = None):
        """
        Args:
            path: Manifest CSV or long-format peak table
            exclude: Record ids to drop
        """
        self.path = Path(path)
        self.exclude = set(exclude or [])
        if not self.path.exists():
            raise ConfigError(f"R-peak input not found: {self.path}")

    def load(self) -> Dict[str, np.ndarray]:
        """
        Returns:
            record_id -> strictly increasing peak times, in manifest order
        """
        try:
            table = pd.read_csv(self.path, dtype={"record_id": str})
        except pd.errors.EmptyDataError:
            raise NoRecords(f"no records in {self.path}") from None
        if "path" in table.columns:
            peaks = self._load_manifest(table)
        elif "peak_time" in table.columns:
            peaks = self._load_long_table(table)
        else:
            raise ConfigError(f"{self.path}: expected columns record_id,path or record_id,peak_time")

        for record_id in sorted(self.exclude & set(peaks)):
            logger.info(f"Excluding record {record_id}")
            del peaks[record_id]
        if not peaks:
            raise NoRecords(f"no records in {self.path}")
        logger.info(f"Loaded R-peaks for {len(peaks)} records from {self.path}")
        return peaks

    def _load_manifest(self, table: pd.DataFrame) -> Dict[str, np.ndarray]:
        peaks = {}
        for row in table.itertuples(index=False):
            peak_path = Path(row.path)
            if not peak_path.is_absolute():
                peak_path = self.path.parent / peak_path
            if not peak_path.exists():
                raise ConfigError(f"peak file for record {row.record_id} not found: {peak_path}")
            values = np.loadtxt(peak_path, dtype=np.float64, ndmin=1)
            peaks[str(row.record_id)] = values
        return peaks

    def _load_long_table(self, table: pd.DataFrame) -> Dict[str, np.ndarray]:
        peaks = {}
        for record_id, group in table.groupby("record_id", sort=False):
            peaks[str(record_id)] = group["peak_time"].to_numpy(dtype=np.float64)
        return peaks


def write_peak_files(peaks: Dict[str, np.ndarray], out_dir: Path) -> Path:
    """
    Write one peak file per record plus a manifest.

    Returns:
        Path of the manifest CSV
    """
    out_dir = Path(out_dir)
    peak_dir = out_dir / "peaks"
    peak_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for record_id, times in peaks.items():
        peak_path = peak_dir / f"{record_id}.txt"
        np.savetxt(peak_path, times, fmt="%.6f")
        rows.append({"record_id": record_id, "path": str(peak_path.relative_to(out_dir))})
    manifest = out_dir / "manifest.csv"
    pd.DataFrame(rows, columns=["record_id", "path"]).to_csv(manifest, index=False)
    return manifest


def write_prepared(out_dir: Path, windows: Sequence[LabeledWindow], sidecar: PreparedSidecar) -> Path:
    """Write the window CSV (raw bpm contexts) and its sidecar JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    T = sidecar.T
    rows = []
    for w in windows:
        row = {
            "record_id": w.record_id,
            "start_index": w.start_index,
            "cls_label": w.cls_label,
            "fc_target": w.fc_target,
        }
        row.update({f"ctx_{k}": float(v) for k, v in enumerate(w.context)})
        rows.append(row)
    columns = ["record_id", "start_index", "cls_label", "fc_target"] + [f"ctx_{k}" for k in range(T)]
    pd.DataFrame(rows, columns=columns).to_csv(out_dir / DATASET_FILE, index=False, float_format="%.17g")
    with open(out_dir / SIDECAR_FILE, "w", encoding="utf-8") as f:
        json.dump(sidecar.model_dump(), f, indent=2)
    logger.info(f"Wrote {len(rows)} windows to {out_dir / DATASET_FILE}")
    return out_dir / DATASET_FILE


def read_prepared(data_dir: Path) -> WindowedDataset:
    """Rebuild the standardized dataset from prepare's output."""
    data_dir = Path(data_dir)
    csv_path = data_dir / DATASET_FILE
    json_path = data_dir / SIDECAR_FILE
    if not csv_path.exists() or not json_path.exists():
        raise ConfigError(f"prepared dataset not found in {data_dir}; run `prepare` first")

    with open(json_path, "r", encoding="utf-8") as f:
        sidecar = PreparedSidecar(**json.load(f))
    table = pd.read_csv(csv_path, dtype={"record_id": str})
    ctx_cols = [f"ctx_{k}" for k in range(sidecar.T)]
    split = SplitAssignment(assignment=sidecar.split)
    record_id = table["record_id"].to_numpy(dtype=object)
    return WindowedDataset(
        record_id=record_id,
        start_index=table["start_index"].to_numpy(dtype=np.int64),
        cls_label=table["cls_label"].to_numpy(dtype=np.int64),
        fc_target=table["fc_target"].to_numpy(dtype=np.float64),
        context=table[ctx_cols].to_numpy(dtype=np.float64),
        split_name=np.array([split.split_of(r) for r in record_id], dtype=object),
        stats=StandardizationStats(mu=sidecar.mu, sigma=sidecar.sigma),
        T=sidecar.T,
    )


def read_sidecar(data_dir: Path) -> PreparedSidecar:
    with open(Path(data_dir) / SIDECAR_FILE, "r", encoding="utf-8") as f:
        return PreparedSidecar(**json.load(f))


def write_record_summary(out_dir: Path, summaries: List[dict]) -> Path:
    path = Path(out_dir) / RECORDS_FILE
    pd.DataFrame(summaries).to_csv(path, index=False)
    return path
