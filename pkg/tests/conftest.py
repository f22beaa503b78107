"""
Shared fixtures: small hand-built corpora, tiny model configs and a
synthetic benchmark configuration rooted in a temporary directory.
"""

import json

import numpy as np
import pytest

from src.ingest.dataset import standardize
from src.ingest.schemas import HrSeries, LabeledWindow, SplitAssignment
from src.models.schemas import GrudConfig, TransformerConfig


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def make_window(record_id, context, cls_label=0, fc_target=None, start_index=0):
    context = np.asarray(context, dtype=np.float64)
    return LabeledWindow(
        record_id=record_id,
        context=context,
        cls_label=int(cls_label),
        fc_target=float(context[-1] if fc_target is None else fc_target),
        start_index=start_index,
    )


@pytest.fixture
def window_factory():
    return make_window


@pytest.fixture
def tiny_dataset():
    """
    Nine records of 8-step windows; positives end in a rising context so a
    small model can separate them. Three records per split, one positive each.
    """
    gen = np.random.default_rng(7)
    windows = []
    assignment = {}
    splits = ["train", "train", "train", "val", "val", "val", "test", "test", "test"]
    for k, split in enumerate(splits):
        record_id = f"r{k}"
        assignment[record_id] = split
        for w in range(12):
            positive = k % 3 == 0 and w % 2 == 0
            base = 75.0 + gen.normal(0.0, 3.0, size=8)
            if positive:
                base = base + np.linspace(0.0, 30.0, 8)
            target = base[-1] + gen.normal(0.0, 1.0)
            windows.append(make_window(record_id, base, positive, target, start_index=8 * w))
    dataset, _ = standardize(windows, SplitAssignment(assignment=assignment))
    return dataset


@pytest.fixture
def tiny_grud_config():
    return GrudConfig(hidden_dim=4)


@pytest.fixture
def tiny_transformer_config():
    return TransformerConfig(d_model=8, layers=2, heads=2, ffn_dim=16)


@pytest.fixture
def constant_series():
    def build(value, length, record_id="r"):
        return HrSeries(record_id=record_id, hr=np.full(length, float(value)))
    return build


@pytest.fixture
def synthetic_config_file(tmp_path, monkeypatch):
    """
    Config JSON for a reduced synthetic corpus, tiny models and a short
    bootstrap; every path lives under ``tmp_path``.
    """
    monkeypatch.delenv("HRBENCH_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("HRBENCH_WORKERS", raising=False)
    raw = {
        "data": {
            "peaks_path": str(tmp_path / "synthetic" / "manifest.csv"),
            "prepared_dir": str(tmp_path / "prepared"),
        },
        "windows": {"min_positive_windows": 10},
        "models": {
            "kinds": ["grud"],
            "grud": {"hidden_dim": 4},
            "hidden_sweep": [2, 4],
            "run_capacity_sweep": False,
        },
        "training": {"epochs": 1, "seeds": [0], "batch_size": 64},
        "evaluation": {"n_bootstrap": 20},
        "synthetic": {
            "n_records": 12,
            "record_seconds": 1200,
            "episode_rate": 8.0,
            "seed": 3,
            "out_dir": str(tmp_path / "synthetic"),
        },
        "output": {"runs_dir": str(tmp_path / "runs"), "workers": 1},
    }
    path = tmp_path / "bench.json"
    path.write_text(json.dumps(raw, indent=2), encoding="utf-8")
    return path
