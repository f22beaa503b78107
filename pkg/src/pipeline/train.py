"""
Train step: the (model x task x seed) grid plus the capacity sweep.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional

from src.config.config_loader import BenchConfig
from src.ingest.peak_loader import read_prepared
from src.training.trainer import train_model
from src.utils.errors import ContractViolation
from src.utils.logging_utils import create_progress_bar

logger = logging.getLogger(__name__)

CHECKPOINT_FILE = "checkpoint.json"
MANIFEST_FILE = "manifest.json"
TRAIN_LOG_FILE = "train_log.csv"
RUN_INDEX_FILE = "runs.json"


@dataclass(frozen=True)
class RunSpec:
    """One training run of the grid."""
    run_id: str
    kind: str
    task: str
    seed: int
    capacity: Optional[int] = None
    sweep: bool = False


def plan_runs(config: BenchConfig) -> List[RunSpec]:
    """
    Main grid kinds x tasks x seeds, then the classification capacity sweep
    (GRU-D hidden sizes, and Transformer d_model when enabled) over
    ``sweep_seeds``.
    """
    models = config.models
    runs = [
        RunSpec(f"{kind}-{task}-s{seed}", kind, task, seed)
        for kind in models.kinds
        for task in models.tasks
        for seed in config.training.seeds
    ]
    if models.run_capacity_sweep:
        swept = ["grud"] + (["transformer"] if models.sweep_transformer else [])
        for kind in swept:
            for capacity in models.hidden_sweep:
                for seed in models.sweep_seeds:
                    runs.append(RunSpec(f"{kind}-classification-h{capacity}-s{seed}",
                                        kind, "classification", seed, capacity, sweep=True))
    return runs


def run_one(config: BenchConfig, spec: RunSpec, verbose: bool = False) -> Dict:
    """
    Train a single run on a private copy of the prepared dataset and write
    its checkpoint, manifest and training log.

    Returns:
        The run manifest
    """
    dataset = read_prepared(config.prepared_dir)
    run_dir = config.runs_dir / spec.run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    log_path = run_dir / TRAIN_LOG_FILE
    if log_path.exists():
        log_path.unlink()

    encoder_config = config.encoder_config(spec.kind, spec.capacity, dataset.T)
    result = train_model(
        spec.task, spec.kind, dataset, config.train_config(), spec.seed, encoder_config,
        run_id=spec.run_id, log_path=log_path, verbose=verbose,
    )
    if dataset.touched("test"):
        raise ContractViolation(f"run {spec.run_id} read the test split during training")

    result.model.save(run_dir / CHECKPOINT_FILE, extra={"run_id": spec.run_id, "seed": spec.seed})
    manifest = {
        **asdict(spec),
        "model": result.model.config_dict(),
        "n_parameters": result.model.n_parameters,
        "training": config.train_config().model_dump(),
        "prepared_dir": str(config.prepared_dir),
        "alpha": result.alpha,
        "steps": result.steps,
        "final_train_loss": result.train_losses[-1] if result.train_losses else None,
        "final_val_loss": result.val_losses[-1] if result.val_losses else None,
        "wall_time": round(result.wall_time, 3),
        "splits_read": sorted(set(dataset.split_access)),
    }
    with open(run_dir / MANIFEST_FILE, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
    return manifest


def train_grid(config: BenchConfig, runs: Optional[List[RunSpec]] = None,
               workers: Optional[int] = None, quiet: bool = False) -> List[Dict]:
    """
    Train every planned run, fanning out over ``workers`` threads.

    Runs share nothing but the read-only prepared files, so the grid gives the
    same checkpoints for any worker count.

    Raises:
        TrainingDiverged: first diverged run (its id is on the exception)
    """
    runs = runs if runs is not None else plan_runs(config)
    workers = workers or config.output.workers
    config.runs_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Training {len(runs)} runs with {workers} worker(s) into {config.runs_dir}")

    manifests: Dict[str, Dict] = {}
    pbar = create_progress_bar(len(runs), "Training runs", unit="run", disable=quiet)
    try:
        if workers <= 1:
            for spec in runs:
                manifests[spec.run_id] = run_one(config, spec, config.verbose)
                pbar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(run_one, config, spec, False): spec for spec in runs}
                for future in as_completed(futures):
                    manifests[futures[future].run_id] = future.result()
                    pbar.update(1)
    finally:
        pbar.close()

    ordered = [manifests[spec.run_id] for spec in runs]
    with open(config.runs_dir / RUN_INDEX_FILE, "w", encoding="utf-8") as f:
        json.dump([asdict(spec) for spec in runs], f, indent=2)
    return ordered


def read_run_index(runs_dir: Path) -> List[RunSpec]:
    """Runs recorded by the last ``train_grid`` in ``runs_dir``."""
    path = Path(runs_dir) / RUN_INDEX_FILE
    if not path.exists():
        return []
    with open(path, "r", encoding="utf-8") as f:
        return [RunSpec(**entry) for entry in json.load(f)]
