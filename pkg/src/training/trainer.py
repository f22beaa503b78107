"""
Seeded training loop for both tasks under the matched budget.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from src.autodiff.tensor import Tape
from src.ingest.dataset import SplitView, WindowedDataset
from src.models.model import EncoderConfig, SequenceModel
from src.training.losses import gaussian_nll, positive_class_weight, weighted_bce
from src.training.optimizer import adamw_step, init_adamw, zero_grads
from src.training.schemas import TrainConfig
from src.utils.errors import ContractViolation, TrainingDiverged
from src.utils.logging_utils import ConditionalLogger

logger = logging.getLogger(__name__)


@dataclass
class TrainResult:
    """Trained model plus the per-epoch loss history."""
    model: SequenceModel
    run_id: str
    seed: int
    train_losses: List[float] = field(default_factory=list)
    val_losses: List[float] = field(default_factory=list)
    alpha: Optional[float] = None
    steps: int = 0
    wall_time: float = 0.0


def task_loss(model: SequenceModel, view: SplitView, idx: np.ndarray, alpha: Optional[float]):
    """Loss of ``model`` on windows ``idx`` of a split (recorded if a tape is open)."""
    out = model.forward(view.x_tilde[idx])
    if model.task == "classification":
        return weighted_bce(out.cls_logit, view.cls_label[idx], alpha)
    return gaussian_nll(out.mu_tilde, out.sigma_n, view.y_tilde[idx])


def evaluate_loss(model: SequenceModel, view: SplitView, alpha: Optional[float], batch_size: int = 256) -> float:
    """Mean loss over a whole split, without recording."""
    total = 0.0
    for start in range(0, len(view), batch_size):
        idx = np.arange(start, min(start + batch_size, len(view)))
        total += task_loss(model, view, idx, alpha).item() * idx.size
    return total / len(view)


def train_model(task: str, model_kind: str, dataset: WindowedDataset, config: TrainConfig, seed: int,
                encoder_config: EncoderConfig, run_id: Optional[str] = None,
                log_path: Optional[Path] = None, verbose: bool = False) -> TrainResult:
    """
    Train one (task, model, seed) run.

    Initialization and per-epoch shuffling are both derived from ``seed``, so
    two calls with equal inputs return bit-identical parameters. Runs
    ``epochs * ceil(N / batch_size)`` AdamW steps and keeps the final-epoch
    weights.

    Args:
        task: "classification" or "forecasting"
        model_kind: "grud" or "transformer"
        dataset: Standardized windows; only train and val splits are read
        config: Optimizer budget and target mode
        seed: Run seed
        encoder_config: GrudConfig or TransformerConfig
        run_id: Identifier used in logs (default "<kind>-<task>-s<seed>")
        log_path: CSV ``run_id,epoch,split,loss`` appended after each epoch
        verbose: Per-epoch console messages

    Raises:
        TrainingDiverged: a training loss is not finite
    """
    run_id = run_id or f"{model_kind}-{task}-s{seed}"
    clog = ConditionalLogger(__name__, verbose)
    train = dataset.split("train")
    val = dataset.split("val") if dataset.has_split("val") else None
    if len(train) == 0:
        raise ContractViolation("training split is empty")

    alpha = None
    if task == "classification":
        alpha = positive_class_weight(train.prevalence, config.eps_prevalence)
        clog.info(f"[{run_id}] train prevalence {train.prevalence:.4f}, alpha {alpha:.4f}")

    model = SequenceModel.build(model_kind, task, encoder_config, seed, config.target_mode)
    state = init_adamw(model.params)
    shuffle_rng = np.random.default_rng([seed, 1])
    result = TrainResult(model=model, run_id=run_id, seed=seed, alpha=alpha)
    start_time = time.time()

    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(train))
        running = 0.0
        for start in range(0, len(order), config.batch_size):
            idx = order[start:start + config.batch_size]
            zero_grads(model.params)
            with Tape() as tape:
                loss = task_loss(model, train, idx, alpha)
            value = loss.item()
            if not math.isfinite(value):
                raise TrainingDiverged(f"run {run_id}: non-finite loss {value} at step {result.steps}",
                                       step=result.steps, run_id=run_id)
            tape.backward(loss)
            adamw_step(model.params, state, config)
            running += value * idx.size
            result.steps += 1

        result.train_losses.append(running / len(train))
        rows = [{"run_id": run_id, "epoch": epoch, "split": "train", "loss": result.train_losses[-1]}]
        if val is not None:
            result.val_losses.append(evaluate_loss(model, val, alpha))
            rows.append({"run_id": run_id, "epoch": epoch, "split": "val", "loss": result.val_losses[-1]})
        if log_path is not None:
            append_training_log(log_path, rows)
        clog.epoch(run_id, epoch, config.epochs, {r["split"]: r["loss"] for r in rows})

    result.wall_time = time.time() - start_time
    logger.info(f"Run {run_id} finished: {result.steps} steps in {result.wall_time:.1f}s, "
                f"final train loss {result.train_losses[-1]:.5f}")
    return result


def append_training_log(path: Path, rows: List[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows, columns=["run_id", "epoch", "split", "loss"]).to_csv(
        path, mode="a", header=not path.exists(), index=False, float_format="%.10g")
