"""
Verbosity-gated logging and progress bars for long-running steps.
"""

import logging
import sys
from typing import Mapping

from tqdm import tqdm


class ConditionalLogger:
    """
    Logger wrapper whose chatty messages only appear with ``--verbose``.

    Warnings always go through; per-epoch lines and other progress chatter
    are dropped unless verbose or forced.
    """

    def __init__(self, name: str, verbose: bool = False):
        self.logger = logging.getLogger(name)
        self.verbose = verbose

    def info(self, message: str, force: bool = False):
        if self.verbose or force:
            self.logger.info(message)

    def debug(self, message: str):
        if self.verbose:
            self.logger.debug(message)

    def warning(self, message: str):
        self.logger.warning(message)

    def epoch(self, run_id: str, epoch: int, epochs: int, losses: Mapping[str, float]):
        """
        One line per epoch, e.g. ``[grud-forecasting-s0] epoch 2/6: train 0.41230, val 0.43817``.

        Args:
            run_id: Run identifier
            epoch: 1-based epoch number
            epochs: Epoch budget
            losses: Split name to mean loss
        """
        parts = ", ".join(f"{split} {loss:.5f}" for split, loss in losses.items())
        self.info(f"[{run_id}] epoch {epoch}/{epochs}: {parts}")


def create_progress_bar(total: int, desc: str, unit: str = "it", leave: bool = True,
                        disable: bool = False) -> tqdm:
    """
    Standardized tqdm bar on stdout.

    Args:
        total: Number of items
        desc: Label shown left of the bar
        unit: Item unit (runs, draws, ...)
        leave: Keep the bar after completion
        disable: Suppress the bar entirely (quiet mode)
    """
    return tqdm(
        total=total,
        desc=desc,
        unit=unit,
        ncols=80,
        leave=leave,
        file=sys.stdout,
        disable=disable,
        bar_format='{desc}: {percentage:3.0f}%|{bar}| {n_fmt}/{total_fmt} {unit} [{elapsed}<{remaining}]'
    )
