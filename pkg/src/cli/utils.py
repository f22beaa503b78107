"""
Console helpers for the benchmark commands.
"""

import logging
import sys
import time
from typing import Mapping, Optional, Sequence

logger = logging.getLogger(__name__)


def setup_logging(level: str = 'INFO'):
    """
    Configure the root logger.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR)
    """
    logging.basicConfig(
        level=getattr(logging, level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )


def print_banner():
    banner = """
╔══════════════════════════════════════════════════════════╗
║        HR Stream Bench                                   ║
║        Tachycardia detection and next-second HR          ║
╚══════════════════════════════════════════════════════════╝
"""
    print(banner)


def print_step_header(step_name: str):
    print(f"\n{'='*60}")
    print(f"  {step_name.upper()}")
    print(f"{'='*60}\n")


def print_step_complete(step_name: str, duration: Optional[float] = None):
    if duration:
        print(f"\n✓ {step_name} completed in {duration:.2f} seconds")
    else:
        print(f"\n✓ {step_name} completed")


def print_error(message: str):
    print(f"ERROR: {message}", file=sys.stderr)


def print_info(message: str):
    print(f"INFO: {message}")


class ProgressTracker:
    """Counts finished pipeline steps and reports elapsed wall time."""

    def __init__(self, total_steps: int):
        self.total_steps = total_steps
        self.done = []
        self.start_time = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start_time

    def update(self, step_name: str):
        self.done.append(step_name)
        print(f"\n[{len(self.done)}/{self.total_steps}] {step_name} done, {self.elapsed:.1f}s elapsed")
        logger.debug(f"Pipeline progress: {', '.join(self.done)}")

    def complete(self):
        print(f"\n✓ Pipeline ({' -> '.join(self.done)}) completed in {self.elapsed:.1f} seconds")


def format_table(rows: Sequence[Mapping], columns: Sequence[str]) -> str:
    """
    Fixed-width text table for console summaries; missing values print as a dash.

    Args:
        rows: Sequence of dicts
        columns: Column names in display order

    Returns:
        Table as a single string
    """
    def cell(value):
        if value is None or (isinstance(value, float) and value != value):
            return "—"
        return f"{value:.4f}" if isinstance(value, float) else str(value)

    body = [[cell(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(line[i]) for line in body]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.ljust(w) for v, w in zip(line, widths)) for line in body)
    return "\n".join(lines)
