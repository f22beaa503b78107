"""
CLI command implementations for the heart-rate benchmark.

Every command returns a process exit code: 0 on success, the ``exit_code`` of
a ``BenchError`` (2 data, 3 training, 4 evaluation, 1 contract) or 1 for an
unexpected failure.
"""

import logging
import time
import traceback
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from src.cli.utils import format_table, print_error, print_info, print_step_complete, print_step_header
from src.config.config_loader import BenchConfig
from src.pipeline.evaluate import evaluate_runs
from src.pipeline.prepare import prepare_dataset
from src.pipeline.report import report_runs
from src.pipeline.runner import PipelineRunner
from src.pipeline.train import plan_runs, train_grid
from src.synth.generator import generate_corpus, write_corpus
from src.utils.errors import BenchError, GuardUnsatisfied, TrainingDiverged

logger = logging.getLogger(__name__)


def _guarded(step: str, action: Callable[[], None], verbose: bool = False) -> int:
    print_step_header(step)
    start_time = time.time()
    try:
        action()
    except GuardUnsatisfied as e:
        print_error(str(e))
        return e.exit_code
    except TrainingDiverged as e:
        print_error(f"training diverged in run {e.run_id} at step {e.step}: {e}")
        return e.exit_code
    except BenchError as e:
        print_error(str(e))
        return e.exit_code
    except Exception as e:
        print_error(f"{step} failed: {e}")
        if verbose:
            traceback.print_exc()
        return 1
    print_step_complete(step, time.time() - start_time)
    return 0


def cmd_synth(config: BenchConfig) -> int:
    """Generate the synthetic R-peak corpus described by the ``synthetic`` section."""
    def action():
        corpus = generate_corpus(config.synthetic.spec())
        manifest = write_corpus(corpus, Path(config.synthetic.out_dir))
        print_info(f"Wrote {len(corpus.record_ids)} records with {len(corpus.episodes)} "
                   f"tachycardia episodes; manifest: {manifest}")
    return _guarded("synth", action, config.verbose)


def cmd_prepare(config: BenchConfig) -> int:
    """Derive HR, pick theta, window, split and standardize; prints theta and counts."""
    def action():
        result = prepare_dataset(config)
        guard = result.guard
        print_info(f"theta = {guard.theta:g} bpm")
        print_info(f"{result.n_windows} windows with {guard.n_positive_windows} positives "
                   f"({guard.n_positive_records} positive records)")
        for split in ("train", "val", "test"):
            print_info(f"{split}: {len(result.split.records(split))} records")
        print_info(f"Prepared dataset: {result.dataset_path}")
    return _guarded("prepare", action, config.verbose)


def cmd_train(config: BenchConfig, quiet: bool = False) -> int:
    """Train the run grid and write checkpoints, manifests and logs."""
    def action():
        runs = plan_runs(config)
        print_info(f"{len(runs)} runs: {', '.join(r.run_id for r in runs)}")
        manifests = train_grid(config, runs, quiet=quiet)
        rows = [{"run": m["run_id"], "params": m["n_parameters"], "train_loss": m["final_train_loss"],
                 "val_loss": m["final_val_loss"], "seconds": m["wall_time"]} for m in manifests]
        print(format_table(rows, ["run", "params", "train_loss", "val_loss", "seconds"]))
    return _guarded("train", action, config.verbose)


def cmd_evaluate(config: BenchConfig, runs_dir: Optional[str] = None) -> int:
    """Calibrate on validation and score every run and baseline on test."""
    def action():
        result = evaluate_runs(config, Path(runs_dir) if runs_dir else None)
        rows = []
        for report in result.reports:
            for m in report.metrics:
                rows.append({"task": report.task, "model": report.model, "seed": report.seed,
                             "metric": m.metric, "point": m.point, "ci_low": m.ci_low, "ci_high": m.ci_high})
        print(format_table(rows, ["task", "model", "seed", "metric", "point", "ci_low", "ci_high"]))
        print_info(f"Report written to {result.report_path}")
    return _guarded("evaluate", action, config.verbose)


def cmd_report(run_dirs: Sequence[str], out_path: Optional[str] = None, verbose: bool = False) -> int:
    """Aggregate per-seed reports into mean and sample std per (task, model, metric)."""
    def action():
        summary = report_runs([Path(d) for d in run_dirs], Path(out_path) if out_path else None)
        print(format_table(summary.to_dict("records"), ["task", "model", "metric", "mean", "std", "n_seeds"]))
    return _guarded("report", action, verbose)


def cmd_run(config: BenchConfig, steps: Optional[List[str]] = None, quiet: bool = False) -> int:
    """Run several steps in pipeline order through the PipelineRunner."""
    try:
        PipelineRunner(config, steps, quiet=quiet).run()
    except BenchError as e:
        print_error(str(e))
        return e.exit_code
    except Exception as e:
        print_error(f"pipeline failed: {e}")
        if config.verbose:
            traceback.print_exc()
        return 1
    return 0
