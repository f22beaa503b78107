"""
Pipeline runner for orchestrating synth, prepare, train, evaluate and report.
"""

import logging
import time
from typing import List, Optional

from src.cli.utils import ProgressTracker, print_info, print_step_complete, print_step_header
from src.config.config_loader import BenchConfig
from src.pipeline.evaluate import evaluate_runs
from src.pipeline.prepare import prepare_dataset
from src.pipeline.report import report_runs
from src.pipeline.train import plan_runs, train_grid
from src.synth.generator import generate_corpus, write_corpus

logger = logging.getLogger(__name__)


class PipelineRunner:
    """
    Runs benchmark steps in pipeline order.
    """

    # Define pipeline steps and their execution order
    PIPELINE_STEPS = {
        'synth': 'run_synth',
        'prepare': 'run_prepare',
        'train': 'run_train',
        'evaluate': 'run_evaluate',
        'report': 'run_report',
    }

    def __init__(self, config: BenchConfig, steps: Optional[List[str]] = None, quiet: bool = False):
        """
        Args:
            config: Benchmark configuration
            steps: Steps to run (None or 'all' runs prepare through report)
            quiet: Suppress progress bars
        """
        self.config = config
        self.quiet = quiet
        self.steps = self._validate_steps(steps)
        self.progress = ProgressTracker(len(self.steps))

    def _validate_steps(self, steps: Optional[List[str]]) -> List[str]:
        if not steps or 'all' in steps:
            steps = ['prepare', 'train', 'evaluate', 'report']
        invalid = [s for s in steps if s not in self.PIPELINE_STEPS]
        if invalid:
            raise ValueError(f"Invalid steps: {', '.join(invalid)}")
        return [s for s in self.PIPELINE_STEPS if s in steps]

    def run(self):
        logger.info(f"Steps to run: {', '.join(self.steps)}")
        for step in self.steps:
            print_step_header(step)
            start_time = time.time()
            try:
                getattr(self, self.PIPELINE_STEPS[step])()
            except Exception as e:
                logger.error(f"Step '{step}' failed: {e}")
                raise
            print_step_complete(step, time.time() - start_time)
            self.progress.update(step)
        self.progress.complete()

    def run_synth(self):
        corpus = generate_corpus(self.config.synthetic.spec())
        manifest = write_corpus(corpus, self.config.synthetic.out_dir)
        print_info(f"{len(corpus.record_ids)} records, {len(corpus.episodes)} episodes -> {manifest}")

    def run_prepare(self):
        result = prepare_dataset(self.config)
        print_info(f"theta = {result.guard.theta:g} bpm: {result.n_windows} windows, "
                   f"{result.guard.n_positive_windows} positives "
                   f"({result.guard.n_positive_records} positive records)")

    def run_train(self):
        runs = plan_runs(self.config)
        print_info(f"{len(runs)} runs planned")
        train_grid(self.config, runs, quiet=self.quiet)

    def run_evaluate(self):
        result = evaluate_runs(self.config)
        print_info(f"Report written to {result.report_path}")

    def run_report(self):
        summary = report_runs([self.config.runs_dir])
        print_info(f"{len(summary)} aggregated rows")
