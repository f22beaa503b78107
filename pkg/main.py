#!/usr/bin/env python3
"""
HR Stream Bench - Main Entry Point

Benchmarks streaming tachycardia detection and next-second heart-rate
forecasting on R-peak derived 1 Hz heart rate.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from src.cli.commands import cmd_evaluate, cmd_prepare, cmd_report, cmd_run, cmd_synth, cmd_train
from src.cli.utils import print_banner, print_error, setup_logging
from src.config.config_loader import ConfigLoader
from src.utils.errors import ConfigError


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_config_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        '--config', '-c',
        type=str,
        help='Config file path or name under --config-dir (default: configs/common.json)'
    )
    parser.add_argument(
        '--config-dir',
        type=str,
        default='./configs',
        help='Directory containing configuration files (default: ./configs)'
    )
    parser.add_argument(
        '--output-dir',
        type=str,
        help='Directory for run outputs (overrides output.runs_dir)'
    )
    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Enable verbose logging'
    )
    parser.add_argument(
        '--quiet', '-q',
        action='store_true',
        help='Suppress all output except errors'
    )


def _add_training_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        '--hidden-sweep',
        type=_int_list,
        metavar='SIZES',
        help='Capacity sweep hidden sizes, e.g. 32,64,128'
    )
    parser.add_argument(
        '--target-mode',
        choices=['residual', 'absolute'],
        help='Forecasting target: residual (default) or absolute'
    )
    parser.add_argument(
        '--seeds',
        type=_int_list,
        help='Training seeds, e.g. 0,1,2'
    )
    parser.add_argument(
        '--workers',
        type=int,
        help='Threads for the training grid'
    )


def _add_evaluation_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        '--runs',
        type=str,
        help='Run directory to evaluate (default: output.runs_dir)'
    )
    parser.add_argument(
        '--no-calibration',
        action='store_true',
        help='Skip temperature scaling (T = 1)'
    )
    parser.add_argument(
        '--beta',
        type=float,
        choices=[1.0, 2.0],
        help='F-beta used to pick the operating point (default: 2)'
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Benchmark streaming tachycardia detection and HR forecasting',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s synth --config synthetic.json          # Generate the synthetic R-peak corpus
  %(prog)s prepare --config synthetic.json        # Derive HR, pick theta, window and split
  %(prog)s train --config synthetic.json          # Train the model x task x seed grid
  %(prog)s evaluate --config synthetic.json       # Calibrate and score on the test split
  %(prog)s report --runs output/synthetic/runs    # Aggregate across seeds
  %(prog)s run --config synthetic.json --steps synth prepare train evaluate report
  %(prog)s evaluate --no-calibration --beta 1     # Calibration and operating-point ablations
  %(prog)s train --target-mode absolute --output-dir output/absolute
        """
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    synth = subparsers.add_parser('synth', help='Generate a synthetic R-peak corpus')
    _add_config_arguments(synth)

    prepare = subparsers.add_parser('prepare', help='Build the windowed dataset from R-peaks')
    _add_config_arguments(prepare)

    train = subparsers.add_parser('train', help='Train the run grid')
    _add_config_arguments(train)
    _add_training_arguments(train)

    evaluate = subparsers.add_parser('evaluate', help='Evaluate trained runs and baselines')
    _add_config_arguments(evaluate)
    _add_evaluation_arguments(evaluate)

    report = subparsers.add_parser('report', help='Aggregate per-seed reports')
    report.add_argument('--runs', type=str, nargs='+', required=True, help='Evaluated run directories')
    report.add_argument('--out', type=str, help='Summary CSV path (default: <first run dir>/summary.csv)')
    report.add_argument('--verbose', '-v', action='store_true', help='Enable verbose logging')
    report.add_argument('--quiet', '-q', action='store_true', help='Suppress all output except errors')

    run = subparsers.add_parser('run', help='Run several steps in order')
    _add_config_arguments(run)
    _add_training_arguments(run)
    _add_evaluation_arguments(run)
    run.add_argument(
        '--steps', '-s',
        type=str,
        nargs='+',
        help='Steps to run (default: prepare train evaluate report). Available: synth, prepare, train, evaluate, report'
    )
    return parser


def collect_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Map command-line flags onto dotted config keys."""
    overrides: Dict[str, Any] = {
        'output.runs_dir': getattr(args, 'output_dir', None),
        'models.hidden_sweep': getattr(args, 'hidden_sweep', None),
        'training.target_mode': getattr(args, 'target_mode', None),
        'training.seeds': getattr(args, 'seeds', None),
        'output.workers': getattr(args, 'workers', None),
        'calibration.beta': getattr(args, 'beta', None),
    }
    if getattr(args, 'no_calibration', False):
        overrides['calibration.enabled'] = False
    return {k: v for k, v in overrides.items() if v is not None}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the benchmark."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        setup_logging('DEBUG')
    elif args.quiet:
        setup_logging('ERROR')
    else:
        setup_logging('INFO')

    if not args.quiet:
        print_banner()

    if args.command == 'report':
        return cmd_report(args.runs, args.out, args.verbose)

    try:
        config = ConfigLoader(args.config_dir).load(args.config, collect_overrides(args), verbose=args.verbose)
    except ConfigError as e:
        print_error(str(e))
        return e.exit_code

    if args.command == 'synth':
        return cmd_synth(config)
    if args.command == 'prepare':
        return cmd_prepare(config)
    if args.command == 'train':
        return cmd_train(config, quiet=args.quiet)
    if args.command == 'evaluate':
        return cmd_evaluate(config, args.runs)
    return cmd_run(config, args.steps, quiet=args.quiet)


if __name__ == "__main__":
    sys.exit(main())
