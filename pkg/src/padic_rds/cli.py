"""
Command-line front end: ``padic-rds analyze | simulate | chain | pattern``.

Every subcommand builds an ExperimentConfig from an optional config file and
the flags (flags win), prints a JSON document to stdout and, with --out-dir,
writes its files there. Exit codes: 0 success, 2 invalid input, 3 internal
inconsistency, 4 I/O error.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from . import rds_logging as logging
from .analysis import analyze
from .chain import transition_matrix
from .config import (ExperimentConfig, RdsSpec, build_experiment_config,
                     validation_messages)
from .engine import empirical_transition_matrix, simulate_trials
from .errors import (ConfigurationError, InternalInconsistency,
                     ModelViolation, PadicRdsError)
from .export import (chain_report, matrix_lines, seed_report,
                     simulate_summary, strips_report, write_histogram_csv,
                     write_json, write_points_csv, write_trace_csv)
from .pattern import generate_pattern, seed_independence_check
from .utils.otel_wrapper import TracerFactory, trace_function

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCONSISTENT = 3
EXIT_IO = 4


def _emit(document: Dict[str, Any]) -> None:
    sys.stdout.write(json.dumps(document, indent=2) + "\n")


def _out_dir(config: ExperimentConfig) -> Optional[Path]:
    if config.out_dir is None:
        return None
    path = Path(config.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


@trace_function
def cmd_analyze(config: ExperimentConfig, spec: RdsSpec) -> int:
    report = analyze(spec).to_json_dict()
    out = _out_dir(config)
    if out:
        write_json(report, out / "report.json")
    _emit(report)
    return EXIT_OK


@trace_function
def cmd_simulate(config: ExperimentConfig, spec: RdsSpec) -> int:
    u0 = config.initial_state(spec)
    traces = simulate_trials(spec, u0, config.steps, config.trials, config.workers)
    summary = simulate_summary(traces)
    out = _out_dir(config)
    if out:
        if len(traces) == 1:
            write_trace_csv(traces[0], out / "trace.csv")
        else:
            for t, trace in enumerate(traces):
                write_trace_csv(trace, out / f"trace_{t:04d}.csv")
        write_json(summary, out / "summary.json")
    _emit(summary)
    return EXIT_OK


@trace_function
def cmd_chain(config: ExperimentConfig, spec: RdsSpec) -> int:
    matrix = transition_matrix(spec)
    empirical = empirical_transition_matrix(spec, config.empirical_steps, config.burn_in)
    report = {"spec": spec.to_json_dict(), "edges": matrix_lines(matrix), **chain_report(matrix, empirical)}
    out = _out_dir(config)
    if out:
        write_json(report, out / "chain.json")
    _emit(report)
    return EXIT_OK


@trace_function
def cmd_pattern(config: ExperimentConfig, spec: RdsSpec) -> int:
    pattern_config = config.pattern_config(spec)
    result = generate_pattern(pattern_config)
    report = strips_report(result)
    if config.check_seeds:
        seeds = [spec.seed] + [s for s in config.check_seeds if s != spec.seed]
        report["seed_independence"] = seed_report(seed_independence_check(pattern_config, seeds, config.workers))
    out = _out_dir(config)
    if out:
        write_points_csv(result, out / "points.csv")
        write_histogram_csv(result, out / "histogram.csv")
        write_json(report, out / "strips.json")
    _emit(report)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', metavar='FILE', help='JSON or YAML experiment file; flags override its values')
    parser.add_argument('--p', type=int, help='the prime p')
    parser.add_argument('--s', metavar='S1,S2,...', help='exponents s_j, distinct integers >= 2')
    parser.add_argument('--q', metavar='Q1,Q2,...', help='probabilities q_j as decimals or fractions (default uniform)')
    parser.add_argument('--precision', type=int, help='p-adic digits K (default 16)')
    parser.add_argument('--seed', type=int, help='seed of every random stream (default 0)')
    parser.add_argument('--bit-generator', dest='bit_generator', help='numpy bit generator (default PCG64)')
    parser.add_argument('--out-dir', dest='out_dir', metavar='DIR', help='write output files into DIR')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='padic-rds', description='p-adic monomial random dynamical systems')
    sub = parser.add_subparsers(dest='command', required=True)

    analyze_parser = sub.add_parser('analyze', help='exact attractor, components, stationary and absorption report')
    _add_common(analyze_parser)
    analyze_parser.set_defaults(handler=cmd_analyze)

    simulate_parser = sub.add_parser('simulate', help='simulate orbits; trace CSV and summary JSON')
    _add_common(simulate_parser)
    simulate_parser.add_argument('--steps', type=int, help='iterations per orbit (default 1000)')
    simulate_parser.add_argument('--u0', help="initial state, an integer or 'p:K:d0,d1,...' (default xi + p)")
    simulate_parser.add_argument('--trials', type=int, help='independent orbits (default 1)')
    simulate_parser.add_argument('--workers', type=int, help='worker processes (default 1)')
    simulate_parser.set_defaults(handler=cmd_simulate)

    chain_parser = sub.add_parser('chain', help='exact transition matrix against one long simulated orbit')
    _add_common(chain_parser)
    chain_parser.add_argument('--steps', dest='empirical_steps', type=int,
                              help='orbit length for the estimate (default 100000)')
    chain_parser.add_argument('--burn-in', dest='burn_in', type=int, help='discarded steps (default 10(p-1))')
    chain_parser.set_defaults(handler=cmd_chain)

    pattern_parser = sub.add_parser('pattern', help='interference pattern points, histogram and strips')
    _add_common(pattern_parser)
    pattern_parser.add_argument('--u0', help="initial state, an integer or 'p:K:d0,d1,...' (default xi + p)")
    pattern_parser.add_argument('--particles', dest='n_particles', type=int, help='orbit length (default 10000)')
    pattern_parser.add_argument('--burn-in', dest='burn_in', type=int, help='discarded states (default 10(p-1))')
    pattern_parser.add_argument('--y-range', dest='y_range', metavar='A,B', help='y sample interval (default 0,1)')
    pattern_parser.add_argument('--x-bins', dest='x_bins', type=int, help='histogram columns (default 200)')
    pattern_parser.add_argument('--y-bins', dest='y_bins', type=int, help='histogram rows (default 50)')
    pattern_parser.add_argument('--tolerance-digits', dest='tolerance_digits', type=int,
                                help='digits a sample must share with its strip center (default K/2)')
    pattern_parser.add_argument('--check-seeds', dest='check_seeds', metavar='SEED,...',
                                help='also rerun with these seeds and compare strips')
    pattern_parser.add_argument('--workers', type=int, help='worker processes for --check-seeds (default 1)')
    pattern_parser.set_defaults(handler=cmd_pattern)
    return parser


_NOT_OVERRIDES = {'command', 'handler', 'config', 'y_range'}


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_OVERRIDES and v is not None}
    if 's' in overrides:
        overrides['exponents'] = overrides.pop('s')
    if 'q' in overrides:
        overrides['probabilities'] = overrides.pop('q')
    y_range = getattr(args, 'y_range', None)
    if y_range is not None:
        parts = y_range.split(',')
        try:
            overrides['y_min'], overrides['y_max'] = (float(x) for x in parts)
        except ValueError as e:
            raise ConfigurationError([f"--y-range must be 'A,B', got {y_range!r}"]) from e
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config, spec = build_experiment_config(args.config, overrides_from(args))
        return args.handler(config, spec)
    except ConfigurationError as e:
        print(str(e), file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as e:
        print(str(ConfigurationError(validation_messages(e), args.config)), file=sys.stderr)
        return EXIT_INVALID
    except (InternalInconsistency, ModelViolation) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INCONSISTENT
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except (PadicRdsError, ValueError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID
    finally:
        TracerFactory.shutdown()
