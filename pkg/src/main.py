"""
Main entry point for Sobolev Drift Lab
"""

import os
import sys
import time
import logging
import argparse
from dataclasses import dataclass, fields
from typing import List, Optional

from dotenv import load_dotenv

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.errors import DomainError, ExperimentAbortError, LabError
from src.experiments.checks import sobolev_check, transform_check
from src.experiments.config import ExperimentConfig, load_config_file
from src.experiments.kappa import kappa_mc
from src.experiments.occupation import occupation_mismatch
from src.experiments.rates import estimate_coupling_distance, estimate_euler_rate
from src.experiments.runner import default_workers
from src.storage.report_files import ReportFileCreator

VERBS = ('rate', 'couple', 'kappa', 'occupation', 'transform-check', 'sobolev')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


@dataclass
class Command:
    """A parsed command line"""
    verb: str
    config: ExperimentConfig
    workers: int
    config_path: Optional[str] = None


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--config', type=str, help='Flat JSON or YAML file with configuration keys')
    shared.add_argument('--drift', type=str, help='mu-s, indicator, hat, zero or constant=<c> (default: mu-s)')
    shared.add_argument('--s', type=float, help='Smoothness of mu_s in (1/2, 1) (default: 0.75)')
    shared.add_argument('--x0', type=float, help='Initial value (default: 0)')
    shared.add_argument('--p', type=float, help='Error exponent, at least 1 (default: 2)')
    shared.add_argument('--n-list', type=str, help='Comma-separated grid sizes (default: 16,...,1024)')
    shared.add_argument('--fine-steps', type=int, help='Steps of the reference grid (default: 16384)')
    shared.add_argument('--reps', type=int, help='Monte Carlo replications (default: 10000)')
    shared.add_argument('--seed', type=int, help='Seed of the replication streams (default: 42)')
    shared.add_argument('--out', type=str, help='Output path prefix (default: report)')
    shared.add_argument('--format', type=str, choices=['csv', 'json', 'both'], help='Report format (default: both)')
    shared.add_argument('--workers', type=int, help='Worker processes (default: SDLAB_WORKERS or 1)')
    shared.add_argument('--abs-tol', type=float, help='Absolute tolerance of the mu_s quadrature (default: 1e-5)')
    shared.add_argument('--panels', type=int, help='Core Filon panels per unit length (default: 64)')
    shared.add_argument('--x-max', type=float, help='Half width of drift and transform tables (default: |x0| + 8)')
    shared.add_argument('--transform-step', type=float, help='Step of the transform grid (default: 1e-4)')
    shared.add_argument('--plot', action='store_true', default=None, help='Also write <out>.html')

    parser = argparse.ArgumentParser(
        description='Sobolev Drift Lab: strong approximation experiments for SDEs with fractional Sobolev drift',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
Examples:
  python src/main.py rate --s 0.75 --n-list 16,32,64 --reps 1000 --seed 7
  python src/main.py couple --n-list 8,16,32,64,128,256
  python src/main.py kappa --reps 100000 --fine-steps 4096
  python src/main.py occupation --xi 0 --deltas 0.0078125,0.015625,0.03125,0.0625,0.125
  python src/main.py transform-check --drift indicator --reps 1000
  python src/main.py sobolev --seminorm-s 0.5 --mesh 64
        '''
    )
    subparsers = parser.add_subparsers(dest='verb', help='Available commands')

    rate_parser = subparsers.add_parser('rate', parents=[shared], help='Strong Euler error rate')
    rate_parser.add_argument('--sup-norm', action='store_true', default=None,
                             help='Measure the error in the supremum over the fine grid')

    subparsers.add_parser('couple', parents=[shared], help='Distance of solutions driven by coupled noise')

    kappa_parser = subparsers.add_parser('kappa', parents=[shared], help='Second moment of the kappa functional')
    kappa_parser.add_argument('--z', type=float, help='Frequency (default: 1)')

    occ_parser = subparsers.add_parser('occupation', parents=[shared], help='Occupation mismatch scaling')
    occ_parser.add_argument('--xi', type=float, help='Level (default: 0)')
    occ_parser.add_argument('--deltas', type=str, help='Comma-separated window lengths (default: 2^-7,...,2^-3)')

    subparsers.add_parser('transform-check', parents=[shared], help='Checks of the drift-removing transform')

    sob_parser = subparsers.add_parser('sobolev', parents=[shared], help='Sobolev regularity diagnostics')
    sob_parser.add_argument('--seminorm-s', type=float, help='Order of the direct seminorm in (0, 1) (default: 0.5)')
    sob_parser.add_argument('--cutoffs', type=str, help='Comma-separated Fourier-side cutoffs')
    sob_parser.add_argument('--mesh', type=int, help='Initial mesh of the direct seminorm (default: 64)')
    return parser


def parse_args(argv: Optional[List[str]] = None) -> Command:
    """
    Parse and validate a command line

    Flags override values from --config; the seed always resolves.
    Usage errors print the usage text and exit with status 2.
    """
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.verb:
        parser.error(f"a command is required: {', '.join(VERBS)}")

    values = {}
    if args.config:
        try:
            values.update(load_config_file(args.config))
        except (OSError, ValueError) as e:
            parser.error(f"cannot read config {args.config}: {e}")
    known = {f.name for f in fields(ExperimentConfig)}
    values.update({k: v for k, v in vars(args).items() if k in known and v is not None})

    try:
        config = ExperimentConfig.from_dict(values)
        config.validate(args.verb)
    except DomainError as e:
        parser.error(str(e))

    workers = args.workers if args.workers is not None else default_workers()
    if workers < 1:
        parser.error(f"--workers must be positive, got {workers}")
    return Command(verb=args.verb, config=config, workers=workers, config_path=args.config)


def _rate_summary(series) -> str:
    if series.exact:
        return "exact (errors all zero)"
    if series.fitted_slope is None:
        return "slope not fitted (fewer than 3 positive errors)"
    line = f"slope {series.fitted_slope:.4f} ± {series.slope_stderr:.4f}"
    if series.target_slope is not None:
        line += f" (target {series.target_slope:.4f})"
    return line


def run_rate(cmd: Command):
    print("=" * 60)
    print(" ESTIMATING STRONG EULER RATE")
    print("=" * 60)
    series = estimate_euler_rate(cmd.config, workers=cmd.workers)
    for e in series.entries:
        print(f"  n={e.n:<6d} error={e.error:.6e} ± {e.stderr:.2e}")
    return series, _rate_summary(series), True


def run_couple(cmd: Command):
    print("=" * 60)
    print(" ESTIMATING COUPLING DISTANCE")
    print("=" * 60)
    series = estimate_coupling_distance(cmd.config, workers=cmd.workers)
    for e in series.entries:
        print(f"  n={e.n:<6d} distance={e.error:.6e} ± {e.stderr:.2e} fooling bound={e.fooling_bound:.6e}")
    summary = _rate_summary(series)
    if not series.monotone:
        summary += "; distances not monotone in n"
    return series, summary, True


def run_kappa(cmd: Command):
    print("=" * 60)
    print(" KAPPA FUNCTIONAL")
    print("=" * 60)
    c = cmd.config
    report = kappa_mc(c.z, c.reps, c.fine_steps, c.seed, workers=cmd.workers)
    verdict = "agree" if report.agrees else "DISAGREE"
    summary = (f"kappa({c.z:g}): quadrature {report.quadrature_value:.8f}, "
               f"Monte Carlo {report.mc_value:.6f} ± {report.mc_stderr:.6f}, "
               f"{verdict} ({report.deviation:.2f} standard errors)")
    return report, summary, True


def run_occupation(cmd: Command):
    print("=" * 60)
    print(" OCCUPATION MISMATCH")
    print("=" * 60)
    c = cmd.config
    series = occupation_mismatch(c.build_drift(), c.x0, c.xi, c.deltas, c.reps, c.seed,
                                 workers=cmd.workers)
    for delta, moment, stderr in series.entries:
        print(f"  delta={delta:<10g} second moment={moment:.6e} ± {stderr:.2e}")
    if series.exact:
        summary = "exact (mismatch all zero)"
    elif series.fitted_slope is None:
        summary = "slope not fitted (fewer than 3 positive moments)"
    else:
        summary = f"slope {series.fitted_slope:.4f} ± {series.slope_stderr:.4f} (cubic scaling: 3)"
    return series, summary, True


def run_transform_check(cmd: Command):
    print("=" * 60)
    print(" TRANSFORM CHECK")
    print("=" * 60)
    report = transform_check(cmd.config, workers=cmd.workers)
    print(f"  G' in [{report.c1:.6g}, {report.c2:.6g}], "
          f"bounds [{report.lower_bound:.6g}, {report.upper_bound:.6g}]")
    print(f"  round trip error {report.round_trip_error:.3e}")
    print(f"  Lipschitz constant of b {report.lipschitz_estimate:.6g} (bound {report.lipschitz_bound:.6g})")
    for steps, mean, stderr in report.consistency.entries:
        print(f"  steps={steps:<6d} mean |G(X) - Y| = {mean:.3e} ± {stderr:.1e}")
    summary = f"transform check {'passed' if report.passed else 'FAILED'} for {report.label}"
    return report, summary, report.passed


def run_sobolev(cmd: Command):
    print("=" * 60)
    print(" SOBOLEV DIAGNOSTICS")
    print("=" * 60)
    report = sobolev_check(cmd.config)
    for cutoff, value, tail in zip(report.cutoffs, report.fourier_values, report.fourier_tail_bounds):
        print(f"  cutoff={cutoff:<10g} fourier side={value:.6f} tail <= {tail:.4f}")
    for mesh, value in zip(report.study.meshes, report.study.values):
        print(f"  mesh={mesh:<6d} seminorm={value:.6g}")
    state = 'diverging' if report.study.diverging else 'converging'
    summary = (f"sobolev check {'passed' if report.passed else 'FAILED'}; "
               f"direct seminorm {state}")
    return report, summary, report.passed


_HANDLERS = {
    'rate': run_rate,
    'couple': run_couple,
    'kappa': run_kappa,
    'occupation': run_occupation,
    'transform-check': run_transform_check,
    'sobolev': run_sobolev,
}


def run(cmd: Command) -> int:
    """
    Execute a command and write its reports

    Returns:
        0 on success, 1 on experiment failure, 2 on an unwritable output path
    """
    try:
        writer = ReportFileCreator(cmd.config.out, cmd.config.format)
    except OSError as e:
        print(f"\n Error: {e}")
        return EXIT_USAGE

    print(f" seed={cmd.config.seed} drift={cmd.config.drift} workers={cmd.workers}")
    started = time.perf_counter()
    try:
        result, summary, ok = _HANDLERS[cmd.verb](cmd)
    except ExperimentAbortError as e:
        print(f"\n Experiment aborted: {e}")
        return EXIT_FAILED
    except LabError as e:
        print(f"\n Experiment failed: {e}")
        return EXIT_FAILED
    wall_time = time.perf_counter() - started

    try:
        paths = writer.create_all_report_files(cmd.verb, cmd.config.to_dict(), result,
                                               wall_time, cmd.workers, plot=bool(cmd.config.plot))
    except OSError as e:
        print(f"\n Error writing reports: {e}")
        return EXIT_USAGE

    for path in paths:
        print(f" Wrote {path}")
    print(summary)
    return EXIT_OK if ok else EXIT_FAILED


def main(argv: Optional[List[str]] = None):
    """Main CLI entry point"""
    load_dotenv()
    logging.basicConfig(
        level=os.getenv('SDLAB_LOG_LEVEL', 'WARNING').upper(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
    cmd = parse_args(argv)
    sys.exit(run(cmd))


if __name__ == "__main__":
    main()
