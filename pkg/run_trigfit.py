"""
Cosine Fitting Command Line

Sub-commands:
- synth:        write a synthetic reference signal as CSV
- fit:          estimate initial parameters and refine them by least squares
- periodogram:  export the Lomb-Scargle periodogram of a signal
- bench:        reproduce one accuracy table over many noise realizations
- timing:       compare the speed of both frequency estimators
- landscape:    export chi-squared over an (a3, a4) grid
"""

import argparse
import logging
import sys
from typing import List, Optional

import settings
from benchmark import commands
from benchmark.reports import InitMethod
from benchmark.timing import DEFAULT_LENGTHS
from trigfit.errors import TrigFitError

logger = logging.getLogger(__name__)

INIT_CHOICES = [m.value for m in InitMethod]
TABLE_CHOICES = ["p10", "p5", "p2", "p1", "p05"]


class UsageExitParser(argparse.ArgumentParser):
    """ArgumentParser that exits with code 1 on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageExitParser(
        prog="run_trigfit.py",
        description="Cosine fitting for unevenly sampled, noisy signals",
    )
    parser.add_argument(
        "--log-level", default=None,
        help="DEBUG, INFO, WARNING or ERROR (default: $TRIGFIT_LOG_LEVEL or INFO)"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageExitParser)

    p = sub.add_parser("synth", help="Write a synthetic signal")
    p.add_argument("--out", required=True, help="Output CSV path")
    p.add_argument("--periods", type=float, default=10.0, help="Covered periods (default: 10)")
    p.add_argument("--fs", type=float, default=20.0, help="Average sampling frequency (default: 20)")
    p.add_argument("--snr", type=float, default=None, help="SNR in dB (default: noise-free)")
    p.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    p.add_argument("--jitter", type=float, default=0.3, help="Sampling jitter fraction (default: 0.3)")

    p = sub.add_parser("fit", help="Fit a CSV signal")
    p.add_argument("--in", dest="in_path", required=True, help="Input CSV (header x,y)")
    p.add_argument("--out", default=None, help="Output JSON report")
    p.add_argument("--init", choices=INIT_CHOICES, default=InitMethod.FIPEFT.value,
                   help="Initial parameter estimator (default: fipeft)")
    p.add_argument("--max-iterations", type=int, default=None,
                   help="Iteration cap (default: $TRIGFIT_MAX_ITERATIONS or 500)")
    p.add_argument("--trace", action="store_true", help="Add estimator diagnostics to the report")

    p = sub.add_parser("periodogram", help="Export the periodogram of a CSV signal")
    p.add_argument("--in", dest="in_path", required=True, help="Input CSV (header x,y)")
    p.add_argument("--out", required=True, help="Output CSV path")

    p = sub.add_parser("bench", help="Reproduce an accuracy table")
    p.add_argument("--table", choices=TABLE_CHOICES, required=True, help="Benchmark regime")
    p.add_argument("--out", required=True, help="Output CSV path")
    p.add_argument("--seeds", type=int, default=None,
                   help="Trials per cell (default: $TRIGFIT_BENCH_SEEDS or 20)")
    p.add_argument("--init", dest="init_methods", choices=INIT_CHOICES, action="append", default=None,
                   help="Estimator to compare; repeat for several (default: fipeft)")
    p.add_argument("--workers", type=int, default=None,
                   help="Worker processes (default: $TRIGFIT_BENCH_WORKERS or 1)")
    p.add_argument("--base-seed", type=int, default=0, help="Seed all trial seeds derive from")
    p.add_argument("--max-iterations", type=int, default=None, help="Iteration cap per fit")

    p = sub.add_parser("timing", help="Compare estimator speed")
    p.add_argument("--out", required=True, help="Output CSV path")
    p.add_argument("--lengths", type=int, nargs="+", default=list(DEFAULT_LENGTHS),
                   help="Signal lengths N (default: 80 160 400 800 1600)")
    p.add_argument("--repeats", type=int, default=3, help="Repeats per noise level (default: 3)")
    p.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")

    p = sub.add_parser("landscape", help="Export the chi-squared landscape over (a3, a4)")
    p.add_argument("--in", dest="in_path", required=True, help="Input CSV (header x,y)")
    p.add_argument("--out", required=True, help="Output CSV path")
    p.add_argument("--a3-min", type=float, default=None, help="Lowest angular frequency")
    p.add_argument("--a3-max", type=float, default=None, help="Highest angular frequency")
    p.add_argument("--a3-steps", type=int, default=101, help="Angular frequency steps (default: 101)")
    p.add_argument("--a4-steps", type=int, default=72, help="Phase steps over [0, 2pi) (default: 72)")

    return parser


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "synth":
        return commands.cmd_synth(
            out_path=args.out, periods=args.periods, fs=args.fs,
            snr_db=args.snr, seed=args.seed, jitter=args.jitter,
        )
    if args.command == "fit":
        return commands.cmd_fit(
            in_path=args.in_path, out_path=args.out, init_method=args.init,
            max_iterations=args.max_iterations, trace=args.trace,
        )
    if args.command == "periodogram":
        return commands.cmd_periodogram(in_path=args.in_path, out_path=args.out)
    if args.command == "bench":
        return commands.cmd_bench(
            table=args.table, out_path=args.out, seeds=args.seeds,
            init_methods=args.init_methods or [InitMethod.FIPEFT.value],
            workers=args.workers, base_seed=args.base_seed,
            max_iterations=args.max_iterations,
        )
    if args.command == "timing":
        return commands.cmd_timing(
            out_path=args.out, lengths=args.lengths, repeats=args.repeats, seed=args.seed,
        )
    if args.command == "landscape":
        return commands.cmd_landscape(
            in_path=args.in_path, out_path=args.out,
            a3_min=args.a3_min, a3_max=args.a3_max,
            a3_steps=args.a3_steps, a4_steps=args.a4_steps,
        )
    raise AssertionError(f"unhandled command {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        level = settings.get_log_level(args.log_level)
    except TrigFitError as e:
        parser.error(e.message)

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
