"""Command implementations behind run_trigfit.py.

Every cmd_* function returns a process exit code:
0 success, 1 usage/config error, 2 data or I/O error, 3 non-convergence.
Library errors are logged and printed on stderr here and nowhere else.
"""

from __future__ import annotations

import functools
import logging
import math
import sys
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

import settings
from benchmark.bench_runner import BenchRunner, initialize
from benchmark.reports import FitReport, InitMethod
from benchmark.signal_repo import SignalRepo
from benchmark.table_registry import TableRegistry
from benchmark.timing import DEFAULT_LENGTHS, TimingRunner
from trigfit.errors import FitError, InvalidConfigError, TrigFitError
from trigfit.fipeft import estimate_initial_params, estimate_with_trace
from trigfit.lmfit import LMConfig, fit_signal
from trigfit.lombscargle import periodogram
from trigfit.signal_model import TWO_PI, chi_squared_grid
from trigfit.synth import DEFAULT_JITTER, DEFAULT_PARAMS, SynthConfig, generate, sigma_for_snr

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 2


def _fail(command: str, code: int, message: str) -> int:
    logger.error("%s failed: %s", command, message)
    print(f"error: {message}", file=sys.stderr)
    return code


def command(func: Callable[..., int]) -> Callable[..., int]:
    """Map library and I/O errors raised by a command onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> int:
        name = func.__name__.replace("cmd_", "")
        try:
            return func(*args, **kwargs)
        except TrigFitError as e:
            return _fail(name, e.exit_code, e.message)
        except OSError as e:
            return _fail(name, EXIT_IO, str(e))

    return wrapper


def _init_method(name: str) -> InitMethod:
    try:
        return InitMethod(name)
    except ValueError as e:
        choices = ", ".join(m.value for m in InitMethod)
        raise InvalidConfigError(f"unknown init method {name!r}; expected one of {choices}") from e


def _lm_config(max_iterations: Optional[int]) -> LMConfig:
    if max_iterations is None:
        max_iterations = settings.get_max_iterations()
    return LMConfig(max_iterations=max_iterations)


# -------------------------
# synth
# -------------------------


@command
def cmd_synth(
    out_path: str,
    periods: float = 10.0,
    fs: float = 20.0,
    snr_db: Optional[float] = None,
    seed: int = 0,
    jitter: float = DEFAULT_JITTER,
    repo: Optional[SignalRepo] = None,
) -> int:
    """Write a reference cosine signal; noise-free when snr_db is None."""
    repo = repo or SignalRepo()
    sigma = 0.0 if snr_db is None else sigma_for_snr(DEFAULT_PARAMS.a2, snr_db)
    cfg = SynthConfig(periods=periods, fs=fs, sigma=sigma, seed=seed, jitter=jitter)
    s = generate(cfg)
    repo.write_signal(s, out_path)
    print(f"✓ Wrote {s.n} samples (P={periods:g}, fs={fs:g}, sigma={sigma:.4g}) to {out_path}")
    return EXIT_OK


# -------------------------
# fit
# -------------------------


@command
def cmd_fit(
    in_path: str,
    out_path: Optional[str] = None,
    init_method: str = InitMethod.FIPEFT.value,
    max_iterations: Optional[int] = None,
    trace: bool = False,
    repo: Optional[SignalRepo] = None,
) -> int:
    """Initialize and refine a cosine fit of a CSV signal; optionally write a JSON report."""
    repo = repo or SignalRepo()
    method = _init_method(init_method)
    lm_cfg = _lm_config(max_iterations)

    s = repo.read_signal(in_path)
    init, clock_ns = initialize(method, s)
    result = fit_signal(s, init, lm_cfg, init_clock_ns=clock_ns)

    diagnostics: Optional[Dict[str, Any]] = None
    if trace:
        if method == InitMethod.FIPEFT:
            diagnostics = estimate_with_trace(s).to_dict()
        else:
            diagnostics = {"peak_frequency": init.frequency}
        diagnostics["lm_steps"] = result.trace.to_dicts()

    report = FitReport.from_fit_result(method.value, result, diagnostics)
    if out_path:
        repo.write_report(report, out_path)

    print(f"initial f = {init.frequency:.6f} ({method.value}, {clock_ns} ns)")
    print(f"refined f = {result.frequency:.6f}  chi2 = {result.chi2:.6g}  iterations = {result.iterations}")

    if not result.converged:
        return _fail(
            "fit",
            FitError.exit_code,
            f"no convergence within {lm_cfg.max_iterations} iterations",
        )
    logger.info("Fit converged after %d iterations", result.iterations)
    return EXIT_OK


# -------------------------
# periodogram
# -------------------------


@command
def cmd_periodogram(in_path: str, out_path: str, repo: Optional[SignalRepo] = None) -> int:
    """Export the full-grid periodogram of a CSV signal with the peak row flagged."""
    repo = repo or SignalRepo()
    s = repo.read_signal(in_path)
    pg = periodogram(s)
    repo.write_periodogram(pg, out_path)
    print(f"peak f = {pg.peak_frequency:.6f} (power {pg.peak_power:.6g}, {pg.frequencies.size} frequencies)")
    return EXIT_OK


# -------------------------
# bench
# -------------------------


@command
def cmd_bench(
    table: str,
    out_path: str,
    seeds: Optional[int] = None,
    init_methods: Sequence[str] = (InitMethod.FIPEFT.value,),
    workers: Optional[int] = None,
    base_seed: int = 0,
    max_iterations: Optional[int] = None,
    registry: Optional[TableRegistry] = None,
    repo: Optional[SignalRepo] = None,
) -> int:
    """Reproduce one benchmark table as CSV of per-cell medians and success rates."""
    repo = repo or SignalRepo()
    runner = BenchRunner(
        registry=registry or TableRegistry.load_default(),
        workers=workers if workers is not None else settings.get_bench_workers(),
        base_seed=base_seed,
        max_iterations=_lm_config(max_iterations).max_iterations,
    )
    methods = [_init_method(m) for m in init_methods]
    cells = runner.run(table, seeds if seeds is not None else settings.get_bench_seeds(), methods)
    df = repo.write_table(cells, out_path)

    summary = df.pivot_table(index=["init_method", "snr_db"], columns="fs", values="fitted_median", sort=False)
    print(summary.to_string(float_format=lambda v: f"{v:.3f}"))
    return EXIT_OK


# -------------------------
# timing
# -------------------------


@command
def cmd_timing(
    out_path: str,
    lengths: Sequence[int] = DEFAULT_LENGTHS,
    repeats: int = 3,
    seed: int = 0,
    repo: Optional[SignalRepo] = None,
) -> int:
    """Compare frequency-stage wall clock and work of both estimators per signal length."""
    repo = repo or SignalRepo()
    rows = TimingRunner(lengths=list(lengths), repeats=repeats, seed=seed).run()
    df = repo.write_table(rows, out_path)
    print(df.to_string(index=False))
    return EXIT_OK


# -------------------------
# landscape
# -------------------------


@command
def cmd_landscape(
    in_path: str,
    out_path: str,
    a3_min: Optional[float] = None,
    a3_max: Optional[float] = None,
    a3_steps: int = 101,
    a4_steps: int = 72,
    max_iterations: Optional[int] = None,
    repo: Optional[SignalRepo] = None,
) -> int:
    """
    Write chi-squared over an (a3, a4) grid with a1 and a2 from a fit of the input.

    The a3 range defaults to half to one and a half times the fitted value;
    a4 covers [0, 2*pi) in a4_steps steps.
    """
    repo = repo or SignalRepo()
    if a3_steps < 2 or a4_steps < 2:
        return _fail("landscape", 1, "a3_steps and a4_steps must be >= 2")

    s = repo.read_signal(in_path)
    fitted = fit_signal(s, estimate_initial_params(s), _lm_config(max_iterations)).refined

    lo = 0.5 * fitted.a3 if a3_min is None else a3_min
    hi = 1.5 * fitted.a3 if a3_max is None else a3_max
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        return _fail("landscape", 1, f"invalid a3 range [{lo}, {hi}]")

    a3_values = np.linspace(lo, hi, a3_steps)
    a4_values = np.arange(a4_steps) * (TWO_PI / a4_steps)
    grid = chi_squared_grid(s, fitted, a3_values, a4_values)
    repo.write_landscape(a3_values, a4_values, grid, out_path)

    row, col = np.unravel_index(int(np.argmin(grid)), grid.shape)
    print(f"minimum chi2 = {grid[row, col]:.6g} at a3 = {a3_values[row]:.6f}, a4 = {a4_values[col]:.4f}")
    return EXIT_OK
