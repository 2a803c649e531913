"""Table-style accuracy benchmark.

For every (sigma, fs) cell of a table, draws `seeds` independent signals of
the reference cosine, initializes each with every requested estimator,
refines with Levenberg-Marquardt and aggregates median frequencies and
success rates. Trials may run in a process pool; cell order is always
(sigma, fs, estimator) and every trial's signal depends only on
(base_seed, cell, trial), so results do not depend on the worker count.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from benchmark.reports import BenchCell, InitMethod, is_success
from benchmark.table_registry import BenchTable, TableRegistry
from trigfit.errors import InvalidConfigError, TrigFitError
from trigfit.fipeft import estimate_initial_params
from trigfit.lmfit import LMConfig, lm_fit
from trigfit.lombscargle import estimate_initial_params_ls
from trigfit.signal_model import ModelParams, SampledSignal
from trigfit.synth import DEFAULT_PARAMS, SynthConfig, generate

logger = logging.getLogger(__name__)

_INITIALIZERS = {
    InitMethod.FIPEFT: estimate_initial_params,
    InitMethod.LOMBSCARGLE: estimate_initial_params_ls,
}


def initialize(method: InitMethod, s: SampledSignal) -> Tuple[ModelParams, int]:
    """Run one initializer and return its estimate with the elapsed nanoseconds."""
    estimator = _INITIALIZERS[InitMethod(method)]
    start = time.perf_counter_ns()
    params = estimator(s)
    return params, time.perf_counter_ns() - start


def trial_seed(base_seed: int, cell_index: int, trial: int) -> int:
    """Independent 64-bit seed per (cell, trial)."""
    state = np.random.SeedSequence([base_seed, cell_index, trial]).generate_state(1, np.uint64)
    return int(state[0])


@dataclass(frozen=True)
class TrialTask:
    cell_index: int
    trial: int
    sigma: float
    fs: float
    periods: float
    seed: int
    methods: Tuple[str, ...]
    max_iterations: int


@dataclass(frozen=True)
class TrialOutcome:
    cell_index: int
    trial: int
    # method -> (initial frequency, fitted frequency); NaN marks a failed trial
    frequencies: Dict[str, Tuple[float, float]]


def run_trial(task: TrialTask) -> TrialOutcome:
    """Draw one signal and fit it with each estimator (runs in worker processes)."""
    cfg = SynthConfig(
        true_params=DEFAULT_PARAMS,
        periods=task.periods,
        fs=task.fs,
        sigma=task.sigma,
        seed=task.seed,
    )
    lm_cfg = LMConfig(max_iterations=task.max_iterations)
    s = generate(cfg)

    frequencies: Dict[str, Tuple[float, float]] = {}
    for method in task.methods:
        try:
            init, _ = initialize(InitMethod(method), s)
            fitted = lm_fit(s, init, lm_cfg)
            frequencies[method] = (init.frequency, fitted.params.frequency)
        except TrigFitError as e:
            logger.debug("cell %d trial %d (%s) failed: %s", task.cell_index, task.trial, method, e)
            frequencies[method] = (math.nan, math.nan)
    return TrialOutcome(cell_index=task.cell_index, trial=task.trial, frequencies=frequencies)


def _median(values: Sequence[float]) -> float:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return math.nan
    return float(np.median(finite))


@dataclass
class BenchRunner:
    registry: TableRegistry = field(default_factory=TableRegistry.load_default)
    workers: int = 1
    base_seed: int = 0
    max_iterations: int = 500

    def __post_init__(self):
        if self.workers < 1:
            raise InvalidConfigError(f"workers must be >= 1, got {self.workers}")

    def tasks(self, table: BenchTable, seeds: int, methods: Sequence[InitMethod]) -> List[TrialTask]:
        names = tuple(InitMethod(m).value for m in methods)
        tasks: List[TrialTask] = []
        for cell_index, (row, fs) in enumerate(table.cells()):
            for trial in range(seeds):
                tasks.append(
                    TrialTask(
                        cell_index=cell_index,
                        trial=trial,
                        sigma=row.sigma,
                        fs=fs,
                        periods=table.periods,
                        seed=trial_seed(self.base_seed, cell_index, trial),
                        methods=names,
                        max_iterations=self.max_iterations,
                    )
                )
        return tasks

    def _execute(self, tasks: List[TrialTask]) -> Dict[Tuple[int, int], TrialOutcome]:
        outcomes: Dict[Tuple[int, int], TrialOutcome] = {}
        if self.workers == 1:
            for task in tasks:
                outcomes[(task.cell_index, task.trial)] = run_trial(task)
            return outcomes

        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            futures = {executor.submit(run_trial, task): task for task in tasks}
            for future in as_completed(futures):
                task = futures[future]
                try:
                    outcome = future.result()
                except Exception as e:
                    logger.warning("cell %d trial %d crashed: %s", task.cell_index, task.trial, e)
                    nan_pair = (math.nan, math.nan)
                    outcome = TrialOutcome(
                        cell_index=task.cell_index,
                        trial=task.trial,
                        frequencies={m: nan_pair for m in task.methods},
                    )
                outcomes[(task.cell_index, task.trial)] = outcome
        return outcomes

    def run(
        self,
        table_id: str,
        seeds: int,
        methods: Sequence[InitMethod] = (InitMethod.FIPEFT,),
    ) -> List[BenchCell]:
        """
        Benchmark one table.

        Args:
            table_id: Registry id (p10, p5, p2, p1, p05)
            seeds: Trials per cell
            methods: Initializers to compare on the same signals

        Returns:
            One BenchCell per (sigma, fs, method), ordered in that nesting
        """
        if seeds < 1:
            raise InvalidConfigError(f"seeds must be >= 1, got {seeds}")
        if not methods:
            raise InvalidConfigError("at least one init method is required")
        table = self.registry.require(table_id)
        f_true = DEFAULT_PARAMS.frequency

        tasks = self.tasks(table, seeds, methods)
        logger.info(
            "Benchmark %s: %d cells x %d seeds x %d methods on %d worker(s)",
            table.id, table.num_cells, seeds, len(methods), self.workers,
        )
        outcomes = self._execute(tasks)

        cells: List[BenchCell] = []
        for cell_index, (row, fs) in enumerate(table.cells()):
            trials = [outcomes[(cell_index, t)] for t in range(seeds)]
            for method in methods:
                name = InitMethod(method).value
                init_f = [o.frequencies[name][0] for o in trials]
                fitted_f = [o.frequencies[name][1] for o in trials]
                cell = BenchCell(
                    table=table.id,
                    snr_db=row.snr_label,
                    sigma=row.sigma,
                    fs=fs,
                    periods=table.periods,
                    init_method=name,
                    seeds=seeds,
                    init_median=_median(init_f),
                    init_success=sum(is_success(f, f_true) for f in init_f) / seeds,
                    fitted_median=_median(fitted_f),
                    fitted_success=sum(is_success(f, f_true) for f in fitted_f) / seeds,
                )
                logger.debug("cell %s", cell)
                cells.append(cell)
            logger.info("Finished sigma=%.2f fs=%g", row.sigma, fs)
        return cells
