"""Speed comparison of the two frequency estimators.

Only the frequency stage is timed: offset estimation, amplitude and phase
are identical for both methods. Signals of each length cover ten periods
of the reference cosine at every benchmark noise level. The crossing-based
time is the median over all noise levels and repeats, the periodogram time
the minimum. Element-visit counters are reported next to the wall clock
so the growth rate can be checked independently of the hardware.
"""

from __future__ import annotations

import logging
import statistics
import time
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from benchmark.reports import TimingRow
from trigfit.errors import InvalidConfigError
from trigfit.fipeft import estimate_frequency_stage
from trigfit.lombscargle import peak_frequency
from trigfit.signal_model import SampledSignal
from trigfit.synth import DEFAULT_PARAMS, SynthConfig, generate
from trigfit.work_counter import WorkCounter

logger = logging.getLogger(__name__)

DEFAULT_LENGTHS = (80, 160, 400, 800, 1600)
DEFAULT_SIGMAS = (0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5)
TIMING_PERIODS = 10.0


def now_ns() -> int:
    """Monotonic, high-resolution timestamp in nanoseconds."""
    return time.perf_counter_ns()


def signal_for_length(n: int, sigma: float, seed: int) -> SampledSignal:
    """Reference cosine with exactly n samples over ten periods."""
    fs = n * DEFAULT_PARAMS.frequency / TIMING_PERIODS
    return generate(SynthConfig(periods=TIMING_PERIODS, fs=fs, sigma=sigma, seed=seed))


def time_fipeft(s: SampledSignal, a1_hat: float) -> Tuple[int, int]:
    counter = WorkCounter()
    start = now_ns()
    estimate_frequency_stage(s, a1_hat, counter=counter)
    return now_ns() - start, counter.count


def time_lombscargle(s: SampledSignal, a1_hat: float) -> Tuple[int, int]:
    counter = WorkCounter()
    start = now_ns()
    peak_frequency(s, a1_hat, counter=counter)
    return now_ns() - start, counter.count


@dataclass
class TimingRunner:
    lengths: Sequence[int] = DEFAULT_LENGTHS
    repeats: int = 3
    sigmas: Sequence[float] = field(default_factory=lambda: list(DEFAULT_SIGMAS))
    seed: int = 0

    def __post_init__(self):
        if self.repeats < 1:
            raise InvalidConfigError(f"repeats must be >= 1, got {self.repeats}")
        if not self.lengths or min(self.lengths) < 2:
            raise InvalidConfigError(f"lengths must all be >= 2, got {list(self.lengths)}")
        if not self.sigmas:
            raise InvalidConfigError("at least one noise level is required")

    def measure(self, n: int) -> TimingRow:
        fipeft_ns: List[int] = []
        ls_ns: List[int] = []
        fipeft_work = ls_work = 0

        for level, sigma in enumerate(self.sigmas):
            s = signal_for_length(n, sigma, seed=self.seed + level)
            a1_hat = float(np.mean(s.y))
            for _ in range(self.repeats):
                elapsed, fipeft_work = time_fipeft(s, a1_hat)
                fipeft_ns.append(elapsed)
                elapsed, ls_work = time_lombscargle(s, a1_hat)
                ls_ns.append(elapsed)

        fipeft_ref = int(statistics.median(fipeft_ns))
        ls_ref = int(min(ls_ns))
        ratio = ls_ref / max(fipeft_ref, 1)
        logger.info("N=%d: fipeft %d ns, lombscargle %d ns, ratio %.1f", n, fipeft_ref, ls_ref, ratio)
        return TimingRow(
            n=n,
            fipeft_ns=fipeft_ref,
            lombscargle_ns=ls_ref,
            ratio=ratio,
            fipeft_work=fipeft_work,
            lombscargle_work=ls_work,
        )

    def run(self) -> List[TimingRow]:
        return [self.measure(int(n)) for n in self.lengths]
