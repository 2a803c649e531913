"""
Lomb-Scargle Periodogram

Baseline frequency estimator for unevenly sampled data:
- fixed frequency grid from half the lowest detectable frequency up to the
  equidistant-sampling maximum, oversampled five times
- direct power evaluation, one pass over the signal per grid frequency
- peak selection with ties broken toward the lower frequency
- false-alarm probability of the peak from the number of independent
  frequencies
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional
import logging

import numpy as np

from trigfit.errors import DegenerateInputError, InvalidInputError
from trigfit.fipeft import estimate_phase, prepare_stats, remove_spikes
from trigfit.signal_model import TWO_PI, ModelParams, SampledSignal
from trigfit.work_counter import WorkCounter

logger = logging.getLogger(__name__)

OVERSAMPLING = 5
MIN_DENOMINATOR = 1e-12
_GRID_EPS = 1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    """Evenly spaced frequencies f_min, f_min + delta_f, ... (count points)."""
    f_min: float
    f_max: float
    delta_f: float
    count: int

    def frequencies(self) -> np.ndarray:
        return self.f_min + self.delta_f * np.arange(self.count, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Periodogram:
    """Spectral power per grid frequency."""
    frequencies: np.ndarray
    power: np.ndarray
    num_points: int
    variance: float

    def __post_init__(self):
        if self.frequencies.shape != self.power.shape:
            raise InvalidInputError("frequencies and power must have equal lengths")

    @property
    def peak_index(self) -> int:
        # np.argmax returns the first maximum, i.e. the lowest frequency on ties
        return int(np.argmax(self.power))

    @property
    def peak_frequency(self) -> float:
        return float(self.frequencies[self.peak_index])

    @property
    def peak_power(self) -> float:
        return float(self.power[self.peak_index])

    def normalized_power(self) -> np.ndarray:
        """Power divided by the variance of the observations."""
        if self.variance <= 0:
            return np.zeros_like(self.power)
        return self.power / self.variance

    def independent_frequencies(self) -> int:
        n = self.num_points
        return max(int(round(-6.362 + 1.193 * n + 0.00098 * n * n)), 1)

    def false_alarm_probability(self) -> np.ndarray:
        """Probability that pure noise yields at least this normalized power."""
        z = self.normalized_power()
        return 1.0 - (1.0 - np.exp(-z)) ** self.independent_frequencies()


def frequency_grid(s: SampledSignal) -> FrequencyGrid:
    """
    Grid for a record of length T = x_N - x_1 with N samples.

    Returns:
        FrequencyGrid with f_min = 0.5/T, f_max = N/T, delta_f = 1/(5T)
    """
    span = s.span
    if not span > 0:
        raise DegenerateInputError(f"condition range is empty (x_1 = x_N = {float(s.x[0])})")
    f_min = 0.5 / span
    f_max = s.n / span
    delta_f = 1.0 / (OVERSAMPLING * span)
    count = int(math.floor((f_max - f_min) / delta_f + _GRID_EPS)) + 1
    return FrequencyGrid(f_min=f_min, f_max=f_max, delta_f=delta_f, count=count)


def _power(x: np.ndarray, y_centered: np.ndarray, omega: float) -> float:
    wx = omega * x
    phi = 0.5 * math.atan2(float(np.sum(np.sin(2.0 * wx))), float(np.sum(np.cos(2.0 * wx))))
    arg = wx - phi
    c = np.cos(arg)
    s = np.sin(arg)
    cc = float(np.dot(c, c))
    ss = float(np.dot(s, s))
    power = 0.0
    if cc >= MIN_DENOMINATOR:
        yc = float(np.dot(y_centered, c))
        power += yc * yc / cc
    if ss >= MIN_DENOMINATOR:
        ys = float(np.dot(y_centered, s))
        power += ys * ys / ss
    return 0.5 * power


def power_at(s: SampledSignal, omega: float, a1_hat: float) -> float:
    """Spectral power at angular frequency omega of the observations centered by a1_hat."""
    if not omega > 0:
        raise InvalidInputError(f"angular frequency must be positive, got {omega}")
    return _power(s.x, s.y - a1_hat, omega)


def periodogram(
    s: SampledSignal,
    a1_hat: Optional[float] = None,
    counter: Optional[WorkCounter] = None,
    grid: Optional[FrequencyGrid] = None,
) -> Periodogram:
    """
    Evaluate the power over the full grid.

    Args:
        s: Sampled signal
        a1_hat: Offset to center with (default: mean of y)
        counter: Optional work tally, incremented by N per frequency
        grid: Grid override (default: frequency_grid(s))

    Returns:
        Periodogram
    """
    if a1_hat is None:
        a1_hat = float(np.mean(s.y))
    if grid is None:
        grid = frequency_grid(s)

    freqs = grid.frequencies()
    y_centered = s.y - a1_hat
    power = np.empty(grid.count, dtype=np.float64)
    for k, f in enumerate(freqs):
        power[k] = _power(s.x, y_centered, TWO_PI * float(f))
    if counter is not None:
        counter.add(grid.count * s.n)

    logger.debug("periodogram over %d frequencies (%.6g..%.6g)", grid.count, grid.f_min, grid.f_max)
    return Periodogram(
        frequencies=freqs,
        power=power,
        num_points=s.n,
        variance=float(np.var(y_centered)),
    )


def peak_frequency(
    s: SampledSignal,
    a1_hat: Optional[float] = None,
    counter: Optional[WorkCounter] = None,
) -> float:
    """Grid frequency with the highest power; ties go to the lower frequency."""
    return periodogram(s, a1_hat, counter=counter).peak_frequency


def estimate_initial_params_ls(s: SampledSignal) -> ModelParams:
    """
    Comparison initializer: periodogram peak for the frequency, offset,
    amplitude and phase estimated as in the crossing-based estimator.
    """
    raw_stats = prepare_stats(s)
    a1_hat = raw_stats.a1_hat
    f_peak = peak_frequency(s, a1_hat)
    a3_hat = TWO_PI * f_peak

    cleaned = remove_spikes(s, a1_hat)
    clean_stats = prepare_stats(cleaned)
    d_star = 1.0 / (2.0 * f_peak)
    a4_hat = estimate_phase(cleaned, clean_stats, a3_hat, d_star, a1_hat=a1_hat)
    return ModelParams(a1=a1_hat, a2=raw_stats.a2_hat, a3=a3_hat, a4=a4_hat)
