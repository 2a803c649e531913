"""
Initial Parameter Estimation (FIPEFT)

Derives a starting vector (a1, a2, a3, a4) for the cosine model from
unevenly sampled, noisy data:
- offset and amplitude from the observation mean and range
- spike removal around the estimated mean
- frequency from the distances between mean crossings, with a
  histogram-based separation of spurious and good distances
- phase from a strong extremum, preferably in the inner third of the record

All sequences are 0-based; `ref_idx` and `good_idx` are positions in the
ascending array of distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple
import logging

import numpy as np

from trigfit.errors import DegenerateInputError
from trigfit.signal_model import ModelParams, SampledSignal, wrap_phase
from trigfit.work_counter import WorkCounter

logger = logging.getLogger(__name__)


class DistanceBranch(str, Enum):
    """Which path produced the best distance."""
    SINGLE_CROSSING = "single_crossing"
    MEAN = "mean"
    THREE_STEP = "three_step"


@dataclass(frozen=True)
class SignalStats:
    """Extrema, inner-third extrema and the offset/amplitude estimates."""
    y_max: float
    y_min: float
    idx_max: int
    idx_min: int
    y_max2: float
    y_min2: float
    idx_max2: int
    idx_min2: int
    count_mid: int
    a1_hat: float
    a2_hat: float


@dataclass(frozen=True, eq=False)
class CrossingSet:
    """Interpolated positions where the observations pass the estimated mean."""
    crossings: np.ndarray
    mean_dev: np.ndarray

    @property
    def num_x(self) -> int:
        return int(self.crossings.size)


@dataclass(frozen=True, eq=False)
class DistanceAnalysis:
    """Classification of crossing distances and the resulting best distance."""
    branch: DistanceBranch
    distances: np.ndarray
    sum_distances: float = 0.0
    d_ref: Optional[float] = None
    ref_idx: Optional[int] = None
    d_typ: Optional[float] = None
    num_good: Optional[int] = None
    good_idx: Optional[int] = None
    sum_spurious: float = 0.0
    d_star: Optional[float] = None
    long_distance_flag: bool = False

    @property
    def num_dists(self) -> int:
        return int(self.distances.size)

    @property
    def is_single_crossing(self) -> bool:
        return self.branch == DistanceBranch.SINGLE_CROSSING

    def to_dict(self) -> Dict[str, Any]:
        return {
            "branch": self.branch.value,
            "num_dists": self.num_dists,
            "sum_distances": self.sum_distances,
            "d_ref": self.d_ref,
            "ref_idx": self.ref_idx,
            "d_typ": self.d_typ,
            "num_good": self.num_good,
            "good_idx": self.good_idx,
            "sum_spurious": self.sum_spurious,
            "d_star": self.d_star,
            "long_distance_flag": self.long_distance_flag,
        }


@dataclass(frozen=True, eq=False)
class FipeftResult:
    """Estimated parameters together with every intermediate of the estimation."""
    params: ModelParams
    raw_stats: SignalStats
    clean_stats: SignalStats
    cleaned: SampledSignal
    spikes_removed: int
    crossings: CrossingSet
    analysis: DistanceAnalysis

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a1_hat": self.raw_stats.a1_hat,
            "a2_hat": self.raw_stats.a2_hat,
            "spikes_removed": self.spikes_removed,
            "num_crossings": self.crossings.num_x,
            "count_mid": self.clean_stats.count_mid,
            "distance_analysis": self.analysis.to_dict(),
        }


@dataclass(frozen=True)
class TypicalDistance:
    d_typ: float
    num_good: int
    long_distance_flag: bool
    good_idx: int
    d_ref: float
    ref_idx: int


# Bin search of the reference distance
MIN_BINS = 2
MAX_BINS = 5
BIN_THRESHOLD_INFLATION = 1.001

# Typical-distance factors relative to d_ref
FACTOR_LOW = 2.0
FACTOR_HIGH = 3.1
GOOD_DISTANCE_FACTOR = 2.3

MIN_SPACING = 1e-8
INNER_LOW = 0.333
INNER_HIGH = 0.667
MIN_INNER_POINTS = 10
MIN_INNER_PERIODS = 3.0


# -------------------------
# Offset, amplitude and extrema
# -------------------------


def prepare_stats(s: SampledSignal) -> SignalStats:
    """
    Compute mean, half range, global extrema and inner-third extrema.

    The inner-third extrema start from the middle sample so they are defined
    even when no sample falls inside the window.
    """
    x, y = s.x, s.y
    n = s.n

    idx_max = int(np.argmax(y))
    idx_min = int(np.argmin(y))
    y_max = float(y[idx_max])
    y_min = float(y[idx_min])

    a1_hat = float(np.sum(y)) / n
    # rounding of the mean must not leave the observation range
    a1_hat = min(max(a1_hat, y_min), y_max)
    a2_hat = 0.5 * (y_max - y_min)

    span = float(x[-1] - x[0])
    mid_low = x[0] + span * INNER_LOW
    mid_high = x[0] + span * INNER_HIGH
    inner = (x >= mid_low) & (x <= mid_high)
    inner[0] = False
    inner_idx = np.flatnonzero(inner)

    seed = max(n // 2 - 1, 0)
    idx_max2 = idx_min2 = seed
    if inner_idx.size:
        j = int(inner_idx[np.argmax(y[inner_idx])])
        if y[j] > y[idx_max2]:
            idx_max2 = j
        j = int(inner_idx[np.argmin(y[inner_idx])])
        if y[j] < y[idx_min2]:
            idx_min2 = j

    return SignalStats(
        y_max=y_max,
        y_min=y_min,
        idx_max=idx_max,
        idx_min=idx_min,
        y_max2=float(y[idx_max2]),
        y_min2=float(y[idx_min2]),
        idx_max2=idx_max2,
        idx_min2=idx_min2,
        count_mid=int(inner_idx.size),
        a1_hat=a1_hat,
        a2_hat=a2_hat,
    )


# -------------------------
# Spike removal and crossings
# -------------------------


def remove_spikes(
    s: SampledSignal,
    a1_hat: float,
    counter: Optional[WorkCounter] = None,
) -> SampledSignal:
    """
    Replace isolated samples on the wrong side of the mean.

    A sample is a spike when both neighbours lie on the other side of a1_hat
    and it deviates from a1_hat less than either neighbour; it is set to the
    neighbour closest to a1_hat. Comparisons always use the original values.
    """
    if counter is not None:
        counter.add(s.n)
    if s.n < 3:
        return s

    y = s.y
    prev, cur, nxt = y[:-2], y[1:-1], y[2:]

    closest_above = np.minimum(prev, nxt)
    negative = (prev > a1_hat) & (cur < a1_hat) & (nxt > a1_hat)
    negative &= closest_above - a1_hat > a1_hat - cur

    closest_below = np.maximum(prev, nxt)
    positive = (prev < a1_hat) & (cur > a1_hat) & (nxt < a1_hat)
    positive &= a1_hat - closest_below > cur - a1_hat

    if not (negative.any() or positive.any()):
        return s

    cleaned = y.copy()
    inner = cleaned[1:-1]
    inner[negative] = closest_above[negative]
    inner[positive] = closest_below[positive]
    return s.with_y(cleaned)


def find_crossings(
    s: SampledSignal,
    a1_hat: float,
    counter: Optional[WorkCounter] = None,
) -> CrossingSet:
    """
    Locate where straight lines between neighbouring samples pass a1_hat.

    Only pairs strictly on opposite sides count; a sample equal to a1_hat
    belongs to neither side.
    """
    if counter is not None:
        counter.add(s.n)
    x, y = s.x, s.y

    before, after = y[:-1], y[1:]
    straddles = ((before > a1_hat) & (after < a1_hat)) | ((before < a1_hat) & (after > a1_hat))
    idx = np.flatnonzero(straddles) + 1
    if idx.size == 0:
        empty = np.empty(0, dtype=np.float64)
        return CrossingSet(crossings=empty, mean_dev=empty.copy())

    x_lo, x_hi = x[idx - 1], x[idx]
    y_lo, y_hi = y[idx - 1], y[idx]
    dx = x_hi - x_lo

    crossings = x_hi.copy()
    steep = dx > MIN_SPACING
    slope = (y_hi[steep] - y_lo[steep]) / dx[steep]
    crossings[steep] = x_hi[steep] + (a1_hat - y_hi[steep]) / slope
    crossings = np.clip(crossings, x_lo, x_hi)

    # repeated conditions can yield the same crossing twice; keep the first
    keep = np.concatenate(([True], np.diff(crossings) > 0))
    if not keep.all():
        logger.debug("dropping %d coincident crossings", int(np.count_nonzero(~keep)))
        crossings, idx = crossings[keep], idx[keep]

    # segment k runs from the previous crossing's right sample up to idx[k] - 1
    starts = np.concatenate(([0], idx[:-1]))
    cumulative = np.concatenate(([0.0], np.cumsum(np.abs(y - a1_hat))))
    mean_dev = (cumulative[idx] - cumulative[starts]) / (idx - starts)

    return CrossingSet(crossings=crossings, mean_dev=mean_dev)


# -------------------------
# Distance classification
# -------------------------


def _partition(distances: np.ndarray, num_bins: int):
    """Assign sorted distances to equal-width bins over [0, max]."""
    bin_width = distances[-1] / num_bins
    threshold = BIN_THRESHOLD_INFLATION * bin_width
    first = [-1] * num_bins
    last = [-1] * num_bins
    bin_idx = 0
    for i, d in enumerate(distances):
        while d > threshold and bin_idx < num_bins - 1:
            threshold += bin_width
            bin_idx += 1
        if first[bin_idx] < 0:
            first[bin_idx] = i
        last[bin_idx] = i
    return first, last


def get_reference_distance(distances: Sequence[float]) -> Tuple[float, int]:
    """
    Find a reference distance separating spurious from good distances.

    The range [0, max] is split into 2..5 equal bins until at least two bins
    hold distances whose smallest member is more than half their largest.

    Args:
        distances: Distances sorted ascending (at least two)

    Returns:
        Tuple of (d_ref, ref_idx)
    """
    d = np.asarray(distances, dtype=np.float64)
    n = d.size

    candidates = []
    first = last = []
    for num_bins in range(MIN_BINS, MAX_BINS + 1):
        first, last = _partition(d, num_bins)
        candidates = [
            b for b in range(num_bins)
            if first[b] >= 0 and d[first[b]] * 2 > d[last[b]]
        ]
        logger.debug("%d bins: candidate bins %s", num_bins, candidates)
        if len(candidates) > 1:
            break

    if len(candidates) < 2:
        # a single good distance among short spurious ones
        return float(d[n - 1]), n - 1

    bin1, bin2 = candidates[0], candidates[-1]
    lo, hi = first[bin1], last[bin2]
    ref_idx = lo + (hi - lo + 1) // 2

    if bin2 == bin1 + 1:
        if d[lo] * 2 > d[hi]:
            d_ref = float(np.mean(d[lo:hi + 1]))
        else:
            d_ref = float(d[ref_idx])
    else:
        ref_idx = first[bin2] + (last[bin2] - first[bin2]) // 2
        d_ref = float(d[ref_idx])

    return d_ref, ref_idx


def get_typical_distance(
    distances: Sequence[float],
    d_ref: float,
    ref_idx: int,
) -> TypicalDistance:
    """
    Derive a typical good distance from the reference distance.

    Args:
        distances: Distances sorted ascending
        d_ref: Reference distance
        ref_idx: Position of the reference distance

    Returns:
        TypicalDistance; its d_ref and ref_idx move to the longest distance
        when the reference sits just below a much longer one
    """
    d = np.asarray(distances, dtype=np.float64)
    n = d.size
    d_max = float(d[-1])

    if ref_idx == n - 2 and d_ref * FACTOR_HIGH < d_max:
        # reference sits just below a much longer distance: trust the longest one
        ref_idx = n - 1
        d_ref = d_max

    long_distance_flag = d_ref * FACTOR_LOW < d_max < d_ref * FACTOR_HIGH

    good_idx = 0
    for i in range(ref_idx - 1, -1, -1):
        if d[i] * GOOD_DISTANCE_FACTOR < d_ref:
            good_idx = i + 1
            break

    good = d[good_idx:]
    num_good = int(good.size)
    half = num_good // 2
    if num_good % 2 == 1:
        median = float(good[half])
    else:
        median = 0.5 * float(good[half] + good[half - 1])

    divisor = num_good + 1 if long_distance_flag else num_good
    mean = float(np.sum(good)) / divisor
    d_typ = 0.5 * (median + mean)

    return TypicalDistance(
        d_typ=d_typ,
        num_good=num_good,
        long_distance_flag=long_distance_flag,
        good_idx=good_idx,
        d_ref=d_ref,
        ref_idx=ref_idx,
    )


def select_best_distance(
    crossings: CrossingSet,
    x1: float,
    xn: float,
    counter: Optional[WorkCounter] = None,
) -> DistanceAnalysis:
    """
    Select the distance representing half an oscillation period.

    Args:
        crossings: Crossings of the cleaned signal
        x1, xn: First and last condition of the signal

    Returns:
        DistanceAnalysis; branch SINGLE_CROSSING when no usable distance exists
    """
    empty = np.empty(0, dtype=np.float64)
    if crossings.num_x <= 1:
        return DistanceAnalysis(branch=DistanceBranch.SINGLE_CROSSING, distances=empty)

    raw = np.diff(crossings.crossings)
    if counter is not None:
        counter.add(raw.size)
    sum_distances = float(np.sum(raw))

    if raw.size > 1 and sum_distances < (xn - x1) / 3.0:
        logger.debug("distances cover %.6g of range %.6g: treating as fraction of a wave",
                     sum_distances, xn - x1)
        return DistanceAnalysis(
            branch=DistanceBranch.SINGLE_CROSSING,
            distances=np.sort(raw),
            sum_distances=sum_distances,
        )

    d = np.sort(raw)
    num_dists = d.size

    if d[0] * 2 > d[-1]:
        d_star = sum_distances / num_dists
        return DistanceAnalysis(
            branch=DistanceBranch.MEAN,
            distances=d,
            sum_distances=sum_distances,
            d_typ=d_star,
            num_good=num_dists,
            good_idx=0,
            d_star=d_star,
        )

    d_ref, ref_idx = get_reference_distance(d)
    typical = get_typical_distance(d, d_ref, ref_idx)
    d_typ, num_good, good_idx = typical.d_typ, typical.num_good, typical.good_idx
    d_ref, ref_idx = typical.d_ref, typical.ref_idx
    long_flag = typical.long_distance_flag

    sum_spurious = float(np.sum(d[:good_idx]))
    correction = sum_spurious / num_good
    d_star = d_typ + min(correction, d_typ)

    logger.debug(
        "d_ref=%.6g (idx %d) d_typ=%.6g good=%d spurious_sum=%.6g d*=%.6g",
        d_ref, ref_idx, d_typ, num_good, sum_spurious, d_star,
    )
    return DistanceAnalysis(
        branch=DistanceBranch.THREE_STEP,
        distances=d,
        sum_distances=sum_distances,
        d_ref=d_ref,
        ref_idx=ref_idx,
        d_typ=d_typ,
        num_good=num_good,
        good_idx=good_idx,
        sum_spurious=sum_spurious,
        d_star=d_star,
        long_distance_flag=long_flag,
    )


def estimate_frequency(analysis: DistanceAnalysis, x1: float, xn: float) -> float:
    """Angular frequency pi/d*, or pi/(x_N - x_1) when only a fraction of a wave is seen."""
    if not xn > x1:
        raise DegenerateInputError(f"condition range is empty (x_1={x1}, x_N={xn})")
    if analysis.is_single_crossing or analysis.d_star is None:
        return math.pi / (xn - x1)
    return math.pi / analysis.d_star


# -------------------------
# Phase
# -------------------------


def estimate_phase(
    s: SampledSignal,
    stats: SignalStats,
    a3_hat: float,
    d_star: Optional[float],
    a1_hat: Optional[float] = None,
) -> float:
    """
    Align a cosine peak (or trough) with the strongest extremum.

    Inner-third extrema are used when the record holds at least 10 samples,
    10 of them in the inner third, and about three estimated periods.
    """
    if a1_hat is None:
        a1_hat = stats.a1_hat

    use_inner = False
    if d_star is not None and d_star > 0 and s.n >= MIN_INNER_POINTS:
        periods = s.span / (2.0 * d_star)
        use_inner = stats.count_mid >= MIN_INNER_POINTS and periods >= MIN_INNER_PERIODS

    if use_inner:
        y_hi, idx_hi, y_lo, idx_lo = stats.y_max2, stats.idx_max2, stats.y_min2, stats.idx_min2
    else:
        y_hi, idx_hi, y_lo, idx_lo = stats.y_max, stats.idx_max, stats.y_min, stats.idx_min

    if (y_hi - a1_hat) > (a1_hat - y_lo):
        return wrap_phase(-a3_hat * float(s.x[idx_hi]))
    return wrap_phase(math.pi - a3_hat * float(s.x[idx_lo]))


# -------------------------
# Pipeline
# -------------------------


def _require_span(s: SampledSignal) -> None:
    if not s.span > 0:
        raise DegenerateInputError(
            f"condition range is empty (x_1 = x_N = {float(s.x[0])})"
        )


def estimate_frequency_stage(
    s: SampledSignal,
    a1_hat: float,
    counter: Optional[WorkCounter] = None,
) -> Tuple[float, DistanceAnalysis]:
    """
    Frequency part of the estimator only, given the offset estimate.

    Returns:
        Tuple of (a3_hat, DistanceAnalysis)
    """
    _require_span(s)
    cleaned = remove_spikes(s, a1_hat, counter=counter)
    crossings = find_crossings(cleaned, a1_hat, counter=counter)
    x1, xn = float(s.x[0]), float(s.x[-1])
    analysis = select_best_distance(crossings, x1, xn, counter=counter)
    return estimate_frequency(analysis, x1, xn), analysis


def estimate_with_trace(s: SampledSignal) -> FipeftResult:
    """Run the full estimator and keep every intermediate result."""
    _require_span(s)
    x1, xn = float(s.x[0]), float(s.x[-1])

    raw_stats = prepare_stats(s)
    a1_hat = raw_stats.a1_hat

    cleaned = remove_spikes(s, a1_hat)
    spikes_removed = int(np.count_nonzero(cleaned.y != s.y))
    clean_stats = prepare_stats(cleaned)

    crossings = find_crossings(cleaned, a1_hat)
    analysis = select_best_distance(crossings, x1, xn)
    a3_hat = estimate_frequency(analysis, x1, xn)

    if analysis.is_single_crossing and s.n >= MIN_INNER_POINTS:
        logger.warning(
            "%d crossings in %d samples: assuming the record covers about half a period",
            crossings.num_x, s.n,
        )

    a4_hat = estimate_phase(cleaned, clean_stats, a3_hat, analysis.d_star, a1_hat=a1_hat)

    params = ModelParams(a1=a1_hat, a2=raw_stats.a2_hat, a3=a3_hat, a4=a4_hat)
    logger.debug(
        "estimate %s (spikes=%d, crossings=%d, branch=%s)",
        params, spikes_removed, crossings.num_x, analysis.branch.value,
    )
    return FipeftResult(
        params=params,
        raw_stats=raw_stats,
        clean_stats=clean_stats,
        cleaned=cleaned,
        spikes_removed=spikes_removed,
        crossings=crossings,
        analysis=analysis,
    )


def estimate_initial_params(s: SampledSignal) -> ModelParams:
    """
    Estimate (a1, a2, a3, a4) for the cosine model.

    Args:
        s: Sampled signal with a non-empty condition range

    Returns:
        ModelParams with a2 >= 0, a3 > 0 and a4 in [0, 2*pi)
    """
    return estimate_with_trace(s).params
