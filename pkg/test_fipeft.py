"""Unit tests for the crossing-based initial parameter estimator."""

import math

import numpy as np
import pytest

from trigfit.errors import DegenerateInputError
from trigfit.fipeft import (
    CrossingSet,
    DistanceBranch,
    estimate_frequency,
    estimate_frequency_stage,
    estimate_initial_params,
    estimate_phase,
    estimate_with_trace,
    find_crossings,
    get_reference_distance,
    get_typical_distance,
    prepare_stats,
    remove_spikes,
    select_best_distance,
)
from trigfit.signal_model import TWO_PI, ModelParams, SampledSignal, wrap_phase
from trigfit.synth import DEFAULT_PARAMS, SynthConfig, generate
from trigfit.work_counter import WorkCounter


def _signal(y, x=None):
    y = np.asarray(y, dtype=np.float64)
    if x is None:
        x = np.arange(y.size, dtype=np.float64)
    return SampledSignal(x=x, y=y)


def _crossing_set(points):
    points = np.asarray(points, dtype=np.float64)
    return CrossingSet(crossings=points, mean_dev=np.zeros_like(points))


def _angular_distance(a, b):
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


class TestPrepareStats:
    def test_ramp(self):
        s = _signal(np.arange(10.0))
        stats = prepare_stats(s)

        assert stats.a1_hat == pytest.approx(4.5)
        assert stats.a2_hat == pytest.approx(4.5)
        assert (stats.idx_max, stats.idx_min) == (9, 0)
        assert stats.count_mid == 4
        assert (stats.idx_max2, stats.idx_min2) == (6, 3)

    def test_two_points_fall_back_to_first_sample(self):
        stats = prepare_stats(_signal([1.0, 3.0]))

        assert stats.count_mid == 0
        assert stats.idx_max2 == 0
        assert stats.idx_min2 == 0

    def test_offset_stays_within_observations(self):
        stats = prepare_stats(_signal([0.1, 0.1, 0.1]))

        assert stats.y_min <= stats.a1_hat <= stats.y_max
        assert stats.a2_hat == 0.0


class TestRemoveSpikes:
    """Tests for remove_spikes()."""

    def test_negative_spike_replaced(self):
        cleaned = remove_spikes(_signal([1.0, -0.5, 1.0]), 0.0)

        assert cleaned.y.tolist() == [1.0, 1.0, 1.0]

    def test_positive_spike_replaced(self):
        cleaned = remove_spikes(_signal([-1.0, 0.5, -1.0]), 0.0)

        assert cleaned.y.tolist() == [-1.0, -1.0, -1.0]

    def test_large_excursion_kept(self):
        s = _signal([0.3, -0.8, 0.4])

        assert remove_spikes(s, 0.0).y.tolist() == [0.3, -0.8, 0.4]

    def test_uses_original_neighbours(self):
        cleaned = remove_spikes(_signal([1.0, -0.2, 1.0, -0.2, 1.0]), 0.0)

        assert cleaned.y.tolist() == [1.0] * 5

    def test_endpoints_untouched(self):
        s = _signal([-0.1, 1.0, 1.0, -0.1])

        assert remove_spikes(s, 0.0).y.tolist() == [-0.1, 1.0, 1.0, -0.1]

    def test_counter(self):
        counter = WorkCounter()
        remove_spikes(_signal(np.zeros(7)), 0.0, counter=counter)

        assert counter.count == 7


class TestFindCrossings:
    def test_interpolated_positions(self):
        s = _signal([1.0, 2.0, -1.0, -2.0, -3.0, 1.0])
        result = find_crossings(s, 0.0)

        assert result.num_x == 2
        assert result.crossings == pytest.approx([5.0 / 3.0, 4.75])
        assert result.mean_dev == pytest.approx([1.5, 2.0])

    def test_sample_on_mean_is_not_a_crossing(self):
        result = find_crossings(_signal([1.0, 0.0, -1.0]), 0.0)

        assert result.num_x == 0

    def test_coincident_conditions_use_right_sample(self):
        s = _signal([1.0, -1.0], x=np.array([2.0, 2.0 + 1e-9]))
        result = find_crossings(s, 0.0)

        assert result.crossings.tolist() == [2.0 + 1e-9]

    def test_repeated_conditions_give_one_crossing(self):
        s = _signal([1.0, -1.0, 1.0, 1.0], x=np.array([0.0, 0.0, 0.0, 5.0]))
        result = find_crossings(s, 0.0)

        assert result.crossings.tolist() == [0.0]
        assert result.mean_dev == pytest.approx([1.0])

    def test_crossings_lie_within_pairs(self):
        s = generate(SynthConfig(sigma=2.0, seed=8))
        result = find_crossings(s, 10.0)

        assert np.all(np.diff(result.crossings) > 0)
        assert result.crossings[0] >= s.x[0]
        assert result.crossings[-1] <= s.x[-1]


class TestReferenceDistance:
    """Tests for get_reference_distance()."""

    @pytest.mark.parametrize(
        "distances,expected",
        [
            ([0.4, 1.0], (1.0, 1)),
            ([0.1, 0.12, 1.0, 1.05, 1.1], (1.0, 2)),
            ([0.1, 0.3, 0.9, 1.0], (0.9, 2)),
            ([0.9, 1.0, 1.1], (1.1, 2)),
        ],
    )
    def test_reference(self, distances, expected):
        d_ref, ref_idx = get_reference_distance(distances)

        assert d_ref == pytest.approx(expected[0])
        assert ref_idx == expected[1]

    def test_adjacent_compact_bins_are_merged(self):
        d_ref, ref_idx = get_reference_distance([0.45, 0.55, 0.8])

        assert d_ref == pytest.approx(0.6)
        assert ref_idx == 1


class TestTypicalDistance:
    def test_spurious_distances_excluded(self):
        t = get_typical_distance([0.1, 0.12, 1.0, 1.05, 1.1], 1.0, 2)

        assert t.d_typ == pytest.approx(1.05)
        assert t.num_good == 3
        assert t.good_idx == 2
        assert not t.long_distance_flag

    def test_all_good(self):
        t = get_typical_distance([1.0, 1.1, 1.2], 1.1, 1)

        assert t.d_typ == pytest.approx(1.1)
        assert t.num_good == 3
        assert t.good_idx == 0

    def test_reference_moves_to_longest(self):
        t = get_typical_distance([0.2, 0.3, 1.0], 0.3, 1)

        assert (t.d_ref, t.ref_idx) == (1.0, 2)
        assert t.d_typ == pytest.approx(1.0)
        assert t.num_good == 1

    def test_long_distance_widens_mean_divisor(self):
        t = get_typical_distance([0.2, 1.0, 1.0, 2.5], 1.0, 1)

        assert t.long_distance_flag
        assert t.good_idx == 1
        assert t.d_typ == pytest.approx(0.5 * (1.0 + 4.5 / 4))


class TestSelectBestDistance:
    """Tests for select_best_distance() and estimate_frequency()."""

    def test_three_step(self):
        points = np.concatenate(([0.0], np.cumsum([1.0, 0.1, 1.05, 0.12, 1.1])))
        analysis = select_best_distance(_crossing_set(points), 0.0, 3.37)

        assert analysis.branch == DistanceBranch.THREE_STEP
        assert analysis.num_dists == 5
        assert analysis.sum_spurious == pytest.approx(0.22)
        assert analysis.d_star == pytest.approx(1.05 + 0.22 / 3)
        assert analysis.d_typ <= analysis.d_star <= 2 * analysis.d_typ

    def test_similar_distances_use_mean(self):
        analysis = select_best_distance(_crossing_set([0.0, 1.0, 2.01, 3.0]), 0.0, 3.0)

        assert analysis.branch == DistanceBranch.MEAN
        assert analysis.d_star == pytest.approx(1.0)

    def test_single_distance(self):
        analysis = select_best_distance(_crossing_set([2.0, 7.0]), 0.0, 10.0)

        assert analysis.branch == DistanceBranch.MEAN
        assert analysis.d_star == pytest.approx(5.0)

    def test_fraction_of_a_wave(self):
        analysis = select_best_distance(_crossing_set([0.0, 0.1, 0.2]), 0.0, 10.0)

        assert analysis.is_single_crossing
        assert estimate_frequency(analysis, 0.0, 10.0) == pytest.approx(math.pi / 10.0)

    def test_no_crossing(self):
        analysis = select_best_distance(_crossing_set([4.0]), 0.0, 10.0)

        assert analysis.is_single_crossing
        assert analysis.num_dists == 0

    def test_frequency_from_d_star(self):
        analysis = select_best_distance(_crossing_set([2.0, 7.0]), 0.0, 10.0)

        assert estimate_frequency(analysis, 0.0, 10.0) == pytest.approx(math.pi / 5.0)

    def test_empty_range(self):
        analysis = select_best_distance(_crossing_set([]), 1.0, 1.0)

        with pytest.raises(DegenerateInputError):
            estimate_frequency(analysis, 1.0, 1.0)


class TestEstimatePhase:
    def test_positive_peak(self):
        s = _signal([0.0, 0.0, 5.0, 0.0, -1.0])

        assert estimate_phase(s, prepare_stats(s), 1.0, None) == pytest.approx(TWO_PI - 2.0)

    def test_negative_peak(self):
        s = _signal([0.0, 0.0, -5.0, 0.0, 1.0])

        assert estimate_phase(s, prepare_stats(s), 1.0, None) == pytest.approx(math.pi - 2.0)

    def test_inner_extremum_preferred_with_enough_periods(self):
        y = np.zeros(31)
        y[2] = 10.0
        y[15] = 5.0
        s = _signal(y, x=np.linspace(0.0, 30.0, 31))
        stats = prepare_stats(s)

        assert stats.count_mid >= 10
        assert estimate_phase(s, stats, 1.0, 1.0) == pytest.approx(wrap_phase(-15.0))
        assert estimate_phase(s, stats, 1.0, 10.0) == pytest.approx(TWO_PI - 2.0)


class TestPipeline:
    """End-to-end tests of the estimator on synthetic signals."""

    def test_clean_signal(self):
        s = generate(SynthConfig(periods=10, fs=20, seed=2))
        p = estimate_initial_params(s)

        assert p.a1 == pytest.approx(10.0, abs=0.1)
        assert p.a2 == pytest.approx(5.0, abs=0.05)
        assert p.frequency == pytest.approx(0.25, rel=0.01)
        assert _angular_distance(p.a4, DEFAULT_PARAMS.a4) < 0.3

    @pytest.mark.parametrize("periods", [2, 5, 10])
    @pytest.mark.parametrize("fs", [2.0, 5.0, 20.0])
    def test_clean_crossings_follow_half_periods(self, periods, fs):
        half_period = 0.5 / DEFAULT_PARAMS.frequency
        for seed in range(5):
            result = estimate_with_trace(generate(SynthConfig(periods=periods, fs=fs, seed=seed)))

            assert abs(result.crossings.num_x - 2 * periods) <= 1
            assert abs(result.analysis.d_star - half_period) / half_period <= 0.15

    def test_output_ranges(self):
        for seed in range(10):
            p = estimate_initial_params(generate(SynthConfig(sigma=3.0, seed=seed)))

            assert p.a2 >= 0
            assert p.a3 > 0
            assert 0 <= p.a4 < TWO_PI

    def test_half_period_record_uses_full_range(self):
        true = ModelParams(10.0, 5.0, TWO_PI * 0.25, 0.0)
        s = generate(SynthConfig(true_params=true, periods=0.5, fs=20))
        result = estimate_with_trace(s)

        assert result.analysis.branch == DistanceBranch.SINGLE_CROSSING
        assert result.params.a3 == pytest.approx(math.pi / s.span)

    def test_constant_conditions_rejected(self):
        s = _signal([1.0, 2.0, 3.0], x=np.array([1.0, 1.0, 1.0]))

        with pytest.raises(DegenerateInputError):
            estimate_initial_params(s)

    def test_repeated_conditions_fall_back_to_full_range(self):
        s = _signal([1.0, -1.0, 1.0, 1.0], x=np.array([0.0, 0.0, 0.0, 5.0]))
        result = estimate_with_trace(s)

        assert result.analysis.branch == DistanceBranch.SINGLE_CROSSING
        assert result.params.a3 == pytest.approx(math.pi / 5.0)
        assert result.params.is_finite()

    def test_invariant_under_affine_change(self):
        for seed in range(20):
            s = generate(SynthConfig(periods=10, fs=5, sigma=1.0, seed=seed))
            moved = SampledSignal(x=2.5 * s.x, y=s.y + 7.0)
            p = estimate_initial_params(s)
            q = estimate_initial_params(moved)

            assert q.a1 == pytest.approx(p.a1 + 7.0, rel=1e-9)
            assert q.a2 == pytest.approx(p.a2, rel=1e-9)
            assert q.a3 == pytest.approx(p.a3 / 2.5, rel=1e-9)
            assert _angular_distance(q.a4, p.a4) < 1e-9

    def test_three_step_bounds_on_noisy_signals(self):
        three_step = 0
        for seed in range(10):
            s = generate(SynthConfig(sigma=3.5, seed=seed))
            result = estimate_with_trace(s)
            analysis = result.analysis
            if analysis.branch != DistanceBranch.THREE_STEP:
                continue
            three_step += 1

            assert analysis.d_typ <= analysis.d_star <= 2 * analysis.d_typ
            assert result.params.a3 == pytest.approx(math.pi / analysis.d_star)

        assert three_step > 0

    def test_trace_dict(self):
        result = estimate_with_trace(generate(SynthConfig(sigma=1.0, seed=4)))
        data = result.to_dict()

        assert data["num_crossings"] == result.crossings.num_x
        assert data["distance_analysis"]["branch"] == result.analysis.branch.value
        assert data["spikes_removed"] >= 0

    def test_frequency_stage_counts_linear_work(self):
        s = generate(SynthConfig(periods=10, fs=10, sigma=1.0, seed=1))
        counter = WorkCounter()
        a3, analysis = estimate_frequency_stage(s, float(np.mean(s.y)), counter=counter)

        assert a3 > 0
        assert counter.count == 2 * s.n + analysis.num_dists
