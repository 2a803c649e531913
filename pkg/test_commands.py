"""
Unit tests for the benchmark and command layer: file I/O, settings,
table registry, benchmark runner, timing and the CLI entry point.

These tests write only to pytest's tmp_path.
"""

import json
import logging

import numpy as np
import pandas as pd
import pytest

import run_trigfit
import settings
from benchmark import commands
from benchmark.bench_runner import BenchRunner, TrialTask, run_trial, trial_seed
from benchmark.reports import BenchCell, FitReport, InitMethod, is_success
from benchmark.signal_repo import SignalRepo
from benchmark.table_registry import TableRegistry
from benchmark.timing import TimingRunner, signal_for_length
from trigfit.errors import DataFormatError, InvalidConfigError
from trigfit.lmfit import fit_signal
from trigfit.synth import DEFAULT_PARAMS, SynthConfig, generate


@pytest.fixture
def repo():
    return SignalRepo()


@pytest.fixture
def clean_csv(tmp_path, repo):
    path = tmp_path / "clean.csv"
    repo.write_signal(generate(SynthConfig(periods=10, fs=20, seed=1)), path)
    return path


@pytest.fixture
def small_registry(tmp_path):
    path = tmp_path / "tables.json"
    path.write_text(
        json.dumps(
            {
                "sigma_rows": [{"sigma": 0.0, "snr_label": 99.0}],
                "tables": [{"id": "tiny", "periods": 10, "fs": [10, 20], "notes": "noise-free"}],
            }
        ),
        encoding="utf-8",
    )
    return TableRegistry.load_from_file(path)


class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("TRIGFIT_BENCH_WORKERS", "TRIGFIT_BENCH_SEEDS", "TRIGFIT_MAX_ITERATIONS"):
            monkeypatch.delenv(name, raising=False)

        assert settings.get_bench_workers() == 1
        assert settings.get_bench_seeds() == 20
        assert settings.get_max_iterations() == 500

    def test_override(self, monkeypatch):
        monkeypatch.setenv("TRIGFIT_BENCH_SEEDS", " 50 ")

        assert settings.get_bench_seeds() == 50

    @pytest.mark.parametrize("raw", ["abc", "0", "-3"])
    def test_invalid_values(self, monkeypatch, raw):
        monkeypatch.setenv("TRIGFIT_BENCH_WORKERS", raw)

        with pytest.raises(InvalidConfigError):
            settings.get_bench_workers()

    def test_log_level(self, monkeypatch):
        monkeypatch.delenv("TRIGFIT_LOG_LEVEL", raising=False)

        assert settings.get_log_level() == logging.INFO
        assert settings.get_log_level("debug") == logging.DEBUG
        with pytest.raises(InvalidConfigError):
            settings.get_log_level("LOUD")


class TestSignalRepo:
    """Tests for SignalRepo file formats."""

    def test_signal_round_trip_is_exact(self, tmp_path, repo):
        s = generate(SynthConfig(sigma=1.3, seed=9))
        path = repo.write_signal(s, tmp_path / "nested" / "s.csv")
        back = repo.read_signal(path)

        assert np.array_equal(back.x, s.x)
        assert np.array_equal(back.y, s.y)

    def test_unsorted_rows_are_sorted(self, tmp_path, repo):
        path = tmp_path / "unsorted.csv"
        path.write_text("x,y\n2,20\n0,0\n1,10\n", encoding="utf-8")
        s = repo.read_signal(path)

        assert s.x.tolist() == [0.0, 1.0, 2.0]
        assert s.y.tolist() == [0.0, 10.0, 20.0]

    def test_bad_value_names_line(self, tmp_path, repo):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n0,1\n1,abc\n", encoding="utf-8")

        with pytest.raises(DataFormatError) as excinfo:
            repo.read_signal(path)
        assert excinfo.value.line_number == 3
        assert "line 3" in excinfo.value.message

    def test_wrong_header(self, tmp_path, repo):
        path = tmp_path / "header.csv"
        path.write_text("t,value\n0,1\n1,2\n", encoding="utf-8")

        with pytest.raises(DataFormatError) as excinfo:
            repo.read_signal(path)
        assert excinfo.value.line_number == 1

    @pytest.mark.parametrize("content", ["", "x,y\n"])
    def test_empty_files(self, tmp_path, repo, content):
        path = tmp_path / "empty.csv"
        path.write_text(content, encoding="utf-8")

        with pytest.raises(DataFormatError):
            repo.read_signal(path)

    def test_missing_file(self, tmp_path, repo):
        with pytest.raises(DataFormatError):
            repo.read_signal(tmp_path / "missing.csv")

    def test_report_round_trip(self, tmp_path, repo):
        s = generate(SynthConfig(seed=2))
        result = fit_signal(s, DEFAULT_PARAMS, init_clock_ns=10)
        report = FitReport.from_fit_result("fipeft", result, {"note": "x"})
        path = repo.write_report(report, tmp_path / "report.json")

        back = repo.read_report(path)
        assert back == report
        assert back.diagnostics == {"note": "x"}

    def test_incomplete_report(self):
        with pytest.raises(DataFormatError):
            FitReport.from_dict({"initializer": "fipeft"})


class TestReports:
    def test_is_success(self):
        assert is_success(0.2549, 0.25)
        assert not is_success(0.2551, 0.25)
        assert not is_success(float("nan"), 0.25)

    def test_bench_cell_validation(self):
        kwargs = dict(
            table="p10", snr_db=23.0, sigma=0.25, fs=20.0, periods=10.0,
            init_method="fipeft", seeds=5, init_median=0.25,
            init_success=1.0, fitted_median=0.25, fitted_success=1.0,
        )
        assert BenchCell(**kwargs).to_dict()["seeds"] == 5

        with pytest.raises(InvalidConfigError):
            BenchCell(**{**kwargs, "seeds": 0})
        with pytest.raises(InvalidConfigError):
            BenchCell(**{**kwargs, "fitted_success": 1.5})


class TestTableRegistry:
    def test_default_tables(self):
        registry = TableRegistry.load_default()

        assert registry.ids() == ["p10", "p5", "p2", "p1", "p05"]
        p10 = registry.require("p10")
        assert p10.periods == 10
        assert p10.fs_values == (2.0, 2.5, 5.0, 10.0, 20.0, 40.0)
        assert p10.num_cells == 48
        assert registry.require("p05").fs_values[0] == 2.5
        assert registry.snr_labels()[3.5] == 0.09

    def test_cells_are_row_major(self):
        table = TableRegistry.load_default().require("p5")
        cells = list(table.cells())

        assert cells[0] == (table.sigma_rows[0], 2.0)
        assert cells[1] == (table.sigma_rows[0], 2.5)
        assert cells[6] == (table.sigma_rows[1], 2.0)

    def test_unknown_table(self):
        with pytest.raises(InvalidConfigError):
            TableRegistry.load_default().require("p3")

    def test_incomplete_definition(self, tmp_path):
        path = tmp_path / "tables.json"
        path.write_text(json.dumps({"sigma_rows": [], "tables": [{"id": "x", "periods": 0}]}))

        with pytest.raises(InvalidConfigError):
            TableRegistry.load_from_file(path)


class TestBenchRunner:
    """Tests for BenchRunner on a small noise-free table."""

    def test_trial_seeds_differ(self):
        seeds = {trial_seed(0, c, t) for c in range(3) for t in range(3)}

        assert len(seeds) == 9
        assert trial_seed(0, 1, 2) == trial_seed(0, 1, 2)

    def test_noise_free_table(self, small_registry):
        runner = BenchRunner(registry=small_registry)
        cells = runner.run("tiny", 3, [InitMethod.FIPEFT, InitMethod.LOMBSCARGLE])

        assert [(c.fs, c.init_method) for c in cells] == [
            (10.0, "fipeft"), (10.0, "lombscargle"), (20.0, "fipeft"), (20.0, "lombscargle"),
        ]
        for cell in cells:
            assert cell.snr_db == 99.0
            assert cell.fitted_success == 1.0
            assert cell.init_success == 1.0
            assert cell.fitted_median == pytest.approx(0.25, abs=1e-6)

    def test_worker_count_does_not_change_results(self, small_registry):
        serial = BenchRunner(registry=small_registry, workers=1).run("tiny", 2)
        pooled = BenchRunner(registry=small_registry, workers=2).run("tiny", 2)

        assert serial == pooled

    def test_run_trial_on_clean_signal(self):
        task = TrialTask(
            cell_index=0, trial=0, sigma=0.0, fs=20.0, periods=10.0,
            seed=1, methods=("fipeft",), max_iterations=500,
        )
        outcome = run_trial(task)

        assert outcome.frequencies["fipeft"][1] == pytest.approx(0.25, abs=1e-6)

    def test_invalid_arguments(self, small_registry):
        with pytest.raises(InvalidConfigError):
            BenchRunner(registry=small_registry, workers=0)
        with pytest.raises(InvalidConfigError):
            BenchRunner(registry=small_registry).run("tiny", 0)
        with pytest.raises(InvalidConfigError):
            BenchRunner(registry=small_registry).run("missing", 1)


class TestTiming:
    def test_signal_length(self):
        s = signal_for_length(160, 0.5, seed=0)

        assert s.n == 160
        assert s.span == pytest.approx(40.0, abs=0.5)

    def test_work_growth(self):
        rows = TimingRunner(lengths=[40, 80], repeats=1, sigmas=[0.5]).run()
        small, large = rows

        assert (small.n, large.n) == (40, 80)
        assert small.lombscargle_work == 7920
        assert large.lombscargle_work == 31840
        assert 1.5 <= large.fipeft_work / small.fipeft_work <= 2.5
        assert small.fipeft_ns > 0 and small.lombscargle_ns > 0

    def test_invalid_config(self):
        with pytest.raises(InvalidConfigError):
            TimingRunner(repeats=0)
        with pytest.raises(InvalidConfigError):
            TimingRunner(lengths=[1])


class TestCommands:
    """Exit codes and outputs of the cmd_* functions."""

    def test_synth(self, tmp_path, repo):
        out = tmp_path / "s.csv"

        assert commands.cmd_synth(str(out), periods=5, fs=10, snr_db=10.0, seed=3) == 0
        assert repo.read_signal(out).n == 200

    def test_fit_clean_signal(self, tmp_path, clean_csv, repo):
        out = tmp_path / "fit.json"

        assert commands.cmd_fit(str(clean_csv), out_path=str(out)) == 0
        report = repo.read_report(out)
        assert report.converged
        assert report.initializer == "fipeft"
        assert report.frequency == pytest.approx(0.25, abs=1e-6)
        assert report.diagnostics is None

    def test_fit_with_trace(self, tmp_path, clean_csv):
        out = tmp_path / "fit.json"

        assert commands.cmd_fit(str(clean_csv), out_path=str(out), trace=True) == 0
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["diagnostics"]["distance_analysis"]["branch"] == "mean"
        assert data["diagnostics"]["lm_steps"]

    def test_fit_with_periodogram_init(self, clean_csv):
        assert commands.cmd_fit(str(clean_csv), init_method="lombscargle") == 0

    def test_fit_non_convergence(self, tmp_path, repo):
        noisy = tmp_path / "noisy.csv"
        out = tmp_path / "fit.json"
        repo.write_signal(generate(SynthConfig(sigma=2.0, seed=4)), noisy)

        assert commands.cmd_fit(str(noisy), out_path=str(out), max_iterations=1) == 3
        assert not repo.read_report(out).converged

    def test_fit_errors(self, tmp_path, clean_csv):
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y\n0,1\n1,abc\n", encoding="utf-8")

        assert commands.cmd_fit(str(tmp_path / "missing.csv")) == 2
        assert commands.cmd_fit(str(bad)) == 2
        assert commands.cmd_fit(str(clean_csv), init_method="fft") == 1

    def test_fit_degenerate_conditions(self, tmp_path):
        path = tmp_path / "flat.csv"
        path.write_text("x,y\n1,0\n1,1\n1,2\n", encoding="utf-8")

        assert commands.cmd_fit(str(path)) == 2

    def test_fit_repeated_conditions(self, tmp_path):
        path = tmp_path / "repeated.csv"
        path.write_text("x,y\n0,1\n0,-1\n0,1\n5,1\n", encoding="utf-8")

        assert commands.cmd_fit(str(path)) in (0, 3)

    def test_periodogram(self, tmp_path, clean_csv, repo):
        out = tmp_path / "pg.csv"

        assert commands.cmd_periodogram(str(clean_csv), str(out)) == 0
        df = repo.read_periodogram(out)
        assert list(df.columns) == [
            "frequency", "power", "normalized_power", "false_alarm_probability", "peak",
        ]
        assert int(df["peak"].sum()) == 1
        assert df.loc[df["peak"] == 1, "frequency"].iloc[0] == pytest.approx(0.25, abs=0.005)

    def test_landscape(self, tmp_path, clean_csv):
        out = tmp_path / "land.csv"

        assert commands.cmd_landscape(str(clean_csv), str(out), a3_steps=11, a4_steps=8) == 0
        df = pd.read_csv(out)
        assert len(df) == 88
        assert df["chi2"].min() >= 0

    def test_landscape_invalid_grid(self, tmp_path, clean_csv):
        out = tmp_path / "land.csv"

        assert commands.cmd_landscape(str(clean_csv), str(out), a3_steps=1) == 1
        assert commands.cmd_landscape(str(clean_csv), str(out), a3_min=2.0, a3_max=1.0) == 1

    def test_bench_is_deterministic(self, tmp_path, small_registry):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"

        assert commands.cmd_bench("tiny", str(first), seeds=2, workers=1, registry=small_registry) == 0
        assert commands.cmd_bench("tiny", str(second), seeds=2, workers=1, registry=small_registry) == 0
        assert first.read_text() == second.read_text()
        df = pd.read_csv(first)
        assert (df["fitted_success"] == 1.0).all()

    def test_bench_unknown_table(self, tmp_path, small_registry):
        out = tmp_path / "b.csv"

        assert commands.cmd_bench("p10", str(out), seeds=1, registry=small_registry) == 1

    def test_timing(self, tmp_path):
        out = tmp_path / "timing.csv"

        assert commands.cmd_timing(str(out), lengths=[20, 40], repeats=1) == 0
        df = pd.read_csv(out)
        assert df["n"].tolist() == [20, 40]
        assert (df["lombscargle_work"] > df["fipeft_work"]).all()


class TestCli:
    def test_usage_error_exits_with_one(self):
        with pytest.raises(SystemExit) as excinfo:
            run_trigfit.main(["fit"])
        assert excinfo.value.code == 1

    def test_bad_log_level(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            run_trigfit.main(["--log-level", "LOUD", "synth", "--out", str(tmp_path / "s.csv")])
        assert excinfo.value.code == 1

    def test_synth_then_fit(self, tmp_path):
        signal = tmp_path / "s.csv"
        report = tmp_path / "r.json"

        assert run_trigfit.main(["synth", "--out", str(signal), "--periods", "4", "--seed", "5"]) == 0
        assert run_trigfit.main(["fit", "--in", str(signal), "--out", str(report), "--trace"]) == 0
        assert json.loads(report.read_text())["converged"] is True

    def test_bench_accepts_repeated_init(self):
        args = run_trigfit.build_parser().parse_args(
            ["bench", "--table", "p2", "--out", "o.csv", "--init", "fipeft", "--init", "lombscargle"]
        )

        assert args.init_methods == ["fipeft", "lombscargle"]
