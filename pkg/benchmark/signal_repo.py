"""File repository for signals, periodograms, landscapes and reports.

All tabular files are CSV with a header row written and read through pandas;
floats are written with 17 significant digits and parsed with round-trip
precision, so a signal written and read back is bitwise identical.

Formats:
- signal:       x,y
- periodogram:  frequency,power,normalized_power,false_alarm_probability,peak
- landscape:    a3,a4,chi2 (one row per grid point)
- fit report:   JSON object (FitReport.to_dict)
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, List, Union

import numpy as np
import pandas as pd

from benchmark.reports import FitReport
from trigfit.errors import DataFormatError
from trigfit.lombscargle import Periodogram
from trigfit.signal_model import SampledSignal

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

SIGNAL_COLUMNS = ["x", "y"]


def _prepare(path: PathLike) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    return p


@dataclass
class SignalRepo:
    float_format: str = "%.17g"

    # -------------------------
    # Signals
    # -------------------------
    def read_signal(self, path: PathLike) -> SampledSignal:
        """
        Parse a two-column x,y CSV into a signal sorted by x.

        Raises:
            DataFormatError: Missing/empty file, wrong header, or a row that
                does not hold two finite numbers (message names the line)
        """
        try:
            df = pd.read_csv(path, float_precision="round_trip", skipinitialspace=True)
        except FileNotFoundError as e:
            raise DataFormatError(f"no such file: {path}") from e
        except pd.errors.EmptyDataError as e:
            raise DataFormatError(f"file is empty: {path}") from e
        except pd.errors.ParserError as e:
            raise DataFormatError(f"malformed CSV {path}: {e}") from e

        columns = [str(c).strip().lower() for c in df.columns]
        if columns != SIGNAL_COLUMNS:
            raise DataFormatError(
                f"expected header 'x,y', found {','.join(map(str, df.columns))!r}",
                line_number=1,
            )
        if df.empty:
            raise DataFormatError(f"no data rows in {path}")

        x = self._numeric_column(df.iloc[:, 0], "x")
        y = self._numeric_column(df.iloc[:, 1], "y")
        return SampledSignal.from_unsorted(x, y)

    @staticmethod
    def _numeric_column(column: pd.Series, name: str) -> np.ndarray:
        values = pd.to_numeric(column, errors="coerce").to_numpy(dtype=np.float64)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            row = int(bad[0])
            raise DataFormatError(
                f"column {name}: {column.iloc[row]!r} is not a finite number",
                # header is line 1
                line_number=row + 2,
            )
        return values

    def write_signal(self, s: SampledSignal, path: PathLike) -> Path:
        p = _prepare(path)
        pd.DataFrame({"x": s.x, "y": s.y}).to_csv(p, index=False, float_format=self.float_format)
        logger.info("Wrote %d samples to %s", s.n, p)
        return p

    # -------------------------
    # Periodogram / landscape
    # -------------------------
    def write_periodogram(self, pg: Periodogram, path: PathLike) -> Path:
        p = _prepare(path)
        peak = np.zeros(pg.frequencies.size, dtype=np.int64)
        peak[pg.peak_index] = 1
        df = pd.DataFrame(
            {
                "frequency": pg.frequencies,
                "power": pg.power,
                "normalized_power": pg.normalized_power(),
                "false_alarm_probability": pg.false_alarm_probability(),
                "peak": peak,
            }
        )
        df.to_csv(p, index=False, float_format=self.float_format)
        logger.info("Wrote periodogram (%d frequencies, peak %.6g) to %s", len(df), pg.peak_frequency, p)
        return p

    def read_periodogram(self, path: PathLike) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip")

    def write_landscape(
        self,
        a3_values: np.ndarray,
        a4_values: np.ndarray,
        chi2: np.ndarray,
        path: PathLike,
    ) -> Path:
        p = _prepare(path)
        a3_grid, a4_grid = np.meshgrid(a3_values, a4_values, indexing="ij")
        df = pd.DataFrame({"a3": a3_grid.ravel(), "a4": a4_grid.ravel(), "chi2": np.asarray(chi2).ravel()})
        df.to_csv(p, index=False, float_format=self.float_format)
        logger.info("Wrote %d landscape points to %s", len(df), p)
        return p

    # -------------------------
    # Reports and tables
    # -------------------------
    def write_report(self, report: FitReport, path: PathLike) -> Path:
        p = _prepare(path)
        p.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
        logger.info("Wrote fit report to %s", p)
        return p

    def read_report(self, path: PathLike) -> FitReport:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise DataFormatError(f"invalid JSON in {path}", line_number=e.lineno) from e
        return FitReport.from_dict(data)

    def write_table(self, rows: Iterable[Any], path: PathLike) -> pd.DataFrame:
        """Write records exposing `to_dict()` as one CSV row each."""
        records: List[dict] = [row.to_dict() for row in rows]
        df = pd.DataFrame.from_records(records)
        df.to_csv(_prepare(path), index=False, float_format=self.float_format)
        logger.info("Wrote %d rows to %s", len(df), path)
        return df
