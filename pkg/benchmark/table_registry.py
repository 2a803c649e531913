"""Registry of benchmark regimes.

Each table fixes the number of covered periods and crosses the noise rows
(sigma with its SNR label for amplitude 5) with the sampling-frequency
columns. The registry is file-backed (JSON) so new regimes need no code.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple
import json

from trigfit.errors import InvalidConfigError


@dataclass(frozen=True)
class SigmaRow:
    sigma: float
    snr_label: float


@dataclass(frozen=True)
class BenchTable:
    id: str
    periods: float
    sigma_rows: Tuple[SigmaRow, ...]
    fs_values: Tuple[float, ...]
    notes: str = ""

    def cells(self) -> Iterator[Tuple[SigmaRow, float]]:
        """(row, fs) pairs in row-major order."""
        for row in self.sigma_rows:
            for fs in self.fs_values:
                yield row, fs

    @property
    def num_cells(self) -> int:
        return len(self.sigma_rows) * len(self.fs_values)


class TableRegistry:
    def __init__(self, tables: List[BenchTable]):
        self._tables = list(tables)
        self._by_id = {t.id: t for t in tables}

    @staticmethod
    def _default_path() -> Path:
        return Path(__file__).with_name("tables.json")

    @classmethod
    def load_default(cls) -> "TableRegistry":
        return cls.load_from_file(cls._default_path())

    @classmethod
    def load_from_file(cls, path: Path) -> "TableRegistry":
        data = json.loads(Path(path).read_text(encoding="utf-8"))

        sigma_rows = tuple(
            SigmaRow(sigma=float(row["sigma"]), snr_label=float(row["snr_label"]))
            for row in data.get("sigma_rows") or []
        )

        tables: List[BenchTable] = []
        for row in data.get("tables") or []:
            table_id = str(row.get("id") or "").strip()
            periods = float(row.get("periods") or 0.0)
            fs_values = tuple(float(v) for v in row.get("fs") or [])
            if not table_id or periods <= 0 or not fs_values:
                raise InvalidConfigError(f"incomplete table definition in {path}: {row!r}")
            tables.append(
                BenchTable(
                    id=table_id,
                    periods=periods,
                    sigma_rows=sigma_rows,
                    fs_values=fs_values,
                    notes=str(row.get("notes") or "").strip(),
                )
            )

        return cls(tables=tables)

    def list_tables(self) -> List[BenchTable]:
        return list(self._tables)

    def ids(self) -> List[str]:
        return [t.id for t in self._tables]

    def get(self, table_id: str) -> Optional[BenchTable]:
        return self._by_id.get(table_id)

    def require(self, table_id: str) -> BenchTable:
        table = self.get(table_id)
        if table is None:
            raise InvalidConfigError(
                f"unknown table {table_id!r}; expected one of {', '.join(self.ids())}"
            )
        return table

    def snr_labels(self) -> Dict[float, float]:
        if not self._tables:
            return {}
        return {row.sigma: row.snr_label for row in self._tables[0].sigma_rows}
