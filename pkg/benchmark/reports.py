"""Result records written by the commands: fit reports, benchmark cells, timing rows."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

from trigfit.errors import DataFormatError, InvalidConfigError
from trigfit.signal_model import FitResult, ModelParams

SUCCESS_TOLERANCE = 0.02


class InitMethod(str, Enum):
    """Initial parameter estimators available to fit and bench."""
    FIPEFT = "fipeft"
    LOMBSCARGLE = "lombscargle"


def is_success(f_hat: float, f_true: float, tolerance: float = SUCCESS_TOLERANCE) -> bool:
    """Relative frequency error within tolerance."""
    return math.isfinite(f_hat) and abs(f_hat - f_true) <= tolerance * abs(f_true)


@dataclass(frozen=True)
class FitReport:
    initializer: str
    initial: ModelParams
    refined: ModelParams
    frequency: float
    chi2: float
    iterations: int
    converged: bool
    init_clock_ns: int
    diagnostics: Optional[Dict[str, Any]] = field(default=None, compare=False)

    @classmethod
    def from_fit_result(
        cls,
        initializer: str,
        result: FitResult,
        diagnostics: Optional[Dict[str, Any]] = None,
    ) -> "FitReport":
        return cls(
            initializer=initializer,
            initial=result.initial,
            refined=result.refined,
            frequency=result.frequency,
            chi2=result.chi2,
            iterations=result.iterations,
            converged=result.converged,
            init_clock_ns=result.init_clock_ns,
            diagnostics=diagnostics,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "initializer": self.initializer,
            "initial": self.initial.to_dict(),
            "refined": self.refined.to_dict(),
            "frequency": self.frequency,
            "chi2": self.chi2,
            "iterations": self.iterations,
            "converged": self.converged,
            "init_clock_ns": self.init_clock_ns,
        }
        if self.diagnostics is not None:
            data["diagnostics"] = self.diagnostics
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FitReport":
        try:
            return cls(
                initializer=str(data["initializer"]),
                initial=ModelParams.from_dict(data["initial"]),
                refined=ModelParams.from_dict(data["refined"]),
                frequency=float(data["frequency"]),
                chi2=float(data["chi2"]),
                iterations=int(data["iterations"]),
                converged=bool(data["converged"]),
                init_clock_ns=int(data["init_clock_ns"]),
                diagnostics=data.get("diagnostics"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataFormatError(f"invalid fit report: {e}") from e


@dataclass(frozen=True)
class BenchCell:
    """Aggregate of all trials for one (table, sigma, fs, initializer) combination."""
    table: str
    snr_db: float
    sigma: float
    fs: float
    periods: float
    init_method: str
    seeds: int
    init_median: float
    init_success: float
    fitted_median: float
    fitted_success: float

    def __post_init__(self):
        if self.seeds < 1:
            raise InvalidConfigError(f"a bench cell needs at least one seed, got {self.seeds}")
        for name in ("init_success", "fitted_success"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise InvalidConfigError(f"{name} must lie in [0, 1], got {rate}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class TimingRow:
    """Frequency-stage cost of both estimators at one signal length."""
    n: int
    fipeft_ns: int
    lombscargle_ns: int
    ratio: float
    fipeft_work: int
    lombscargle_work: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
