"""
Cosine Signal Model

Shared definitions for the model f(x|a) = a1 + a2*cos(a3*x + a4):
- Sampled signal and parameter value types
- Model evaluation, residuals, chi-squared cost and analytic Jacobian
- SNR and phase wrapping helpers
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Sequence, Tuple
import logging

import numpy as np

from trigfit.errors import InvalidInputError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def _frozen_array(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Condition/observation pairs (x_i, y_i), sorted by x."""
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _frozen_array(self.x).reshape(-1)
        y = _frozen_array(self.y).reshape(-1)
        if x.shape != y.shape:
            raise InvalidInputError(
                f"x and y must have the same length ({x.size} != {y.size})"
            )
        if x.size < 2:
            raise InvalidInputError(f"a signal needs at least 2 points, got {x.size}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise InvalidInputError("signal contains non-finite values")
        if np.any(np.diff(x) < 0):
            raise InvalidInputError("conditions x must be sorted in non-decreasing order")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_unsorted(cls, x: Sequence[float], y: Sequence[float]) -> "SampledSignal":
        """Build a signal from pairs in arbitrary order (stable sort by x)."""
        x_arr = np.asarray(x, dtype=np.float64).reshape(-1)
        y_arr = np.asarray(y, dtype=np.float64).reshape(-1)
        if x_arr.shape != y_arr.shape:
            raise InvalidInputError(
                f"x and y must have the same length ({x_arr.size} != {y_arr.size})"
            )
        order = np.argsort(x_arr, kind="stable")
        return cls(x=x_arr[order], y=y_arr[order])

    def __len__(self) -> int:
        return int(self.x.size)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def span(self) -> float:
        """Width of the condition range, x_N - x_1."""
        return float(self.x[-1] - self.x[0])

    def with_y(self, y: Sequence[float]) -> "SampledSignal":
        return SampledSignal(x=self.x, y=np.asarray(y, dtype=np.float64))


@dataclass(frozen=True)
class ModelParams:
    """Parameter vector a = (a1, a2, a3, a4): offset, amplitude, angular frequency, phase."""
    a1: float
    a2: float
    a3: float
    a4: float

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)

    @property
    def frequency(self) -> float:
        return self.a3 / TWO_PI

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=np.float64)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "ModelParams":
        a1, a2, a3, a4 = (float(v) for v in values)
        return cls(a1=a1, a2=a2, a3=a3, a4=a4)

    def to_dict(self) -> Dict[str, float]:
        return {"a1": self.a1, "a2": self.a2, "a3": self.a3, "a4": self.a4}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelParams":
        return cls(a1=data["a1"], a2=data["a2"], a3=data["a3"], a4=data["a4"])


@dataclass(frozen=True)
class FitResult:
    """Initial estimate, refined parameters and fit bookkeeping for one signal."""
    initial: ModelParams
    refined: ModelParams
    chi2: float
    iterations: int
    init_clock_ns: int
    converged: bool = True
    trace: Any = field(default=None, repr=False, compare=False)

    @property
    def frequency(self) -> float:
        return self.refined.frequency


# -------------------------
# Model evaluation
# -------------------------


def evaluate_model(p: ModelParams, x: float) -> float:
    """Evaluate a1 + a2*cos(a3*x + a4) at a single condition."""
    return p.a1 + p.a2 * math.cos(p.a3 * x + p.a4)


def evaluate_many(p: ModelParams, x: np.ndarray) -> np.ndarray:
    """Vectorized model evaluation."""
    x = np.asarray(x, dtype=np.float64)
    return p.a1 + p.a2 * np.cos(p.a3 * x + p.a4)


def residuals(p: ModelParams, s: SampledSignal) -> np.ndarray:
    """Residual vector r_i = y_i - f(x_i|p)."""
    return s.y - evaluate_many(p, s.x)


def chi_squared(p: ModelParams, s: SampledSignal) -> float:
    """Sum of squared residuals."""
    r = residuals(p, s)
    return float(np.dot(r, r))


def jacobian_row(p: ModelParams, x: float) -> Tuple[float, float, float, float]:
    """Partial derivatives of the model with respect to (a1, a2, a3, a4) at x."""
    arg = p.a3 * x + p.a4
    sin_arg = math.sin(arg)
    return (1.0, math.cos(arg), -p.a2 * x * sin_arg, -p.a2 * sin_arg)


def jacobian(p: ModelParams, x: np.ndarray) -> np.ndarray:
    """N x 4 Jacobian matrix, one jacobian_row per condition."""
    x = np.asarray(x, dtype=np.float64)
    arg = p.a3 * x + p.a4
    sin_arg = np.sin(arg)
    return np.column_stack(
        (np.ones_like(x), np.cos(arg), -p.a2 * x * sin_arg, -p.a2 * sin_arg)
    )


def chi_squared_grid(
    s: SampledSignal,
    base: ModelParams,
    a3_values: Sequence[float],
    a4_values: Sequence[float],
) -> np.ndarray:
    """
    Error landscape chi2(a3, a4) with offset and amplitude held at `base`.

    Args:
        s: Sampled signal
        base: Parameters supplying a1 and a2
        a3_values: Angular frequencies (rows)
        a4_values: Phases (columns)

    Returns:
        Matrix of shape (len(a3_values), len(a4_values))
    """
    a3_values = np.asarray(a3_values, dtype=np.float64)
    a4_values = np.asarray(a4_values, dtype=np.float64)
    grid = np.empty((a3_values.size, a4_values.size), dtype=np.float64)
    for row, a3 in enumerate(a3_values):
        model = base.a1 + base.a2 * np.cos(a3 * s.x[None, :] + a4_values[:, None])
        r = s.y[None, :] - model
        grid[row] = np.einsum("ij,ij->i", r, r)
    return grid


# -------------------------
# Helpers
# -------------------------


def snr_db(a2: float, sigma_noise: float) -> float:
    """Signal-to-noise ratio in dB of a cosine with amplitude a2 under Gaussian noise."""
    if not sigma_noise > 0:
        raise InvalidInputError(f"noise standard deviation must be positive, got {sigma_noise}")
    if a2 == 0:
        raise InvalidInputError("amplitude must be non-zero to define an SNR")
    return 10.0 * math.log10(0.5 * a2 * a2 / (sigma_noise * sigma_noise))


def wrap_phase(phi: float) -> float:
    """Map a phase into [0, 2*pi)."""
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative value can round up to exactly 2*pi
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def normalize_params(p: ModelParams) -> ModelParams:
    """Return the equivalent parameters with a2 >= 0, a3 >= 0 and a4 in [0, 2*pi)."""
    a2, a3, a4 = p.a2, p.a3, p.a4
    if a3 < 0:
        # cos(-a3*x + a4) == cos(a3*x - a4)
        a3 = -a3
        a4 = -a4
    if a2 < 0:
        a2 = -a2
        a4 = a4 + math.pi
    return ModelParams(a1=p.a1, a2=a2, a3=a3, a4=wrap_phase(a4))
