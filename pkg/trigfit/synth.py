"""
Synthetic Signal Generator

Produces unevenly sampled, noisy cosine signals for validation runs.
Sampling is a jittered uniform grid; randomness comes from numpy's
counter-based Philox generator so a config always yields the same signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import logging

import numpy as np

from trigfit.errors import InvalidConfigError
from trigfit.signal_model import ModelParams, SampledSignal, TWO_PI, evaluate_many

logger = logging.getLogger(__name__)

# Parameters of the validation test function 10 + 5*cos(2*pi*0.25*x + 1)
DEFAULT_PARAMS = ModelParams(a1=10.0, a2=5.0, a3=TWO_PI * 0.25, a4=1.0)
DEFAULT_JITTER = 0.3

_MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class SynthConfig:
    """Recipe for one synthetic signal."""
    true_params: ModelParams = DEFAULT_PARAMS
    periods: float = 10.0
    fs: float = 20.0
    sigma: float = 0.0
    seed: int = 0
    jitter: float = DEFAULT_JITTER
    x0: float = 0.0

    def __post_init__(self):
        if not self.true_params.is_finite():
            raise InvalidConfigError("true parameters must be finite")
        if not self.true_params.a3 > 0:
            raise InvalidConfigError(f"angular frequency must be positive, got {self.true_params.a3}")
        if not self.periods > 0:
            raise InvalidConfigError(f"periods must be positive, got {self.periods}")
        if not self.fs > 0:
            raise InvalidConfigError(f"sampling frequency must be positive, got {self.fs}")
        if not self.sigma >= 0:
            raise InvalidConfigError(f"noise sigma must be >= 0, got {self.sigma}")
        if not 0 <= self.jitter < 0.5:
            raise InvalidConfigError(f"jitter must lie in [0, 0.5), got {self.jitter}")
        if not 0 <= int(self.seed) < _MAX_SEED:
            raise InvalidConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def frequency(self) -> float:
        return self.true_params.frequency

    @property
    def num_points(self) -> int:
        return int(round(self.periods * self.fs / self.frequency))

    @property
    def duration(self) -> float:
        return self.periods / self.frequency


def sigma_for_snr(a2: float, snr_db: float) -> float:
    """Noise standard deviation giving the requested SNR for amplitude a2."""
    if a2 == 0:
        raise InvalidConfigError("amplitude must be non-zero to define an SNR")
    return math.sqrt(0.5 * a2 * a2 / 10.0 ** (snr_db / 10.0))


def make_rng(seed: int) -> np.random.Generator:
    """Named, platform-independent generator used for all synthetic draws."""
    return np.random.Generator(np.random.Philox(int(seed)))


def generate(cfg: SynthConfig) -> SampledSignal:
    """
    Draw a jittered, noisy sampling of the configured cosine.

    Args:
        cfg: Synthesis recipe

    Returns:
        SampledSignal sorted by x
    """
    n = cfg.num_points
    if n < 2:
        raise InvalidConfigError(
            f"config yields {n} samples (periods={cfg.periods}, fs={cfg.fs}); need at least 2"
        )

    rng = make_rng(cfg.seed)
    offsets = rng.uniform(-cfg.jitter, cfg.jitter, size=n)
    x = cfg.x0 + (np.arange(n, dtype=np.float64) + offsets) / cfg.fs
    x.sort()

    y = evaluate_many(cfg.true_params, x)
    if cfg.sigma > 0:
        y = y + cfg.sigma * rng.standard_normal(n)

    logger.debug("generated %d samples (sigma=%g, seed=%d)", n, cfg.sigma, cfg.seed)
    return SampledSignal(x=x, y=y)
