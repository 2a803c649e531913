"""
Levenberg-Marquardt Refinement

Least-squares refinement of the cosine model parameters:
- damped normal equations solved through the singular value decomposition
- damping initialized once from the largest diagonal element of J^T J,
  decreased after every accepted step and increased after every rejection
- stops when every component of the proposed step is below the tolerance
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import logging

import numpy as np
import scipy.linalg

from trigfit.errors import FitError, InvalidConfigError
from trigfit.signal_model import (
    FitResult,
    ModelParams,
    SampledSignal,
    jacobian,
    normalize_params,
    residuals,
)

logger = logging.getLogger(__name__)

SINGULAR_VALUE_RTOL = 1e-12
DEFAULT_MAX_ITERATIONS = 500


@dataclass(frozen=True)
class LMConfig:
    """Damping schedule and stopping rule."""
    mu_init_scale: float = 0.001
    mu_decrease: float = 0.125
    mu_increase: float = 9.0
    step_tol: float = 1e-13
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        if not self.mu_init_scale > 0:
            raise InvalidConfigError(f"mu_init_scale must be positive, got {self.mu_init_scale}")
        if not 0 < self.mu_decrease < 1 < self.mu_increase:
            raise InvalidConfigError(
                f"need 0 < mu_decrease < 1 < mu_increase, got {self.mu_decrease}, {self.mu_increase}"
            )
        if not self.step_tol > 0:
            raise InvalidConfigError(f"step_tol must be positive, got {self.step_tol}")
        if int(self.max_iterations) < 1:
            raise InvalidConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class LMStep:
    """One proposal: damping used, resulting cost and whether it was kept."""
    iteration: int
    mu: float
    chi2: float
    step_norm: float
    accepted: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iteration": self.iteration,
            "mu": self.mu,
            "chi2": self.chi2,
            "step_norm": self.step_norm,
            "accepted": self.accepted,
        }


@dataclass
class LMTrace:
    initial_chi2: float
    steps: List[LMStep] = field(default_factory=list)

    def record(self, step: LMStep) -> None:
        self.steps.append(step)

    def accepted_chi2(self) -> List[float]:
        return [step.chi2 for step in self.steps if step.accepted]

    @property
    def num_accepted(self) -> int:
        return sum(1 for step in self.steps if step.accepted)

    def to_dicts(self) -> List[Dict[str, Any]]:
        return [step.to_dict() for step in self.steps]


@dataclass(frozen=True)
class LMResult:
    params: ModelParams
    trace: LMTrace = field(repr=False, compare=False)
    chi2: float
    iterations: int
    converged: bool


def solve_damped_step(jtj: np.ndarray, jtr: np.ndarray, mu: float) -> np.ndarray:
    """
    Solve (J^T J + mu I) delta = J^T r through the SVD pseudo-inverse.

    Singular values below 1e-12 times the largest one are treated as zero,
    so rank-deficient systems yield the minimum-norm step.

    Args:
        jtj: Square matrix J^T J
        jtr: Vector J^T r
        mu: Damping factor (>= 0)

    Returns:
        Step vector delta
    """
    jtj = np.asarray(jtj, dtype=np.float64)
    jtr = np.asarray(jtr, dtype=np.float64)
    if mu < 0:
        raise InvalidConfigError(f"damping must be >= 0, got {mu}")

    damped = jtj + mu * np.eye(jtj.shape[0])
    if not np.any(damped):
        return np.zeros_like(jtr)

    u, sv, vt = scipy.linalg.svd(damped)
    if not sv[0] > 0:
        return np.zeros_like(jtr)

    keep = sv > SINGULAR_VALUE_RTOL * sv[0]
    sv_inv = np.zeros_like(sv)
    sv_inv[keep] = 1.0 / sv[keep]
    return vt.T @ (sv_inv * (u.T @ jtr))


def lm_fit(
    s: SampledSignal,
    init: ModelParams,
    cfg: Optional[LMConfig] = None,
) -> LMResult:
    """
    Refine `init` by Levenberg-Marquardt.

    Args:
        s: Sampled signal
        init: Finite starting parameters
        cfg: Damping schedule (default LMConfig())

    Returns:
        LMResult with normalized parameters (a2 >= 0, a4 in [0, 2*pi));
        converged is False when max_iterations was reached first

    Raises:
        FitError: If the starting point is not finite or has a non-finite cost
    """
    if cfg is None:
        cfg = LMConfig()
    if not init.is_finite():
        raise FitError(f"initial parameters are not finite: {init}")

    params = init.as_array()
    r = residuals(init, s)
    chi2 = float(np.dot(r, r))
    if not np.isfinite(chi2):
        raise FitError(f"chi-squared is not finite at the initial parameters {init}")

    trace = LMTrace(initial_chi2=chi2)
    jac = jacobian(init, s.x)
    jtj = jac.T @ jac
    jtr = jac.T @ r
    mu = cfg.mu_init_scale * float(np.max(np.diag(jtj)))

    converged = False
    iterations = 0
    while iterations < cfg.max_iterations:
        iterations += 1
        delta = solve_damped_step(jtj, jtr, mu)
        step_norm = float(np.max(np.abs(delta)))
        if step_norm < cfg.step_tol:
            converged = True
            break

        proposal = params + delta
        candidate_chi2 = float("inf")
        if np.all(np.isfinite(proposal)):
            candidate = ModelParams.from_array(proposal)
            r_new = residuals(candidate, s)
            candidate_chi2 = float(np.dot(r_new, r_new))

        accepted = bool(np.isfinite(candidate_chi2) and candidate_chi2 < chi2)
        trace.record(LMStep(iterations, mu, candidate_chi2, step_norm, accepted))
        logger.debug("iter %d mu=%.3g chi2=%.6g |delta|=%.3g %s",
                     iterations, mu, candidate_chi2, step_norm,
                     "accepted" if accepted else "rejected")

        if accepted:
            params = proposal
            chi2 = candidate_chi2
            r = r_new
            jac = jacobian(candidate, s.x)
            jtj = jac.T @ jac
            jtr = jac.T @ r
            mu *= cfg.mu_decrease
        else:
            mu *= cfg.mu_increase

    if not converged:
        logger.warning("no convergence after %d iterations (chi2=%.6g)", iterations, chi2)

    return LMResult(
        params=normalize_params(ModelParams.from_array(params)),
        trace=trace,
        chi2=chi2,
        iterations=iterations,
        converged=converged,
    )


def fit_signal(
    s: SampledSignal,
    init: ModelParams,
    cfg: Optional[LMConfig] = None,
    init_clock_ns: int = 0,
) -> FitResult:
    """Refine `init` and bundle it with the refined parameters into a FitResult."""
    result = lm_fit(s, init, cfg)
    return FitResult(
        initial=init,
        refined=result.params,
        chi2=result.chi2,
        iterations=result.iterations,
        init_clock_ns=int(init_clock_ns),
        converged=result.converged,
        trace=result.trace,
    )
