"""Shared fitting machinery: result containers, Wald tests, Newton-Raphson."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

MAX_ITER = 50
SCORE_TOL = 1e-8
LOGLIK_RTOL = 1e-10
MAX_STEP_HALVINGS = 30


class EstimationError(ValueError):
    """A fitter's preconditions are not met (no events, no informative cases)."""


def wald_p(log_effect: float, se: float) -> float:
    """Two-sided normal p-value for log_effect / se against zero."""
    if not se > 0.0:
        raise ValueError(f"standard error must be > 0, got {se!r}")
    return float(2.0 * stats.norm.sf(abs(log_effect) / se))


@dataclass(frozen=True)
class CoefEstimate:
    """One coefficient on the log scale plus its ratio-scale transform.

    ``estimable`` is False when the data carry no information about the
    coefficient (no exposed person-time) or when the fit failed; the numeric
    fields are then NaN. Exposed time that never sees an event yields the
    boundary maximum instead: a genuine estimate of 0 on the ratio scale
    with an infinite standard error (carrying no evidence against the null).
    """

    log_effect: float
    se: float
    p_value: float
    ratio: float
    estimable: bool

    @classmethod
    def undefined(cls) -> "CoefEstimate":
        return cls(math.nan, math.nan, math.nan, math.nan, False)

    @classmethod
    def boundary_zero(cls) -> "CoefEstimate":
        return cls(log_effect=-math.inf, se=math.inf, p_value=1.0, ratio=0.0,
                   estimable=True)

    @classmethod
    def from_fit(cls, log_effect: float, se: float) -> "CoefEstimate":
        return cls(log_effect=log_effect, se=se, p_value=wald_p(log_effect, se),
                   ratio=math.exp(log_effect), estimable=True)


@dataclass(frozen=True)
class FitResult:
    """Two-coefficient maximum-likelihood fit (dose-1 and dose-2 effects)."""

    dose1: CoefEstimate
    dose2: CoefEstimate
    converged: bool
    iterations: int
    loglik: float

    def coef(self, dose: int) -> CoefEstimate:
        if dose == 1:
            return self.dose1
        if dose == 2:
            return self.dose2
        raise ValueError(f"dose must be 1 or 2, got {dose!r}")


def maximize_loglik(objective, n_params):
    """Newton-Raphson ascent from zero with step halving.

    ``objective(beta)`` must return (loglik, score, hessian) of a concave
    log-likelihood. Returns (beta, loglik, cov, converged, iterations) where
    ``cov`` is the inverse observed information at the optimum (None when
    singular, which also clears the convergence flag).
    """
    beta = np.zeros(n_params)
    ll, score, hess = objective(beta)
    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        if np.max(np.abs(score)) < SCORE_TOL:
            converged = True
            break
        try:
            step = np.linalg.solve(-hess, score)
        except np.linalg.LinAlgError:
            break
        new_beta = beta + step
        new_ll, new_score, new_hess = objective(new_beta)
        halvings = 0
        while (not np.isfinite(new_ll) or new_ll < ll) and halvings < MAX_STEP_HALVINGS:
            step *= 0.5
            new_beta = beta + step
            new_ll, new_score, new_hess = objective(new_beta)
            halvings += 1
        if not np.isfinite(new_ll):
            break
        rel_change = abs(new_ll - ll) / max(1.0, abs(ll))
        beta, ll, score, hess = new_beta, new_ll, new_score, new_hess
        if rel_change < LOGLIK_RTOL:
            converged = True
            break

    cov = None
    if converged:
        try:
            cov = np.linalg.inv(-hess)
        except np.linalg.LinAlgError:
            converged = False
        else:
            if not np.all(np.isfinite(cov)) or np.any(np.diag(cov) <= 0.0):
                cov = None
                converged = False
    return beta, ll, cov, converged, iterations
