"""Self-controlled case series fitter (conditional Poisson / multinomial).

Conditional on a case's total event count, its events are multinomial over
the exposure intervals with probabilities proportional to
length * exp(beta . exposure). Only the per-case interval lengths and event
counts by exposure label enter the likelihood, so cases collapse to a
(cases x 3) pair of arrays before the Newton-Raphson loop.
"""

from __future__ import annotations

import numpy as np

from .datasets import ExposureLabel, SccsCase
from .inference import CoefEstimate, EstimationError, FitResult, maximize_loglik


def _collapse(cases):
    lengths = np.zeros((len(cases), 3))
    counts = np.zeros((len(cases), 3))
    for i, case in enumerate(cases):
        for iv in case.intervals:
            lengths[i, int(iv.label)] += iv.length
            counts[i, int(iv.label)] += iv.events
    return lengths, counts


def fit_sccs(cases: list[SccsCase]) -> FitResult:
    """Maximize the SCCS conditional likelihood; Wald inference.

    Cases whose observation time carries a single exposure label contribute
    no information and drop out. A risk coefficient without any exposed
    observation time among the informative cases is unidentifiable; one whose
    risk intervals saw no events attains its maximum at the boundary and is
    reported as a ratio-scale estimate of 0, with that risk time leaving the
    denominators; if the exposed cases' events all fall inside a risk window
    the likelihood diverges to +inf and the fit is flagged non-converged.
    """
    if not cases:
        raise EstimationError("no cases to fit")
    lengths, counts = _collapse(cases)

    informative = (lengths > 0).sum(axis=1) >= 2
    if not np.any(informative):
        raise EstimationError("no informative cases: every case has a single exposure label")
    lengths = lengths[informative]
    counts = counts[informative]

    coef_state = {}
    for k in (1, 2):
        has_k = lengths[:, k] > 0
        if not np.any(has_k):
            coef_state[k] = "unidentifiable"
        elif counts[:, k].sum() == 0.0:
            coef_state[k] = "minus_inf"
        elif counts[has_k].sum() == counts[has_k, k].sum():
            coef_state[k] = "plus_inf"
        else:
            coef_state[k] = "active"

    if "plus_inf" in coef_state.values():
        return FitResult(CoefEstimate.undefined(), CoefEstimate.undefined(),
                         converged=False, iterations=0, loglik=float("nan"))

    for k in (1, 2):
        if coef_state[k] == "minus_inf":
            lengths[:, k] = 0.0  # exp(beta_k) -> 0: risk-k time leaves the denominators

    estimates = {k: CoefEstimate.boundary_zero() if coef_state[k] == "minus_inf"
                 else CoefEstimate.undefined() for k in (1, 2)}
    active = [k for k in (1, 2) if coef_state[k] == "active"]
    if not active:
        return FitResult(estimates[1], estimates[2],
                         converged=True, iterations=0, loglik=float("nan"))

    n_total = counts.sum(axis=1)
    n_active = counts[:, active]          # (C, A)
    l_active = lengths[:, active]
    l_base = lengths[:, 0]
    exposed_events = n_active.sum(axis=0)

    def objective(beta):
        w = np.exp(beta)                                   # (A,)
        denom = l_base + l_active @ w                      # (C,)
        ll = float(exposed_events @ beta - n_total @ np.log(denom))
        frac = (l_active * w) / denom[:, None]             # (C, A)
        score = exposed_events - n_total @ frac
        hess = -( (n_total[:, None, None] *
                   (np.einsum("ci,cj->cij", frac, -frac)
                    + np.einsum("ci,ij->cij", frac, np.eye(len(active))))).sum(axis=0) )
        return ll, score, hess

    beta, ll, cov, converged, iterations = maximize_loglik(objective, len(active))

    if cov is not None:
        for pos, k in enumerate(active):
            estimates[k] = CoefEstimate.from_fit(float(beta[pos]), float(np.sqrt(cov[pos, pos])))
    return FitResult(estimates[1], estimates[2], converged=converged,
                     iterations=iterations, loglik=ll)
