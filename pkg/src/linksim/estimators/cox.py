"""Cox proportional-hazards fitter for start-stop data with two 0/1 exposures.

The partial likelihood depends on the covariates only through risk-set and
failure sums, and with dichotomous dose-1/dose-2 indicators there are just
four covariate patterns. Rows are therefore collapsed into per-day pattern
counts once, after which every Newton-Raphson iteration costs O(events).
Efron's tie correction is the default; Breslow is selectable.
"""

from __future__ import annotations

import numpy as np

from .datasets import CountingProcessData
from .inference import CoefEstimate, EstimationError, FitResult, maximize_loglik

# covariate (x1, x2) per pattern code x1 + 2*x2
_PATTERN_X = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float)


def fit_cox(data: CountingProcessData, ties: str = "efron") -> FitResult:
    """Maximize the partial likelihood by Newton-Raphson; Wald inference.

    A coefficient with no exposed person-time is unidentifiable and reported
    as not estimable. A coefficient whose exposure saw no events attains its
    maximum at the boundary: it is reported as a ratio-scale estimate of 0,
    and its exposed person-time drops out of the risk sets (the exact profile
    limit) before the remaining coefficient is fitted. If all events are
    exposed for some coefficient the likelihood diverges to +inf and the
    whole fit is flagged non-converged.
    """
    if ties not in ("efron", "breslow"):
        raise ValueError(f"ties must be 'efron' or 'breslow', got {ties!r}")
    d_total = int(np.sum(data.event))
    if d_total == 0:
        raise EstimationError("cannot fit a Cox model without events")

    horizon = int(data.stop.max())
    width = horizon + 2
    pat = (data.x1.astype(np.int64) + 2 * data.x2.astype(np.int64))

    enter = np.bincount(pat * width + data.start + 1, minlength=4 * width)
    leave = np.bincount(pat * width + data.stop + 1, minlength=4 * width)
    risk = (enter - leave).reshape(4, width).cumsum(axis=1)[:, 1:horizon + 1].astype(float)

    ev = data.event == 1
    deaths = np.bincount(pat[ev] * width + data.stop[ev], minlength=4 * width)
    deaths = deaths.reshape(4, width)[:, 1:horizon + 1].astype(float)

    person_days = np.bincount(pat, weights=(data.stop - data.start).astype(float), minlength=4)
    events_by_pattern = deaths.sum(axis=1)

    coef_state = {}
    for k, patterns in ((1, (1, 3)), (2, (2, 3))):
        exposed_days = person_days[list(patterns)].sum()
        exposed_events = events_by_pattern[list(patterns)].sum()
        if exposed_days == 0.0:
            coef_state[k] = "unidentifiable"
        elif exposed_events == 0.0:
            coef_state[k] = "minus_inf"
        elif exposed_events == d_total:
            coef_state[k] = "plus_inf"
        else:
            coef_state[k] = "active"

    if "plus_inf" in coef_state.values():
        return FitResult(CoefEstimate.undefined(), CoefEstimate.undefined(),
                         converged=False, iterations=0, loglik=float("nan"))

    # -inf separation: the coefficient's exposed person-time leaves the risk sets
    for k, patterns in ((1, (1, 3)), (2, (2, 3))):
        if coef_state[k] == "minus_inf":
            risk[list(patterns), :] = 0.0

    estimates = {k: CoefEstimate.boundary_zero() if coef_state[k] == "minus_inf"
                 else CoefEstimate.undefined() for k in (1, 2)}
    active = [k for k in (1, 2) if coef_state[k] == "active"]
    if not active:
        return FitResult(estimates[1], estimates[2],
                         converged=True, iterations=0, loglik=float("nan"))

    event_days = np.flatnonzero(deaths.sum(axis=0) > 0)
    n_pe = risk[:, event_days]            # (4, E) at-risk counts
    d_pe = deaths[:, event_days]          # (4, E) failure counts
    m_e = d_pe.sum(axis=0)                # ties per event day

    # flatten the Efron inner sum: one entry per (event day, tie rank)
    m_int = m_e.astype(np.int64)
    cum = np.cumsum(m_int)
    day_of = np.repeat(np.arange(len(event_days)), m_int)
    if ties == "efron":
        rank = np.arange(cum[-1]) - np.repeat(cum - m_int, m_int)
        r_frac = rank / np.repeat(m_int, m_int)
    else:
        r_frac = np.zeros(cum[-1])

    x_active = _PATTERN_X[:, [k - 1 for k in active]]   # (4, A)
    death_x_sum = events_by_pattern @ x_active

    def objective(beta):
        w = np.exp(x_active @ beta)                     # (4,)
        s0 = w @ n_pe                                   # (E,)
        s1 = (w[:, None] * x_active).T @ n_pe           # (A, E)
        s0f = w @ d_pe
        s1f = (w[:, None] * x_active).T @ d_pe
        # S2 matches S1 here: x*x^T has the same nonzero entries as x for 0/1
        # covariates except the off-diagonal, handled below via pattern 3.
        s2_off = (w * x_active.prod(axis=1)) @ n_pe if len(active) == 2 else None
        s2f_off = (w * x_active.prod(axis=1)) @ d_pe if len(active) == 2 else None

        s0r = s0[day_of] - r_frac * s0f[day_of]
        s1r = s1[:, day_of] - r_frac * s1f[:, day_of]   # (A, total)
        ll = float(death_x_sum @ beta - np.sum(np.log(s0r)))
        ratio = s1r / s0r
        score = death_x_sum - ratio.sum(axis=1)

        hess = np.empty((len(active), len(active)))
        for i in range(len(active)):
            for j in range(i, len(active)):
                if i == j:
                    s2r = s1r[i]                        # x_i^2 = x_i
                else:
                    s2r = s2_off[day_of] - r_frac * s2f_off[day_of]
                val = -np.sum(s2r / s0r - ratio[i] * ratio[j])
                hess[i, j] = hess[j, i] = val
        return ll, score, hess

    beta, ll, cov, converged, iterations = maximize_loglik(objective, len(active))

    if cov is not None:
        for pos, k in enumerate(active):
            estimates[k] = CoefEstimate.from_fit(float(beta[pos]), float(np.sqrt(cov[pos, pos])))
    return FitResult(estimates[1], estimates[2], converged=converged,
                     iterations=iterations, loglik=ll)
