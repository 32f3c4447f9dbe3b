"""Record-linkage error injection: missing matches and false matches.

Both operations touch vaccination data only; event histories are never
modified. They return a perturbed copy and leave the input cohort intact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulate import NO_DAY, NO_TYPE, Cohort


@dataclass(frozen=True)
class ErrorSpec:
    """Linkage-error proportions for one scenario."""

    p_missing_match: float
    p_false_match: float

    def __post_init__(self):
        for name in ("p_missing_match", "p_false_match"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p!r}")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def inject_missing_matches(cohort: Cohort, p_missing_match: float, randomness=None) -> Cohort:
    """Drop the vaccination record of round(p * n_vaccinated) vaccinated individuals.

    The affected individuals are drawn uniformly without replacement from the
    vaccinated; they keep their events and appear unvaccinated afterwards.
    """
    if not 0.0 <= p_missing_match <= 1.0:
        raise ValueError(f"p_missing_match must be in [0, 1], got {p_missing_match!r}")
    rng = np.random.default_rng(randomness)
    out = cohort.copy()
    vaccinated = np.flatnonzero(out.dose1_day >= 0)
    k = _round_half_up(p_missing_match * vaccinated.size)
    if k:
        chosen = rng.choice(vaccinated, size=k, replace=False)
        out.dose1_day[chosen] = NO_DAY
        out.dose2_day[chosen] = NO_DAY
        out.vaccine_type[chosen] = NO_TYPE
    return out


def apply_errors(cohort: Cohort, spec: ErrorSpec, randomness=None) -> Cohort:
    """Apply both error types: missing matches first, then false matches.

    The order is part of the contract: a swap can move a record that would
    otherwise have been deleted.
    """
    rng = np.random.default_rng(randomness)
    out = inject_missing_matches(cohort, spec.p_missing_match, rng)
    return inject_false_matches(out, spec.p_false_match, rng)


def inject_false_matches(cohort: Cohort, p_false_match: float, randomness=None) -> Cohort:
    """Swap vaccination records within floor(p * n / 2) disjoint random pairs.

    ``p`` counts affected individuals, so each selected pair contributes two.
    Swapping possibly-absent records preserves the multiset of vaccination
    records over the cohort; events stay with their individuals.
    """
    if not 0.0 <= p_false_match <= 1.0:
        raise ValueError(f"p_false_match must be in [0, 1], got {p_false_match!r}")
    rng = np.random.default_rng(randomness)
    out = cohort.copy()
    n_pairs = int(math.floor(p_false_match * len(out) / 2.0))
    if n_pairs:
        chosen = rng.choice(len(out), size=2 * n_pairs, replace=False)
        a, b = chosen[:n_pairs], chosen[n_pairs:]
        for arr in (out.dose1_day, out.dose2_day, out.vaccine_type):
            arr[a], arr[b] = arr[b].copy(), arr[a].copy()
    return out
