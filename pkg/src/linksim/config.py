"""Run configuration: simulation parameters and the first-dose uptake curve."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

DAYS_PER_YEAR = 365


class VaccineType(IntEnum):
    BIONTECH = 0
    MODERNA = 1
    ASTRAZENECA = 2
    JANSSEN = 3

    @property
    def is_mrna(self) -> bool:
        return self in (VaccineType.BIONTECH, VaccineType.MODERNA)


# Observed German first-dose type mix (mid-2021). The published proportions sum
# to 0.99999, so they are renormalized to sum to 1 exactly.
_RAW_TYPE_PROPS = (0.6777, 0.08083, 0.1993, 0.04216)
DEFAULT_VACCINE_TYPE_DIST = tuple(p / sum(_RAW_TYPE_PROPS) for p in _RAW_TYPE_PROPS)

# Default logistic-ramp uptake curve: daily probability that a still-unvaccinated
# person receives a first dose, indexed by days since the campaign start.
# Shape mimics the German 2021 rollout (slow start, ramp through spring). The
# parameters were calibrated at full study scale (n_sim = 770,000) so the
# dose-1 analyses operate near 80-85% power at alpha = 0.05 with no linkage
# errors, which pins both the amplitude (~61% of the population vaccinated by
# day 550) and the timing (window person-time spread broadly over the campaign,
# keeping risk-set exposure shares stable). A stand-in for the unpublished
# daily registry estimates.
DEFAULT_CURVE_MIDPOINT = 115.0
DEFAULT_CURVE_SCALE = 26.0
DEFAULT_CURVE_PEAK = 0.013397


def default_first_dose_curve(n_campaign_days: int) -> np.ndarray:
    """Logistic-ramp daily first-dose probabilities for the given span."""
    if n_campaign_days < 1:
        raise ValueError("n_campaign_days must be >= 1")
    tau = np.arange(n_campaign_days, dtype=float)
    return DEFAULT_CURVE_PEAK / (1.0 + np.exp(-(tau - DEFAULT_CURVE_MIDPOINT) / DEFAULT_CURVE_SCALE))


def load_first_dose_curve(path) -> np.ndarray:
    """Read a first-dose curve file: CSV with header ``day,probability``.

    Days must be contiguous from 0 and probabilities within [0, 1].
    """
    days, probs = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"empty first-dose curve file: {path}")
        if [c.strip().lower() for c in header] != ["day", "probability"]:
            raise ValueError(f"expected header 'day,probability' in {path}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {len(row)}")
            days.append(int(row[0]))
            probs.append(float(row[1]))
    if not days:
        raise ValueError(f"first-dose curve file has no data rows: {path}")
    for i, day in enumerate(days):
        if day != i:
            raise ValueError(f"{path}: days must be contiguous from 0, found day {day} at position {i}")
    curve = np.asarray(probs, dtype=float)
    if np.any((curve < 0.0) | (curve > 1.0)):
        bad = curve[(curve < 0.0) | (curve > 1.0)][0]
        raise ValueError(f"{path}: probability {bad} outside [0, 1]")
    return curve


def write_first_dose_curve(path, curve) -> None:
    """Write a curve in the ``day,probability`` file format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "probability"])
        for day, p in enumerate(np.asarray(curve, dtype=float)):
            writer.writerow([day, repr(float(p))])


@dataclass(frozen=True, eq=False)
class SimConfig:
    """All data-generation parameters for one simulated cohort.

    Defaults reproduce the acute-myocarditis study setting: 550 simulated
    days, campaign opening on day 366, a 21-day post-dose risk window with
    relative risk 3.24 for mRNA vaccines, 42 days of post-event immunity,
    and an annual baseline event probability of 0.00016.
    """

    n_sim: int
    n_days: int = 550
    campaign_start_day: int = 366
    d_risk: int = 21
    d_immune: int = 42
    rr_vacc: float = 3.24
    p_event_year: float = 0.00016
    first_dose_curve: np.ndarray | None = None
    vaccine_type_dist: tuple[float, float, float, float] = DEFAULT_VACCINE_TYPE_DIST
    second_dose_gap_mrna: int = 42
    second_dose_gap_az: int = 84

    def __post_init__(self):
        if self.n_sim < 1:
            raise ValueError("n_sim must be >= 1")
        if self.campaign_start_day < 1:
            raise ValueError("campaign_start_day must be >= 1")
        if self.n_days < self.campaign_start_day:
            raise ValueError("n_days must be >= campaign_start_day")
        if self.d_risk < 0 or self.d_immune < 0:
            raise ValueError("d_risk and d_immune must be >= 0")
        if not self.rr_vacc > 0:
            raise ValueError("rr_vacc must be > 0")
        if not 0.0 <= self.p_event_year <= 1.0:
            raise ValueError("p_event_year must be in [0, 1]")
        if self.second_dose_gap_mrna < 1 or self.second_dose_gap_az < 1:
            raise ValueError("second-dose gaps must be >= 1 day")

        dist = np.asarray(self.vaccine_type_dist, dtype=float)
        if dist.shape != (4,):
            raise ValueError("vaccine_type_dist needs one probability per vaccine type")
        if np.any(dist < 0.0) or np.any(dist > 1.0):
            raise ValueError("vaccine_type_dist entries must be in [0, 1]")
        if abs(dist.sum() - 1.0) > 1e-12:
            raise ValueError(f"vaccine_type_dist must sum to 1, got {dist.sum()!r}")
        object.__setattr__(self, "vaccine_type_dist", tuple(float(p) for p in dist))

        n_campaign_days = self.n_days - self.campaign_start_day + 1
        curve = self.first_dose_curve
        if curve is None:
            curve = default_first_dose_curve(n_campaign_days)
        curve = np.asarray(curve, dtype=float)
        if curve.ndim != 1:
            raise ValueError("first_dose_curve must be one-dimensional")
        if curve.size < n_campaign_days:
            raise ValueError(
                f"first_dose_curve covers {curve.size} days but the campaign spans "
                f"{n_campaign_days} (days {self.campaign_start_day}..{self.n_days})"
            )
        if np.any((curve < 0.0) | (curve > 1.0)):
            raise ValueError("first_dose_curve probabilities must be in [0, 1]")
        curve = curve.copy()
        curve.flags.writeable = False
        object.__setattr__(self, "first_dose_curve", curve)

        # The elevated in-window probability must itself be a probability.
        from .simulate import annual_to_daily_probability

        if annual_to_daily_probability(self.p_event_year) * self.rr_vacc > 1.0:
            raise ValueError("daily event probability times rr_vacc exceeds 1")

    @property
    def p_event_day(self) -> float:
        from .simulate import annual_to_daily_probability

        return annual_to_daily_probability(self.p_event_year)

    @property
    def n_campaign_days(self) -> int:
        return self.n_days - self.campaign_start_day + 1
