"""Discrete-time cohort generator for vaccinations and adverse events.

Two interchangeable sampling paths are provided. The reference path loops
over calendar days and runs the Bernoulli trials literally. The default
fast path samples the same process segment-wise (categorical first-dose
day, truncated-geometric waiting times within constant-hazard segments);
the two agree in distribution, which the test suite checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DAYS_PER_YEAR, SimConfig, VaccineType

NO_DAY = -1  # sentinel in day-valued arrays
NO_TYPE = -1  # sentinel in the vaccine-type code array


def annual_to_daily_probability(p_year: float) -> float:
    """Convert an annual event probability to the per-day Bernoulli probability.

    Uses the geometric complement ``1 - (1 - p)**(1/365)``, i.e. the daily
    probability whose 365 independent trials reproduce the annual risk.
    """
    if not 0.0 <= p_year <= 1.0:
        raise ValueError(f"annual probability must be in [0, 1], got {p_year!r}")
    return 1.0 - (1.0 - p_year) ** (1.0 / DAYS_PER_YEAR)


def sample_vaccine_type(dist, rng=None, size=None):
    """Draw vaccine types with the given marginal probabilities.

    Returns a single ``VaccineType`` when ``size`` is None, otherwise an
    integer code array of that length.
    """
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (4,) or np.any(dist < 0.0) or abs(dist.sum() - 1.0) > 1e-12:
        raise ValueError(f"invalid vaccine type distribution: {dist!r}")
    rng = np.random.default_rng(rng)
    codes = _sample_type_codes(dist, 1 if size is None else int(size), rng)
    if size is None:
        return VaccineType(int(codes[0]))
    return codes


def _sample_type_codes(dist, n, rng):
    cdf = np.cumsum(dist)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(n), side="right").astype(np.int8)


def schedule_second_dose(vaccine_type, dose1_day, *, gap_mrna=42, gap_az=84, n_days=None):
    """Second-dose day implied by the vaccine type, or None.

    mRNA vaccines are boosted after ``gap_mrna`` days, AstraZeneca after
    ``gap_az``; Janssen is single-dose. A dose falling beyond ``n_days``
    (when given) is never administered and None is returned.
    """
    vaccine_type = VaccineType(vaccine_type)
    if vaccine_type == VaccineType.JANSSEN:
        return None
    gap = gap_mrna if vaccine_type.is_mrna else gap_az
    day = dose1_day + gap
    if n_days is not None and day > n_days:
        return None
    return day


@dataclass(frozen=True)
class VaccinationRecord:
    dose1_day: int
    dose2_day: int | None
    vaccine_type: VaccineType

    def __post_init__(self):
        if self.dose2_day is not None:
            if self.vaccine_type == VaccineType.JANSSEN:
                raise ValueError("Janssen records cannot carry a second dose")
            if self.dose2_day <= self.dose1_day:
                raise ValueError("dose2_day must come after dose1_day")


@dataclass(frozen=True)
class IndividualRecord:
    id: int
    vaccination: VaccinationRecord | None
    event_days: tuple[int, ...]


def in_risk_window(record: VaccinationRecord | None, t: int, d_risk: int) -> bool:
    """True iff day ``t`` falls in an mRNA risk window of this record.

    The window is the closed interval [dose_day, dose_day + d_risk] of
    either dose; non-mRNA vaccines never open a window.
    """
    if t < 1:
        raise ValueError("day index must be >= 1")
    if record is None or not record.vaccine_type.is_mrna:
        return False
    for day in (record.dose1_day, record.dose2_day):
        if day is not None and day <= t <= day + d_risk:
            return True
    return False


class Cohort:
    """Columnar vaccination and event histories for one simulated population.

    ``dose1_day``/``dose2_day`` hold day indices (-1 for none), ``vaccine_type``
    the integer codes of :class:`VaccineType` (-1 for unvaccinated). Events are
    stored as parallel (subject, day) arrays sorted by subject then day.
    """

    def __init__(self, dose1_day, dose2_day, vaccine_type, event_subject, event_day,
                 config: SimConfig, seed: int):
        self.dose1_day = np.asarray(dose1_day, dtype=np.int32)
        self.dose2_day = np.asarray(dose2_day, dtype=np.int32)
        self.vaccine_type = np.asarray(vaccine_type, dtype=np.int8)
        self.event_subject = np.asarray(event_subject, dtype=np.int64)
        self.event_day = np.asarray(event_day, dtype=np.int32)
        self.config = config
        self.seed = seed
        if not (len(self.dose1_day) == len(self.dose2_day) == len(self.vaccine_type) == config.n_sim):
            raise ValueError("per-individual arrays must have length n_sim")
        if len(self.event_subject) != len(self.event_day):
            raise ValueError("event arrays must have equal length")

    def __len__(self):
        return len(self.dose1_day)

    @property
    def n_vaccinated(self) -> int:
        return int(np.count_nonzero(self.dose1_day >= 0))

    def vaccination(self, i) -> VaccinationRecord | None:
        if self.dose1_day[i] < 0:
            return None
        dose2 = int(self.dose2_day[i])
        return VaccinationRecord(
            dose1_day=int(self.dose1_day[i]),
            dose2_day=None if dose2 < 0 else dose2,
            vaccine_type=VaccineType(int(self.vaccine_type[i])),
        )

    def events_of(self, i) -> tuple[int, ...]:
        lo = np.searchsorted(self.event_subject, i, side="left")
        hi = np.searchsorted(self.event_subject, i, side="right")
        return tuple(int(d) for d in self.event_day[lo:hi])

    def individual(self, i) -> IndividualRecord:
        return IndividualRecord(id=int(i), vaccination=self.vaccination(i),
                                event_days=self.events_of(i))

    def __iter__(self):
        return (self.individual(i) for i in range(len(self)))

    def copy(self) -> "Cohort":
        return Cohort(self.dose1_day.copy(), self.dose2_day.copy(), self.vaccine_type.copy(),
                      self.event_subject.copy(), self.event_day.copy(), self.config, self.seed)

    @classmethod
    def from_individuals(cls, individuals, config: SimConfig, seed: int = 0) -> "Cohort":
        n = len(individuals)
        d1 = np.full(n, NO_DAY, np.int32)
        d2 = np.full(n, NO_DAY, np.int32)
        vt = np.full(n, NO_TYPE, np.int8)
        ev_s, ev_d = [], []
        for i, rec in enumerate(individuals):
            if rec.vaccination is not None:
                d1[i] = rec.vaccination.dose1_day
                d2[i] = NO_DAY if rec.vaccination.dose2_day is None else rec.vaccination.dose2_day
                vt[i] = int(rec.vaccination.vaccine_type)
            for day in rec.event_days:
                ev_s.append(i)
                ev_d.append(day)
        return cls(d1, d2, vt, np.asarray(ev_s, np.int64), np.asarray(ev_d, np.int32), config, seed)

    def validate(self):
        """Check the structural invariants; raises AssertionError on violation."""
        cfg = self.config
        vacc = self.dose1_day >= 0
        assert np.all((self.vaccine_type >= 0) == vacc)
        assert np.all(self.dose1_day[vacc] >= cfg.campaign_start_day)
        assert np.all(self.dose1_day[vacc] <= cfg.n_days)
        has2 = self.dose2_day >= 0
        assert not np.any(has2 & ~vacc)
        assert not np.any(has2 & (self.vaccine_type == VaccineType.JANSSEN))
        gaps = np.where(np.isin(self.vaccine_type, (VaccineType.BIONTECH, VaccineType.MODERNA)),
                        cfg.second_dose_gap_mrna, cfg.second_dose_gap_az)
        assert np.all(self.dose2_day[has2] == self.dose1_day[has2] + gaps[has2])
        assert np.all(self.dose2_day[has2] <= cfg.n_days)
        if len(self.event_day):
            assert self.event_day.min() >= 1 and self.event_day.max() <= cfg.n_days
            order = np.lexsort((self.event_day, self.event_subject))
            assert np.array_equal(order, np.arange(len(order)))
            same = self.event_subject[1:] == self.event_subject[:-1]
            diffs = self.event_day[1:] - self.event_day[:-1]
            assert np.all(diffs[same] > cfg.d_immune)


def simulate_cohort(config: SimConfig, seed: int, method: str = "fast") -> Cohort:
    """Generate one cohort; a pure function of (config, seed).

    ``method`` selects the sampling path: "fast" (default, segment-wise) or
    "dayloop" (literal day-by-day Bernoulli trials, slow, kept as the
    distributional reference).
    """
    rng = np.random.default_rng(seed)
    if method == "fast":
        parts = _simulate_fast(config, rng)
    elif method == "dayloop":
        parts = _simulate_dayloop(config, rng)
    else:
        raise ValueError(f"unknown simulation method: {method!r}")
    return Cohort(*parts, config=config, seed=seed)


def _sample_first_dose_days(config, rng):
    """First-dose day per individual (NO_DAY if never vaccinated)."""
    ncd = config.n_campaign_days
    curve = config.first_dose_curve[:ncd]
    # P(first dose on campaign day j) = curve[j] * prod_{i<j} (1 - curve[i])
    surv = np.cumprod(1.0 - curve)
    pmf = curve * np.concatenate(([1.0], surv[:-1]))
    cdf = np.cumsum(pmf)
    j = np.searchsorted(cdf, rng.random(config.n_sim), side="right")
    return np.where(j < ncd, config.campaign_start_day + j, NO_DAY).astype(np.int32)


def _second_dose_days(config, dose1, vtype):
    gaps = np.where(np.isin(vtype, (VaccineType.BIONTECH, VaccineType.MODERNA)),
                    config.second_dose_gap_mrna, config.second_dose_gap_az)
    dose2 = dose1 + gaps.astype(np.int32)
    invalid = (dose1 < 0) | (vtype == VaccineType.JANSSEN) | (dose2 > config.n_days)
    return np.where(invalid, NO_DAY, dose2).astype(np.int32)


def _risk_segments(config, dose1, dose2, vtype):
    """Per-individual partition of [1, n_days] into <= 5 constant-hazard segments.

    Returns (starts, stops, exposed) with shape (n, 5); empty segments have
    start > stop. Overlapping or adjacent dose windows are merged.
    """
    n = len(dose1)
    nd = config.n_days
    mrna = np.isin(vtype, (VaccineType.BIONTECH, VaccineType.MODERNA))
    big = nd + 2  # window start sentinel placing the window after the horizon

    w1s = np.where(mrna & (dose1 >= 0), dose1, big)
    w1e = np.minimum(w1s + config.d_risk, nd)
    w2s = np.where(mrna & (dose2 >= 0), dose2, big)
    w2e = np.minimum(w2s + config.d_risk, nd)

    # merge when window 2 starts inside or right after window 1
    merge = w2s <= w1e + 1
    w1e = np.where(merge, np.maximum(w1e, w2e), w1e)
    w2s = np.where(merge, big, w2s)
    w2e = np.where(merge, big, np.minimum(w2s + config.d_risk, nd))

    starts = np.empty((n, 5), np.int64)
    stops = np.empty((n, 5), np.int64)
    starts[:, 0] = 1
    stops[:, 0] = np.minimum(w1s - 1, nd)
    starts[:, 1] = w1s
    stops[:, 1] = w1e
    starts[:, 2] = w1e + 1
    stops[:, 2] = np.minimum(w2s - 1, nd)
    starts[:, 3] = w2s
    stops[:, 3] = w2e
    starts[:, 4] = np.maximum(w1e, w2e) + 1
    stops[:, 4] = nd
    exposed = np.zeros((n, 5), bool)
    exposed[:, 1] = True
    exposed[:, 3] = True
    return starts, stops, exposed


def _first_event_from(starts, stops, exposed, resume, p0, p1, rng):
    """First event day >= resume under the segment hazards, or NO_DAY."""
    s = np.maximum(starts, resume[:, None])
    length = stops - s + 1
    h = np.where(exposed, p1, p0)
    u = rng.random(s.shape)
    k = np.full(s.shape, np.inf)
    pos = h > 0.0
    with np.errstate(divide="ignore"):
        k[pos] = np.floor(np.log1p(-u[pos]) / np.log1p(-h[pos]))
    candidate = np.where((length > 0) & (k < length), s + k, np.inf)
    first = candidate.min(axis=1)
    return np.where(np.isfinite(first), first, NO_DAY).astype(np.int64)


def _simulate_fast(config, rng):
    n = config.n_sim
    dose1 = _sample_first_dose_days(config, rng)
    vtype = np.full(n, NO_TYPE, np.int8)
    vacc = dose1 >= 0
    vtype[vacc] = _sample_type_codes(np.asarray(config.vaccine_type_dist), int(vacc.sum()), rng)
    dose2 = _second_dose_days(config, dose1, vtype)

    p0 = config.p_event_day
    p1 = min(p0 * config.rr_vacc, 1.0)
    starts, stops, exposed = _risk_segments(config, dose1, dose2, vtype)

    ev_subj, ev_day = [], []
    active = np.arange(n)
    resume = np.ones(n, np.int64)
    while active.size:
        day = _first_event_from(starts[active], stops[active], exposed[active],
                                resume, p0, p1, rng)
        hit = day >= 1
        ev_subj.append(active[hit])
        ev_day.append(day[hit])
        resume = day[hit] + config.d_immune + 1
        active = active[hit]
        keep = resume <= config.n_days
        active = active[keep]
        resume = resume[keep]

    if ev_subj:
        subj = np.concatenate(ev_subj)
        day = np.concatenate(ev_day)
        order = np.lexsort((day, subj))
        subj, day = subj[order], day[order]
    else:
        subj = np.empty(0, np.int64)
        day = np.empty(0, np.int32)
    return dose1, dose2, vtype, subj, day.astype(np.int32)


def _simulate_dayloop(config, rng):
    n = config.n_sim
    nd = config.n_days
    cs = config.campaign_start_day
    curve = config.first_dose_curve
    dist = np.asarray(config.vaccine_type_dist)
    p0 = config.p_event_day
    p1 = min(p0 * config.rr_vacc, 1.0)

    dose1 = np.full(n, NO_DAY, np.int32)
    dose2 = np.full(n, NO_DAY, np.int32)
    vtype = np.full(n, NO_TYPE, np.int8)
    immune_until = np.zeros(n, np.int64)
    ev_subj, ev_day = [], []

    mrna_types = (int(VaccineType.BIONTECH), int(VaccineType.MODERNA))
    for t in range(1, nd + 1):
        if t >= cs:
            p_vacc = curve[t - cs]
            if p_vacc > 0.0:
                newly = (dose1 < 0) & (rng.random(n) < p_vacc)
                idx = np.flatnonzero(newly)
                if idx.size:
                    dose1[idx] = t
                    vtype[idx] = _sample_type_codes(dist, idx.size, rng)
                    gaps = np.where(np.isin(vtype[idx], mrna_types),
                                    config.second_dose_gap_mrna, config.second_dose_gap_az)
                    d2 = t + gaps
                    ok = (vtype[idx] != VaccineType.JANSSEN) & (d2 <= nd)
                    dose2[idx[ok]] = d2[ok]

        mrna = np.isin(vtype, mrna_types)
        in_w1 = mrna & (dose1 >= 0) & (dose1 <= t) & (t <= dose1 + config.d_risk)
        in_w2 = mrna & (dose2 >= 0) & (dose2 <= t) & (t <= dose2 + config.d_risk)
        p = np.where(in_w1 | in_w2, p1, p0)
        events = (t > immune_until) & (rng.random(n) < p)
        idx = np.flatnonzero(events)
        if idx.size:
            ev_subj.append(idx.astype(np.int64))
            ev_day.append(np.full(idx.size, t, np.int32))
            immune_until[idx] = t + config.d_immune

    if ev_subj:
        subj = np.concatenate(ev_subj)
        day = np.concatenate(ev_day)
        order = np.lexsort((day, subj))
        subj, day = subj[order], day[order]
    else:
        subj = np.empty(0, np.int64)
        day = np.empty(0, np.int32)
    return dose1, dose2, vtype, subj, day
