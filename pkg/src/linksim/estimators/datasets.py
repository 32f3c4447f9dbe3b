"""Analysis dataset builders: counting-process rows and SCCS case partitions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ..config import VaccineType
from ..simulate import Cohort


@dataclass(frozen=True)
class CountingProcessRow:
    """One (start, stop] follow-up segment with constant exposure indicators."""

    subject: int
    start: int
    stop: int
    event: int
    x1: int
    x2: int


class CountingProcessData:
    """Columnar collection of counting-process rows.

    Per subject the rows partition (0, follow-up-end] without gaps; follow-up
    ends at the first event (event = 1 on that row) or at n_days (censored).
    """

    def __init__(self, subject, start, stop, event, x1, x2):
        self.subject = np.asarray(subject, dtype=np.int64)
        self.start = np.asarray(start, dtype=np.int64)
        self.stop = np.asarray(stop, dtype=np.int64)
        self.event = np.asarray(event, dtype=np.int8)
        self.x1 = np.asarray(x1, dtype=np.int8)
        self.x2 = np.asarray(x2, dtype=np.int8)
        lengths = {len(a) for a in (self.subject, self.start, self.stop,
                                    self.event, self.x1, self.x2)}
        if len(lengths) != 1:
            raise ValueError("row columns must have equal length")
        if np.any(self.start >= self.stop):
            raise ValueError("rows must satisfy start < stop")

    def __len__(self):
        return len(self.subject)

    def row(self, i) -> CountingProcessRow:
        return CountingProcessRow(int(self.subject[i]), int(self.start[i]), int(self.stop[i]),
                                  int(self.event[i]), int(self.x1[i]), int(self.x2[i]))

    def __iter__(self):
        return (self.row(i) for i in range(len(self)))

    @classmethod
    def from_rows(cls, rows) -> "CountingProcessData":
        rows = [r if isinstance(r, CountingProcessRow) else CountingProcessRow(*r) for r in rows]
        return cls(
            subject=[r.subject for r in rows],
            start=[r.start for r in rows],
            stop=[r.stop for r in rows],
            event=[r.event for r in rows],
            x1=[r.x1 for r in rows],
            x2=[r.x2 for r in rows],
        )


def build_counting_process(cohort: Cohort) -> CountingProcessData:
    """Time-to-first-event rows with dose-1/dose-2 risk-window indicators.

    Exposure indicator k is 1 exactly on the days [dose_k, dose_k + d_risk]
    of an mRNA dose, i.e. on rows of interval form (dose_k - 1, dose_k + d_risk];
    windows are clipped at the follow-up end. Non-mRNA doses set no indicator.
    """
    cfg = cohort.config
    n = len(cohort)
    nd = cfg.n_days

    # first event day per subject, NO_DAY -> censored at n_days
    first_event = np.full(n, -1, np.int64)
    if len(cohort.event_subject):
        subj, idx = np.unique(cohort.event_subject, return_index=True)
        first_event[subj] = cohort.event_day[idx]
    end = np.where(first_event >= 1, first_event, nd)

    mrna = np.isin(cohort.vaccine_type, (int(VaccineType.BIONTECH), int(VaccineType.MODERNA)))
    sentinel = nd + cfg.d_risk + 2  # places absent windows after any follow-up
    w1s = np.where(mrna & (cohort.dose1_day >= 0), cohort.dose1_day, sentinel).astype(np.int64)
    w2s = np.where(mrna & (cohort.dose2_day >= 0), cohort.dose2_day, sentinel).astype(np.int64)
    w1e = np.minimum(w1s + cfg.d_risk, end)
    w2e = np.minimum(w2s + cfg.d_risk, end)

    bounds = np.stack([
        np.zeros(n, np.int64),
        np.clip(w1s - 1, 0, end),
        np.clip(w1e, 0, end),
        np.clip(w2s - 1, 0, end),
        np.clip(w2e, 0, end),
        end,
    ], axis=1)
    bounds.sort(axis=1)
    seg_start = bounds[:, :-1]
    seg_stop = bounds[:, 1:]
    valid = seg_start < seg_stop

    in_w1 = (seg_start >= (w1s - 1)[:, None]) & (seg_stop <= w1e[:, None])
    in_w2 = (seg_start >= (w2s - 1)[:, None]) & (seg_stop <= w2e[:, None])
    has_event = (first_event >= 1)[:, None] & (seg_stop == end[:, None])

    flat = valid.ravel()
    subject = np.repeat(np.arange(n, dtype=np.int64), 5)[flat]
    return CountingProcessData(
        subject=subject,
        start=seg_start.ravel()[flat],
        stop=seg_stop.ravel()[flat],
        event=(has_event & valid).ravel()[flat].astype(np.int8),
        x1=(in_w1 & valid).ravel()[flat].astype(np.int8),
        x2=(in_w2 & valid).ravel()[flat].astype(np.int8),
    )


class ExposureLabel(IntEnum):
    BASELINE = 0
    RISK1 = 1
    RISK2 = 2


@dataclass(frozen=True)
class SccsInterval:
    length: int
    label: ExposureLabel
    events: int


@dataclass(frozen=True)
class SccsCase:
    """One case's observation period split into exposure intervals."""

    case_id: int
    intervals: tuple[SccsInterval, ...]
    observation_days: int

    def __post_init__(self):
        if any(iv.length < 1 for iv in self.intervals):
            raise ValueError("interval lengths must be >= 1")
        if sum(iv.length for iv in self.intervals) != self.observation_days:
            raise ValueError("interval lengths must sum to the observation period")
        for label in (ExposureLabel.RISK1, ExposureLabel.RISK2):
            if sum(iv.label == label for iv in self.intervals) > 1:
                raise ValueError(f"at most one {label.name} interval per case")

    @property
    def n_events(self) -> int:
        return sum(iv.events for iv in self.intervals)


def build_sccs_cases(cohort: Cohort) -> list[SccsCase]:
    """One case per individual with >= 1 event, observed over days 1..n_days.

    The observation period is partitioned into baseline time and the mRNA
    risk windows [dose_k, dose_k + d_risk] (clipped to the horizon); every
    event is assigned to its containing interval, recurrences included. If
    the windows overlap, the dose-2 window takes precedence on shared days.
    """
    cfg = cohort.config
    nd = cfg.n_days
    cases = []
    case_ids = np.unique(cohort.event_subject)
    for cid in case_ids:
        events = np.asarray(cohort.events_of(int(cid)))
        windows = []
        rec = cohort.vaccination(int(cid))
        if rec is not None and rec.vaccine_type.is_mrna:
            w1 = (rec.dose1_day, min(rec.dose1_day + cfg.d_risk, nd))
            if rec.dose2_day is not None:
                w2 = (rec.dose2_day, min(rec.dose2_day + cfg.d_risk, nd))
                w1 = (w1[0], min(w1[1], w2[0] - 1))  # dose-2 window wins overlaps
                if w1[0] <= w1[1]:
                    windows.append((w1, ExposureLabel.RISK1))
                windows.append((w2, ExposureLabel.RISK2))
            else:
                windows.append((w1, ExposureLabel.RISK1))

        intervals = []
        cursor = 1
        for (ws, we), label in windows:
            if ws > cursor:
                intervals.append((cursor, ws - 1, ExposureLabel.BASELINE))
            intervals.append((ws, we, label))
            cursor = we + 1
        if cursor <= nd:
            intervals.append((cursor, nd, ExposureLabel.BASELINE))

        built = tuple(
            SccsInterval(length=hi - lo + 1, label=label,
                         events=int(np.count_nonzero((events >= lo) & (events <= hi))))
            for lo, hi, label in intervals
        )
        cases.append(SccsCase(case_id=int(cid), intervals=built, observation_days=nd))
    return cases
