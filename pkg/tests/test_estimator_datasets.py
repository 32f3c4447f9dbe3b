import numpy as np
import pytest

from linksim import (
    Cohort,
    CountingProcessData,
    ExposureLabel,
    IndividualRecord,
    SimConfig,
    VaccinationRecord,
    VaccineType,
    build_counting_process,
    build_sccs_cases,
    simulate_cohort,
)

CFG550 = SimConfig(n_sim=1, n_days=550)


def _single(vaccination, event_days, config=CFG550):
    config = SimConfig(**{**config.__dict__, "n_sim": 1,
                          "first_dose_curve": config.first_dose_curve})
    rec = IndividualRecord(id=0, vaccination=vaccination, event_days=tuple(event_days))
    return Cohort.from_individuals([rec], config)


def _rows(data):
    return [(r.subject, r.start, r.stop, r.event, r.x1, r.x2) for r in data]


def test_counting_process_unvaccinated_censored():
    cohort = _single(None, [])
    assert _rows(build_counting_process(cohort)) == [(0, 0, 550, 0, 0, 0)]


def test_counting_process_event_in_first_window():
    vac = VaccinationRecord(400, 442, VaccineType.BIONTECH)
    cohort = _single(vac, [410])
    assert _rows(build_counting_process(cohort)) == [
        (0, 0, 399, 0, 0, 0),
        (0, 399, 410, 1, 1, 0),
    ]


def test_counting_process_two_windows_censored():
    vac = VaccinationRecord(400, 442, VaccineType.MODERNA)
    cohort = _single(vac, [])
    rows = _rows(build_counting_process(cohort))
    assert rows == [
        (0, 0, 399, 0, 0, 0),
        (0, 399, 421, 0, 1, 0),
        (0, 421, 441, 0, 0, 0),
        (0, 441, 463, 0, 0, 1),
        (0, 463, 550, 0, 0, 0),
    ]
    assert sum(stop - start for (_, start, stop, *_rest) in rows) == 550


def test_counting_process_nonmrna_has_no_indicators():
    vac = VaccinationRecord(400, 484, VaccineType.ASTRAZENECA)
    cohort = _single(vac, [405])
    assert _rows(build_counting_process(cohort)) == [(0, 0, 405, 1, 0, 0)]


def test_counting_process_event_on_dose_day_is_exposed():
    vac = VaccinationRecord(400, None, VaccineType.BIONTECH)
    cohort = _single(vac, [400])
    assert _rows(build_counting_process(cohort)) == [
        (0, 0, 399, 0, 0, 0),
        (0, 399, 400, 1, 1, 0),
    ]


def test_counting_process_window_clipped_at_horizon():
    vac = VaccinationRecord(540, None, VaccineType.BIONTECH)
    cohort = _single(vac, [])
    assert _rows(build_counting_process(cohort)) == [
        (0, 0, 539, 0, 0, 0),
        (0, 539, 550, 0, 1, 0),
    ]


def test_counting_process_partitions_followup(small_config):
    cohort = simulate_cohort(small_config, seed=21)
    data = build_counting_process(cohort)
    nd = small_config.n_days

    first_event = {}
    for s, d in zip(cohort.event_subject, cohort.event_day):
        first_event.setdefault(int(s), int(d))

    by_subject = {}
    for r in data:
        by_subject.setdefault(r.subject, []).append(r)
    assert set(by_subject) == set(range(len(cohort)))

    for sid, rows in by_subject.items():
        end = first_event.get(sid, nd)
        assert rows[0].start == 0
        assert rows[-1].stop == end
        for a, b in zip(rows, rows[1:]):
            assert a.stop == b.start
        assert sum(r.event for r in rows) == (1 if sid in first_event else 0)
        if sid in first_event:
            assert rows[-1].event == 1


def test_counting_process_from_rows_roundtrip():
    rows = [(0, 0, 10, 0, 0, 0), (1, 0, 4, 1, 1, 0)]
    data = CountingProcessData.from_rows(rows)
    assert _rows(data) == rows
    with pytest.raises(ValueError):
        CountingProcessData.from_rows([(0, 5, 5, 0, 0, 0)])


# ---------------------------------------------------------------------------
# SCCS cases


def _partition(case):
    return [(iv.length, iv.label, iv.events) for iv in case.intervals]


def test_sccs_case_without_mrna_dose():
    cohort = _single(None, [100, 300])
    cases = build_sccs_cases(cohort)
    assert len(cases) == 1
    assert _partition(cases[0]) == [(550, ExposureLabel.BASELINE, 2)]


def test_sccs_partition_two_windows():
    vac = VaccinationRecord(400, 442, VaccineType.BIONTECH)
    cohort = _single(vac, [50])
    case, = build_sccs_cases(cohort)
    assert [iv.length for iv in case.intervals] == [399, 22, 20, 22, 87]
    assert [iv.label for iv in case.intervals] == [
        ExposureLabel.BASELINE, ExposureLabel.RISK1, ExposureLabel.BASELINE,
        ExposureLabel.RISK2, ExposureLabel.BASELINE,
    ]
    assert sum(iv.length for iv in case.intervals) == 550


def test_sccs_event_assignment():
    vac = VaccinationRecord(400, 442, VaccineType.BIONTECH)
    cohort = _single(vac, [405, 470])
    case, = build_sccs_cases(cohort)
    assert [iv.events for iv in case.intervals] == [0, 1, 0, 0, 1]


def test_sccs_only_event_individuals_become_cases(small_config):
    cohort = simulate_cohort(small_config, seed=22)
    cases = build_sccs_cases(cohort)
    with_events = set(np.unique(cohort.event_subject).tolist())
    assert {c.case_id for c in cases} == with_events
    for case in cases:
        assert case.observation_days == small_config.n_days
        assert sum(iv.length for iv in case.intervals) == small_config.n_days
        assert case.n_events == len(cohort.events_of(case.case_id))
        assert all(iv.length >= 1 for iv in case.intervals)


def test_sccs_all_recurrences_used():
    vac = VaccinationRecord(100, 142, VaccineType.MODERNA)
    cohort = _single(vac, [105, 200, 300])
    case, = build_sccs_cases(cohort)
    assert case.n_events == 3


def test_sccs_window_clipped_at_horizon():
    vac = VaccinationRecord(540, None, VaccineType.BIONTECH)
    cohort = _single(vac, [545])
    case, = build_sccs_cases(cohort)
    assert _partition(case) == [
        (539, ExposureLabel.BASELINE, 0),
        (11, ExposureLabel.RISK1, 1),
    ]
