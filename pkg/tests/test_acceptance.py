"""Acceptance gate: the study-scale criteria, one printed line per criterion.

The heavy inputs (a 6-scenario x 200-replication grid at full cohort size
and a 400-replication null-calibration run) are computed once per session.
Set LINKSIM_ACCEPTANCE_CACHE to a directory to reuse results across local
sessions; the cache key covers the package sources, so any code change
invalidates it.
"""

import hashlib
import math
import os
import pickle
import time
from pathlib import Path

import numpy as np
import pytest

import linksim
from linksim import (
    SimConfig,
    build_counting_process,
    build_sccs_cases,
    default_scenarios,
    fit_cox,
    fit_sccs,
    inject_false_matches,
    inject_missing_matches,
    run_grid,
    run_replication,
    simulate_cohort,
    summarize,
)
from oracles import cox_grid_argmax_1d, sccs_grid_argmax_1d
from test_estimator_fits import _random_cox_rows, _random_sccs_cases
from linksim import CountingProcessData

TRUE_RR = 3.24
GRID_REPS = 200
GRID_SEED = 42
NULL_REPS = 400
NULL_SEED = 20240801

# Type-I error is a statement about the tests' asymptotic level, so the null
# runs use an event probability high enough for the Wald machinery to operate
# on ~100 exposed events per replication; rr_vacc = 1 makes the null true.
NULL_CONFIG = SimConfig(n_sim=200_000, rr_vacc=1.0, p_event_year=0.02)

TABLE1_CONFIG = SimConfig(n_sim=770_000)


def _workers():
    return max(1, min(os.cpu_count() or 1, 8))


def _source_digest():
    root = Path(linksim.__file__).parent
    h = hashlib.sha256()
    for path in sorted(root.rglob("*.py")):
        h.update(path.read_bytes())
    return h.hexdigest()


def _run_cached(tag, config, scenarios):
    cache_dir = os.environ.get("LINKSIM_ACCEPTANCE_CACHE")
    key = hashlib.sha256(
        (repr(config.__dict__) + repr(scenarios) + _source_digest()).encode()
    ).hexdigest()[:16]
    cache_path = Path(cache_dir) / f"{tag}-{key}.pkl" if cache_dir else None
    if cache_path is not None and cache_path.exists():
        with open(cache_path, "rb") as fh:
            return pickle.load(fh)
    started = time.perf_counter()
    results = run_grid(config, scenarios, n_workers=_workers())
    payload = {"results": results, "elapsed": time.perf_counter() - started,
               "workers": _workers()}
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        with open(cache_path, "wb") as fh:
            pickle.dump(payload, fh)
    return payload


@pytest.fixture(scope="session")
def study_grid():
    scenarios = default_scenarios(n_reps=GRID_REPS, master_seed=GRID_SEED)
    payload = _run_cached("grid", TABLE1_CONFIG, scenarios)
    payload["cells"] = summarize(payload["results"], true_rr=TRUE_RR, alpha=0.05)
    return payload


@pytest.fixture(scope="session")
def null_run():
    scenarios = default_scenarios(n_reps=NULL_REPS, master_seed=NULL_SEED,
                                  missing_grid=(0.0,), p_false_match=0.0)
    payload = _run_cached("null", NULL_CONFIG, scenarios)
    payload["cells"] = summarize(payload["results"], true_rr=1.0, alpha=0.05)
    return payload


def _cell(cells, pct_missing, method, dose):
    for cell in cells:
        if (abs(cell.pct_missing - pct_missing) < 1e-12 and cell.method == method
                and cell.dose == dose):
            return cell
    raise LookupError((pct_missing, method, dose))


def _criterion(number, passed, message):
    print(f"\nACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {message}")
    assert passed, f"criterion {number}: {message}"


# ---------------------------------------------------------------------------


def test_criterion_1_null_calibration(null_run):
    lines = []
    ok = True
    for method in ("cox", "sccs"):
        for dose in (1, 2):
            cell = _cell(null_run["cells"], 0.0, method, dose)
            inside = 0.03 <= cell.power <= 0.07
            ok = ok and inside
            lines.append(f"{method}/dose{dose}={cell.power:.4f}"
                         f" (n={cell.n_converged})")
    _criterion(1, ok, "type-I error in [0.03, 0.07]: " + ", ".join(lines)
               + f"; elapsed {null_run['elapsed']:.0f}s on {null_run['workers']} workers")


def test_criterion_2_unbiasedness_error_free(study_grid):
    sccs = _cell(study_grid["cells"], 0.0, "sccs", 1)
    cox = _cell(study_grid["cells"], 0.0, "cox", 1)
    ok_sccs = abs(sccs.bias - (-0.016)) <= 0.25
    ok_cox = abs(cox.bias - 0.018) <= 0.28
    _criterion(2, ok_sccs and ok_cox,
               f"bias at 0% missing: sccs={sccs.bias:+.3f} (target -0.016 +/- 0.25), "
               f"cox={cox.bias:+.3f} (target +0.018 +/- 0.28)")


def test_criterion_3_divergent_bias(study_grid):
    cells = study_grid["cells"]
    checks = [
        ("cox@20%", _cell(cells, 0.2, "cox", 1).bias, -0.201, 0.30),
        ("sccs@20%", _cell(cells, 0.2, "sccs", 1).bias, 0.017, 0.30),
        ("cox@50%", _cell(cells, 0.5, "cox", 1).bias, -0.579, 0.55),
        ("sccs@50%", _cell(cells, 0.5, "sccs", 1).bias, 0.261, 0.80),
    ]
    parts = []
    ok = True
    for name, got, target, tol in checks:
        inside = abs(got - target) <= tol
        ok = ok and inside
        parts.append(f"{name}={got:+.3f} (target {target:+.3f} +/- {tol})")
    for pct in (0.2, 0.3, 0.4, 0.5):
        b_sccs = abs(_cell(cells, pct, "sccs", 1).bias)
        b_cox = abs(_cell(cells, pct, "cox", 1).bias)
        ordered = b_sccs < b_cox
        ok = ok and ordered
        parts.append(f"|sccs|<|cox|@{pct:.0%}: {b_sccs:.3f} vs {b_cox:.3f}")
    _criterion(3, ok, "; ".join(parts))


def test_criterion_4_power_curve(study_grid):
    cells = study_grid["cells"]
    grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    powers = [_cell(cells, pct, "sccs", 1).power for pct in grid]
    ns = [_cell(cells, pct, "sccs", 1).n_converged for pct in grid]
    ok_ends = abs(powers[0] - 0.80) <= 0.09 and abs(powers[-1] - 0.25) <= 0.10

    inversions = []
    for i in range(len(powers) - 1):
        if powers[i + 1] > powers[i]:
            pooled = (powers[i] * ns[i] + powers[i + 1] * ns[i + 1]) / (ns[i] + ns[i + 1])
            se = math.sqrt(max(pooled * (1 - pooled), 1e-12) * (1 / ns[i] + 1 / ns[i + 1]))
            inversions.append((i, powers[i + 1] - powers[i], 2 * se))
    ok_monotone = len(inversions) == 0 or (
        len(inversions) == 1 and inversions[0][1] <= inversions[0][2])
    _criterion(4, ok_ends and ok_monotone,
               f"sccs dose-1 power over grid: {[f'{p:.3f}' for p in powers]} "
               f"(0%: 0.80 +/- 0.09, 50%: 0.25 +/- 0.10, inversions: {inversions})")


def test_criterion_5_mse_ordering(study_grid):
    cells = study_grid["cells"]
    parts = []
    at0_sccs = _cell(cells, 0.0, "sccs", 1).mse
    at0_cox = _cell(cells, 0.0, "cox", 1).mse
    ok = at0_sccs < at0_cox
    parts.append(f"0%: sccs {at0_sccs:.3f} < cox {at0_cox:.3f}")
    for pct in (0.3, 0.4, 0.5):
        m_sccs = _cell(cells, pct, "sccs", 1).mse
        m_cox = _cell(cells, pct, "cox", 1).mse
        ok = ok and (m_sccs > m_cox)
        parts.append(f"{pct:.0%}: sccs {m_sccs:.3f} > cox {m_cox:.3f}")
    _criterion(5, ok, "; ".join(parts))


def test_criterion_6_oracles_and_invariants(small_config):
    failures = []

    rng = np.random.default_rng(60601)
    checked = 0
    while checked < 20:
        rows = _random_cox_rows(rng)
        fit = fit_cox(CountingProcessData.from_rows(rows))
        if not fit.converged or not fit.dose1.estimable or abs(fit.dose1.log_effect) > 4.5:
            continue
        if abs(fit.dose1.log_effect - cox_grid_argmax_1d(rows)) > 1e-4 + 1e-12:
            failures.append(f"cox instance {checked}")
        checked += 1

    checked = 0
    while checked < 20:
        cases = _random_sccs_cases(rng)
        fit = fit_sccs(cases)
        if not fit.converged or not fit.dose1.estimable or abs(fit.dose1.log_effect) > 4.5:
            continue
        if abs(fit.dose1.log_effect - sccs_grid_argmax_1d(cases)) > 1e-4 + 1e-12:
            failures.append(f"sccs instance {checked}")
        checked += 1

    from linksim import ExposureLabel, SccsCase, SccsInterval
    closed_form = fit_sccs([
        SccsCase(0, (SccsInterval(22, ExposureLabel.RISK1, 1),
                     SccsInterval(528, ExposureLabel.BASELINE, 0)), 550),
        SccsCase(1, (SccsInterval(22, ExposureLabel.RISK1, 0),
                     SccsInterval(528, ExposureLabel.BASELINE, 1)), 550),
    ])
    if abs(closed_form.dose1.ratio - 24.0) > 1e-6:
        failures.append(f"closed form {closed_form.dose1.ratio}")

    # determinism, partition, conservation and immunity invariants in one pass
    cohort_a = simulate_cohort(small_config, seed=606)
    cohort_b = simulate_cohort(small_config, seed=606)
    if not all(np.array_equal(getattr(cohort_a, f), getattr(cohort_b, f))
               for f in ("dose1_day", "dose2_day", "vaccine_type", "event_subject", "event_day")):
        failures.append("determinism")
    cohort_a.validate()

    data = build_counting_process(cohort_a)
    spans = {}
    for r in data:
        spans[r.subject] = spans.get(r.subject, 0) + (r.stop - r.start)
    first_event = {}
    for s, d in zip(cohort_a.event_subject, cohort_a.event_day):
        first_event.setdefault(int(s), int(d))
    if any(spans[i] != first_event.get(i, small_config.n_days) for i in range(len(cohort_a))):
        failures.append("cox partition")
    if any(sum(iv.length for iv in case.intervals) != small_config.n_days
           for case in build_sccs_cases(cohort_a)):
        failures.append("sccs partition")

    perturbed = inject_false_matches(
        inject_missing_matches(cohort_a, 0.3, np.random.default_rng(1)),
        0.01, np.random.default_rng(2))
    if not (np.array_equal(perturbed.event_subject, cohort_a.event_subject)
            and np.array_equal(perturbed.event_day, cohort_a.event_day)):
        failures.append("event immutability")

    swapped = inject_false_matches(cohort_a, 0.5, np.random.default_rng(3))
    before = sorted(zip(cohort_a.dose1_day, cohort_a.dose2_day, cohort_a.vaccine_type))
    after = sorted(zip(swapped.dose1_day, swapped.dose2_day, swapped.vaccine_type))
    if before != after:
        failures.append("conservation")

    _criterion(6, not failures,
               "fitters match grid search on 20+20 instances, closed form 528/22, "
               "determinism/partition/conservation/immunity hold"
               + (f"; failures: {failures}" if failures else ""))


def test_criterion_7_performance(study_grid):
    started = time.perf_counter()
    rows = run_replication(TABLE1_CONFIG, default_scenarios(1, master_seed=7)[3], 0)
    single = time.perf_counter() - started
    assert len(rows) == 4
    grid_elapsed = study_grid["elapsed"]
    ok = single <= 10.0 and grid_elapsed <= 7200.0
    _criterion(7, ok,
               f"single full-size replication {single:.2f}s (limit 10s); "
               f"{6 * GRID_REPS}-replication grid {grid_elapsed:.0f}s on "
               f"{study_grid['workers']} workers (limit 7200s)")
