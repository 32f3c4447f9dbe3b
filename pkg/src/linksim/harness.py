"""Scenario orchestration: replications, performance criteria, CSV output.

Seeding: every replication owns an independent random stream with seed
``mix_seed(master_seed, scenario_id, replication)``, where mix_seed chains
the splitmix64 finalizer over its arguments. Sub-streams for the simulation
and the two perturbation steps are derived from the replication seed the
same way. Results are therefore reproducible and independent of worker
count or execution order, and a grid can be extended without reshuffling
existing scenarios.

Error-proportion semantics: a scenario's missing-match and false-match
proportions both count affected individuals per head of population. Each
replication drops round(p_missing * n_sim) vaccination records (capped at
the vaccinated count) and swaps floor(p_false * n_sim / 2) record pairs.
"""

from __future__ import annotations

import concurrent.futures
import csv
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .config import SimConfig
from .estimators import (
    CoefEstimate,
    EstimationError,
    FitResult,
    build_counting_process,
    build_sccs_cases,
    fit_cox,
    fit_sccs,
)
from .linkage import inject_false_matches, inject_missing_matches
from .simulate import simulate_cohort

_MASK64 = (1 << 64) - 1

DEFAULT_MISSING_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
DEFAULT_FALSE_MATCH = 0.00005


def splitmix64(x: int) -> int:
    """One step of the splitmix64 sequence/finalizer; a 64-bit mixing function."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(*parts: int) -> int:
    """Collapse integers into one well-mixed 64-bit seed (order-sensitive)."""
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & _MASK64))
    return h


@dataclass(frozen=True)
class ScenarioSpec:
    """One cell of the linkage-error grid."""

    scenario_id: int
    p_missing_match: float
    p_false_match: float
    n_reps: int
    alpha: float = 0.05
    master_seed: int = 42

    def __post_init__(self):
        if not 0.0 <= self.p_missing_match <= 1.0 or not 0.0 <= self.p_false_match <= 1.0:
            raise ValueError("error proportions must be in [0, 1]")
        if self.n_reps < 1:
            raise ValueError("n_reps must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")


def default_scenarios(n_reps: int, master_seed: int = 42, alpha: float = 0.05,
                      missing_grid=DEFAULT_MISSING_GRID,
                      p_false_match: float = DEFAULT_FALSE_MATCH) -> list[ScenarioSpec]:
    """The standard grid: missing-match proportions varied, false matches fixed."""
    return [
        ScenarioSpec(scenario_id=i, p_missing_match=p, p_false_match=p_false_match,
                     n_reps=n_reps, alpha=alpha, master_seed=master_seed)
        for i, p in enumerate(missing_grid)
    ]


@dataclass(frozen=True)
class ReplicationResult:
    scenario_id: int
    pct_missing: float
    pct_false: float
    replication: int
    method: str
    dose: int
    estimate: float
    se_log: float
    p_value: float
    converged: bool


@dataclass(frozen=True)
class ScenarioSummary:
    scenario_id: int
    pct_missing: float
    pct_false: float
    method: str
    dose: int
    n_converged: int
    n_nonconverged: int
    bias: float
    se_bias: float
    bias_ci_low: float
    bias_ci_high: float
    mse: float
    se_mse: float
    power: float
    power_ci_low: float
    power_ci_high: float

    def __post_init__(self):
        assert self.mse >= self.bias ** 2 - 1e-12
        assert 0.0 <= self.power <= 1.0


def _result_rows(scenario, rep, method, fit):
    rows = []
    for dose in (1, 2):
        coef = fit.coef(dose)
        ok = bool(fit.converged and coef.estimable)
        rows.append(ReplicationResult(
            scenario_id=scenario.scenario_id,
            pct_missing=scenario.p_missing_match,
            pct_false=scenario.p_false_match,
            replication=rep,
            method=method,
            dose=dose,
            estimate=coef.ratio if ok else float("nan"),
            se_log=coef.se if ok else float("nan"),
            p_value=coef.p_value if ok else float("nan"),
            converged=ok,
        ))
    return rows


def _vaccinated_fraction_for(cohort, p_population: float) -> float:
    """Translate a population-scale missing-match proportion into the operation's.

    Scenario grids count missing matches per head of population (matching the
    reported study results, whose error growth over the grid is only
    reproducible this way): round(p * n_sim) vaccination records are dropped,
    capped at the number of vaccinated. ``inject_missing_matches`` itself takes
    a fraction of the vaccinated, so divide the target count through.
    """
    n_vaccinated = cohort.n_vaccinated
    if n_vaccinated == 0:
        return 0.0
    target = min(int(math.floor(p_population * len(cohort) + 0.5)), n_vaccinated)
    return target / n_vaccinated


def run_replication(config: SimConfig, scenario: ScenarioSpec, rep: int) -> list[ReplicationResult]:
    """Simulate, perturb and analyse one replication (4 result rows)."""
    seed = mix_seed(scenario.master_seed, scenario.scenario_id, rep)
    cohort = simulate_cohort(config, mix_seed(seed, 0))
    cohort = inject_missing_matches(cohort, _vaccinated_fraction_for(cohort, scenario.p_missing_match),
                                    np.random.default_rng(mix_seed(seed, 1)))
    cohort = inject_false_matches(cohort, scenario.p_false_match,
                                  np.random.default_rng(mix_seed(seed, 2)))

    rows = []
    for method, build, fit in (("cox", build_counting_process, fit_cox),
                               ("sccs", build_sccs_cases, fit_sccs)):
        try:
            result = fit(build(cohort))
        except EstimationError:
            result = FitResult(CoefEstimate.undefined(), CoefEstimate.undefined(),
                               converged=False, iterations=0, loglik=float("nan"))
        rows.extend(_result_rows(scenario, rep, method, result))
    return rows


def _run_item(args):
    config, scenario, rep = args
    return scenario.scenario_id, run_replication(config, scenario, rep)


def run_scenario(config: SimConfig, scenario: ScenarioSpec, n_workers: int = 1,
                 progress=None) -> list[ReplicationResult]:
    """All replications of one scenario, sorted by (replication, method, dose)."""
    return run_grid(config, [scenario], n_workers=n_workers, progress=progress)


def run_grid(config: SimConfig, scenarios: list[ScenarioSpec], n_workers: int = 1,
             progress=None) -> list[ReplicationResult]:
    """Run every (scenario, replication) work item, optionally in parallel.

    ``progress`` is called as progress(scenario, elapsed_seconds) once per
    completed scenario. The output ordering and content are independent of
    ``n_workers``.
    """
    items = [(config, sc, rep) for sc in scenarios for rep in range(sc.n_reps)]
    remaining = {sc.scenario_id: sc.n_reps for sc in scenarios}
    by_id = {sc.scenario_id: sc for sc in scenarios}
    started = time.perf_counter()
    collected = []

    if n_workers <= 1:
        stream = map(_run_item, items)
    else:
        pool = concurrent.futures.ProcessPoolExecutor(max_workers=n_workers)
        stream = pool.map(_run_item, items, chunksize=1)
    try:
        for scenario_id, rows in stream:
            collected.extend(rows)
            remaining[scenario_id] -= 1
            if remaining[scenario_id] == 0 and progress is not None:
                progress(by_id[scenario_id], time.perf_counter() - started)
    finally:
        if n_workers > 1:
            pool.shutdown()

    method_order = {"cox": 0, "sccs": 1}
    collected.sort(key=lambda r: (r.scenario_id, r.replication, method_order[r.method], r.dose))
    return collected


def exact_binomial_ci(successes: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Clopper-Pearson exact binomial confidence interval via beta quantiles."""
    if n < 1 or not 0 <= successes <= n:
        raise ValueError(f"need 0 <= successes <= n with n >= 1, got {successes}/{n}")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    tail = (1.0 - level) / 2.0
    low = 0.0 if successes == 0 else float(stats.beta.ppf(tail, successes, n - successes + 1))
    high = 1.0 if successes == n else float(stats.beta.ppf(1.0 - tail, successes + 1, n - successes))
    return low, high


def summarize(results: list[ReplicationResult], true_rr: float,
              alpha: float = 0.05) -> list[ScenarioSummary]:
    """Bias, MSE and power per (scenario, method, dose) cell with MC errors.

    Bias is reported as mean(estimate) - true_rr. Non-converged replications
    are excluded from every criterion (including the power denominator) and
    counted. Each cell needs at least two converged replications.
    """
    cells = {}
    for r in results:
        cells.setdefault((r.scenario_id, r.method, r.dose), []).append(r)

    summaries = []
    for (scenario_id, method, dose), rows in sorted(cells.items(),
                                                    key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        ok = [r for r in rows if r.converged]
        if len(ok) < 2:
            raise ValueError(
                f"cell (scenario {scenario_id}, {method}, dose {dose}) has "
                f"{len(ok)} converged replications; need >= 2"
            )
        est = np.array([r.estimate for r in ok])
        pvals = np.array([r.p_value for r in ok])
        n = len(ok)

        errors = est - true_rr
        bias = float(errors.mean())
        se_bias = float(errors.std(ddof=1) / math.sqrt(n))
        z = float(stats.norm.ppf(0.975))
        sq = errors ** 2
        mse = float(sq.mean())
        se_mse = float(sq.std(ddof=1) / math.sqrt(n))
        n_reject = int(np.count_nonzero(pvals < alpha))
        power_ci = exact_binomial_ci(n_reject, n, 0.95)

        summaries.append(ScenarioSummary(
            scenario_id=scenario_id,
            pct_missing=rows[0].pct_missing,
            pct_false=rows[0].pct_false,
            method=method,
            dose=dose,
            n_converged=n,
            n_nonconverged=len(rows) - n,
            bias=bias,
            se_bias=se_bias,
            bias_ci_low=bias - z * se_bias,
            bias_ci_high=bias + z * se_bias,
            mse=mse,
            se_mse=se_mse,
            power=n_reject / n,
            power_ci_low=power_ci[0],
            power_ci_high=power_ci[1],
        ))
    return summaries


REPLICATION_COLUMNS = ["scenario_id", "pct_missing", "pct_false", "replication",
                       "method", "dose", "estimate", "se_log", "p_value", "converged"]
SUMMARY_COLUMNS = ["scenario_id", "pct_missing", "pct_false", "method", "dose",
                   "n_converged", "bias", "se_bias", "bias_ci_low", "bias_ci_high",
                   "mse", "se_mse", "power", "power_ci_low", "power_ci_high"]


def _format(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def write_replications_csv(path, results: list[ReplicationResult]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPLICATION_COLUMNS)
        for r in results:
            writer.writerow([_format(getattr(r, c)) for c in REPLICATION_COLUMNS])


def write_summary_csv(path, summaries: list[ScenarioSummary]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            writer.writerow([_format(getattr(s, c)) for c in SUMMARY_COLUMNS])


def read_replications_csv(path) -> list[ReplicationResult]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(ReplicationResult(
                scenario_id=int(row["scenario_id"]),
                pct_missing=float(row["pct_missing"]),
                pct_false=float(row["pct_false"]),
                replication=int(row["replication"]),
                method=row["method"],
                dose=int(row["dose"]),
                estimate=float(row["estimate"]),
                se_log=float(row["se_log"]),
                p_value=float(row["p_value"]),
                converged=row["converged"] == "1",
            ))
    return out


_SUMMARY_INT_COLUMNS = {"scenario_id", "dose", "n_converged"}


def read_summary_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for key in SUMMARY_COLUMNS:
            if key == "method":
                continue
            row[key] = int(row[key]) if key in _SUMMARY_INT_COLUMNS else float(row[key])
    return rows
