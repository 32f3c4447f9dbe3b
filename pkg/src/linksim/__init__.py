"""Monte-Carlo study of record-linkage errors in vaccine-safety analyses.

The package simulates day-resolution vaccination/adverse-event cohorts,
injects record-linkage errors (missing and false matches), analyses the
perturbed data with a Cox model (time-varying exposure) and the
self-controlled case series method, and aggregates bias, MSE and power
over scenario grids.
"""

from .config import (
    DEFAULT_VACCINE_TYPE_DIST,
    SimConfig,
    VaccineType,
    default_first_dose_curve,
    load_first_dose_curve,
    write_first_dose_curve,
)
from .estimators import (
    CoefEstimate,
    CountingProcessData,
    CountingProcessRow,
    EstimationError,
    ExposureLabel,
    FitResult,
    SccsCase,
    SccsInterval,
    build_counting_process,
    build_sccs_cases,
    fit_cox,
    fit_sccs,
    wald_p,
)
from .harness import (
    ReplicationResult,
    ScenarioSpec,
    ScenarioSummary,
    default_scenarios,
    exact_binomial_ci,
    mix_seed,
    read_replications_csv,
    read_summary_csv,
    run_grid,
    run_replication,
    run_scenario,
    splitmix64,
    summarize,
    write_replications_csv,
    write_summary_csv,
)
from .linkage import ErrorSpec, apply_errors, inject_false_matches, inject_missing_matches
from .simulate import (
    Cohort,
    IndividualRecord,
    VaccinationRecord,
    annual_to_daily_probability,
    in_risk_window,
    sample_vaccine_type,
    schedule_second_dose,
    simulate_cohort,
)

__version__ = "0.1.0"
