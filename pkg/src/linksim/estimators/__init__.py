from .cox import fit_cox
from .datasets import (
    CountingProcessData,
    CountingProcessRow,
    ExposureLabel,
    SccsCase,
    SccsInterval,
    build_counting_process,
    build_sccs_cases,
)
from .inference import CoefEstimate, EstimationError, FitResult, wald_p
from .sccs import fit_sccs

__all__ = [
    "CoefEstimate",
    "CountingProcessData",
    "CountingProcessRow",
    "EstimationError",
    "ExposureLabel",
    "FitResult",
    "SccsCase",
    "SccsInterval",
    "build_counting_process",
    "build_sccs_cases",
    "fit_cox",
    "fit_sccs",
    "wald_p",
]
