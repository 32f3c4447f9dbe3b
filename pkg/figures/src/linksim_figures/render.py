"""Render bias/power/MSE curves and estimate histograms from result tables.

Input files are the simulation harness's ``summary.csv`` and
``replications.csv``. Rendering only plots the numbers found in the files;
unknown extra columns are ignored, missing documented columns are an error.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

METRICS = ("bias", "power", "mse", "histograms")
METHODS = ("cox", "sccs")
DOSES = (1, 2)

_SUMMARY_REQUIRED = {
    "bias": ["pct_missing", "method", "dose", "bias", "bias_ci_low", "bias_ci_high"],
    "power": ["pct_missing", "method", "dose", "power", "power_ci_low", "power_ci_high"],
    "mse": ["pct_missing", "method", "dose", "mse", "se_mse"],
}
_REPLICATIONS_REQUIRED = ["pct_missing", "method", "dose", "estimate", "converged"]

_STYLE = {
    "cox": dict(color="#1f6fb4", marker="o", label="Cox model"),
    "sccs": dict(color="#d1491c", marker="s", label="SCCS"),
}

# fixed salt so SVG element ids do not change between identical runs
matplotlib.rcParams["svg.hashsalt"] = "linksim-figures"
_METADATA = {"svg": {"Date": None}, "pdf": {"CreationDate": None}, "png": {}}


@dataclass(frozen=True)
class FigureRequest:
    """What to draw: which metric, from which files, to which image path."""

    metric: str
    out_path: str
    summary_path: str | None = None
    replications_path: str | None = None
    image_format: str | None = None  # derived from out_path suffix when None
    histogram_quantile: float = 0.995

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        needs = "replications_path" if self.metric == "histograms" else "summary_path"
        if getattr(self, needs) is None:
            raise ValueError(f"metric {self.metric!r} requires {needs}")
        path = getattr(self, needs)
        if not Path(path).exists():
            raise FileNotFoundError(f"input file not found: {path}")
        if not 0.0 < self.histogram_quantile <= 1.0:
            raise ValueError("histogram_quantile must be in (0, 1]")

    @property
    def format(self) -> str:
        if self.image_format:
            return self.image_format
        suffix = Path(self.out_path).suffix.lstrip(".").lower()
        return suffix or "svg"


def _read_rows(path, required, numeric):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise ValueError(f"{path}: missing required column '{column}'")
        rows = []
        for line, row in enumerate(reader, start=2):
            parsed = dict(row)
            for column in numeric:
                value = row[column]
                if value is None or value.strip() == "":
                    raise ValueError(f"{path}:{line}: column '{column}' is empty")
                parsed[column] = float(value)
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def _series(rows, method, dose, columns):
    picked = [r for r in rows
              if r["method"] == method and int(r["dose"]) == dose]
    picked.sort(key=lambda r: r["pct_missing"])
    return {c: np.array([r[c] for r in picked]) for c in ("pct_missing", *columns)}


def render_metric_figure(request: FigureRequest):
    """Build the requested figure and return it; ``save_figure`` writes it."""
    if request.metric == "histograms":
        return _render_histograms(request)
    return _render_curves(request)


def _render_curves(request):
    columns = _SUMMARY_REQUIRED[request.metric]
    numeric = [c for c in columns if c not in ("method",)]
    rows = _read_rows(request.summary_path, columns, numeric)

    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6), sharey=True)
    for ax, dose in zip(axes, DOSES):
        for method in METHODS:
            series = _series(rows, method, dose, numeric[2:])
            if len(series["pct_missing"]) == 0:
                continue
            x = series["pct_missing"] * 100.0
            y = series[request.metric]
            if request.metric == "mse":
                half = 1.959964 * series["se_mse"]
                lo, hi = y - half, y + half
            else:
                lo = series[f"{request.metric}_ci_low"]
                hi = series[f"{request.metric}_ci_high"]
            style = _STYLE[method]
            ax.errorbar(x, y, yerr=[y - lo, hi - y], capsize=3, linewidth=1.4,
                        markersize=4.5, **style)
        ax.set_title(f"Dose {dose}")
        ax.set_xlabel("Missing matches (%)")
        ax.grid(True, alpha=0.3)
        if request.metric == "bias":
            ax.axhline(0.0, color="black", linewidth=0.8, alpha=0.6)
    axes[0].set_ylabel(_ylabel(request.metric))
    axes[0].legend(frameon=False, fontsize=9)
    fig.tight_layout()
    return fig


def _ylabel(metric):
    return {"bias": "Bias of the estimated relative risk",
            "power": "Power ($\\alpha$ = 0.05)",
            "mse": "Mean-squared error"}[metric]


def _render_histograms(request):
    rows = _read_rows(request.replications_path, _REPLICATIONS_REQUIRED,
                      ["pct_missing", "dose", "estimate", "converged"])
    rows = [r for r in rows if r["converged"] == 1.0 and math.isfinite(r["estimate"])]
    if not rows:
        raise ValueError("no converged replications to draw")
    scenarios = sorted({r["pct_missing"] for r in rows})

    fig, axes = plt.subplots(len(METHODS) * len(DOSES), len(scenarios),
                             figsize=(2.1 * len(scenarios) + 1.5, 9.2),
                             squeeze=False)
    for row_idx, (method, dose) in enumerate((m, d) for m in METHODS for d in DOSES):
        estimates = [r["estimate"] for r in rows
                     if r["method"] == method and int(r["dose"]) == dose]
        cap = np.quantile(estimates, request.histogram_quantile) if estimates else 1.0
        for col_idx, pct in enumerate(scenarios):
            ax = axes[row_idx][col_idx]
            values = np.array([r["estimate"] for r in rows
                               if r["method"] == method and int(r["dose"]) == dose
                               and r["pct_missing"] == pct])
            values = np.clip(values, None, cap)
            if len(values):
                ax.hist(values, bins=24, range=(0.0, cap),
                        color=_STYLE[method]["color"], alpha=0.85)
            if row_idx == 0:
                ax.set_title(f"{pct * 100:g}% missing", fontsize=9)
            if col_idx == 0:
                ax.set_ylabel(f"{_STYLE[method]['label']}\ndose {dose}", fontsize=8)
            ax.tick_params(labelsize=7)
    fig.suptitle("Ratio-scale estimates per scenario "
                 f"(right tail clipped at the {request.histogram_quantile:g} quantile)",
                 fontsize=10)
    fig.tight_layout(rect=(0, 0, 1, 0.97))
    return fig


def save_figure(fig, request: FigureRequest) -> str:
    fmt = request.format
    fig.savefig(request.out_path, format=fmt, metadata=_METADATA.get(fmt, {}))
    plt.close(fig)
    return request.out_path
