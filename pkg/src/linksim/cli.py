"""Command-line interface: run a scenario grid and write result tables."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .config import DEFAULT_VACCINE_TYPE_DIST, SimConfig, load_first_dose_curve
from .harness import (
    DEFAULT_FALSE_MATCH,
    DEFAULT_MISSING_GRID,
    ScenarioSpec,
    run_grid,
    summarize,
    write_replications_csv,
    write_summary_csv,
)


class ConfigError(ValueError):
    pass


_SIM_KEYS = {"n_sim", "n_days", "campaign_start_day", "d_risk", "d_immune",
             "rr_vacc", "p_event_year", "second_dose_gap_mrna", "second_dose_gap_az",
             "first_dose_curve", "vaccine_type_dist"}
_SCENARIO_KEYS = {"missing_match", "false_match", "replications", "alpha", "seed"}
_TYPE_ORDER = ("biontech", "moderna", "astrazeneca", "janssen")


def load_config_file(path) -> dict:
    """Parse the TOML run configuration; unknown keys are rejected."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    scenario_table = raw.pop("scenarios", {})
    unknown = set(raw) - _SIM_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys in {path}: {sorted(unknown)}")
    unknown = set(scenario_table) - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown [scenarios] keys in {path}: {sorted(unknown)}")

    if "vaccine_type_dist" in raw:
        table = raw["vaccine_type_dist"]
        missing = set(_TYPE_ORDER) - set(table)
        if missing:
            raise ConfigError(f"vaccine_type_dist must name all of {_TYPE_ORDER}")
        dist = [float(table[name]) for name in _TYPE_ORDER]
        total = sum(dist)
        if abs(total - 1.0) > 0.01:
            raise ConfigError(f"vaccine_type_dist sums to {total}, expected 1")
        raw["vaccine_type_dist"] = tuple(p / total for p in dist)

    if "first_dose_curve" in raw and raw["first_dose_curve"] != "default":
        curve_path = Path(raw["first_dose_curve"])
        if not curve_path.is_absolute():
            curve_path = path.parent / curve_path
        raw["first_dose_curve"] = load_first_dose_curve(curve_path)
    elif raw.get("first_dose_curve") == "default":
        del raw["first_dose_curve"]

    raw["scenarios"] = scenario_table
    return raw


def build_run_setup(args) -> tuple[SimConfig, list[ScenarioSpec]]:
    settings = load_config_file(args.config) if args.config else {"scenarios": {}}
    scenario_table = settings.pop("scenarios")

    settings.setdefault("n_sim", 770_000)
    settings.setdefault("vaccine_type_dist", DEFAULT_VACCINE_TYPE_DIST)
    try:
        config = SimConfig(**settings)
    except ValueError as exc:
        raise ConfigError(f"invalid simulation configuration: {exc}") from exc

    missing_grid = scenario_table.get("missing_match", list(DEFAULT_MISSING_GRID))
    if args.scenarios is not None:
        try:
            missing_grid = [float(tok) for tok in args.scenarios.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"cannot parse --scenarios: {exc}") from exc
        if not missing_grid:
            raise ConfigError("--scenarios must list at least one proportion")
    n_reps = args.reps if args.reps is not None else int(scenario_table.get("replications", 2000))
    seed = args.seed if args.seed is not None else int(scenario_table.get("seed", 42))
    alpha = float(scenario_table.get("alpha", 0.05))
    p_false = float(scenario_table.get("false_match", DEFAULT_FALSE_MATCH))

    try:
        scenarios = [
            ScenarioSpec(scenario_id=i, p_missing_match=float(p), p_false_match=p_false,
                         n_reps=n_reps, alpha=alpha, master_seed=seed)
            for i, p in enumerate(missing_grid)
        ]
    except ValueError as exc:
        raise ConfigError(f"invalid scenario settings: {exc}") from exc
    return config, scenarios


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linksim",
        description="Monte-Carlo study of record-linkage errors in vaccine-safety analyses",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario grid and write CSV results")
    run.add_argument("--config", metavar="PATH", help="TOML run configuration (defaults used when omitted)")
    run.add_argument("--out", metavar="DIR", default="results", help="output directory (default: results)")
    run.add_argument("--seed", type=int, metavar="U64", help="master seed (overrides config)")
    run.add_argument("--threads", type=int, default=1, metavar="N", help="worker processes (default: 1)")
    run.add_argument("--reps", type=int, metavar="N", help="replications per scenario (overrides config)")
    run.add_argument("--scenarios", metavar="LIST",
                     help="comma-separated missing-match proportions (overrides config)")
    run.add_argument("--quiet", action="store_true", help="suppress progress output")
    return parser


def _cmd_run(args) -> int:
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        config, scenarios = build_run_setup(args)
    except ConfigError as exc:
        print(f"linksim: error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def progress(scenario, elapsed):
        if not args.quiet:
            print(f"scenario {scenario.scenario_id} (missing={scenario.p_missing_match:g}, "
                  f"false={scenario.p_false_match:g}) finished after {elapsed:.1f}s", flush=True)

    started = time.perf_counter()
    results = run_grid(config, scenarios, n_workers=args.threads, progress=progress)
    write_replications_csv(out_dir / "replications.csv", results)

    try:
        summaries = summarize(results, true_rr=config.rr_vacc, alpha=scenarios[0].alpha)
    except ValueError as exc:
        print(f"linksim: error: {exc} (replications.csv was written)", file=sys.stderr)
        return 2
    write_summary_csv(out_dir / "summary.csv", summaries)

    if not args.quiet:
        print(f"wrote {out_dir / 'replications.csv'} and {out_dir / 'summary.csv'} "
              f"in {time.perf_counter() - started:.1f}s")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
