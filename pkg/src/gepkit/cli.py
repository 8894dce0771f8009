"""Batch front door: one JSON config file drives estimation, model builds,
desk solves, ablations, dual reports, and plan comparison.

Every run writes its primary artifacts (byte-identical across re-runs)
under a run directory; timings go to a separate file so artifacts stay
reproducible.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import toys
from .core import (
    GepError,
    IndexSets,
    ModelVariant,
    ParameterSet,
    TechKind,
    load_parameters,
    save_parameters,
    validate,
)
from .estimate import EstimationConfig, EstimationError, estimate_parameters
from .ingest import (
    DEMAND_SCHEMA,
    GENERATION_SCHEMA,
    IngestError,
    parse_hourly,
    read_holidays,
)
from .experiments import (
    binding_report,
    compare_plans,
    plan_table_csv,
    read_reference_plan,
    run_ablations,
)
from .model import build_conventional, build_iso_gep, capacity_plan, model_size
from .mps import export_chronological_stream, export_standard
from .simplex import SolverError
from .solve import ModelTooLargeError, solve_desk

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_MISSING_INPUT = 4
EXIT_DATA = 5
EXIT_TOO_LARGE = 6
EXIT_SOLVER = 7

TOY_INSTANCES = {
    "ramp_toy": toys.ramp_toy,
    "steep_ramp_toy": toys.steep_ramp_toy,
    "binding_hour7_toy": toys.binding_hour7_toy,
    "slack_variation_toy": toys.slack_variation_toy,
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    paths: dict[str, str] = field(default_factory=dict)
    instance: Optional[str] = None
    reference_year: int = 2017
    horizon_years: int = 20
    growth_rate: float = 0.003
    discount_rate: float = 0.03
    reserve_fraction: Optional[float | list] = None
    cv_fraction: float = 0.1
    share_mode: str = "off"
    share_reference: dict[str, float] = field(default_factory=dict)
    share_margin: float = 0.05
    variation_constraints: bool = True
    variation_costs: bool = True
    solver_tol: float = 1e-7
    scale_guard: int = 200_000
    binding_tol: float = 1e-6

    KNOWN_KEYS = {
        "paths", "instance", "reference_year", "horizon_years", "growth_rate",
        "discount_rate", "reserve_fraction", "cv_fraction", "share_mode",
        "share_reference", "share_margin", "variation_constraints",
        "variation_costs", "solver_tol", "scale_guard", "binding_tol",
    }

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config root must be an object")
        unknown = set(doc) - cls.KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**doc)
        cfg.check()
        return cfg

    def check(self) -> None:
        if self.share_mode not in ("full", "lower_only", "off"):
            raise ConfigError(f"bad share_mode {self.share_mode!r}")
        if self.instance is not None and self.instance not in TOY_INSTANCES:
            raise ConfigError(f"unknown instance {self.instance!r}; choose "
                              f"from {sorted(TOY_INSTANCES)}")
        if self.horizon_years < 1:
            raise ConfigError("horizon_years must be >= 1")
        if not 0 <= self.share_margin <= 1:
            raise ConfigError("share_margin must lie in [0, 1]")
        for key, lo in (("solver_tol", 0.0), ("binding_tol", 0.0),
                        ("cv_fraction", 0.0)):
            if getattr(self, key) < lo:
                raise ConfigError(f"{key} must be >= {lo}")
        if self.scale_guard < 1:
            raise ConfigError("scale_guard must be positive")
        for name, value in self.paths.items():
            if name != "output_dir" and not Path(value).exists():
                raise ConfigError(f"paths.{name} does not exist: {value}")

    def path(self, name: str, required: bool = True) -> Optional[Path]:
        value = self.paths.get(name)
        if value is None:
            if required:
                raise FileNotFoundError(f"config paths.{name} is required "
                                        "for this subcommand")
            return None
        return Path(value)


def _error(code: int, name: str, detail) -> int:
    text = str(detail).replace('"', "'").replace("\n", " ")
    print(f'gep-error code={name} detail="{text}"', file=sys.stderr)
    return code


def _run_dir(cfg: RunConfig, args) -> Path:
    base = Path(args.output_dir or cfg.paths.get("output_dir", "out"))
    run_id = args.run_id or dt.datetime.now(dt.timezone.utc).strftime(
        "%Y%m%dT%H%M%SZ")
    out = base / f"run-{run_id}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_instance(cfg: RunConfig) -> tuple[ParameterSet, IndexSets]:
    if cfg.instance is not None:
        return TOY_INSTANCES[cfg.instance]()
    params_path = cfg.path("params_file")
    params, sets = load_parameters(params_path)
    report = validate(params, sets)
    if not report.ok:
        raise GepError(f"parameter file invalid: {report}")
    return params, sets


def _variant(cfg: RunConfig, family: str = "iso_gep") -> ModelVariant:
    return ModelVariant(variation_constraints=cfg.variation_constraints,
                        variation_costs=cfg.variation_costs,
                        share_constraints=cfg.share_mode, family=family)


def _write(path: Path, text: str, artifacts: list[Path]) -> None:
    path.write_text(text, encoding="utf-8")
    artifacts.append(path)


def _write_timings(run_dir: Path, timings: dict) -> None:
    (run_dir / "timings.json").write_text(
        json.dumps(timings, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _capacities_csv(plan) -> str:
    lines = ["tech,year,capacity_mw"]
    for (k, t), mw in sorted(plan.items(), key=lambda kv: (kv[0][0].value,
                                                           kv[0][1])):
        lines.append(f"{k.value},{t},{mw!r}")
    return "\n".join(lines) + "\n"


def cmd_estimate(cfg: RunConfig, args) -> int:
    import time

    if cfg.reserve_fraction is None:
        raise ConfigError("reserve_fraction is required for estimation "
                          "(there is no defensible default)")
    t0 = time.perf_counter()
    with open(cfg.path("demand_file"), encoding="utf-8") as fh:
        demand = parse_hourly(fh, DEMAND_SCHEMA)
    with open(cfg.path("generation_file"), encoding="utf-8") as fh:
        generation = parse_hourly(fh, GENERATION_SCHEMA)
    holiday_path = cfg.path("holiday_file", required=False)
    holidays = set()
    if holiday_path is not None:
        with open(holiday_path, encoding="utf-8") as fh:
            holidays = read_holidays(fh)

    share_max = share_min = None
    if cfg.share_reference:
        ref = {TechKind(k): v for k, v in cfg.share_reference.items()}
        share_max = {k: min(1.0, v + cfg.share_margin) for k, v in ref.items()}
        share_min = {k: max(0.0, v - cfg.share_margin) for k, v in ref.items()}
    est_cfg = EstimationConfig(
        reserve_fraction=cfg.reserve_fraction,
        horizon_years=cfg.horizon_years,
        growth_rate=cfg.growth_rate,
        discount_rate=cfg.discount_rate,
        reference_year=cfg.reference_year,
        cv_fraction=cfg.cv_fraction,
        share_max=share_max,
        share_min=share_min,
    )
    params, sets, report = estimate_parameters(
        demand.records, generation.records, holidays, est_cfg)
    vreport = validate(params, sets)

    run_dir = _run_dir(cfg, args)
    artifacts: list[Path] = []
    save_parameters(params, sets, run_dir / "params.json")
    artifacts.append(run_dir / "params.json")
    text = (f"parse: demand {demand.summary()}; generation "
            f"{generation.summary()}\n" + report.to_text()
            + f"validation: {vreport}\n")
    _write(run_dir / "estimation_report.txt", text, artifacts)
    _write_timings(run_dir, {"estimate_s": time.perf_counter() - t0})
    for p in artifacts:
        print(p)
    if not vreport.ok:
        return _error(EXIT_DATA, "invalid_estimate",
                      f"estimated parameters failed validation: {vreport}")
    return EXIT_OK


def cmd_build(cfg: RunConfig, args) -> int:
    import time

    params, sets = _load_instance(cfg)
    variant = _variant(cfg)
    run_dir = _run_dir(cfg, args)
    artifacts: list[Path] = []

    t0 = time.perf_counter()
    size = model_size(sets, variant)
    size_doc = {
        "rows_by_tag": size.rows_by_tag,
        "cols_by_kind": size.cols_by_kind,
        "n_rows": size.n_rows,
        "n_cols": size.n_cols,
    }
    _write(run_dir / "size_report.json",
           json.dumps(size_doc, sort_keys=True, indent=1) + "\n", artifacts)
    if not args.size_only:
        with open(run_dir / "model.mps", "w", encoding="utf-8") as fh:
            export_chronological_stream(params, sets, variant, fh)
        artifacts.append(run_dir / "model.mps")
    _write_timings(run_dir, {"build_s": time.perf_counter() - t0})
    for p in artifacts:
        print(p)
    return EXIT_OK


def cmd_solve(cfg: RunConfig, args) -> int:
    import time

    params, sets = _load_instance(cfg)
    variant = _variant(cfg)
    model = build_iso_gep(params, sets, variant)
    t0 = time.perf_counter()
    sol = solve_desk(model, tol=cfg.solver_tol, scale_guard=cfg.scale_guard)
    elapsed = time.perf_counter() - t0
    run_dir = _run_dir(cfg, args)
    artifacts: list[Path] = []
    _write(run_dir / "solution.json", sol.to_json() + "\n", artifacts)
    if sol.status == "optimal":
        plan = capacity_plan(sol.primal, params, sets)
        _write(run_dir / "capacities.csv", _capacities_csv(plan), artifacts)
    _write_timings(run_dir, {"solve_s": elapsed})
    for p in artifacts:
        print(p)
    if sol.status != "optimal":
        return _error(EXIT_SOLVER, f"solve_{sol.status}",
                      f"model is {sol.status}")
    return EXIT_OK


def cmd_ablate(cfg: RunConfig, args) -> int:
    params, sets = _load_instance(cfg)
    report = run_ablations(params, sets, share_constraints=cfg.share_mode,
                           tol=cfg.solver_tol)
    run_dir = _run_dir(cfg, args)
    artifacts: list[Path] = []
    _write(run_dir / "ablation_report.json",
           json.dumps(report.to_json_dict(), sort_keys=True, indent=1) + "\n",
           artifacts)
    _write(run_dir / "ablation_report.txt", report.to_text(), artifacts)
    _write_timings(run_dir, report.timings)
    for p in artifacts:
        print(p)
    return EXIT_OK


def cmd_duals(cfg: RunConfig, args) -> int:
    import time

    params, sets = _load_instance(cfg)
    model = build_iso_gep(params, sets, _variant(cfg))
    t0 = time.perf_counter()
    sol = solve_desk(model, tol=cfg.solver_tol, scale_guard=cfg.scale_guard)
    elapsed = time.perf_counter() - t0
    if sol.status != "optimal":
        return _error(EXIT_SOLVER, f"solve_{sol.status}",
                      f"model is {sol.status}; no duals to report")
    report = binding_report(sol, model, tol=cfg.binding_tol)
    run_dir = _run_dir(cfg, args)
    artifacts: list[Path] = []
    _write(run_dir / "binding_report.csv", report.to_csv(), artifacts)
    _write_timings(run_dir, {"solve_s": elapsed})
    for p in artifacts:
        print(p)
    return EXIT_OK


def cmd_compare(cfg: RunConfig, args) -> int:
    with open(cfg.path("capacities_file"), encoding="utf-8") as fh:
        model_plan = read_reference_plan(fh)
    with open(cfg.path("reference_plan"), encoding="utf-8") as fh:
        reference = read_reference_plan(fh)
    rows = compare_plans(model_plan, reference)
    run_dir = _run_dir(cfg, args)
    path = run_dir / "compare.csv"
    path.write_text(plan_table_csv(rows), encoding="utf-8")
    _write_timings(run_dir, {})
    print(path)
    return EXIT_OK


COMMANDS = {
    "estimate": cmd_estimate,
    "build": cmd_build,
    "solve": cmd_solve,
    "ablate": cmd_ablate,
    "duals": cmd_duals,
    "compare": cmd_compare,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gep",
        description="Expansion planning with hourly variation limits: "
                    "estimate parameters, build/solve models, run the "
                    "ablation and dual analyses.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, type=Path,
                        help="JSON run configuration")
    parser.add_argument("--output-dir", default=None,
                        help="override paths.output_dir")
    parser.add_argument("--run-id", default=None,
                        help="fixed run directory suffix (default: UTC stamp)")
    parser.add_argument("--size-only", action="store_true",
                        help="build: write the size report but no MPS file")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config)
    except ConfigError as exc:
        return _error(EXIT_CONFIG, "invalid_config", exc)
    except TypeError as exc:
        return _error(EXIT_CONFIG, "invalid_config", exc)
    try:
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        return _error(EXIT_CONFIG, "invalid_config", exc)
    except FileNotFoundError as exc:
        return _error(EXIT_MISSING_INPUT, "missing_input", exc)
    except ModelTooLargeError as exc:
        return _error(EXIT_TOO_LARGE, "model_too_large", exc)
    except SolverError as exc:
        return _error(EXIT_SOLVER, "solver_failure", exc)
    except (IngestError, EstimationError, GepError) as exc:
        return _error(EXIT_DATA, "data_error", exc)


if __name__ == "__main__":
    sys.exit(main())
