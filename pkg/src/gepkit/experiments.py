"""Ablation runs, fixed-capacity feasibility tests, binding-dual reporting,
the binding-only re-solve, and capacity-plan comparison tables."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import GepError, IndexSets, ModelVariant, ParameterSet, TechKind
from .lp import LPModel
from .model import build_conventional, build_iso_gep, capacity_plan
from .solve import Solution, solve_desk

ABLATION_LABELS = ("full", "no_vc_no_cost", "no_vc_with_cost",
                   "vc_no_cost", "conventional")

BINDING_TOL = 1e-6


@dataclass(frozen=True)
class AblationCase:
    label: str
    variant: ModelVariant


def standard_ablation_cases(share_constraints: str = "off",
                            include_conventional: bool = True
                            ) -> list[AblationCase]:
    """The four chronological-model cases plus the block-demand model."""
    mk = lambda vc, cost, family="iso_gep": ModelVariant(
        variation_constraints=vc, variation_costs=cost,
        share_constraints=share_constraints, family=family)
    cases = [
        AblationCase("full", mk(True, True)),
        AblationCase("no_vc_no_cost", mk(False, False)),
        AblationCase("no_vc_with_cost", mk(False, True)),
        AblationCase("vc_no_cost", mk(True, False)),
    ]
    if include_conventional:
        cases.append(AblationCase("conventional",
                                  mk(False, False, family="conventional")))
    return cases


@dataclass
class CaseResult:
    label: str
    status: str
    objective: Optional[float]
    builds: dict[tuple[TechKind, int], float]
    refit_status: Optional[str] = None
    refit_objective: Optional[float] = None
    refit_conflict_tags: dict[str, int] = field(default_factory=dict)

    @property
    def feasible_under_full(self) -> Optional[bool]:
        if self.refit_status is None:
            return None
        return self.refit_status == "optimal"


@dataclass
class AblationReport:
    cases: dict[str, CaseResult]
    no_vc_builds_match: bool
    match_tol: float
    timings: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {"match_tol": self.match_tol,
               "no_vc_builds_match": self.no_vc_builds_match, "cases": {}}
        for label, cr in self.cases.items():
            out["cases"][label] = {
                "status": cr.status,
                "objective": cr.objective,
                "builds": {f"{k.value}.t{t}": v
                           for (k, t), v in sorted(cr.builds.items(),
                                                   key=lambda kv: (kv[0][0].value,
                                                                   kv[0][1]))},
                "refit_status": cr.refit_status,
                "refit_objective": cr.refit_objective,
                "refit_conflict_tags": cr.refit_conflict_tags,
                "feasible_under_full": cr.feasible_under_full,
            }
        return out

    def to_text(self) -> str:
        lines = [f"ablation report (build match tol {self.match_tol:g})"]
        for label, cr in self.cases.items():
            obj = "n/a" if cr.objective is None else f"{cr.objective:.6g}"
            refit = cr.refit_status or "n/a"
            lines.append(f"  {label}: {cr.status}, objective {obj}, "
                         f"refit under full model: {refit}")
            if cr.refit_conflict_tags:
                conflicts = ", ".join(f"{tag}x{n}" for tag, n
                                      in sorted(cr.refit_conflict_tags.items()))
                lines.append(f"    conflicting row families: {conflicts}")
        lines.append(f"  no-variation twin builds identical: "
                     f"{self.no_vc_builds_match}")
        return "\n".join(lines) + "\n"


def _extract_builds(solution: Solution, sets: IndexSets
                    ) -> dict[tuple[TechKind, int], float]:
    out = {}
    for k in sets.techs:
        for t in range(1, sets.years + 1):
            out[(k, t)] = solution.primal.get(f"x.{k.value}.t{t}", 0.0)
    return out


def _conflict_tags(solution: Solution) -> dict[str, int]:
    tags: dict[str, int] = {}
    cert = solution.certificate or {}
    for row_name in cert.get("rows", {}):
        tag = row_name.split(".", 1)[0]
        tags[tag] = tags.get(tag, 0) + 1
    return tags


def run_ablations(params: ParameterSet, sets: IndexSets,
                  share_constraints: str = "off",
                  include_conventional: bool = True,
                  tol: float = 1e-7, match_tol: float = 1e-6
                  ) -> AblationReport:
    """Solve every ablation case, then re-solve the full model with each
    case's builds pinned to test whether that plan can follow demand."""
    cases = standard_ablation_cases(share_constraints, include_conventional)
    full_variant = cases[0].variant
    results: dict[str, CaseResult] = {}
    timings: dict[str, float] = {}

    for case in cases:
        t0 = time.perf_counter()
        if case.variant.family == "conventional":
            model = build_conventional(params, sets, case.variant)
        else:
            model = build_iso_gep(params, sets, case.variant)
        try:
            sol = solve_desk(model, tol=tol)
        except Exception as exc:
            raise GepError(f"ablation case {case.label}: {exc}") from exc
        timings[case.label] = time.perf_counter() - t0
        if sol.status != "optimal":
            results[case.label] = CaseResult(case.label, sol.status, None, {})
            continue
        builds = _extract_builds(sol, sets)
        cr = CaseResult(case.label, sol.status, sol.objective, builds)

        t0 = time.perf_counter()
        pinned = ModelVariant(
            variation_constraints=full_variant.variation_constraints,
            variation_costs=full_variant.variation_costs,
            share_constraints=full_variant.share_constraints,
            fixed_capacities=builds, family="iso_gep")
        refit = solve_desk(build_iso_gep(params, sets, pinned), tol=tol)
        timings[f"{case.label}.refit"] = time.perf_counter() - t0
        cr.refit_status = refit.status
        cr.refit_objective = refit.objective
        if refit.status == "infeasible":
            cr.refit_conflict_tags = _conflict_tags(refit)
        results[case.label] = cr

    a = results.get("no_vc_no_cost")
    b = results.get("no_vc_with_cost")
    match = False
    if a and b and a.builds and b.builds:
        match = all(abs(a.builds[key] - b.builds[key])
                    <= match_tol * (1.0 + abs(a.builds[key]))
                    for key in a.builds)
    return AblationReport(results, match, match_tol, timings)


# ---------------------------------------------------------------------------
# Binding variation rows


@dataclass(frozen=True)
class BindingEntry:
    row: str
    tag: str                     # EQ9 or EQ10
    tech: str
    year: int
    season: str
    day_type: str
    hour: int
    scenario: int
    dual: float
    activity: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.activity


@dataclass
class BindingReport:
    entries: list[BindingEntry]
    tol: float

    def count(self) -> int:
        return len(self.entries)

    def grouped(self, scenario_levels: Optional[Mapping[int, str]] = None
                ) -> dict[tuple[int, str, str], int]:
        """Entry counts keyed by (hour, season, demand-level label)."""
        out: dict[tuple[int, str, str], int] = {}
        for e in self.entries:
            level = (scenario_levels or {}).get(e.scenario, f"s{e.scenario}")
            key = (e.hour, e.season, level)
            out[key] = out.get(key, 0) + 1
        return out

    def to_csv(self) -> str:
        lines = ["row,tag,tech,year,season,day_type,hour,scenario,"
                 "dual,activity,rhs"]
        for e in self.entries:
            lines.append(f"{e.row},{e.tag},{e.tech},{e.year},{e.season},"
                         f"{e.day_type},{e.hour},{e.scenario},{e.dual!r},"
                         f"{e.activity!r},{e.rhs!r}")
        return "\n".join(lines) + "\n"


def binding_report(solution: Solution, model: LPModel,
                   tol: float = BINDING_TOL) -> BindingReport:
    """Variation-limit rows whose dual exceeds ``tol``.

    Every reported row must be active (complementary slackness); a reported
    row with slack is a solver defect and raises.
    """
    if solution.status != "optimal":
        raise GepError("binding report needs an optimal solution with duals")
    from .solve import activity_vector

    x = np.array([solution.primal[c.name] for c in model.columns])
    act = activity_vector(model, x)
    entries = []
    for i, row in enumerate(model.rows):
        if row.tag not in ("EQ9", "EQ10"):
            continue
        dual = solution.dual.get(row.name, 0.0)
        if abs(dual) <= tol:
            continue
        tech, t_lab, season, day_type, h_lab, s_lab = row.labels
        entry = BindingEntry(row.name, row.tag, tech, int(t_lab[1:]),
                             season, day_type, int(h_lab[1:]),
                             int(s_lab[1:]), dual, float(act[i]), row.rhs)
        if abs(entry.slack) > 100 * tol * (1.0 + abs(row.rhs)):
            raise GepError(f"row {row.name} has dual {dual:g} but slack "
                           f"{entry.slack:g}; duals are inconsistent")
        entries.append(entry)
    return BindingReport(entries, tol)


@dataclass
class DropReport:
    objective_full: float
    objective_reduced: float
    kept_rows: int
    dropped_rows: int
    agrees: bool
    difference: float
    timings: dict[str, float]

    def to_text(self) -> str:
        verdict = ("objectives agree" if self.agrees else
                   "objectives diverge (alternate optima caveat)")
        return (f"binding-only re-solve: kept {self.kept_rows} of "
                f"{self.kept_rows + self.dropped_rows} variation rows; "
                f"{self.objective_full!r} -> {self.objective_reduced!r}; "
                f"{verdict}\n")


def drop_nonbinding_and_resolve(params: ParameterSet, sets: IndexSets,
                                share_constraints: str = "off",
                                dual_tol: float = BINDING_TOL,
                                tol: float = 1e-7) -> DropReport:
    """Solve the full model, drop every variation row that is not binding,
    re-solve, and compare objectives (divergence is reported, not an error)."""
    variant = ModelVariant(share_constraints=share_constraints)
    timings = {}
    t0 = time.perf_counter()
    model = build_iso_gep(params, sets, variant)
    sol = solve_desk(model, tol=tol)
    timings["full"] = time.perf_counter() - t0
    if sol.status != "optimal":
        raise GepError(f"full model did not solve: {sol.status}")

    variation_rows = [r.name for r in model.rows if r.tag in ("EQ9", "EQ10")]
    keep = {name for name in variation_rows
            if abs(sol.dual.get(name, 0.0)) > dual_tol}
    t0 = time.perf_counter()
    reduced = build_iso_gep(params, sets, variant, keep_variation=keep)
    sol2 = solve_desk(reduced, tol=tol)
    timings["reduced"] = time.perf_counter() - t0
    if sol2.status != "optimal":
        raise GepError(f"reduced model did not solve: {sol2.status}")

    diff = abs(sol.objective - sol2.objective)
    agrees = diff <= tol * (1.0 + abs(sol.objective))
    return DropReport(sol.objective, sol2.objective, len(keep),
                      len(variation_rows) - len(keep), agrees, diff, timings)


# ---------------------------------------------------------------------------
# Plan comparison


@dataclass(frozen=True)
class PlanRow:
    tech: str
    year: int
    model_mw: Optional[float]
    reference_mw: Optional[float]

    @property
    def gap_mw(self) -> Optional[float]:
        if self.model_mw is None or self.reference_mw is None:
            return None
        return self.model_mw - self.reference_mw

    @property
    def gap_rel(self) -> Optional[float]:
        gap = self.gap_mw
        if gap is None or not self.reference_mw:
            return None
        return gap / self.reference_mw


def compare_plans(model_plan: Mapping[tuple[TechKind, int], float],
                  reference_plan: Mapping[tuple[TechKind, int], float]
                  ) -> list[PlanRow]:
    """Side-by-side capacities; keys missing on either side stay absent
    rather than being treated as zero."""
    keys = sorted(set(model_plan) | set(reference_plan),
                  key=lambda kt: (kt[0].value, kt[1]))
    rows = []
    for key in keys:
        k, t = key
        rows.append(PlanRow(k.value, t,
                            model_plan.get(key), reference_plan.get(key)))
    return rows


def plan_table_csv(rows: Sequence[PlanRow]) -> str:
    lines = ["tech,year,model_mw,reference_mw,gap_mw,gap_rel"]
    for r in rows:
        cells = [r.tech, str(r.year)]
        for v in (r.model_mw, r.reference_mw, r.gap_mw, r.gap_rel):
            cells.append("" if v is None else repr(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def read_reference_plan(stream) -> dict[tuple[TechKind, int], float]:
    """CSV with header tech,year,capacity_mw."""
    import csv

    reader = csv.DictReader(stream)
    need = {"tech", "year", "capacity_mw"}
    if reader.fieldnames is None or not need.issubset(reader.fieldnames):
        raise GepError(f"reference plan needs columns {sorted(need)}")
    out = {}
    for row in reader:
        out[(TechKind(row["tech"].strip().lower()), int(row["year"]))] = \
            float(row["capacity_mw"])
    return out
