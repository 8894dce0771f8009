"""Shared vocabulary: technology kinds, index sets, the parameter container,
model-variant switches, validation, and the parameter-file format."""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np


class TechKind(enum.Enum):
    """The six aggregated generation technology groups."""

    NUCLEAR = "nuclear"
    GAS = "gas"
    HYDRO = "hydro"
    WIND = "wind"
    SOLAR = "solar"
    BIOFUEL = "biofuel"

    def __str__(self) -> str:
        return self.value


ALL_TECHS: tuple[TechKind, ...] = tuple(TechKind)

# Groups whose hour-to-hour output change is capped by the variation limits.
# Wind and solar are exempt: their output may drop or rise with the weather
# and is only bounded above by capability.
VARIATION_TECHS = frozenset(
    {TechKind.NUCLEAR, TechKind.GAS, TechKind.HYDRO, TechKind.BIOFUEL}
)

# Significance order used when cycling initial-state bins into scenario rows:
# nuclear varies slowest, wind fastest; solar and biofuel are single-bin.
SCENARIO_TECH_ORDER: tuple[TechKind, ...] = (
    TechKind.NUCLEAR,
    TechKind.HYDRO,
    TechKind.GAS,
    TechKind.WIND,
    TechKind.SOLAR,
    TechKind.BIOFUEL,
)

DEFAULT_SEASONS: tuple[str, ...] = ("winter", "spring", "summer", "fall")
DEFAULT_DAY_TYPES: tuple[str, ...] = ("weekday", "weekend")

_LABEL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")


class GepError(Exception):
    """Base class for toolkit errors."""


@dataclass(frozen=True)
class IndexSets:
    """Dimensions and labels shared by every model and parameter array.

    Decision hours are 1..hours; hour 0 exists only as the fixed
    start-of-day anchor.  ``techs`` selects the active technology groups
    (a subsequence of the canonical six); parameter arrays are dimensioned
    by the active groups in this order.
    """

    years: int = 20
    seasons: tuple[str, ...] = DEFAULT_SEASONS
    day_types: tuple[str, ...] = DEFAULT_DAY_TYPES
    hours: int = 24
    scenarios: int = 48
    techs: tuple[TechKind, ...] = ALL_TECHS

    def __post_init__(self):
        if self.years < 1:
            raise ValueError("years must be >= 1")
        if self.hours < 1:
            raise ValueError("hours must be >= 1")
        if self.scenarios < 1:
            raise ValueError("scenarios must be >= 1")
        for group, labels in (("seasons", self.seasons), ("day_types", self.day_types)):
            if not labels:
                raise ValueError(f"{group} must be nonempty")
            if len(set(labels)) != len(labels):
                raise ValueError(f"{group} labels must be distinct")
            for lab in labels:
                if not _LABEL_RE.match(lab):
                    raise ValueError(f"bad {group} label {lab!r}")
        if not self.techs:
            raise ValueError("techs must be nonempty")
        order = [list(ALL_TECHS).index(k) for k in self.techs]
        if order != sorted(set(order)):
            raise ValueError("techs must be distinct and in canonical order")

    @property
    def n_techs(self) -> int:
        return len(self.techs)

    @property
    def variation_techs(self) -> tuple[TechKind, ...]:
        return tuple(k for k in self.techs if k in VARIATION_TECHS)

    def tech_index(self, kind: TechKind) -> int:
        return self.techs.index(kind)


@dataclass(frozen=True)
class ParameterSet:
    """Every model parameter, stored as dense arrays.

    Array axes follow the canonical index order (k, t, ss, i, h, s)
    restricted to the indices each parameter carries.  The hour axis covers
    decision hours 1..H; the hour-0 anchor is captured by ``initial_gen``.
    All power in MW, energy in MWh, money in base-year dollars.
    """

    days_per_cell: np.ndarray        # T(ss,i) days per year in each cell
    variable_cost: np.ndarray        # C(k,t)   $/MWh
    variation_cost: np.ndarray       # CV(k,t)  $/MW
    invest_cost: np.ndarray          # IV(k,t)  $/MW, prorated + discounted
    fixed_cost: np.ndarray           # FC(k,t)  $/MW-yr
    existing_cap: np.ndarray         # XE(k,t)  MW
    depreciation: np.ndarray         # dep(k)   1/yr
    lifespan: np.ndarray             # (k,)     yr
    variation_up: np.ndarray         # VU(k,ss) fraction of capable capacity
    variation_down: np.ndarray       # VD(k,ss) fraction of capable capacity
    demand: np.ndarray               # D(ss,i,h,s) MW, base year
    initial_gen: np.ndarray          # IG(k,ss,i,s) fraction of capacity
    capability: np.ndarray           # Cap(k,ss,h) fraction of capacity
    share_max: np.ndarray            # alphaH(k,t)
    share_min: np.ndarray            # alphaL(k,t)
    probability: np.ndarray          # Prob(ss,i,s)
    growth: np.ndarray               # GRW(t)
    reserve_fraction: np.ndarray     # alphaRES(t)
    discount_rate: float = 0.0
    horizon_years: int = 20
    year_days: int = 365

    _ARRAY_FIELDS = (
        "days_per_cell", "variable_cost", "variation_cost", "invest_cost",
        "fixed_cost", "existing_cap", "depreciation", "lifespan",
        "variation_up", "variation_down", "demand", "initial_gen",
        "capability", "share_max", "share_min", "probability", "growth",
        "reserve_fraction",
    )

    def __post_init__(self):
        for name in self._ARRAY_FIELDS:
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


# Expected axes per parameter, in canonical (k,t,ss,i,h,s) order.
PARAMETER_AXES: dict[str, tuple[str, ...]] = {
    "days_per_cell": ("ss", "i"),
    "variable_cost": ("k", "t"),
    "variation_cost": ("k", "t"),
    "invest_cost": ("k", "t"),
    "fixed_cost": ("k", "t"),
    "existing_cap": ("k", "t"),
    "depreciation": ("k",),
    "lifespan": ("k",),
    "variation_up": ("k", "ss"),
    "variation_down": ("k", "ss"),
    "demand": ("ss", "i", "h", "s"),
    "initial_gen": ("k", "ss", "i", "s"),
    "capability": ("k", "ss", "h"),
    "share_max": ("k", "t"),
    "share_min": ("k", "t"),
    "probability": ("ss", "i", "s"),
    "growth": ("t",),
    "reserve_fraction": ("t",),
}

# Parameters constrained to [0, 1].
_UNIT_INTERVAL = (
    "variation_up", "variation_down", "initial_gen", "capability",
    "share_max", "share_min", "reserve_fraction", "depreciation",
)
# Parameters that must be nonnegative.
_NONNEGATIVE = (
    "variable_cost", "variation_cost", "invest_cost", "fixed_cost",
    "existing_cap", "demand", "days_per_cell", "probability", "growth",
)

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    code: str
    location: tuple
    message: str

    def __str__(self) -> str:
        where = ",".join(str(x) for x in self.location)
        return f"{self.code}[{where}]: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "parameter set valid"
        return "\n".join(str(v) for v in self.violations)


def _axis_len(axis: str, sets: IndexSets) -> int:
    return {
        "k": sets.n_techs,
        "t": sets.years,
        "ss": len(sets.seasons),
        "i": len(sets.day_types),
        "h": sets.hours,
        "s": sets.scenarios,
    }[axis]


def validate(params: ParameterSet, sets: IndexSets) -> ValidationReport:
    """Check every parameter invariant; violations are data, not exceptions."""
    out: list[Violation] = []

    shape_ok = {}
    for name, axes in PARAMETER_AXES.items():
        arr = getattr(params, name)
        want = tuple(_axis_len(a, sets) for a in axes)
        shape_ok[name] = arr.shape == want
        if not shape_ok[name]:
            out.append(Violation("shape", (name,),
                                 f"expected {want}, got {arr.shape}"))
            continue
        if not np.all(np.isfinite(arr)):
            shape_ok[name] = False
            idx = tuple(int(v[0]) for v in np.nonzero(~np.isfinite(arr)))
            out.append(Violation("not_finite", (name,) + idx, "non-finite entry"))

    def each_bad(name, mask):
        for idx in zip(*np.nonzero(mask)):
            yield (name,) + tuple(int(v) for v in idx)

    for name in _UNIT_INTERVAL:
        if not shape_ok[name]:
            continue
        arr = getattr(params, name)
        for loc in each_bad(name, (arr < 0) | (arr > 1)):
            out.append(Violation("unit_interval", loc, "value outside [0, 1]"))

    for name in _NONNEGATIVE:
        if not shape_ok[name]:
            continue
        arr = getattr(params, name)
        for loc in each_bad(name, arr < 0):
            out.append(Violation("negative", loc, "value below 0"))

    if shape_ok["share_min"] and shape_ok["share_max"]:
        bad = params.share_min > params.share_max
        for k, t in zip(*np.nonzero(bad)):
            out.append(Violation(
                "share_order", (params_tech_label(sets, int(k)), int(t) + 1),
                f"share_min {params.share_min[k, t]:g} exceeds "
                f"share_max {params.share_max[k, t]:g}"))

    if shape_ok["probability"]:
        sums = params.probability.sum(axis=2)
        for ss, i in zip(*np.nonzero(np.abs(sums - 1.0) > PROB_SUM_TOL)):
            out.append(Violation(
                "prob_sum", (sets.seasons[ss], sets.day_types[i]),
                f"scenario probabilities sum to {sums[ss, i]!r}, not 1"))

    if shape_ok["days_per_cell"]:
        total = params.days_per_cell.sum()
        if abs(total - params.year_days) > 1e-9:
            out.append(Violation("day_count", ("days_per_cell",),
                                 f"cells sum to {total:g}, "
                                 f"expected {params.year_days}"))

    if shape_ok["lifespan"]:
        for loc in each_bad("lifespan", params.lifespan <= 0):
            out.append(Violation("nonpositive_lifespan", loc,
                                 "lifespan must be positive"))

    if params.horizon_years != sets.years:
        out.append(Violation("horizon_mismatch", ("horizon_years",),
                             f"horizon_years {params.horizon_years} != "
                             f"index years {sets.years}"))

    return ValidationReport(tuple(out))


def params_tech_label(sets: IndexSets, k: int) -> str:
    return sets.techs[k].value


@dataclass(frozen=True)
class ModelVariant:
    """Switches selecting which model family and constraint families to build.

    ``fixed_capacities``, when given, must pin every (tech, year) build
    decision of the active sets.
    """

    variation_constraints: bool = True
    variation_costs: bool = True
    share_constraints: str = "full"          # full | lower_only | off
    fixed_capacities: Optional[Mapping[tuple[TechKind, int], float]] = None
    family: str = "iso_gep"                  # iso_gep | conventional

    def __post_init__(self):
        if self.share_constraints not in ("full", "lower_only", "off"):
            raise ValueError(f"bad share mode {self.share_constraints!r}")
        if self.family not in ("iso_gep", "conventional"):
            raise ValueError(f"bad model family {self.family!r}")
        if self.fixed_capacities is not None:
            object.__setattr__(self, "fixed_capacities",
                               dict(self.fixed_capacities))

    def check_fixed_cover(self, sets: IndexSets) -> None:
        """Fixed capacities must cover every (tech, year) when present."""
        if self.fixed_capacities is None:
            return
        missing = [(k.value, t) for k in sets.techs
                   for t in range(1, sets.years + 1)
                   if (k, t) not in self.fixed_capacities]
        if missing:
            raise GepError(f"fixed_capacities missing entries: {missing[:5]}")


# ---------------------------------------------------------------------------
# Parameter file format: one JSON document holding the index sets and every
# parameter as a dense nested list, with its axis names declared.

FORMAT_TAG = "gep-params-v1"


def to_json_dict(params: ParameterSet, sets: IndexSets) -> dict:
    doc: dict = {
        "format": FORMAT_TAG,
        "index_sets": {
            "years": sets.years,
            "seasons": list(sets.seasons),
            "day_types": list(sets.day_types),
            "hours": sets.hours,
            "scenarios": sets.scenarios,
            "techs": [k.value for k in sets.techs],
        },
        "scalars": {
            "discount_rate": params.discount_rate,
            "horizon_years": params.horizon_years,
            "year_days": params.year_days,
        },
        "parameters": {},
    }
    for name, axes in PARAMETER_AXES.items():
        doc["parameters"][name] = {
            "axes": list(axes),
            "values": getattr(params, name).tolist(),
        }
    return doc


def from_json_dict(doc: dict) -> tuple[ParameterSet, IndexSets]:
    if doc.get("format") != FORMAT_TAG:
        raise GepError(f"unrecognized parameter file format {doc.get('format')!r}")
    isets = doc["index_sets"]
    sets = IndexSets(
        years=int(isets["years"]),
        seasons=tuple(isets["seasons"]),
        day_types=tuple(isets["day_types"]),
        hours=int(isets["hours"]),
        scenarios=int(isets["scenarios"]),
        techs=tuple(TechKind(v) for v in isets["techs"]),
    )
    kwargs = {}
    for name in PARAMETER_AXES:
        entry = doc["parameters"][name]
        if tuple(entry["axes"]) != PARAMETER_AXES[name]:
            raise GepError(f"parameter {name}: unexpected axes {entry['axes']}")
        kwargs[name] = np.array(entry["values"], dtype=float)
    scalars = doc.get("scalars", {})
    params = ParameterSet(
        discount_rate=float(scalars.get("discount_rate", 0.0)),
        horizon_years=int(scalars.get("horizon_years", sets.years)),
        year_days=int(scalars.get("year_days", 365)),
        **kwargs,
    )
    return params, sets


def save_parameters(params: ParameterSet, sets: IndexSets, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(params, sets), fh, indent=1)
        fh.write("\n")


def load_parameters(path) -> tuple[ParameterSet, IndexSets]:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))
