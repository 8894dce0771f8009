"""Parameter estimation from classified hourly records: demand levels,
initial-generation bins, capability factors, variation limits, scenario
enumeration, and assembly of the full parameter set."""

from __future__ import annotations

import datetime as dt
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .core import (
    DEFAULT_DAY_TYPES,
    DEFAULT_SEASONS,
    GepError,
    IndexSets,
    ParameterSet,
    SCENARIO_TECH_ORDER,
    TechKind,
)
from .ingest import HourlyRecord, classify_day

LEVEL_LABELS = ("L", "M", "H")

# Groups whose hour-24 state gets a two-bin treatment; solar is pinned at
# zero (no sun at midnight) and biofuel keeps only its dominant bin.
TWO_BIN_TECHS = (TechKind.NUCLEAR, TechKind.HYDRO, TechKind.GAS, TechKind.WIND)


class EstimationError(GepError):
    pass


@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram where each bin is represented by the median of
    its members (empty bins fall back to the bin midpoint)."""

    bin_edges: np.ndarray
    counts: np.ndarray
    medians: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def equal_width_histogram(samples: Sequence[float], nbins: int) -> Histogram:
    arr = np.asarray(sorted(samples), dtype=float)
    if arr.size == 0:
        raise EstimationError("histogram of an empty sample")
    lo, hi = float(arr[0]), float(arr[-1])
    if hi <= lo:
        raise EstimationError("histogram range is degenerate (all samples equal)")
    edges = np.linspace(lo, hi, nbins + 1)
    idx = np.clip(((arr - lo) / (hi - lo) * nbins).astype(int), 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins).astype(float)
    medians = np.empty(nbins)
    for b in range(nbins):
        members = arr[idx == b]
        if members.size:
            medians[b] = float(np.median(members))
        else:
            medians[b] = 0.5 * (edges[b] + edges[b + 1])
    return Histogram(edges, counts, medians)


# ---------------------------------------------------------------------------
# Demand


def average_daily_demand(records: Iterable[HourlyRecord], day_type: str,
                         holidays: frozenset | set = frozenset()
                         ) -> dict[int, float]:
    """Mean demand per day-of-year over the years where that day matches
    ``day_type``: sum of all hourly demand divided by (matching years x 24)."""
    total: dict[int, float] = {}
    day_years: dict[int, set[int]] = {}
    for rec in records:
        if rec.demand is None:
            continue
        if classify_day(rec.date, holidays).day_type != day_type:
            continue
        doy = rec.date.timetuple().tm_yday
        total[doy] = total.get(doy, 0.0) + rec.demand
        day_years.setdefault(doy, set()).add(rec.date.year)
    return {doy: total[doy] / (len(day_years[doy]) * 24) for doy in total}


@dataclass(frozen=True)
class DemandScenarios:
    """Three demand levels per hour for one (season, day-type) cell.

    Levels are ascending (L <= M <= H).  ``day_probs`` is the single daily
    level distribution (a day keeps its level for all 24 hours), taken as
    the normalized mean of the per-hour bin frequencies.
    """

    season: str
    day_type: str
    levels: np.ndarray          # (hours, 3) MW
    hour_probs: np.ndarray      # (hours, 3)
    day_probs: np.ndarray       # (3,)
    sample_counts: np.ndarray   # (hours,)
    bin_edges: np.ndarray       # (hours, 4)


def demand_scenarios(records: Iterable[HourlyRecord], season: str,
                     day_type: str, holidays: frozenset | set = frozenset(),
                     hours: int = 24) -> DemandScenarios:
    """Reduce each hour's demand sample to a 3-bin histogram of levels."""
    samples: dict[int, list[float]] = {h: [] for h in range(1, hours + 1)}
    for rec in records:
        if rec.demand is None or not 1 <= rec.hour <= hours:
            continue
        cell = classify_day(rec.date, holidays)
        if cell.season == season and cell.day_type == day_type:
            samples[rec.hour].append(rec.demand)

    levels = np.empty((hours, 3))
    probs = np.empty((hours, 3))
    counts = np.empty(hours)
    edges = np.empty((hours, 4))
    for h in range(1, hours + 1):
        vals = samples[h]
        if len(set(vals)) < 3:
            raise EstimationError(
                f"cell ({season}, {day_type}, h{h}): need >=3 distinct "
                f"demand samples, have {len(set(vals))}")
        hist = equal_width_histogram(vals, 3)
        levels[h - 1] = hist.medians
        probs[h - 1] = hist.probabilities
        counts[h - 1] = len(vals)
        edges[h - 1] = hist.bin_edges
    day_probs = probs.mean(axis=0)
    day_probs = day_probs / day_probs.sum()
    return DemandScenarios(season, day_type, levels, probs, day_probs,
                           counts, edges)


# ---------------------------------------------------------------------------
# Initial generation state


def initial_generation_bins(records: Iterable[HourlyRecord], kind: TechKind,
                            season: str,
                            holidays: frozenset | set = frozenset()
                            ) -> list[tuple[float, float]]:
    """Bins of hour-24 output as a fraction of installed capacity.

    Returns (fraction, probability) pairs ordered high-power first.  Solar is
    pinned to a single zero bin; biofuel keeps only its dominant bin (ties
    break toward the higher-power bin); a degenerate sample collapses to one
    bin with probability 1.
    """
    if kind is TechKind.SOLAR:
        return [(0.0, 1.0)]

    fractions = []
    for rec in records:
        if rec.hour != 24 or kind not in rec.output:
            continue
        if classify_day(rec.date, holidays).season != season:
            continue
        installed = rec.installed.get(kind)
        if installed is None:
            continue
        if installed <= 0:
            raise EstimationError(
                f"({kind.value}, {season}) {rec.date}: installed capacity is 0")
        fractions.append(rec.output[kind] / installed)
    if not fractions:
        raise EstimationError(f"({kind.value}, {season}): no hour-24 samples")

    try:
        hist = equal_width_histogram(fractions, 2)
    except EstimationError:
        return [(float(fractions[0]), 1.0)]

    pairs = [(float(hist.medians[b]), float(hist.probabilities[b]))
             for b in (1, 0)]                      # high bin first
    if kind is TechKind.BIOFUEL:
        keep = max(pairs, key=lambda p: (p[1], p[0]))
        return [(keep[0], 1.0)]
    return pairs


def capability_factor(records: Iterable[HourlyRecord], kind: TechKind,
                      season: str, hour: int,
                      holidays: frozenset | set = frozenset()) -> float:
    """Mean capability/installed over the season's days at the given hour."""
    vals = []
    for rec in records:
        if rec.hour != hour or kind not in rec.capability:
            continue
        if classify_day(rec.date, holidays).season != season:
            continue
        installed = rec.installed.get(kind)
        if installed is None:
            continue
        if installed <= 0:
            raise EstimationError(
                f"({kind.value}, {season}, h{hour}) {rec.date}: installed is 0")
        vals.append(rec.capability[kind] / installed)
    if not vals:
        raise EstimationError(f"({kind.value}, {season}, h{hour}): no samples")
    return float(np.mean(vals))


@dataclass(frozen=True)
class VariationDetail:
    up: float                 # fraction of reference capability
    down: float
    max_up_mw: float
    max_down_mw: float
    reference_mw: float       # season-mean group capability
    pair_count: int


def variation_limits(records: Iterable[HourlyRecord], kind: TechKind,
                     season: str, holidays: frozenset | set = frozenset()
                     ) -> VariationDetail:
    """Largest observed hour-to-hour output change, up and down, divided by
    the season-mean group capability.

    Consecutive pairs include hour 24 into hour 1 of the next day when both
    days fall in the season.
    """
    in_season: dict[tuple[dt.date, int], float] = {}
    caps = []
    days = set()
    for rec in records:
        if kind not in rec.output:
            continue
        if classify_day(rec.date, holidays).season != season:
            continue
        in_season[(rec.date, rec.hour)] = rec.output[kind]
        days.add(rec.date)
        cap = rec.capability.get(kind)
        if cap is not None:
            caps.append(cap)

    if not caps:
        raise EstimationError(f"({kind.value}, {season}): no capability data "
                              "for the variation reference")
    reference = float(np.mean(caps))
    if reference <= 0:
        raise EstimationError(f"({kind.value}, {season}): zero reference "
                              "capability")

    max_up = 0.0
    max_down = 0.0
    pairs = 0
    one = dt.timedelta(days=1)
    for day in sorted(days):
        for h in range(1, 24):
            a, b = in_season.get((day, h)), in_season.get((day, h + 1))
            if a is not None and b is not None:
                delta = b - a
                pairs += 1
                max_up = max(max_up, delta)
                max_down = max(max_down, -delta)
        a, b = in_season.get((day, 24)), in_season.get((day + one, 1))
        if a is not None and b is not None:
            delta = b - a
            pairs += 1
            max_up = max(max_up, delta)
            max_down = max(max_down, -delta)
    if pairs == 0:
        raise EstimationError(f"({kind.value}, {season}): no consecutive "
                              "hour pairs")
    return VariationDetail(max_up / reference, max_down / reference,
                           max_up, max_down, reference, pairs)


# ---------------------------------------------------------------------------
# Scenario enumeration


@dataclass(frozen=True)
class ScenarioRow:
    bins: tuple[int, ...]       # 1-based bin choice per tech, table order
    level: str                  # demand level label
    probability: float


@dataclass(frozen=True)
class ScenarioTable:
    """All scenarios for one (season, day-type) cell: the Cartesian product
    of per-technology initial-state bins with the daily demand levels."""

    techs: tuple[TechKind, ...]
    tech_bins: dict[TechKind, tuple[tuple[float, float], ...]]
    rows: tuple[ScenarioRow, ...]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def probabilities(self) -> np.ndarray:
        return np.array([r.probability for r in self.rows])

    def initial_fraction(self, kind: TechKind, row: ScenarioRow) -> float:
        pos = self.techs.index(kind)
        return self.tech_bins[kind][row.bins[pos] - 1][0]


def enumerate_scenarios(tech_bins: Mapping[TechKind, Sequence[tuple[float, float]]],
                        demand_levels: Sequence[tuple[str, float]],
                        ) -> ScenarioTable:
    """Cross the per-technology bins with the demand levels.

    Row order: demand levels in the given order vary slowest; within a
    level, bins cycle with the slowest-varying technology first in the
    canonical significance order (nuclear, hydro, gas, wind, solar,
    biofuel).  Row probability is the product of its bin probabilities and
    the level probability.
    """
    techs = tuple(k for k in SCENARIO_TECH_ORDER if k in tech_bins)
    if len(techs) != len(tech_bins):
        raise EstimationError("tech_bins contains unknown technologies")
    for k in techs:
        if not tech_bins[k]:
            raise EstimationError(f"{k.value}: empty bin list")
    p_tech = {k: sum(p for _, p in tech_bins[k]) for k in techs}
    for k, total in p_tech.items():
        if abs(total - 1.0) > 1e-9:
            raise EstimationError(f"{k.value}: bin probabilities sum to {total!r}")
    if abs(sum(p for _, p in demand_levels) - 1.0) > 1e-9:
        raise EstimationError("demand level probabilities must sum to 1")

    rows = []
    ranges = [range(1, len(tech_bins[k]) + 1) for k in techs]
    for label, level_p in demand_levels:
        for combo in itertools.product(*ranges):
            p = level_p
            for k, b in zip(techs, combo):
                p *= tech_bins[k][b - 1][1]
            rows.append(ScenarioRow(tuple(combo), label, p))
    frozen = {k: tuple((float(v), float(p)) for v, p in tech_bins[k])
              for k in techs}
    return ScenarioTable(techs, frozen, tuple(rows))


def growth_factor(t: int, annual_rate: float) -> float:
    """Demand growth multiplier for model year t (year 1 is the base)."""
    if t < 1:
        raise ValueError("model years start at 1")
    return (1.0 + annual_rate) ** (t - 1)


# ---------------------------------------------------------------------------
# Full assembly


@dataclass
class EstimationConfig:
    """Configured (non-estimated) inputs for parameter assembly.

    ``reserve_fraction`` is deliberately required: there is no defensible
    default for the gas reserve set-aside.
    """

    reserve_fraction: float | Sequence[float]
    horizon_years: int = 20
    growth_rate: float = 0.003
    discount_rate: float = 0.03
    reference_year: int = 2017
    cv_fraction: float = 0.1
    techs: tuple[TechKind, ...] = tuple(TechKind)
    existing_capacity: Optional[Mapping[TechKind, float]] = None
    share_max: Optional[Mapping[TechKind, float]] = None
    share_min: Optional[Mapping[TechKind, float]] = None
    cost_table: Optional[Mapping[TechKind, "TechCost"]] = None
    year_days: int = 365


@dataclass
class EstimationReport:
    lines: list[str] = field(default_factory=list)

    def add(self, text: str) -> None:
        self.lines.append(text)

    def to_text(self) -> str:
        return "\n".join(self.lines) + "\n"


def estimate_parameters(demand_records: Sequence[HourlyRecord],
                        generation_records: Sequence[HourlyRecord],
                        holidays: frozenset | set,
                        config: EstimationConfig,
                        ) -> tuple[ParameterSet, IndexSets, EstimationReport]:
    """Run every estimator over the classified records and assemble the
    parameter set, the matching index sets, and a readable report."""
    from .ingest import count_day_types
    from .model import DEFAULT_TECH_COSTS, build_cost_schedule

    techs = tuple(config.techs)
    seasons = DEFAULT_SEASONS
    day_types = DEFAULT_DAY_TYPES
    n_t = config.horizon_years
    report = EstimationReport()

    # Per-technology initial-state bins, padded so every season shares one
    # scenario shape: two-bin groups that collapse get a zero-probability twin.
    bins_by_season: dict[str, dict[TechKind, list[tuple[float, float]]]] = {}
    for ss in seasons:
        cell_bins = {}
        for k in techs:
            pairs = initial_generation_bins(generation_records, k, ss, holidays)
            if k in TWO_BIN_TECHS and len(pairs) == 1:
                pairs = [pairs[0], (pairs[0][0], 0.0)]
                report.add(f"initial-state {k.value}/{ss}: degenerate sample "
                           "padded to a zero-probability second bin")
            cell_bins[k] = pairs
            report.add(f"initial-state {k.value}/{ss}: "
                       + ", ".join(f"{v:.4f}@{p:.4f}" for v, p in pairs))
        bins_by_season[ss] = cell_bins

    demand_by_cell = {}
    for ss in seasons:
        for i in day_types:
            ds = demand_scenarios(demand_records, ss, i, holidays)
            demand_by_cell[(ss, i)] = ds
            report.add(f"demand {ss}/{i}: samples/hour "
                       f"{int(ds.sample_counts.min())}..{int(ds.sample_counts.max())}, "
                       f"day probs {np.round(ds.day_probs, 4).tolist()}")

    tables = {}
    n_s = None
    for ss in seasons:
        for i in day_types:
            levels = list(zip(LEVEL_LABELS, demand_by_cell[(ss, i)].day_probs))
            table = enumerate_scenarios(bins_by_season[ss], levels)
            tables[(ss, i)] = table
            if n_s is None:
                n_s = table.n_rows
            elif n_s != table.n_rows:
                raise EstimationError("scenario count differs across cells")

    sets = IndexSets(years=n_t, seasons=seasons, day_types=day_types,
                     hours=24, scenarios=n_s, techs=techs)

    n_k, n_ss, n_i, n_h = len(techs), len(seasons), len(day_types), 24
    demand = np.zeros((n_ss, n_i, n_h, n_s))
    prob = np.zeros((n_ss, n_i, n_s))
    initial = np.zeros((n_k, n_ss, n_i, n_s))
    for a, ss in enumerate(seasons):
        for b, i in enumerate(day_types):
            table = tables[(ss, i)]
            ds = demand_by_cell[(ss, i)]
            lvl_index = {lab: n for n, lab in enumerate(LEVEL_LABELS)}
            for s, row in enumerate(table.rows):
                prob[a, b, s] = row.probability
                demand[a, b, :, s] = ds.levels[:, lvl_index[row.level]]
                for kk, k in enumerate(techs):
                    initial[kk, a, b, s] = table.initial_fraction(k, row)

    cap = np.zeros((n_k, n_ss, n_h))
    vu = np.zeros((n_k, n_ss))
    vd = np.zeros((n_k, n_ss))
    for kk, k in enumerate(techs):
        for a, ss in enumerate(seasons):
            for h in range(1, n_h + 1):
                cap[kk, a, h - 1] = capability_factor(
                    generation_records, k, ss, h, holidays)
            detail = variation_limits(generation_records, k, ss, holidays)
            vu[kk, a] = detail.up
            vd[kk, a] = detail.down
            report.add(f"variation {k.value}/{ss}: up {detail.max_up_mw:.1f} MW, "
                       f"down {detail.max_down_mw:.1f} MW over "
                       f"{detail.pair_count} pairs, ref {detail.reference_mw:.1f} MW "
                       f"-> VU {detail.up:.4f}, VD {detail.down:.4f}")

    day_counts = count_day_types(config.reference_year, holidays)
    days = np.array([[day_counts[(ss, i)] for i in day_types]
                     for ss in seasons], dtype=float)

    xe = np.zeros((n_k, n_t))
    for kk, k in enumerate(techs):
        if config.existing_capacity is not None:
            xe[kk, :] = config.existing_capacity.get(k, 0.0)
        else:
            inst = [rec.installed[k] for rec in generation_records
                    if k in rec.installed]
            xe[kk, :] = max(inst) if inst else 0.0

    cost_table = config.cost_table or DEFAULT_TECH_COSTS
    sched = build_cost_schedule(cost_table, sets,
                                discount_rate=config.discount_rate,
                                cv_fraction=config.cv_fraction)

    share_max = np.ones((n_k, n_t))
    share_min = np.zeros((n_k, n_t))
    for kk, k in enumerate(techs):
        if config.share_max is not None and k in config.share_max:
            share_max[kk, :] = config.share_max[k]
        if config.share_min is not None and k in config.share_min:
            share_min[kk, :] = config.share_min[k]

    grw = np.array([growth_factor(t, config.growth_rate)
                    for t in range(1, n_t + 1)])
    res = np.asarray(config.reserve_fraction, dtype=float)
    reserve = np.full(n_t, float(res)) if res.ndim == 0 else res

    params = ParameterSet(
        days_per_cell=days,
        variable_cost=sched["variable_cost"],
        variation_cost=sched["variation_cost"],
        invest_cost=sched["invest_cost"],
        fixed_cost=sched["fixed_cost"],
        existing_cap=xe,
        depreciation=sched["depreciation"],
        lifespan=sched["lifespan"],
        variation_up=vu,
        variation_down=vd,
        demand=demand,
        initial_gen=initial,
        capability=cap,
        share_max=share_max,
        share_min=share_min,
        probability=prob,
        growth=grw,
        reserve_fraction=reserve,
        discount_rate=config.discount_rate,
        horizon_years=n_t,
        year_days=config.year_days,
    )
    return params, sets, report
