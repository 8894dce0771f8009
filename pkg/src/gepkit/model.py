"""LP assembly: the chronological expansion model with variation limits, its
ablation variants, the fixed-capacity re-solve, and the load-duration-block
conventional model.

New capacity is substituted everywhere through its depreciation-weighted
build history, so build decisions x(k,t) and operation g, r are the only
columns.  Row and column generation is canonical (tag order, then index
order), which keeps text exports byte-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .core import GepError, IndexSets, ModelVariant, ParameterSet, TechKind
from .lp import LPModel, OBJECTIVE_NAME, make_name, parse_name

# ---------------------------------------------------------------------------
# Costs


@dataclass(frozen=True)
class TechCost:
    lifespan: float        # years
    invest: float          # $/MW over the full lifetime
    fixed: float           # $/MW-yr
    variable: float        # $/MWh


# Approximate 2016 costs (EIA-derived) used by the Ontario-scale runs.
DEFAULT_TECH_COSTS: dict[TechKind, TechCost] = {
    TechKind.NUCLEAR: TechCost(60, 7_371_800, 124_347, 2.852),
    TechKind.HYDRO: TechCost(80, 7_101_108, 155_000, 0.0),
    TechKind.GAS: TechCost(30, 1_290_344, 13_640, 6.3364),
    TechKind.WIND: TechCost(30, 2_327_480, 49_228, 0.0),
    TechKind.SOLAR: TechCost(30, 3_244_253, 29_016, 0.0),
    TechKind.BIOFUEL: TechCost(25, 6_181_400, 52_204, 5.208),
}


def prorate_investment_cost(base_cost: float, lifespan: float,
                            build_year: int, horizon: int,
                            discount_rate: float = 0.0) -> float:
    """Charge only the share of lifetime cost falling inside the horizon,
    discounted to the base year."""
    if lifespan <= 0:
        raise ValueError("lifespan must be positive")
    if not 1 <= build_year <= horizon:
        raise ValueError("build year outside the planning horizon")
    share = min(horizon - build_year + 1, lifespan) / lifespan
    return base_cost * share / (1.0 + discount_rate) ** (build_year - 1)


def depreciated_capacity_coeffs(t: int, dep: float) -> np.ndarray:
    """Surviving-capacity weight of each build year t'<=t under straight-line
    depreciation, floored at zero."""
    ages = t - np.arange(1, t + 1)
    return np.maximum(0.0, 1.0 - dep * ages)


def build_cost_schedule(cost_table, sets: IndexSets, discount_rate: float,
                        cv_fraction: float = 0.1) -> dict[str, np.ndarray]:
    """Per-year cost arrays: everything discounted at the given rate, the
    variation cost a fixed fraction of variable cost, and investment costs
    prorated to the horizon."""
    n_k, n_t = sets.n_techs, sets.years
    out = {name: np.zeros((n_k, n_t)) for name in
           ("variable_cost", "variation_cost", "invest_cost", "fixed_cost")}
    dep = np.zeros(n_k)
    life = np.zeros(n_k)
    for kk, k in enumerate(sets.techs):
        tc = cost_table[k]
        dep[kk] = 1.0 / tc.lifespan
        life[kk] = tc.lifespan
        for t in range(1, n_t + 1):
            disc = (1.0 + discount_rate) ** -(t - 1)
            out["variable_cost"][kk, t - 1] = tc.variable * disc
            out["variation_cost"][kk, t - 1] = cv_fraction * tc.variable * disc
            out["fixed_cost"][kk, t - 1] = tc.fixed * disc
            out["invest_cost"][kk, t - 1] = prorate_investment_cost(
                tc.invest, tc.lifespan, t, n_t, discount_rate)
    out["depreciation"] = dep
    out["lifespan"] = life
    return out


# ---------------------------------------------------------------------------
# Chronological model: canonical row and column generators


class _Ctx:
    """Precomputed labels and parameter views shared by the generators."""

    def __init__(self, params: ParameterSet, sets: IndexSets,
                 variant: ModelVariant,
                 keep_variation: Optional[set] = None):
        if variant.family != "iso_gep":
            raise GepError(f"expected family iso_gep, got {variant.family!r}")
        variant.check_fixed_cover(sets)
        self.p = params
        self.sets = sets
        self.v = variant
        self.keep = keep_variation
        self.n_k = sets.n_techs
        self.n_t = sets.years
        self.n_ss = len(sets.seasons)
        self.n_i = len(sets.day_types)
        self.n_h = sets.hours
        self.n_s = sets.scenarios
        self.kname = [k.value for k in sets.techs]
        self.tname = [f"t{t}" for t in range(self.n_t + 1)]
        self.hname = [f"h{h}" for h in range(self.n_h + 1)]
        self.sname = [f"s{s}" for s in range(self.n_s + 1)]
        # hot-loop name fragments: row name = prefix(kk,t,ss,i) + hdot[h] + sdot[s]
        self.hdot = [f".h{h}" for h in range(self.n_h + 1)]
        self.sdot = [f".s{s}" for s in range(self.n_s + 1)]

    def prefix(self, tag, kk=None, t=None, ss=None, i=None):
        parts = [tag]
        if kk is not None:
            parts.append(self.kname[kk])
        if t is not None:
            parts.append(self.tname[t])
        if ss is not None:
            parts.append(self.sets.seasons[ss])
        if i is not None:
            parts.append(self.sets.day_types[i])
        return ".".join(parts)
        self.gas = (sets.techs.index(TechKind.GAS)
                    if TechKind.GAS in sets.techs else -1)
        self.vari = [kk for kk, k in enumerate(sets.techs)
                     if k in sets.variation_techs]
        # depc[kk][t-1] -> coefficients over build years 1..t
        self.depc = [[depreciated_capacity_coeffs(t, params.depreciation[kk])
                      for t in range(1, self.n_t + 1)]
                     for kk in range(self.n_k)]
        # operating weight w[ss,i,s] = Prob * days-per-year
        self.opw = params.probability * params.days_per_cell[:, :, None]

    def keep_row(self, name: str) -> bool:
        return self.keep is None or name in self.keep

    def emit_variation(self) -> bool:
        return self.v.variation_constraints

    def emit_r(self) -> bool:
        return self.v.variation_costs


def _row_name(ctx, tag, kk=None, t=None, ss=None, i=None, h=None, s=None):
    parts = [tag]
    if kk is not None:
        parts.append(ctx.kname[kk])
    if t is not None:
        parts.append(ctx.tname[t])
    if ss is not None:
        parts.append(ctx.sets.seasons[ss])
    if i is not None:
        parts.append(ctx.sets.day_types[i])
    if h is not None:
        parts.append(ctx.hname[h])
    if s is not None:
        parts.append(ctx.sname[s])
    return ".".join(parts)


def iter_rows(params: ParameterSet, sets: IndexSets, variant: ModelVariant,
              keep_variation: Optional[set] = None
              ) -> Iterator[tuple[str, str, float]]:
    """Yield (name, sense, rhs) for every row, in canonical order."""
    ctx = _Ctx(params, sets, variant, keep_variation)
    yield from _iter_rows_ctx(ctx)


def _iter_rows_ctx(ctx: _Ctx) -> Iterator[tuple[str, str, float]]:
    p, sets = ctx.p, ctx.sets
    rng_t = range(1, ctx.n_t + 1)
    rng_h = range(1, ctx.n_h + 1)
    rng_s = range(ctx.n_s)

    for kk in range(ctx.n_k):
        if kk == ctx.gas:
            continue
        for t in rng_t:
            xe = p.existing_cap[kk, t - 1]
            for ss in range(ctx.n_ss):
                for i in range(ctx.n_i):
                    for h in rng_h:
                        cap = p.capability[kk, ss, h - 1]
                        for s in rng_s:
                            yield (_row_name(ctx, "EQ5", kk, t, ss, i, h, s + 1),
                                   "L", cap * xe)
    if ctx.gas >= 0:
        kk = ctx.gas
        for t in rng_t:
            xe = p.existing_cap[kk, t - 1]
            ares = p.reserve_fraction[t - 1]
            grw = p.growth[t - 1]
            for ss in range(ctx.n_ss):
                for i in range(ctx.n_i):
                    for h in rng_h:
                        cap = p.capability[kk, ss, h - 1]
                        for s in rng_s:
                            rhs = cap * xe - ares * grw * p.demand[ss, i, h - 1, s]
                            yield (_row_name(ctx, "EQ6", kk, t, ss, i, h, s + 1),
                                   "L", rhs)
    if ctx.emit_r():
        for tag in ("EQ7", "EQ8"):
            for kk in range(ctx.n_k):
                for t in rng_t:
                    for ss in range(ctx.n_ss):
                        for i in range(ctx.n_i):
                            for h in rng_h:
                                for s in rng_s:
                                    yield (_row_name(ctx, tag, kk, t, ss, i, h, s + 1),
                                           "L", 0.0)
    if ctx.emit_variation():
        for tag, limit in (("EQ9", p.variation_up), ("EQ10", p.variation_down)):
            for kk in ctx.vari:
                for t in rng_t:
                    xe = p.existing_cap[kk, t - 1]
                    for ss in range(ctx.n_ss):
                        vv = limit[kk, ss]
                        for i in range(ctx.n_i):
                            for h in rng_h:
                                cap = p.capability[kk, ss, h - 1]
                                for s in rng_s:
                                    name = _row_name(ctx, tag, kk, t, ss, i, h, s + 1)
                                    if ctx.keep_row(name):
                                        yield (name, "L", vv * cap * xe)
    for kk in range(ctx.n_k):
        for t in rng_t:
            xe = p.existing_cap[kk, t - 1]
            for ss in range(ctx.n_ss):
                for i in range(ctx.n_i):
                    for s in rng_s:
                        rhs = p.initial_gen[kk, ss, i, s] * xe
                        yield (_row_name(ctx, "EQ11", kk, t, ss, i, h=0, s=s + 1),
                               "E", rhs)
    for t in rng_t:
        grw = p.growth[t - 1]
        for ss in range(ctx.n_ss):
            for i in range(ctx.n_i):
                for h in rng_h:
                    for s in rng_s:
                        yield (_row_name(ctx, "EQ12", None, t, ss, i, h, s + 1),
                               "G", grw * p.demand[ss, i, h - 1, s])
    xe_total = p.existing_cap.sum(axis=0)
    if ctx.v.share_constraints == "full":
        for kk in range(ctx.n_k):
            for t in rng_t:
                rhs = (p.share_max[kk, t - 1] * xe_total[t - 1]
                       - p.existing_cap[kk, t - 1])
                yield (_row_name(ctx, "EQ13", kk, t), "L", rhs)
    if ctx.v.share_constraints in ("full", "lower_only"):
        for kk in range(ctx.n_k):
            for t in rng_t:
                rhs = (p.share_min[kk, t - 1] * xe_total[t - 1]
                       - p.existing_cap[kk, t - 1])
                yield (_row_name(ctx, "EQ14", kk, t), "G", rhs)
    if ctx.v.fixed_capacities is not None:
        for kk, k in enumerate(sets.techs):
            for t in rng_t:
                yield (_row_name(ctx, "FIX", kk, t), "E",
                       float(ctx.v.fixed_capacities[(k, t)]))


def iter_columns(params: ParameterSet, sets: IndexSets, variant: ModelVariant,
                 keep_variation: Optional[set] = None
                 ) -> Iterator[tuple[str, str, tuple, float, list]]:
    """Yield (name, kind, labels, objective, [(row_name, coeff), ...]) for
    every column in canonical order; entries follow canonical row order and
    omit exact zeros."""
    ctx = _Ctx(params, sets, variant, keep_variation)
    yield from _iter_x_columns(ctx)
    yield from _iter_g_columns(ctx)
    if ctx.emit_r():
        yield from _iter_r_columns(ctx)


def _iter_x_columns(ctx: _Ctx) -> Iterator:
    p, sets = ctx.p, ctx.sets
    rng_h = range(1, ctx.n_h + 1)
    rng_s = range(ctx.n_s)
    for kk in range(ctx.n_k):
        fc_tail = p.fixed_cost[kk].copy()
        for tb in range(1, ctx.n_t + 1):
            # objective: prorated investment plus every later year's fixed cost
            obj = p.invest_cost[kk, tb - 1] + fc_tail[tb - 1:].sum()
            entries = []
            cap_tag = "EQ6" if kk == ctx.gas else "EQ5"
            for t in range(tb, ctx.n_t + 1):
                d = ctx.depc[kk][t - 1][tb - 1]
                if d == 0.0:
                    continue
                for ss in range(ctx.n_ss):
                    for i in range(ctx.n_i):
                        for h in rng_h:
                            coeff = -p.capability[kk, ss, h - 1] * d
                            if coeff == 0.0:
                                continue
                            for s in rng_s:
                                entries.append((_row_name(ctx, cap_tag, kk, t,
                                                          ss, i, h, s + 1),
                                                coeff))
            if ctx.emit_variation() and kk in ctx.vari:
                for tag, limit in (("EQ9", p.variation_up),
                                   ("EQ10", p.variation_down)):
                    for t in range(tb, ctx.n_t + 1):
                        d = ctx.depc[kk][t - 1][tb - 1]
                        if d == 0.0:
                            continue
                        for ss in range(ctx.n_ss):
                            vv = limit[kk, ss]
                            for i in range(ctx.n_i):
                                for h in rng_h:
                                    coeff = -vv * p.capability[kk, ss, h - 1] * d
                                    if coeff == 0.0:
                                        continue
                                    for s in rng_s:
                                        name = _row_name(ctx, tag, kk, t, ss,
                                                         i, h, s + 1)
                                        if ctx.keep_row(name):
                                            entries.append((name, coeff))
            for t in range(tb, ctx.n_t + 1):
                d = ctx.depc[kk][t - 1][tb - 1]
                if d == 0.0:
                    continue
                for ss in range(ctx.n_ss):
                    for i in range(ctx.n_i):
                        for s in rng_s:
                            coeff = -p.initial_gen[kk, ss, i, s] * d
                            if coeff != 0.0:
                                entries.append((_row_name(ctx, "EQ11", kk, t,
                                                          ss, i, 0, s + 1),
                                                coeff))
            if ctx.v.share_constraints == "full":
                for k2 in range(ctx.n_k):
                    for t in range(tb, ctx.n_t + 1):
                        d = ctx.depc[kk][t - 1][tb - 1]
                        coeff = ((1.0 if k2 == kk else 0.0)
                                 - p.share_max[k2, t - 1]) * d
                        if coeff != 0.0:
                            entries.append((_row_name(ctx, "EQ13", k2, t), coeff))
            if ctx.v.share_constraints in ("full", "lower_only"):
                for k2 in range(ctx.n_k):
                    for t in range(tb, ctx.n_t + 1):
                        d = ctx.depc[kk][t - 1][tb - 1]
                        coeff = ((1.0 if k2 == kk else 0.0)
                                 - p.share_min[k2, t - 1]) * d
                        if coeff != 0.0:
                            entries.append((_row_name(ctx, "EQ14", k2, t), coeff))
            if ctx.v.fixed_capacities is not None:
                entries.append((_row_name(ctx, "FIX", kk, tb), 1.0))
            labels = (ctx.kname[kk], ctx.tname[tb])
            yield (make_name("x", labels), "x", labels, float(obj), entries)


def _iter_g_columns(ctx: _Ctx) -> Iterator:
    p = ctx.p
    for kk in range(ctx.n_k):
        cap_tag = "EQ6" if kk == ctx.gas else "EQ5"
        in_vari = kk in ctx.vari
        for t in range(1, ctx.n_t + 1):
            cost = p.variable_cost[kk, t - 1]
            for ss in range(ctx.n_ss):
                for i in range(ctx.n_i):
                    for h in range(ctx.n_h + 1):
                        for s in range(ctx.n_s):
                            labels = (ctx.kname[kk], ctx.tname[t],
                                      ctx.sets.seasons[ss],
                                      ctx.sets.day_types[i],
                                      ctx.hname[h], ctx.sname[s + 1])
                            obj = (ctx.opw[ss, i, s] * cost) if h >= 1 else 0.0
                            entries = []
                            if h >= 1:
                                entries.append(
                                    (_row_name(ctx, cap_tag, kk, t, ss, i, h, s + 1), 1.0))
                            if ctx.emit_r():
                                if h >= 1:
                                    entries.append(
                                        (_row_name(ctx, "EQ7", kk, t, ss, i, h, s + 1), 1.0))
                                if h + 1 <= ctx.n_h:
                                    entries.append(
                                        (_row_name(ctx, "EQ7", kk, t, ss, i, h + 1, s + 1), -1.0))
                                if h >= 1:
                                    entries.append(
                                        (_row_name(ctx, "EQ8", kk, t, ss, i, h, s + 1), -1.0))
                                if h + 1 <= ctx.n_h:
                                    entries.append(
                                        (_row_name(ctx, "EQ8", kk, t, ss, i, h + 1, s + 1), 1.0))
                            if ctx.emit_variation() and in_vari:
                                for tag, sign in (("EQ9", 1.0), ("EQ10", -1.0)):
                                    if h >= 1:
                                        name = _row_name(ctx, tag, kk, t, ss, i, h, s + 1)
                                        if ctx.keep_row(name):
                                            entries.append((name, sign))
                                    if h + 1 <= ctx.n_h:
                                        name = _row_name(ctx, tag, kk, t, ss, i, h + 1, s + 1)
                                        if ctx.keep_row(name):
                                            entries.append((name, -sign))
                            if h == 0:
                                entries.append(
                                    (_row_name(ctx, "EQ11", kk, t, ss, i, 0, s + 1), 1.0))
                            if h >= 1:
                                entries.append(
                                    (_row_name(ctx, "EQ12", None, t, ss, i, h, s + 1), 1.0))
                            yield (make_name("g", labels), "g", labels,
                                   float(obj), entries)


def _iter_r_columns(ctx: _Ctx) -> Iterator:
    p = ctx.p
    for kk in range(ctx.n_k):
        for t in range(1, ctx.n_t + 1):
            cv = p.variation_cost[kk, t - 1]
            for ss in range(ctx.n_ss):
                for i in range(ctx.n_i):
                    for h in range(1, ctx.n_h + 1):
                        for s in range(ctx.n_s):
                            labels = (ctx.kname[kk], ctx.tname[t],
                                      ctx.sets.seasons[ss],
                                      ctx.sets.day_types[i],
                                      ctx.hname[h], ctx.sname[s + 1])
                            obj = ctx.opw[ss, i, s] * cv
                            entries = [
                                (_row_name(ctx, "EQ7", kk, t, ss, i, h, s + 1), -1.0),
                                (_row_name(ctx, "EQ8", kk, t, ss, i, h, s + 1), -1.0),
                            ]
                            yield (make_name("r", labels), "r", labels,
                                   float(obj), entries)


def _materialize(name: str, cols: Iterable, rows: Iterable) -> LPModel:
    model = LPModel(name)
    pending: dict[str, list[tuple[int, float]]] = {}
    for col_name, kind, labels, obj, entries in cols:
        j = model.add_column(col_name, 0.0, math.inf, obj, kind, tuple(labels))
        for row_name, coeff in entries:
            pending.setdefault(row_name, []).append((j, coeff))
    for row_name, sense, rhs in rows:
        tag, labels = parse_name(row_name)
        model.add_row(row_name, sense, rhs, pending.pop(row_name, ()),
                      tag, labels)
    if pending:
        leftovers = list(pending)[:3]
        raise GepError(f"column entries reference unknown rows: {leftovers}")
    return model


def build_iso_gep(params: ParameterSet, sets: IndexSets,
                  variant: ModelVariant,
                  keep_variation: Optional[set] = None,
                  name: str = "GEP") -> LPModel:
    """Materialize the chronological model for desk-scale work.

    ``keep_variation`` optionally restricts EQ9/EQ10 to the named rows (the
    binding-only re-solve).  Full-scale instances should stream through the
    text exporter instead of materializing.
    """
    return _materialize(
        name,
        iter_columns(params, sets, variant, keep_variation),
        iter_rows(params, sets, variant, keep_variation),
    )


# ---------------------------------------------------------------------------
# Size enumeration (no materialization)


@dataclass(frozen=True)
class SizeReport:
    rows_by_tag: dict[str, int]
    cols_by_kind: dict[str, int]

    @property
    def n_rows(self) -> int:
        return sum(self.rows_by_tag.values())

    @property
    def n_cols(self) -> int:
        return sum(self.cols_by_kind.values())

    def to_text(self) -> str:
        lines = [f"rows: {self.n_rows}"]
        for tag, n in self.rows_by_tag.items():
            lines.append(f"  {tag}: {n}")
        lines.append(f"columns: {self.n_cols}")
        for kind, n in self.cols_by_kind.items():
            lines.append(f"  {kind}: {n}")
        return "\n".join(lines) + "\n"


def model_size(sets: IndexSets, variant: ModelVariant,
               n_levels: int = 3, n_blocks: int = 3) -> SizeReport:
    """Closed-form row/column counts for either model family."""
    n_k = sets.n_techs
    n_t = sets.years
    n_ss = len(sets.seasons)
    n_i = len(sets.day_types)
    n_h = sets.hours
    n_s = sets.scenarios
    gas = 1 if TechKind.GAS in sets.techs else 0
    n_vari = len(sets.variation_techs)
    cell = n_t * n_ss * n_i * n_h * n_s

    if variant.family == "iso_gep":
        rows = {
            "EQ5": (n_k - gas) * cell,
            "EQ6": gas * cell,
            "EQ7": n_k * cell if variant.variation_costs else 0,
            "EQ8": n_k * cell if variant.variation_costs else 0,
            "EQ9": n_vari * cell if variant.variation_constraints else 0,
            "EQ10": n_vari * cell if variant.variation_constraints else 0,
            "EQ11": n_k * n_t * n_ss * n_i * n_s,
            "EQ12": cell,
            "EQ13": n_k * n_t if variant.share_constraints == "full" else 0,
            "EQ14": (n_k * n_t
                     if variant.share_constraints in ("full", "lower_only")
                     else 0),
            "FIX": n_k * n_t if variant.fixed_capacities is not None else 0,
        }
        cols = {
            "x": n_k * n_t,
            "g": n_k * n_t * n_ss * n_i * (n_h + 1) * n_s,
            "r": n_k * cell if variant.variation_costs else 0,
        }
    else:
        blk_cell = n_t * n_ss * n_blocks * n_levels
        rows = {
            "C2": (n_k - gas) * blk_cell,
            "C3": gas * blk_cell,
            "C4": blk_cell,
            "C5": n_k * n_t if variant.share_constraints == "full" else 0,
            "C6": (n_k * n_t
                   if variant.share_constraints in ("full", "lower_only")
                   else 0),
            "FIX": n_k * n_t if variant.fixed_capacities is not None else 0,
        }
        cols = {"x": n_k * n_t, "g": n_k * blk_cell, "r": 0}
    rows = {tag: n for tag, n in rows.items() if n}
    cols = {kind: n for kind, n in cols.items() if n}
    return SizeReport(rows, cols)


# ---------------------------------------------------------------------------
# Load-duration blocks and the conventional model


@dataclass(frozen=True)
class Block:
    level: float        # MW, segment mean
    duration: int       # hours
    energy: float       # MWh, exact segment sum


def load_duration_blocks(values: Sequence[float],
                         block_count: int = 3) -> list[Block]:
    """Sort demand descending and split it into contiguous segments.

    The segment sum is kept as the block's exact energy; the level is the
    segment mean, so levels are nonincreasing and total energy is preserved.
    """
    arr = sorted((float(v) for v in values), reverse=True)
    if not arr:
        raise GepError("load-duration blocks need a nonempty sample")
    sizes = [len(seg) for seg in np.array_split(np.arange(len(arr)), block_count)]
    out = []
    start = 0
    for size in sizes:
        seg = arr[start:start + size]
        start += size
        if size == 0:
            out.append(Block(0.0, 0, 0.0))
        else:
            energy = math.fsum(seg)
            out.append(Block(energy / size, size, energy))
    return out


BLOCK_LABELS = ("P", "M", "B")   # peak, medium, base (descending level)


@dataclass(frozen=True)
class LevelGroup:
    """Scenarios sharing one demand profile, i.e. one daily level."""

    label: str
    scenario_ids: tuple[int, ...]
    representative: int


def demand_level_groups(params: ParameterSet, sets: IndexSets
                        ) -> list[LevelGroup]:
    """Group scenarios by their full demand signature, ascending in level.

    Scenarios built from the same daily level share identical demand arrays,
    so exact grouping recovers the level structure without extra metadata.
    """
    n_s = sets.scenarios
    groups: dict[bytes, list[int]] = {}
    for s in range(n_s):
        groups.setdefault(params.demand[:, :, :, s].tobytes(), []).append(s)
    ordered = sorted(groups.values(),
                     key=lambda ids: float(params.demand[:, :, :, ids[0]].mean()))
    if len(ordered) == 3:
        labels = ["L", "M", "H"]
    else:
        labels = [f"d{n + 1}" for n in range(len(ordered))]
    return [LevelGroup(lab, tuple(ids), ids[0])
            for lab, ids in zip(labels, ordered)]


def build_conventional(params: ParameterSet, sets: IndexSets,
                       variant: ModelVariant,
                       n_blocks: int = 3,
                       name: str = "GEP-blocks") -> LPModel:
    """Build the load-duration-block expansion model.

    Chronology is destroyed: each (year, season, demand level) keeps only
    ``n_blocks`` blocks of its season-wide load-duration curve, so there are
    no hour-0 anchors, no variation variables, and no variation limits.
    Capability per block is the season mean over the day's hours.
    """
    if variant.family != "conventional":
        raise GepError(f"expected family conventional, got {variant.family!r}")
    variant.check_fixed_cover(sets)
    p = params
    n_k, n_t = sets.n_techs, sets.years
    n_ss, n_i = len(sets.seasons), len(sets.day_types)
    n_h = sets.hours
    gas = sets.techs.index(TechKind.GAS) if TechKind.GAS in sets.techs else -1
    levels = demand_level_groups(params, sets)
    day_counts = np.rint(p.days_per_cell).astype(int)

    # Per (season, level): pooled base-year hourly demand -> blocks.
    blocks: dict[tuple[int, int], list[Block]] = {}
    lvl_prob = np.zeros((n_ss, len(levels)))
    for a in range(n_ss):
        t_total = day_counts[a].sum()
        for ll, grp in enumerate(levels):
            pool: list[float] = []
            for i in range(n_i):
                profile = p.demand[a, i, :, grp.representative]
                pool.extend(np.tile(profile, day_counts[a, i]))
            blocks[(a, ll)] = load_duration_blocks(pool, n_blocks)
            for i in range(n_i):
                w = day_counts[a, i] / t_total if t_total else 0.0
                lvl_prob[a, ll] += w * p.probability[a, i, list(grp.scenario_ids)].sum()

    cap_blk = p.capability.mean(axis=2)          # (k, ss) season mean
    kname = [k.value for k in sets.techs]
    tname = [f"t{t}" for t in range(n_t + 1)]
    labels_lvl = [g.label for g in levels]
    blk_labels = (BLOCK_LABELS if n_blocks == 3
                  else tuple(f"b{n + 1}" for n in range(n_blocks)))

    model = LPModel(name)
    depc = [[depreciated_capacity_coeffs(t, p.depreciation[kk])
             for t in range(1, n_t + 1)] for kk in range(n_k)]

    x_idx = {}
    for kk in range(n_k):
        fc = p.fixed_cost[kk]
        for tb in range(1, n_t + 1):
            obj = p.invest_cost[kk, tb - 1] + fc[tb - 1:].sum()
            lab = (kname[kk], tname[tb])
            x_idx[(kk, tb)] = model.add_column(make_name("x", lab), 0.0,
                                               math.inf, float(obj), "x", lab)
    g_idx = {}
    for kk in range(n_k):
        for t in range(1, n_t + 1):
            for a in range(n_ss):
                for b, blab in enumerate(blk_labels):
                    for ll, llab in enumerate(labels_lvl):
                        dur = blocks[(a, ll)][b].duration
                        obj = (lvl_prob[a, ll] * dur
                               * p.variable_cost[kk, t - 1])
                        lab = (kname[kk], tname[t], sets.seasons[a], blab, llab)
                        g_idx[(kk, t, a, b, ll)] = model.add_column(
                            make_name("g", lab), 0.0, math.inf, float(obj),
                            "g", lab)

    def x_terms(kk, t, scale):
        for tb in range(1, t + 1):
            d = depc[kk][t - 1][tb - 1]
            if d != 0.0 and scale != 0.0:
                yield (x_idx[(kk, tb)], scale * d)

    for kk in range(n_k):
        tag = "C3" if kk == gas else "C2"
        for t in range(1, n_t + 1):
            xe = p.existing_cap[kk, t - 1]
            for a in range(n_ss):
                cap = cap_blk[kk, a]
                for b, blab in enumerate(blk_labels):
                    for ll, llab in enumerate(labels_lvl):
                        rhs = cap * xe
                        if kk == gas:
                            rhs -= (p.reserve_fraction[t - 1] * p.growth[t - 1]
                                    * blocks[(a, ll)][b].level)
                        coeffs = [(g_idx[(kk, t, a, b, ll)], 1.0)]
                        coeffs.extend(x_terms(kk, t, -cap))
                        lab = (kname[kk], tname[t], sets.seasons[a], blab, llab)
                        model.add_row(make_name(tag, lab), "L", float(rhs),
                                      coeffs, tag, lab)
    for t in range(1, n_t + 1):
        for a in range(n_ss):
            for b, blab in enumerate(blk_labels):
                for ll, llab in enumerate(labels_lvl):
                    rhs = p.growth[t - 1] * blocks[(a, ll)][b].level
                    coeffs = [(g_idx[(kk, t, a, b, ll)], 1.0)
                              for kk in range(n_k)]
                    lab = (tname[t], sets.seasons[a], blab, llab)
                    model.add_row(make_name("C4", lab), "G", float(rhs),
                                  coeffs, "C4", lab)

    xe_total = p.existing_cap.sum(axis=0)
    if variant.share_constraints == "full":
        for kk in range(n_k):
            for t in range(1, n_t + 1):
                rhs = (p.share_max[kk, t - 1] * xe_total[t - 1]
                       - p.existing_cap[kk, t - 1])
                coeffs = []
                for k2 in range(n_k):
                    scale = (1.0 if k2 == kk else 0.0) - p.share_max[kk, t - 1]
                    coeffs.extend(x_terms(k2, t, scale))
                lab = (kname[kk], tname[t])
                model.add_row(make_name("C5", lab), "L", float(rhs), coeffs,
                              "C5", lab)
    if variant.share_constraints in ("full", "lower_only"):
        for kk in range(n_k):
            for t in range(1, n_t + 1):
                rhs = (p.share_min[kk, t - 1] * xe_total[t - 1]
                       - p.existing_cap[kk, t - 1])
                coeffs = []
                for k2 in range(n_k):
                    scale = (1.0 if k2 == kk else 0.0) - p.share_min[kk, t - 1]
                    coeffs.extend(x_terms(k2, t, scale))
                lab = (kname[kk], tname[t])
                model.add_row(make_name("C6", lab), "G", float(rhs), coeffs,
                              "C6", lab)
    if variant.fixed_capacities is not None:
        for kk, k in enumerate(sets.techs):
            for t in range(1, n_t + 1):
                lab = (kname[kk], tname[t])
                model.add_row(make_name("FIX", lab), "E",
                              float(variant.fixed_capacities[(k, t)]),
                              [(x_idx[(kk, t)], 1.0)], "FIX", lab)
    return model


def capacity_plan(solution_primal: dict[str, float], params: ParameterSet,
                  sets: IndexSets) -> dict[tuple[TechKind, int], float]:
    """Total capacity XE + XN per (tech, year) implied by the solved builds."""
    out = {}
    for kk, k in enumerate(sets.techs):
        builds = [solution_primal.get(make_name("x", (k.value, f"t{tb}")), 0.0)
                  for tb in range(1, sets.years + 1)]
        for t in range(1, sets.years + 1):
            coeffs = depreciated_capacity_coeffs(t, params.depreciation[kk])
            xn = float(np.dot(coeffs, builds[:t]))
            out[(k, t)] = params.existing_cap[kk, t - 1] + xn
    return out
