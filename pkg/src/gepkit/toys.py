"""Small engineered instances and a synthetic data corpus.

The single-technology toys are built so their optima are checkable by hand:
capacity is driven either by the demand peak or by a steep hour-to-hour ramp
against the variation limit, which is exactly the distinction the ablation
and fixed-capacity experiments probe.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from pathlib import Path

import numpy as np

from .core import IndexSets, ParameterSet, TechKind


def single_tech_instance(demand_profile, vu: float, vd: float,
                         ig: float = 0.0, invest: float = 1000.0,
                         variable: float = 1.0, cv: float = 0.1,
                         cap: float | tuple = 1.0, xe: float = 0.0,
                         reserve: float = 0.0, days: float = 365.0,
                         tech: TechKind = TechKind.NUCLEAR
                         ) -> tuple[ParameterSet, IndexSets]:
    """One technology, one year, one season/day-type cell, one scenario.

    ``cap`` may be a scalar or an hour profile of capability fractions.
    """
    profile = np.asarray(demand_profile, dtype=float)
    n_h = profile.size
    sets = IndexSets(years=1, seasons=("winter",), day_types=("weekday",),
                     hours=n_h, scenarios=1, techs=(tech,))
    cap_profile = np.broadcast_to(np.asarray(cap, dtype=float),
                                  (n_h,)).reshape(1, 1, n_h)
    params = ParameterSet(
        days_per_cell=np.array([[days]]),
        variable_cost=np.array([[variable]]),
        variation_cost=np.array([[cv]]),
        invest_cost=np.array([[invest]]),
        fixed_cost=np.array([[0.0]]),
        existing_cap=np.array([[xe]]),
        depreciation=np.array([1.0 / 30.0]),
        lifespan=np.array([30.0]),
        variation_up=np.array([[vu]]),
        variation_down=np.array([[vd]]),
        demand=profile.reshape(1, 1, n_h, 1),
        initial_gen=np.array([[[[ig]]]]),
        capability=cap_profile,
        share_max=np.array([[1.0]]),
        share_min=np.array([[0.0]]),
        probability=np.array([[[1.0]]]),
        growth=np.array([1.0]),
        reserve_fraction=np.array([reserve]),
        discount_rate=0.0,
        horizon_years=1,
        year_days=int(days),
    )
    return params, sets


def ramp_toy() -> tuple[ParameterSet, IndexSets]:
    """Three-hour day whose morning ramp, not its peak, sizes the fleet.

    Without variation limits the peak of 20 forces capacity 20; with them
    the hour-1 jump from the zero anchor and the hour-2 ramp of 10 against
    VU=0.25 force capacity 40.  Capacity 20 therefore cannot operate once
    the limits are imposed.
    """
    return single_tech_instance((10.0, 20.0, 14.0), vu=0.25, vd=0.25)


def steep_ramp_toy() -> tuple[ParameterSet, IndexSets]:
    """Two-hour instance with a demand doubling that only capacity 40 can
    follow under VU=0.25; block-demand planning sees just the peak of 20."""
    return single_tech_instance((10.0, 20.0), vu=0.25, vd=0.25)


def binding_hour7_toy() -> tuple[ParameterSet, IndexSets]:
    """Eight-hour day where the hour-7 demand step is the one binding
    variation row at the optimum.

    A capability dip over hours 1..6 blocks pre-positioning beyond 0.3x, so
    the step to 20 at hour 7 must fit inside the variation allowance:
    20 - 0.3x <= VU*Cap7*x forces x = 40, with generation 12 at hour 6 (its
    capability limit) and the hour-7 up-variation row exactly tight.
    """
    return single_tech_instance((10.0,) * 6 + (20.0, 20.0),
                                vu=0.2, vd=0.2, ig=0.2,
                                cap=(0.3,) * 6 + (1.0, 1.0))


def slack_variation_toy() -> tuple[ParameterSet, IndexSets]:
    """Variation limits of 1.0 and zero variation cost: every ablation case
    produces the same plan and the same objective."""
    return single_tech_instance((10.0, 20.0, 14.0), vu=1.0, vd=1.0, cv=0.0)


# ---------------------------------------------------------------------------
# Synthetic corpus for estimation and CLI smoke runs.

_INSTALLED = {
    TechKind.NUCLEAR: 13000.0,
    TechKind.GAS: 10000.0,
    TechKind.HYDRO: 8800.0,
    TechKind.WIND: 4200.0,
    TechKind.SOLAR: 2600.0,
    TechKind.BIOFUEL: 500.0,
}

_SEASON_WAVE = {"winter": 1.15, "spring": 0.92, "summer": 1.08, "fall": 0.95}

HOLIDAYS_2017 = (
    "2017-01-01", "2017-02-20", "2017-04-14", "2017-05-22", "2017-07-01",
    "2017-08-07", "2017-09-04", "2017-10-09", "2017-12-25", "2017-12-26",
)


def _daily_shape(hour: int) -> float:
    # morning rise, evening peak near hour 18
    return 0.82 + 0.12 * math.sin((hour - 4) * math.pi / 12) \
        + 0.10 * math.exp(-((hour - 18) ** 2) / 8.0)


def write_synthetic_corpus(directory, year: int = 2017, seed: int = 7
                           ) -> dict[str, Path]:
    """Write demand.csv, generation.csv, and holidays.txt for one year.

    The series are smooth shapes plus seeded noise: valid, dense, and varied
    enough for every estimator, with solar capability zero at night.
    """
    from .ingest import classify_season

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = {
        "demand": directory / "demand.csv",
        "generation": directory / "generation.csv",
        "holidays": directory / "holidays.txt",
    }

    with open(paths["holidays"], "w", encoding="utf-8") as fh:
        fh.write("\n".join(HOLIDAYS_2017) + "\n")

    start = dt.date(year, 1, 1)
    n_days = (dt.date(year + 1, 1, 1) - start).days

    with open(paths["demand"], "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["date", "hour", "demand_mw"])
        for d in range(n_days):
            date = start + dt.timedelta(days=d)
            season = classify_season(date)
            weekend = date.weekday() >= 5 or date.isoformat() in HOLIDAYS_2017
            base = 14000.0 * _SEASON_WAVE[season] * (0.88 if weekend else 1.0)
            for hour in range(1, 25):
                demand = base * _daily_shape(hour) * rng.normal(1.0, 0.03)
                wr.writerow([date.isoformat(), hour, f"{max(demand, 0):.1f}"])

    with open(paths["generation"], "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["date", "hour", "tech", "output_mw",
                     "capability_mw", "installed_mw"])
        for d in range(n_days):
            date = start + dt.timedelta(days=d)
            season = classify_season(date)
            for kind in TechKind:
                inst = _INSTALLED[kind]
                for hour in range(1, 25):
                    if kind is TechKind.SOLAR:
                        sun = max(0.0, math.sin((hour - 6) * math.pi / 12))
                        capf = 0.8 * sun if 7 <= hour <= 19 else 0.0
                    elif kind is TechKind.WIND:
                        capf = 0.2 + 0.15 * _SEASON_WAVE[season] \
                            + 0.05 * math.sin(hour / 3.0)
                    else:
                        capf = 0.75 + 0.1 * math.sin(d / 29.0 + hour / 11.0)
                    capf = min(max(capf * rng.normal(1.0, 0.02), 0.0), 1.0)
                    capability = inst * capf
                    use = {
                        TechKind.NUCLEAR: 0.97,
                        TechKind.GAS: 0.35 + 0.25 * _daily_shape(hour),
                        TechKind.HYDRO: 0.5 + 0.3 * _daily_shape(hour),
                        TechKind.WIND: 0.9,
                        TechKind.SOLAR: 0.95,
                        TechKind.BIOFUEL: 0.25 if hour < 22 else 0.05,
                    }[kind]
                    output = capability * min(max(use * rng.normal(1.0, 0.05),
                                                  0.0), 1.0)
                    wr.writerow([date.isoformat(), hour, kind.value,
                                 f"{output:.2f}", f"{capability:.2f}",
                                 f"{inst:.1f}"])
    return paths
