"""Hourly data ingestion: CSV parsing, season/day-type classification, and
day counting over a reference calendar.

Input hours are hour-ending 1..24; hour 24 of one day supplies the hour-0
anchor of the next.  Weekday holidays classify as weekends.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

from .core import DEFAULT_DAY_TYPES, DEFAULT_SEASONS, GepError, TechKind

REL_TOL = 1e-6   # slack allowed in output <= capability <= installed


class IngestError(GepError):
    pass


@dataclass(frozen=True)
class DayCell:
    season: str
    day_type: str


@dataclass
class HourlyRecord:
    """One (date, hour) observation; generation fields are per technology."""

    date: dt.date
    hour: int                                   # 1..24, hour-ending
    demand: Optional[float] = None
    output: dict[TechKind, float] = field(default_factory=dict)
    capability: dict[TechKind, float] = field(default_factory=dict)
    installed: dict[TechKind, float] = field(default_factory=dict)


@dataclass
class ParseResult:
    records: list[HourlyRecord]
    rejected: list[tuple[int, str]]             # (line number, reason)
    rows_read: int

    def summary(self) -> str:
        return (f"{self.rows_read} rows read, {len(self.records)} records, "
                f"{len(self.rejected)} rejected")


# Season layout: full months plus half-month boundaries.  Days 1-15 are the
# first half, 16-end the second half.
def classify_season(date: dt.date) -> str:
    m, d = date.month, date.day
    second_half = d >= 16
    if m in (12, 1, 2, 3) or (m == 11 and second_half):
        return "winter"
    if m in (4, 5) or (m == 6 and not second_half):
        return "spring"
    if (m == 6 and second_half) or m in (7, 8) or (m == 9 and not second_half):
        return "summer"
    return "fall"


def classify_day(date: dt.date, holidays: frozenset | set = frozenset()) -> DayCell:
    """Map a calendar date to its (season, day-type) cell.

    Saturdays, Sundays, and listed holidays are weekends.
    """
    day_type = "weekend" if (date.weekday() >= 5 or date in holidays) else "weekday"
    return DayCell(classify_season(date), day_type)


def count_day_types(reference_year: int,
                    holidays: frozenset | set = frozenset()
                    ) -> dict[tuple[str, str], int]:
    """Days per (season, day-type) cell over one reference year."""
    counts = {(ss, i): 0 for ss in DEFAULT_SEASONS for i in DEFAULT_DAY_TYPES}
    date = dt.date(reference_year, 1, 1)
    one = dt.timedelta(days=1)
    while date.year == reference_year:
        cell = classify_day(date, holidays)
        counts[(cell.season, cell.day_type)] += 1
        date += one
    return counts


def read_holidays(stream: Iterable[str]) -> set[dt.date]:
    """One ISO-8601 date per line; blank lines and '#' comments ignored."""
    out = set()
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.add(dt.date.fromisoformat(line))
        except ValueError as exc:
            raise IngestError(f"holiday file line {lineno}: {exc}") from exc
    return out


# Column maps: logical field -> CSV header name.
DEMAND_SCHEMA = {"date": "date", "hour": "hour", "demand": "demand_mw"}
GENERATION_SCHEMA = {
    "date": "date", "hour": "hour", "tech": "tech",
    "output": "output_mw", "capability": "capability_mw",
    "installed": "installed_mw",
}


def parse_hourly(stream: TextIO, schema: dict[str, str]) -> ParseResult:
    """Parse delimiter-separated hourly rows into records.

    A malformed header is a hard error; malformed data rows are recorded as
    rejections and parsing continues.  Demand schemas produce one record per
    (date, hour); generation schemas merge per-technology rows into the same
    (date, hour) record and reject duplicates per technology.
    """
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        raise IngestError("empty input: no header row")
    missing = [col for col in schema.values() if col not in reader.fieldnames]
    if missing:
        raise IngestError(f"header missing required columns: {missing}")

    has_tech = "tech" in schema
    by_key: dict[tuple[dt.date, int], HourlyRecord] = {}
    seen_tech: set[tuple[dt.date, int, TechKind]] = set()
    rejected: list[tuple[int, str]] = []
    rows = 0

    for row in reader:
        rows += 1
        lineno = reader.line_num
        try:
            date = dt.date.fromisoformat(row[schema["date"]].strip())
            hour = int(row[schema["hour"]])
        except (ValueError, AttributeError) as exc:
            rejected.append((lineno, f"bad date/hour: {exc}"))
            continue
        if not 1 <= hour <= 24:
            rejected.append((lineno, f"hour {hour} outside 1..24"))
            continue
        key = (date, hour)

        if not has_tech:
            if key in by_key:
                rejected.append((lineno, f"duplicate (date, hour) {key}"))
                continue
            try:
                demand = float(row[schema["demand"]])
            except (TypeError, ValueError):
                rejected.append((lineno, "bad demand value"))
                continue
            if demand < 0:
                rejected.append((lineno, "negative demand"))
                continue
            by_key[key] = HourlyRecord(date, hour, demand=demand)
            continue

        try:
            tech = TechKind(row[schema["tech"]].strip().lower())
        except (ValueError, AttributeError):
            rejected.append((lineno, f"unknown tech {row.get(schema['tech'])!r}"))
            continue
        if (date, hour, tech) in seen_tech:
            rejected.append((lineno, f"duplicate (date, hour, tech) "
                                     f"{(date, hour, tech.value)}"))
            continue
        try:
            output = float(row[schema["output"]])
            capability = float(row[schema["capability"]])
            installed = float(row[schema["installed"]])
        except (TypeError, ValueError):
            rejected.append((lineno, "bad generation value"))
            continue
        slack = REL_TOL * max(installed, 1.0)
        if not (-slack <= output <= capability + slack
                and capability <= installed + slack):
            rejected.append(
                (lineno, f"ordering 0 <= output <= capability <= installed "
                         f"violated for {tech.value}"))
            continue
        seen_tech.add((date, hour, tech))
        rec = by_key.get(key)
        if rec is None:
            rec = HourlyRecord(date, hour)
            by_key[key] = rec
        rec.output[tech] = output
        rec.capability[tech] = capability
        rec.installed[tech] = installed

    records = [by_key[k] for k in sorted(by_key)]
    return ParseResult(records, rejected, rows)
