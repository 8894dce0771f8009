"""Sparse linear-program container: named, bounded columns and tagged rows.

Row and column names double as the wire format: every name encodes the
constraint-family tag (or variable kind) plus its index labels, so text
exports carry the full metadata and can be parsed back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

# Constraint-family tags.  The chronological expansion model uses EQ5..EQ14,
# the load-duration-block model C2..C6, and FIX pins build decisions.
ROW_TAGS = (
    "EQ5",   # capability limit, non-gas groups
    "EQ6",   # capability limit for gas net of the reserve set-aside
    "EQ7",   # variation variable covers upward output change
    "EQ8",   # variation variable covers downward output change
    "EQ9",   # variation-up limit
    "EQ10",  # variation-down limit
    "EQ11",  # hour-0 generation anchor (equality)
    "EQ12",  # demand cover
    "EQ13",  # capacity-share upper bound
    "EQ14",  # capacity-share lower bound
    "C2",    # block capability limit, non-gas
    "C3",    # block capability limit, gas with reserve
    "C4",    # block demand cover
    "C5",    # block-model share upper bound
    "C6",    # block-model share lower bound
    "FIX",   # pinned build decision (equality)
)
TAG_ORDER = {tag: n for n, tag in enumerate(ROW_TAGS)}

VAR_KINDS = ("x", "g", "r")

OBJECTIVE_NAME = "COST"

SENSES = ("L", "G", "E")  # <=, >=, ==


class LPError(Exception):
    pass


@dataclass
class Column:
    name: str
    lb: float = 0.0
    ub: float = math.inf
    obj: float = 0.0
    kind: Optional[str] = None       # one of VAR_KINDS
    labels: tuple[str, ...] = ()


@dataclass
class Row:
    name: str
    sense: str
    rhs: float
    coeffs: dict[int, float] = field(default_factory=dict)  # col index -> value
    tag: Optional[str] = None
    labels: tuple[str, ...] = ()


class LPModel:
    """A sparse LP: min c'x subject to row constraints and column bounds."""

    def __init__(self, name: str = "GEP"):
        self.name = name
        self.columns: list[Column] = []
        self.rows: list[Row] = []
        self._col_index: dict[str, int] = {}
        self._row_index: dict[str, int] = {}

    # -- construction -------------------------------------------------------

    def add_column(self, name: str, lb: float = 0.0, ub: float = math.inf,
                   obj: float = 0.0, kind: Optional[str] = None,
                   labels: tuple[str, ...] = ()) -> int:
        if name in self._col_index:
            raise LPError(f"duplicate column name {name!r}")
        self._col_index[name] = len(self.columns)
        self.columns.append(Column(name, lb, ub, obj, kind, labels))
        return len(self.columns) - 1

    def add_row(self, name: str, sense: str, rhs: float,
                coeffs: Iterable[tuple[int, float]] = (),
                tag: Optional[str] = None,
                labels: tuple[str, ...] = ()) -> int:
        if sense not in SENSES:
            raise LPError(f"bad row sense {sense!r}")
        if name in self._row_index:
            raise LPError(f"duplicate row name {name!r}")
        acc: dict[int, float] = {}
        for j, v in coeffs:
            if not 0 <= j < len(self.columns):
                raise LPError(f"row {name!r} references unknown column {j}")
            acc[j] = acc.get(j, 0.0) + v
        self._row_index[name] = len(self.rows)
        self.rows.append(Row(name, sense, float(rhs), acc, tag, labels))
        return len(self.rows) - 1

    # -- lookups -------------------------------------------------------------

    def column_index(self, name: str) -> int:
        return self._col_index[name]

    def row_index(self, name: str) -> int:
        return self._row_index[name]

    def has_column(self, name: str) -> bool:
        return name in self._col_index

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def nnz(self) -> int:
        return sum(len(r.coeffs) for r in self.rows)

    def rows_by_tag(self, tag: str) -> list[int]:
        return [i for i, r in enumerate(self.rows) if r.tag == tag]

    def row_count_by_tag(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            key = r.tag or "?"
            out[key] = out.get(key, 0) + 1
        return out

    def column_count_by_kind(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.columns:
            key = c.kind or "?"
            out[key] = out.get(key, 0) + 1
        return out

    # -- comparison ----------------------------------------------------------

    def equals(self, other: "LPModel") -> bool:
        if self.name != other.name:
            return False
        if len(self.columns) != len(other.columns):
            return False
        if len(self.rows) != len(other.rows):
            return False
        for a, b in zip(self.columns, other.columns):
            if (a.name, a.lb, a.ub, a.obj, a.kind, a.labels) != \
               (b.name, b.lb, b.ub, b.obj, b.kind, b.labels):
                return False
        for a, b in zip(self.rows, other.rows):
            if (a.name, a.sense, a.rhs, a.tag, a.labels) != \
               (b.name, b.sense, b.rhs, b.tag, b.labels):
                return False
            if a.coeffs != b.coeffs:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, LPModel) and self.equals(other)

    def __repr__(self):
        return (f"<LPModel {self.name!r}: {self.n_rows} rows, "
                f"{self.n_cols} cols, {self.nnz} nnz>")


# -- name scheme -------------------------------------------------------------
# Column: "<kind>.<label>.<label>..."   e.g. g.nuclear.t1.winter.weekday.h0.s1
# Row:    "<tag>.<label>.<label>..."    e.g. EQ9.gas.t3.summer.weekend.h7.s12


def make_name(head: str, labels: Iterable[str]) -> str:
    parts = [head]
    parts.extend(labels)
    return ".".join(parts)


def parse_name(name: str) -> tuple[str, tuple[str, ...]]:
    head, *rest = name.split(".")
    return head, tuple(rest)
