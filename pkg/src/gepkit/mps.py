"""Free-format MPS text export and import.

Row and column names carry the model metadata, so a round trip through the
text form reproduces the model exactly.  The streaming writer consumes
column-major generators and never materializes the model, which is how
full-scale instances reach an external solver.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Optional, TextIO

from .lp import LPError, LPModel, OBJECTIVE_NAME, ROW_TAGS, VAR_KINDS, parse_name

_FLUSH_LINES = 65536


def _num(v) -> str:
    return repr(float(v))


class ByteCounter:
    """Write sink that only counts bytes; used to probe export size/memory."""

    def __init__(self):
        self.bytes = 0

    def write(self, text: str) -> int:
        self.bytes += len(text)
        return len(text)


class _Buffered:
    def __init__(self, out):
        self.out = out
        self.buf: list[str] = []

    def line(self, text: str) -> None:
        self.buf.append(text)
        if len(self.buf) >= _FLUSH_LINES:
            self.flush()

    def flush(self) -> None:
        if self.buf:
            self.buf.append("")
            self.out.write("\n".join(self.buf))
            self.buf.clear()


def _bound_lines(col_name: str, lb: float, ub: float) -> list[str]:
    if lb == 0.0 and ub == math.inf:
        return []
    if lb == ub:
        return [f" FX BND {col_name} {_num(lb)}"]
    if lb == -math.inf and ub == math.inf:
        return [f" FR BND {col_name}"]
    out = []
    if lb == -math.inf:
        out.append(f" MI BND {col_name}")
    elif lb != 0.0:
        out.append(f" LO BND {col_name} {_num(lb)}")
    if ub != math.inf:
        out.append(f" UP BND {col_name} {_num(ub)}")
    return out


def export_stream(name: str,
                  columns: Callable[[], Iterable],
                  rows: Callable[[], Iterable],
                  out,
                  bounds: Optional[Callable[[], Iterable]] = None) -> None:
    """Write free MPS from factories of column/row iterators.

    ``columns()`` yields (name, kind, labels, objective, entries) with
    entries as (row_name, value) pairs in a stable order; ``rows()`` yields
    (name, sense, rhs) and is consumed twice (ROWS, then RHS).  Zero
    right-hand sides are omitted; every column emits its objective entry,
    even at zero, so otherwise-empty columns survive the round trip.
    """
    w = _Buffered(out)
    w.line(f"NAME {name}")
    w.line("ROWS")
    w.line(f" N {OBJECTIVE_NAME}")
    for row_name, sense, _ in rows():
        w.line(f" {sense} {row_name}")
    w.line("COLUMNS")
    for col_name, _kind, _labels, obj, entries in columns():
        pairs = [(OBJECTIVE_NAME, obj)]
        pairs.extend(entries)
        for a in range(0, len(pairs), 2):
            text = f" {col_name}"
            for rn, v in pairs[a:a + 2]:
                text += f" {rn} {_num(v)}"
            w.line(text)
    w.line("RHS")
    pending: list[tuple[str, float]] = []
    for row_name, _sense, rhs in rows():
        if rhs != 0.0:
            pending.append((row_name, rhs))
            if len(pending) == 2:
                (r1, v1), (r2, v2) = pending
                w.line(f" RHS {r1} {_num(v1)} {r2} {_num(v2)}")
                pending.clear()
    if pending:
        r1, v1 = pending[0]
        w.line(f" RHS {r1} {_num(v1)}")
    w.line("BOUNDS")
    if bounds is not None:
        for col_name, lb, ub in bounds():
            for text in _bound_lines(col_name, lb, ub):
                w.line(text)
    w.line("ENDATA")
    w.flush()


def export_standard(model: LPModel, out: Optional[TextIO] = None) -> Optional[str]:
    """Write a materialized model as free MPS; returns the text when no sink
    is given.  Raises on name collisions across rows, columns, and the
    objective row."""
    names = {OBJECTIVE_NAME}
    for item in (*model.rows, *model.columns):
        if item.name in names:
            raise LPError(f"name collision on {item.name!r}")
        names.add(item.name)

    col_entries: list[list[tuple[str, float]]] = [[] for _ in model.columns]
    for row in model.rows:
        for j, v in sorted(row.coeffs.items()):
            col_entries[j].append((row.name, v))

    def columns():
        for j, col in enumerate(model.columns):
            yield (col.name, col.kind, col.labels, col.obj, col_entries[j])

    def rows():
        for row in model.rows:
            yield (row.name, row.sense, row.rhs)

    def bounds():
        for col in model.columns:
            yield (col.name, col.lb, col.ub)

    if out is not None:
        export_stream(model.name, columns, rows, out, bounds)
        return None
    chunks: list[str] = []

    class _Collect:
        def write(self, text):
            chunks.append(text)
            return len(text)

    export_stream(model.name, columns, rows, _Collect(), bounds)
    return "".join(chunks)


def import_standard(source) -> LPModel:
    """Parse free MPS text (a string or line iterable) back into a model.

    Metadata (row tags, column kinds, index labels) is reconstructed from
    the names, so import(export(m)) == m for models built by this package.
    """
    lines = source.splitlines() if isinstance(source, str) else source

    section = None
    name = "GEP"
    obj_name = None
    row_order: list[tuple[str, str]] = []
    col_order: list[str] = []
    col_obj: dict[str, float] = {}
    col_bounds: dict[str, list[float]] = {}
    entries: dict[str, list[tuple[str, float]]] = {}
    rhs: dict[str, float] = {}
    row_names = set()

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        head = line.split()
        upper = head[0].upper()
        if not line[0].isspace():
            if upper == "NAME":
                name = head[1] if len(head) > 1 else "GEP"
            elif upper in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS"):
                section = upper
            elif upper == "ENDATA":
                break
            else:
                raise LPError(f"line {lineno}: unknown section {head[0]!r}")
            continue
        if section == "ROWS":
            sense, rname = head[0].upper(), head[1]
            if sense == "N":
                if obj_name is None:
                    obj_name = rname
                continue
            if sense not in ("L", "G", "E"):
                raise LPError(f"line {lineno}: bad row sense {sense!r}")
            if rname in row_names:
                raise LPError(f"line {lineno}: duplicate row {rname!r}")
            row_names.add(rname)
            row_order.append((rname, sense))
        elif section == "COLUMNS":
            cname = head[0]
            if cname not in col_obj:
                col_obj[cname] = 0.0
                col_order.append(cname)
                entries[cname] = []
            pairs = head[1:]
            if len(pairs) % 2:
                raise LPError(f"line {lineno}: odd token count in COLUMNS")
            for a in range(0, len(pairs), 2):
                rname, val = pairs[a], float(pairs[a + 1])
                if rname == obj_name:
                    col_obj[cname] += val
                elif rname in row_names:
                    entries[cname].append((rname, val))
                else:
                    raise LPError(f"line {lineno}: unknown row {rname!r}")
        elif section == "RHS":
            pairs = head[1:]
            if len(pairs) % 2:
                raise LPError(f"line {lineno}: odd token count in RHS")
            for a in range(0, len(pairs), 2):
                rname, sval = pairs[a], pairs[a + 1]
                if rname == obj_name:
                    raise LPError(f"line {lineno}: objective constants are "
                                  "not supported")
                if rname not in row_names:
                    raise LPError(f"line {lineno}: unknown row {rname!r}")
                rhs[rname] = float(sval)
        elif section == "RANGES":
            raise LPError(f"line {lineno}: RANGES rows are not supported")
        elif section == "BOUNDS":
            btype = head[0].upper()
            cname = head[2]
            bounds = col_bounds.setdefault(cname, [0.0, math.inf])
            if btype in ("UP", "LO", "FX"):
                val = float(head[3])
                if btype == "UP":
                    bounds[1] = val
                elif btype == "LO":
                    bounds[0] = val
                else:
                    bounds[0] = bounds[1] = val
            elif btype == "MI":
                bounds[0] = -math.inf
            elif btype == "PL":
                bounds[1] = math.inf
            elif btype == "FR":
                bounds[0], bounds[1] = -math.inf, math.inf
            else:
                raise LPError(f"line {lineno}: bound type {btype!r} "
                              "not supported")
        elif section is None:
            raise LPError(f"line {lineno}: data before any section")

    model = LPModel(name)
    for cname in col_order:
        kind, labels = parse_name(cname)
        lb, ub = col_bounds.get(cname, (0.0, math.inf))
        model.add_column(cname, lb, ub, col_obj[cname],
                         kind if kind in VAR_KINDS else None, labels)
    per_row: dict[str, list[tuple[int, float]]] = {rn: [] for rn, _ in row_order}
    for cname in col_order:
        j = model.column_index(cname)
        for rname, val in entries[cname]:
            per_row[rname].append((j, val))
    for rname, sense in row_order:
        tag, labels = parse_name(rname)
        model.add_row(rname, sense, rhs.get(rname, 0.0), per_row[rname],
                      tag if tag in ROW_TAGS else None, labels)
    return model


def export_chronological_stream(params, sets, variant, out,
                                keep_variation=None,
                                name: str = "GEP") -> None:
    """Stream the chronological model straight from its generators; peak
    memory stays independent of model size."""
    from .model import iter_columns, iter_rows

    export_stream(
        name,
        lambda: iter_columns(params, sets, variant, keep_variation),
        lambda: iter_rows(params, sets, variant, keep_variation),
        out,
    )
