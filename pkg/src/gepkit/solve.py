"""Desk-scale exact LP solving with duals, feasibility checking, and the
external-solver solution reader for full-scale runs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .lp import LPModel, Row
from .simplex import SimplexResult, SolverError, simplex_solve

DEFAULT_TOL = 1e-7
DEFAULT_SCALE_GUARD = 200_000       # nonzeros
DENSE_CELL_GUARD = 50_000_000       # rows x cols of the internal tableau


class ModelTooLargeError(Exception):
    """Model exceeds the desk-scale guard; export it for an external solver."""


@dataclass(frozen=True)
class Solution:
    """Solved LP: primal/dual values keyed by column and row name.

    Duals use the reporting convention that a binding inequality has a
    nonnegative dual (the price of tightening it); equality rows keep the
    signed marginal d(objective)/d(rhs).
    """

    status: str                                  # optimal | infeasible | unbounded
    objective: Optional[float] = None
    primal: dict[str, float] = field(default_factory=dict)
    dual: dict[str, float] = field(default_factory=dict)
    reduced_costs: dict[str, float] = field(default_factory=dict)
    dual_objective: Optional[float] = None
    certificate: Optional[dict] = None
    iterations: int = 0

    def to_json(self) -> str:
        doc = {
            "status": self.status,
            "objective": self.objective,
            "dual_objective": self.dual_objective,
            "iterations": self.iterations,
            "primal": self.primal,
            "dual": self.dual,
            "reduced_costs": self.reduced_costs,
            "certificate": self.certificate,
        }
        return json.dumps(doc, sort_keys=True, indent=1)


@dataclass(frozen=True)
class RowViolation:
    row: str
    sense: str
    activity: float
    rhs: float
    amount: float        # positive violation magnitude

    def __str__(self) -> str:
        op = {"L": "<=", "G": ">=", "E": "=="}[self.sense]
        return (f"{self.row}: activity {self.activity!r} violates "
                f"{op} {self.rhs!r} by {self.amount:g}")


def _model_arrays(model: LPModel):
    c = np.array([col.obj for col in model.columns])
    lb = np.array([col.lb for col in model.columns])
    ub = np.array([col.ub for col in model.columns])
    rows = [(r.sense, r.rhs, r.coeffs) for r in model.rows]
    return c, lb, ub, rows


def solve_desk(model: LPModel, tol: float = DEFAULT_TOL,
               scale_guard: int = DEFAULT_SCALE_GUARD) -> Solution:
    """Solve a desk-scale model exactly, returning primal and dual values.

    Deterministic: identical models produce identical solutions.  Raises
    ModelTooLargeError beyond ``scale_guard`` nonzeros; such models should
    be exported in text form for an external solver instead.
    """
    nnz = model.nnz
    if nnz > scale_guard:
        raise ModelTooLargeError(
            f"{nnz} nonzeros exceed the desk guard of {scale_guard}; "
            "export the model for an external solver")
    approx_cells = (model.n_rows + model.n_cols) * (model.n_cols + model.n_rows)
    if approx_cells > DENSE_CELL_GUARD:
        raise ModelTooLargeError(
            f"dense working set of ~{approx_cells} cells exceeds "
            f"{DENSE_CELL_GUARD}; export the model for an external solver")

    c, lb, ub, rows = _model_arrays(model)
    res = simplex_solve(c, lb, ub, rows, tol=tol)

    if res.status == "infeasible":
        cert = _name_certificate(model, res.certificate)
        return Solution(status="infeasible", certificate=cert,
                        iterations=res.iterations)
    if res.status == "unbounded":
        return Solution(status="unbounded", iterations=res.iterations)

    _self_check(model, res, tol)

    primal = {col.name: float(v) for col, v in zip(model.columns, res.x)}
    dual = {}
    for row, ym in zip(model.rows, res.y_marginal):
        dual[row.name] = float(-ym) if row.sense == "L" else float(ym)
    rc = {col.name: float(v) for col, v in zip(model.columns, res.reduced_costs)}
    return Solution(status="optimal", objective=float(res.objective),
                    primal=primal, dual=dual, reduced_costs=rc,
                    dual_objective=float(res.dual_objective),
                    iterations=res.iterations)


def _name_certificate(model: LPModel, cert: Optional[dict]) -> Optional[dict]:
    if cert is None:
        return None
    out = dict(cert)
    if "rows" in out:
        out["rows"] = {model.rows[i].name: w for i, w in out["rows"].items()}
    if "bounds" in out:
        out["bounds"] = {model.columns[j].name: w
                         for j, w in out["bounds"].items()}
    if "column" in out:
        out["column"] = model.columns[out["column"]].name
    return out


def _self_check(model: LPModel, res: SimplexResult, tol: float) -> None:
    """Optimality must come with feasibility, strong duality, and
    complementary slackness; anything else is a solver defect."""
    viol = check_feasibility(model, res.x, tol=tol * 10)
    if viol:
        raise SolverError(f"claimed optimum violates {len(viol)} rows; "
                          f"first: {viol[0]}")
    gap = abs(res.objective - res.dual_objective)
    if gap > tol * (1.0 + abs(res.objective)):
        raise SolverError(f"duality gap {gap:g} exceeds tolerance")


def activity_vector(model: LPModel, x: np.ndarray) -> np.ndarray:
    act = np.zeros(model.n_rows)
    for i, row in enumerate(model.rows):
        s = 0.0
        for j, v in row.coeffs.items():
            s += v * x[j]
        act[i] = s
    return act


def _point_to_array(model: LPModel, point) -> np.ndarray:
    if isinstance(point, Mapping):
        missing = [c.name for c in model.columns if c.name not in point]
        if missing:
            raise KeyError(f"point missing columns: {missing[:5]}")
        return np.array([float(point[c.name]) for c in model.columns])
    arr = np.asarray(point, dtype=float)
    if arr.shape != (model.n_cols,):
        raise ValueError(f"point must assign all {model.n_cols} columns")
    return arr


def check_feasibility(model: LPModel, point, tol: float = DEFAULT_TOL
                      ) -> list[RowViolation]:
    """List every row the point violates beyond ``tol``; empty means feasible."""
    x = _point_to_array(model, point)
    act = activity_vector(model, x)
    out = []
    for i, row in enumerate(model.rows):
        a = float(act[i])
        if row.sense == "L":
            amount = a - row.rhs
        elif row.sense == "G":
            amount = row.rhs - a
        else:
            amount = abs(a - row.rhs)
        if amount > tol:
            out.append(RowViolation(row.name, row.sense, a, row.rhs,
                                    float(amount)))
    return out


def read_external_solution(model: LPModel, stream) -> Solution:
    """Read `name value` pairs from an external solver run.

    Column names feed the primal point, row names the duals (already in the
    reporting convention).  Lines starting with '#' are comments.  The
    objective is recomputed from the model so the pair list stays minimal.
    """
    primal = {c.name: 0.0 for c in model.columns}
    dual = {r.name: 0.0 for r in model.rows}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected `name value`")
        name, sval = parts
        try:
            val = float(sval)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value {sval!r}") from exc
        if name in primal:
            primal[name] = val
        elif name in dual:
            dual[name] = val
        else:
            raise ValueError(f"line {lineno}: unknown name {name!r}")
    x = np.array([primal[c.name] for c in model.columns])
    obj = float(np.dot([c.obj for c in model.columns], x))
    return Solution(status="optimal", objective=obj, primal=primal, dual=dual)
