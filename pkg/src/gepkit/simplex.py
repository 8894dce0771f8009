"""Dense two-phase primal simplex with exact duals and Farkas certificates.

Pivoting uses Dantzig pricing and switches permanently to Bland's rule after
a run of degenerate pivots, which keeps the method deterministic and free of
cycling.  Intended for desk-scale programs; large models go through the text
export instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

PIVOT_TOL = 1e-9
RC_TOL = 1e-9


class SolverError(Exception):
    """Numerical failure or iteration limit inside the simplex method."""


@dataclass
class SimplexResult:
    status: str                                # optimal | infeasible | unbounded
    x: Optional[np.ndarray] = None             # per original column
    objective: Optional[float] = None
    y_marginal: Optional[np.ndarray] = None    # d(obj)/d(rhs) per original row
    reduced_costs: Optional[np.ndarray] = None
    dual_objective: Optional[float] = None
    certificate: Optional[dict] = None         # infeasibility evidence
    iterations: int = 0
    pivot_rule: str = "dantzig+bland"


def _standardize(c, lb, ub, rows):
    """Rewrite min c'x, l<=x<=u, row constraints as min ch'z, Az=b, z>=0.

    Returns the dense matrix, rhs, costs, and bookkeeping needed to map the
    solution and duals back: per-variable (mode, columns, shift), per-row
    sign flips, slack column ids, and bound-row ownership.
    """
    n = len(c)
    m = len(rows)

    var_map = []        # (mode, col ids, shift); mode: shift | flip | free
    bound_row_of = {}   # orig var j -> bound row position (before sign flips)
    n_std = 0
    for j in range(n):
        l, u = lb[j], ub[j]
        if l == -math.inf and u == math.inf:
            var_map.append(("free", (n_std, n_std + 1), 0.0))
            n_std += 2
        elif l > -math.inf:
            var_map.append(("shift", (n_std,), l))
            n_std += 1
        else:
            var_map.append(("flip", (n_std,), u))
            n_std += 1

    extra_bound_rows = [j for j in range(n)
                        if lb[j] > -math.inf and ub[j] < math.inf]
    m_all = m + len(extra_bound_rows)

    n_slack = sum(1 for sense, _, _ in rows if sense != "E") + len(extra_bound_rows)
    N = n_std + n_slack

    A = np.zeros((m_all, N))
    b = np.zeros(m_all)
    ch = np.zeros(N)

    for j in range(n):
        mode, cols, shift = var_map[j]
        if mode == "free":
            ch[cols[0]] = c[j]
            ch[cols[1]] = -c[j]
        elif mode == "shift":
            ch[cols[0]] = c[j]
        else:
            ch[cols[0]] = -c[j]

    def put(r, j, v):
        mode, cols, shift = var_map[j]
        if mode == "free":
            A[r, cols[0]] += v
            A[r, cols[1]] -= v
        elif mode == "shift":
            A[r, cols[0]] += v
            b[r] -= v * shift
        else:
            A[r, cols[0]] -= v
            b[r] -= v * shift

    slack_col = {}      # std row -> slack column id
    s = n_std
    for r, (sense, rhs, coeffs) in enumerate(rows):
        b[r] = rhs
        for j, v in coeffs.items():
            put(r, j, v)
        if sense == "L":
            A[r, s] = 1.0
            slack_col[r] = s
            s += 1
        elif sense == "G":
            A[r, s] = -1.0
            slack_col[r] = s
            s += 1

    for pos, j in enumerate(extra_bound_rows):
        r = m + pos
        width = ub[j] - lb[j]
        b[r] = width
        A[r, var_map[j][1][0]] = 1.0
        A[r, s] = 1.0
        slack_col[r] = s
        s += 1
        bound_row_of[j] = r

    row_sign = np.ones(m_all)
    neg = b < 0
    A[neg] *= -1.0
    b[neg] = -b[neg]
    row_sign[neg] = -1.0

    return A, b, ch, var_map, row_sign, slack_col, bound_row_of, m


def _run_simplex(T, basis, cost, banned, max_iter, stall_limit):
    """Tableau iterations in place; returns (status, iterations).

    status: "optimal" or "unbounded".  Entering variable by Dantzig pricing
    until ``stall_limit`` consecutive degenerate steps, then Bland's rule.
    Leaving variable always breaks ratio ties on the smallest basic index.
    """
    m, w = T.shape
    N = w - 1
    rc_tol = RC_TOL * (1.0 + float(np.abs(cost).max(initial=0.0)))
    bland = False
    stall = 0
    it = 0
    allowed = ~banned
    while True:
        if it >= max_iter:
            raise SolverError(f"iteration limit {max_iter} exceeded")
        cb = cost[basis]
        rc = cost - cb @ T[:, :N] if m else cost.copy()
        rc[~allowed] = 0.0
        neg = np.nonzero(rc < -rc_tol)[0]
        if neg.size == 0:
            return "optimal", it
        if bland:
            j = int(neg[0])
        else:
            j = int(neg[np.argmin(rc[neg])])
        col = T[:, j]
        pos = np.nonzero(col > PIVOT_TOL)[0]
        if pos.size == 0:
            return "unbounded", it
        ratios = np.maximum(T[pos, N], 0.0) / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best * (1.0 + 1e-9) + PIVOT_TOL]
        r = int(ties[np.argmin(np.asarray(basis)[ties])])
        # pivot on (r, j)
        T[r] /= T[r, j]
        other = np.arange(m) != r
        T[other] -= np.outer(T[other, j], T[r])
        basis[r] = j
        it += 1
        if best <= PIVOT_TOL:
            stall += 1
            if stall >= stall_limit and not bland:
                bland = True
        else:
            stall = 0


def simplex_solve(c, lb, ub, rows, tol: float = 1e-7,
                  max_iter: Optional[int] = None) -> SimplexResult:
    """Solve min c'x s.t. row constraints and box bounds.

    ``rows`` is a sequence of (sense, rhs, coeffs) with sense in {L, G, E}
    and coeffs a mapping from column index to value.  Returns primal and
    dual values in the marginal convention (y = d(objective)/d(rhs)).
    """
    c = np.asarray(c, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    n = c.size

    bad = np.nonzero(lb > ub)[0]
    if bad.size:
        j = int(bad[0])
        return SimplexResult(
            status="infeasible",
            certificate={"kind": "bound_contradiction", "column": j,
                         "lb": float(lb[j]), "ub": float(ub[j])})

    A, b, ch, var_map, row_sign, slack_col, bound_row_of, m_orig = \
        _standardize(c, lb, ub, rows)
    m, N = A.shape

    # Initial basis: slack where its coefficient survived sign flips as +1,
    # artificial otherwise.
    art_of_row = {}
    basis = [-1] * m
    art_cols = []
    for r in range(m):
        sc = slack_col.get(r)
        if sc is not None and A[r, sc] > 0.5:
            basis[r] = sc
        else:
            art_cols.append(r)
    if art_cols:
        A = np.hstack([A, np.zeros((m, len(art_cols)))])
        for pos, r in enumerate(art_cols):
            A[r, N + pos] = 1.0
            basis[r] = N + pos
            art_of_row[r] = N + pos
    N_all = A.shape[1]
    A_orig = A.copy()

    T = np.hstack([A, b[:, None]])
    basis = list(basis)
    if max_iter is None:
        max_iter = 20000 + 200 * (m + N_all)
    stall_limit = max(50, m)

    is_art = np.zeros(N_all, dtype=bool)
    is_art[N:] = True

    iters = 0
    if art_cols:
        c1 = np.zeros(N_all)
        c1[N:] = 1.0
        status, it1 = _run_simplex(T, basis, c1, np.zeros(N_all, dtype=bool),
                                   max_iter, stall_limit)
        iters += it1
        if status != "optimal":
            raise SolverError("phase 1 terminated without optimum")
        phase1_obj = float(c1[basis] @ T[:, N_all])
        scale = 1.0 + float(np.abs(b).max(initial=0.0))
        if phase1_obj > tol * scale:
            y1 = _basis_duals(A_orig, basis, c1)
            cert = _certificate(y1, A_orig[:, :N], b, rows, row_sign,
                                bound_row_of, m_orig, tol)
            return SimplexResult(status="infeasible", certificate=cert,
                                 iterations=iters)
        # Drive artificials out of the basis; drop rows that turn redundant.
        drop = []
        for r in range(m):
            if basis[r] >= N:
                cand = np.nonzero(np.abs(T[r, :N]) > PIVOT_TOL)[0]
                if cand.size:
                    j = int(cand[0])
                    T[r] /= T[r, j]
                    other = np.arange(m) != r
                    T[other] -= np.outer(T[other, j], T[r])
                    basis[r] = j
                else:
                    drop.append(r)
        if drop:
            keep = np.setdiff1d(np.arange(m), drop)
            T = T[keep]
            basis = [basis[r] for r in keep]
            row_of_std = {int(old): new for new, old in enumerate(keep)}
        else:
            row_of_std = {r: r for r in range(m)}
    else:
        phase1_obj = 0.0
        row_of_std = {r: r for r in range(m)}

    status, it2 = _run_simplex(T, basis, ch_full(ch, N_all), is_art,
                               max_iter, stall_limit)
    iters += it2
    if status == "unbounded":
        return SimplexResult(status="unbounded", iterations=iters)

    # Primal extraction.
    z = np.zeros(N_all)
    mrows = T.shape[0]
    for r in range(mrows):
        z[basis[r]] = max(T[r, -1], 0.0)
    x = np.empty(n)
    for j, (mode, cols, shift) in enumerate(var_map):
        if mode == "free":
            x[j] = z[cols[0]] - z[cols[1]]
        elif mode == "shift":
            x[j] = shift + z[cols[0]]
        else:
            x[j] = shift - z[cols[0]]
    objective = float(c @ x)

    # Duals from the final basis: solve B'y = c_B on the surviving rows.
    # Dropped (redundant) rows keep dual 0, which stays dual-feasible.
    c2 = ch_full(ch, N_all)
    alive = sorted(row_of_std)
    basis_alive = [basis[row_of_std[r]] for r in alive]
    B = A_orig[np.ix_(alive, basis_alive)]
    try:
        y_std_alive = np.linalg.solve(B.T, c2[basis_alive])
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular basis at optimum: {exc}") from exc
    y_std = np.zeros(m)
    y_std[alive] = y_std_alive

    rc_std = c2 - y_std @ A_orig

    # Map duals and reduced costs back to the original formulation.
    y = row_sign[:m_orig] * y_std[:m_orig]
    rc = np.empty(n)
    for j, (mode, cols, shift) in enumerate(var_map):
        if mode == "free":
            rc[j] = rc_std[cols[0]]
        elif mode == "shift":
            extra = 0.0
            if j in bound_row_of:
                r = bound_row_of[j]
                extra = row_sign[r] * y_std[r]
            rc[j] = rc_std[cols[0]] + extra
        else:
            rc[j] = -rc_std[cols[0]]

    rhs_vec = np.array([rr[1] for rr in rows]) if rows else np.zeros(0)
    dual_obj = float(y @ rhs_vec) if rows else 0.0
    lb_fin = np.where(np.isfinite(lb), lb, 0.0)
    ub_fin = np.where(np.isfinite(ub), ub, 0.0)
    dual_obj += float(np.sum(np.where(np.isfinite(lb), lb_fin * np.maximum(rc, 0.0), 0.0)))
    dual_obj += float(np.sum(np.where(np.isfinite(ub), ub_fin * np.minimum(rc, 0.0), 0.0)))

    return SimplexResult(status="optimal", x=x, objective=objective,
                         y_marginal=y, reduced_costs=rc,
                         dual_objective=dual_obj, iterations=iters)


def ch_full(ch: np.ndarray, N_all: int) -> np.ndarray:
    out = np.zeros(N_all)
    out[:ch.size] = ch
    return out


def _basis_duals(A_orig, basis, cost):
    m = A_orig.shape[0]
    B = A_orig[:, basis[:m]]
    return np.linalg.solve(B.T, cost[basis[:m]])


def _certificate(y_std, A_struct, b, rows, row_sign, bound_row_of,
                 m_orig, tol) -> dict:
    """Validate and package a Farkas certificate from the phase-1 duals.

    In the standardized space infeasibility is proven by y with A'y <= 0 and
    b'y > 0; the reported weights are translated back to the original rows
    (and box bounds) so callers can see which constraints conflict.
    """
    combo = y_std @ A_struct
    gap = float(y_std @ b)
    valid = bool(np.all(combo <= tol * 10) and gap > tol / 10)

    row_weights = {}
    for i in range(m_orig):
        w = row_sign[i] * y_std[i]
        if abs(w) > tol:
            row_weights[i] = float(w)
    bound_weights = {}
    for j, r in bound_row_of.items():
        w = row_sign[r] * y_std[r]
        if abs(w) > tol:
            bound_weights[j] = float(w)
    return {
        "kind": "farkas",
        "rows": row_weights,
        "bounds": bound_weights,
        "gap": gap,
        "validated": valid,
    }
