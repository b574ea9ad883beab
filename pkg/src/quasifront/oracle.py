"""Convex feasibility checks and linear minimization over the model's
constraint classes.

This is the single numerical workhorse behind everything else. A feasibility
query minimizes the worst constraint violation Phi(x) = max_i g_i(x) over the
variable box: purely linear systems go through an exact phase-one LP
(scipy.optimize.linprog, HiGHS), systems containing quadratic pieces through
an SLSQP epigraph solve (min s subject to g_i(x) <= s). A point is accepted
as feasible when Phi <= tol_feas; infeasibility is budgeted rather than
certified, i.e. it means no point with Phi <= tol_feas was found within the
iteration budget, and the best Phi seen is reported.

All entry points are deterministic: starts are derived from the inputs, and
the optional randomized extra starts are driven by an explicit seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import DimensionMismatch, InfeasibleSet, QvpError
from .model import FeasibleSet, LinearIneq, QuadIneq, SublevelConstraint

DEFAULT_TOL_FEAS = 1e-7
DEFAULT_BUDGET = 50_000

# Iterates beyond this norm indicate a structurally unbounded problem that
# slipped past load-time validation.
NORM_CAP = 1e12


@dataclass(frozen=True)
class FeasibilityOutcome:
    """Result of a feasibility query.

    feasible: whether a point with violation <= tol_feas was found.
    x: the witness (feasible case) or None.
    violation: achieved violation of the witness, or the best violation
        found within the budget when infeasible.
    """

    feasible: bool
    x: np.ndarray | None
    violation: float


def _split_extras(extras: Sequence[SublevelConstraint], n: int):
    rows_a, rows_b, quads = [], [], []
    for c in extras:
        if isinstance(c, LinearIneq):
            if c.a.shape[0] != n:
                raise DimensionMismatch(f"extra constraint dimension {c.a.shape[0]} != {n}")
            rows_a.append(c.a)
            rows_b.append(c.b)
        elif isinstance(c, QuadIneq):
            if c.form.c.shape[0] != n:
                raise DimensionMismatch(f"extra constraint dimension {c.form.c.shape[0]} != {n}")
            quads.append(c.form)
        else:
            raise QvpError(f"unsupported constraint type {type(c).__name__}")
    A = np.vstack(rows_a) if rows_a else np.zeros((0, n))
    b = np.asarray(rows_b, dtype=float)
    return A, b, quads


def _phi(S: FeasibleSet, extras: Sequence[SublevelConstraint], x: np.ndarray) -> float:
    """Worst violation of S plus the extra constraints at x (floored at 0)."""
    worst = S.violation(x)
    for c in extras:
        worst = max(worst, c.value(x))
    return max(0.0, worst)


def _box_center(S: FeasibleSet) -> np.ndarray:
    lo = np.where(np.isfinite(S.lo), S.lo, -1.0)
    hi = np.where(np.isfinite(S.hi), S.hi, 1.0)
    return 0.5 * (lo + hi)


def _clip_to_box(S: FeasibleSet, x: np.ndarray) -> np.ndarray:
    return np.clip(x, S.lo, S.hi)


def _starts(S, start, extra_starts, seed):
    pts = []
    if start is not None:
        pts.append(_clip_to_box(S, np.asarray(start, dtype=float)))
    pts.append(_box_center(S))
    if extra_starts > 0:
        rng = np.random.default_rng(seed)
        lo = np.where(np.isfinite(S.lo), S.lo, -10.0)
        hi = np.where(np.isfinite(S.hi), S.hi, 10.0)
        for _ in range(extra_starts):
            pts.append(lo + rng.random(S.n) * (hi - lo))
    return pts


def _lp_phase_one(S: FeasibleSet, extras, A: np.ndarray, b: np.ndarray, tol_feas: float):
    """Exact phase-one LP: minimize s subject to rows <= s inside the box."""
    n = S.n
    rows = np.vstack([S.A, A]) if A.size else S.A
    rhs = np.concatenate([S.r, -b]) if b.size else S.r
    if rows.shape[0] == 0:
        # Only the box: feasible iff consistent, witness its center.
        if np.any(S.lo > S.hi):
            gap = float((S.lo - S.hi).max())
            return FeasibilityOutcome(False, None, gap)
        x = _box_center(S)
        return FeasibilityOutcome(True, x, 0.0)
    A_ub = np.hstack([rows, -np.ones((rows.shape[0], 1))])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    # s is bounded below only to keep the LP bounded when the box is open.
    bounds = [(float(S.lo[j]) if np.isfinite(S.lo[j]) else None,
               float(S.hi[j]) if np.isfinite(S.hi[j]) else None) for j in range(n)] + [(-1e9, None)]
    res = linprog(c, A_ub=A_ub, b_ub=rhs, bounds=bounds, method="highs")
    if res.status != 0 or res.x is None:
        # Box inconsistent or numerically deficient; report the best we can say.
        x = _box_center(S)
        return FeasibilityOutcome(False, None, _phi(S, extras, x) + 1.0)
    x = _clip_to_box(S, res.x[:n])
    viol = max(0.0, float(res.x[-1]))
    return FeasibilityOutcome(viol <= tol_feas, x if viol <= tol_feas else None, viol)


def _slsqp_phase_one(S, extras, quads_extra, A_extra, b_extra, x0, maxiter):
    """Epigraph solve min s s.t. g_i(x) <= s; returns (x, phi)."""
    n = S.n
    cons = []
    all_rows = np.vstack([S.A, A_extra]) if A_extra.size else S.A
    all_rhs = np.concatenate([S.r, -b_extra]) if b_extra.size else S.r
    if all_rows.shape[0]:
        jac_lin = np.hstack([all_rows, -np.ones((all_rows.shape[0], 1))])

        def lin_fun(z, rows=all_rows, rhs=all_rhs):
            return z[-1] - (rows @ z[:-1] - rhs)

        cons.append({"type": "ineq", "fun": lin_fun, "jac": lambda z, J=jac_lin: -J})
    for q in list(S.quads) + quads_extra:
        def q_fun(z, q=q):
            return np.array([z[-1] - q.value(z[:-1])])

        def q_jac(z, q=q):
            g = np.empty((1, n + 1))
            g[0, :n] = -q.gradient(z[:-1])
            g[0, n] = 1.0
            return g

        cons.append({"type": "ineq", "fun": q_fun, "jac": q_jac})

    bounds = [(float(S.lo[j]) if np.isfinite(S.lo[j]) else None,
               float(S.hi[j]) if np.isfinite(S.hi[j]) else None) for j in range(n)] + [(None, None)]
    s0 = _phi(S, extras, x0)
    z0 = np.concatenate([x0, [s0 + 1.0]])
    grad = np.zeros(n + 1)
    grad[-1] = 1.0
    res = minimize(
        lambda z: z[-1],
        z0,
        jac=lambda z: grad,
        method="SLSQP",
        bounds=bounds,
        constraints=cons,
        options={"maxiter": maxiter, "ftol": 1e-12},
    )
    x = _clip_to_box(S, res.x[:n])
    return x, _phi(S, extras, x)


def check_feasible(
    S: FeasibleSet,
    extras: Sequence[SublevelConstraint] = (),
    *,
    tol_feas: float = DEFAULT_TOL_FEAS,
    budget: int = DEFAULT_BUDGET,
    start=None,
    extra_starts: int = 0,
    seed: int = 0,
) -> FeasibilityOutcome:
    """Decide feasibility of S together with extra sublevel constraints.

    Returns a Feasible outcome with the first point found whose worst
    violation is at most tol_feas, else an Infeasible outcome carrying the
    best violation achieved within the budget. `start` seeds the first
    solver start; `extra_starts` adds seeded random starts for escalated
    retries.
    """
    if budget < 1:
        raise QvpError("budget must be >= 1")
    A, b, quads_extra = _split_extras(extras, S.n)

    starts = _starts(S, start, extra_starts, seed)
    # A start may already be admissible; no solver call needed then.
    for x in starts:
        v = _phi(S, extras, x)
        if v <= tol_feas:
            return FeasibilityOutcome(True, x, v)

    if S.linear_only and not quads_extra:
        return _lp_phase_one(S, extras, A, b, tol_feas)

    maxiter = int(np.clip(budget // 250, 50, 1000))
    best_x, best_v = None, np.inf
    for x0 in starts:
        x, v = _slsqp_phase_one(S, extras, quads_extra, A, b, x0, maxiter)
        if np.linalg.norm(x) > NORM_CAP:
            raise QvpError("iterate norm exceeded cap; feasible set looks unbounded")
        if v < best_v:
            best_x, best_v = x, v
        if v <= tol_feas:
            return FeasibilityOutcome(True, x, v)
    return FeasibilityOutcome(False, None, float(best_v))


def minimize_linear(
    c,
    S: FeasibleSet,
    *,
    tol: float = 1e-8,
    tol_feas: float = DEFAULT_TOL_FEAS,
) -> tuple[np.ndarray, float]:
    """Minimize c'x over S; returns (x*, value).

    The feasible set must be nonempty and bounded (the latter is enforced
    structurally at load time). Purely linear sets are solved exactly by
    HiGHS; sets with quadratic constraints by SLSQP from a feasibility
    witness.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (S.n,):
        raise DimensionMismatch(f"objective has shape {c.shape}, expected ({S.n},)")

    if S.linear_only:
        bounds = [(float(S.lo[j]) if np.isfinite(S.lo[j]) else None,
                   float(S.hi[j]) if np.isfinite(S.hi[j]) else None) for j in range(S.n)]
        res = linprog(c, A_ub=S.A if S.A.size else None, b_ub=S.r if S.r.size else None,
                      bounds=bounds, method="highs")
        if res.status == 2:
            raise InfeasibleSet("linear minimization over an empty feasible set")
        if res.status != 0 or res.x is None:
            raise QvpError(f"linear program failed with status {res.status}")
        x = _clip_to_box(S, res.x)
        if np.linalg.norm(x) > NORM_CAP:
            raise QvpError("minimizer norm exceeded cap; feasible set looks unbounded")
        return x, float(c @ x)

    witness = check_feasible(S, tol_feas=tol_feas)
    if not witness.feasible:
        raise InfeasibleSet("linear minimization over an empty feasible set")
    cons = []
    if S.A.shape[0]:
        cons.append({
            "type": "ineq",
            "fun": lambda x: S.r - S.A @ x,
            "jac": lambda x: -S.A,
        })
    for q in S.quads:
        cons.append({
            "type": "ineq",
            "fun": lambda x, q=q: np.array([-q.value(x)]),
            "jac": lambda x, q=q: -q.gradient(x)[None, :],
        })
    bounds = [(float(S.lo[j]) if np.isfinite(S.lo[j]) else None,
               float(S.hi[j]) if np.isfinite(S.hi[j]) else None) for j in range(S.n)]
    best = None
    for x0 in (witness.x, _box_center(S)):
        res = minimize(
            lambda x: float(c @ x),
            x0,
            jac=lambda x: c,
            method="SLSQP",
            bounds=bounds,
            constraints=cons,
            options={"maxiter": 400, "ftol": min(tol, 1e-10)},
        )
        x = _clip_to_box(S, res.x)
        if S.violation(x) <= 10 * tol_feas:
            val = float(c @ x)
            if best is None or val < best[1]:
                best = (x, val)
    if best is None:
        raise QvpError("linear minimization failed to produce a feasible point")
    if np.linalg.norm(best[0]) > NORM_CAP:
        raise QvpError("minimizer norm exceeded cap; feasible set looks unbounded")
    return best
