"""Enclosing box of the outcome set.

The lower corner is the ideal point (per-objective minima, each reduced to a
bisection over convex sublevel feasibility). The upper corner comes from a
simplex bound: the feasible set sits inside the simplex spanned by the
per-coordinate minima and the maximal coordinate sum, and a quasiconvex
function attains its maximum over a simplex at a vertex. Fractional
objectives whose denominator dies somewhere on that simplex make the bound
unavailable, in which case the problem file must carry the upper corner.
User-supplied corners always win over computed ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateIdealAttained,
    DenominatorNonPositive,
    DenominatorNonPositiveOnSimplex,
    NonnegativityViolated,
    QvpError,
    ValidationError,
)
from .model import QvpProblem, sublevel
from .oracle import DEFAULT_BUDGET, DEFAULT_TOL_FEAS, check_feasible, minimize_linear

# Absolute bisection tolerance on each ideal-point coordinate.
IDEAL_TOL = 1e-6


@dataclass(frozen=True)
class Simplex:
    """Bounding simplex: base vertex alpha0 and the coordinate-sum cap."""

    alpha0: np.ndarray
    u_cap: float
    vertices: np.ndarray  # (n+1, n); row 0 is alpha0


@dataclass(frozen=True)
class OutcomeBox:
    """Box [m, M] containing all objective vectors of feasible points."""

    m: np.ndarray
    M: np.ndarray
    m_source: str  # "computed" | "user"
    M_source: str  # "simplex" | "user"
    ideal_witnesses: tuple | None = None


def ideal_point(
    problem: QvpProblem,
    *,
    tol: float = IDEAL_TOL,
    tol_feas: float = DEFAULT_TOL_FEAS,
    budget: int = DEFAULT_BUDGET,
):
    """Per-objective minima over the feasible set, with attaining witnesses.

    Each coordinate is a quasiconvex minimization, solved by bisection on the
    level: the sublevel set {f_i <= L} is convex in closed form, so a level is
    admissible iff one convex feasibility check succeeds.
    """
    x0 = problem.feasible_point
    values = []
    witnesses = []
    for i, f in enumerate(problem.objectives):
        hi = f.evaluate(x0)
        witness = x0

        def admissible(level, witness=None):
            return check_feasible(
                problem.feasible,
                [sublevel(f, level)],
                tol_feas=tol_feas,
                budget=budget,
                start=witness,
            )

        # Bracket below by geometric probing.
        step = max(1.0, 0.1 * abs(hi))
        lo = None
        while lo is None:
            probe = hi - step
            out = admissible(probe, witness)
            if out.feasible:
                witness = out.x
                try:
                    hi = min(probe, f.evaluate(witness))
                except QvpError:
                    hi = probe
            else:
                lo = probe
            step *= 4.0
            if step > 1e15:
                raise QvpError(f"objective {i} seems unbounded below on the feasible set")

        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            out = admissible(mid, witness)
            if out.feasible:
                witness = out.x
                try:
                    hi = min(mid, f.evaluate(witness))
                except QvpError:
                    hi = mid
            else:
                lo = mid
        values.append(hi)
        witnesses.append(witness)
    return np.array(values), witnesses


def simplex_bound(problem: QvpProblem, *, tol_feas: float = DEFAULT_TOL_FEAS):
    """Bounding simplex of the feasible set and the induced upper corner.

    Raises DenominatorNonPositiveOnSimplex when some objective cannot be
    evaluated at a simplex vertex; the caller must then take the upper corner
    from the problem file.
    """
    n = problem.n
    alpha0 = np.empty(n)
    for j in range(n):
        e_j = np.zeros(n)
        e_j[j] = 1.0
        _, alpha0[j] = minimize_linear(e_j, problem.feasible, tol_feas=tol_feas)
    _, neg_u = minimize_linear(-np.ones(n), problem.feasible, tol_feas=tol_feas)
    u_cap = -neg_u

    vertices = np.tile(alpha0, (n + 1, 1))
    rest = alpha0.sum() - alpha0
    for j in range(n):
        vertices[j + 1, j] = u_cap - rest[j]

    M = np.empty(problem.p)
    for i, f in enumerate(problem.objectives):
        vals = []
        for k in range(n + 1):
            try:
                vals.append(f.evaluate(vertices[k]))
            except (DenominatorNonPositive, NonnegativityViolated) as exc:
                raise DenominatorNonPositiveOnSimplex(
                    f"objective {i} undefined at simplex vertex {k}; "
                    "supply the upper box corner in the problem file"
                ) from exc
        M[i] = max(vals)
    return Simplex(alpha0, float(u_cap), vertices), M


def make_box(
    problem: QvpProblem,
    d_hat=None,
    *,
    tol_scalar: float = 1e-6,
    tol_feas: float = DEFAULT_TOL_FEAS,
    budget: int = DEFAULT_BUDGET,
    check_degenerate: bool = True,
) -> OutcomeBox:
    """Assemble the outcome box, honoring file-supplied corners verbatim.

    When the lower corner turns out to be attainable, the nondominated set is
    that single point; this is reported through DegenerateIdealAttained so
    the caller can short-circuit the refinement loop.
    """
    witnesses = None
    if problem.box_m is not None:
        m = np.asarray(problem.box_m, dtype=float)
        m_source = "user"
    else:
        m, ws = ideal_point(problem, tol_feas=tol_feas, budget=budget)
        witnesses = tuple(ws)
        m_source = "computed"

    if problem.box_M is not None:
        M = np.asarray(problem.box_M, dtype=float)
        M_source = "user"
    else:
        _, M = simplex_bound(problem, tol_feas=tol_feas)
        M_source = "simplex"

    if not np.all(m < M):
        raise ValidationError(f"degenerate outcome box: m={m} not strictly below M={M}")

    if check_degenerate:
        from .scalarize import solve_chebyshev  # deferred to avoid an import cycle

        d = np.ones(problem.p) if d_hat is None else np.asarray(d_hat, dtype=float)
        res = solve_chebyshev(
            problem, m, d, tol_scalar=tol_scalar, m=m, tol_feas=tol_feas, budget=budget
        )
        if res.t <= tol_scalar:
            raise DegenerateIdealAttained(
                "the ideal point is itself an outcome value; the nondominated "
                "set is exactly that point",
                m=m, M=M, witness=res.x, t=res.t,
            )

    return OutcomeBox(m=m, M=M, m_source=m_source, M_source=M_source,
                      ideal_witnesses=witnesses)
