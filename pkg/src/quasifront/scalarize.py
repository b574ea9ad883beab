"""Weighted Chebyshev scalarization solved by bisection over convex
feasibility.

For a reference point v and a strictly positive direction d, the scalar
problem minimizes max_j (f_j(x) - v_j) / d_j over the feasible set. Its
optimal value t locates the boundary of the attainable region along the ray
v + t*d, and the minimizer is a weakly efficient solution. Because every
trial value of t turns into the convex system {x in S, f_j(x) <= v_j + t*d_j},
the whole solve is a bisection whose per-step cost is one feasibility check,
with a clean tolerance contract: the returned t is within tol_scalar of the
true optimum and the witness attains it within the same tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BracketInversion, InfeasiblePoint, QvpError
from .model import QvpProblem, sublevel
from .oracle import DEFAULT_BUDGET, DEFAULT_TOL_FEAS, check_feasible

DEFAULT_TOL_SCALAR = 1e-6

# An infeasible trial whose best violation is this close to zero gets one
# escalated retry before the bracket moves, guarding against a missed
# feasible point near the optimum.
_RECHECK_VIOLATION = 1e-4


@dataclass(frozen=True)
class ScalarizationResult:
    """Outcome of one scalarization solve.

    x: witness attaining the optimum within tolerance.
    t: optimal value of the minimax program (bisection upper end).
    w: boundary point v + t*d.
    bracket_width: final bisection bracket.
    trials: number of bisection steps performed.
    """

    x: np.ndarray
    t: float
    w: np.ndarray
    bracket_width: float
    trials: int


def _implied_t(problem: QvpProblem, x, v, d) -> float:
    return float(((problem.evaluate(x) - v) / d).max())


def solve_chebyshev(
    problem: QvpProblem,
    v,
    d_hat,
    *,
    tol_scalar: float = DEFAULT_TOL_SCALAR,
    m=None,
    tol_feas: float = DEFAULT_TOL_FEAS,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    x_init=None,
) -> ScalarizationResult:
    """Solve the Chebyshev scalarization at reference point v.

    Args:
        problem: validated problem instance.
        v: reference point in outcome space.
        d_hat: strictly positive direction.
        m: lower corner of the outcome box; gives the initial lower bracket
            max_j (m_j - v_j) / d_j. When omitted, a downward probing pass
            establishes the bracket instead.
        x_init: optional feasible point used alongside the stored one to
            seed the upper bracket.
    Raises BracketInversion when the supplied m puts the lower bracket above
    the feasible upper bracket, which signals a corrupted box.
    """
    v = np.asarray(v, dtype=float)
    d = np.asarray(d_hat, dtype=float)
    if np.any(d <= 0.0):
        raise QvpError("direction must be strictly positive")

    witness = np.asarray(problem.feasible_point, dtype=float)
    t_hi = _implied_t(problem, witness, v, d)
    if x_init is not None:
        x_init = np.asarray(x_init, dtype=float)
        t_alt = _implied_t(problem, x_init, v, d)
        if t_alt < t_hi:
            witness, t_hi = x_init, t_alt

    def trial(t, *, escalate=False):
        extras = [sublevel(f, v[j] + t * d[j]) for j, f in enumerate(problem.objectives)]
        return check_feasible(
            problem.feasible,
            extras,
            tol_feas=tol_feas,
            budget=budget * 4 if escalate else budget,
            start=witness,
            extra_starts=3 if escalate else 0,
            seed=seed,
        )

    if m is not None:
        m = np.asarray(m, dtype=float)
        t_lo = float(((m - v) / d).max())
        if t_hi < t_lo - max(tol_scalar, 1e-12):
            raise BracketInversion(
                f"upper bracket {t_hi:.6g} below lower bracket {t_lo:.6g}"
            )
        t_lo = min(t_lo, t_hi)
    else:
        # No box knowledge: probe downward geometrically until infeasible.
        step = max(1.0, 0.1 * abs(t_hi))
        t_lo = None
        while t_lo is None:
            probe = t_hi - step
            out = trial(probe)
            if out.feasible:
                witness = out.x
                t_hi = min(probe, _implied_t(problem, witness, v, d))
            else:
                t_lo = probe
            step *= 4.0
            if step > 1e15:
                raise QvpError("failed to bracket the scalarization optimum")

    trials = 0
    rechecked = False
    while t_hi - t_lo > tol_scalar:
        t_mid = 0.5 * (t_lo + t_hi)
        out = trial(t_mid)
        if not out.feasible and not rechecked and out.violation <= _RECHECK_VIOLATION:
            rechecked = True
            out = trial(t_mid, escalate=True)
        trials += 1
        if out.feasible:
            witness = out.x
            # The witness proves feasibility of its own implied level, which
            # can sit well below the trial level; jump the bracket there.
            try:
                implied = _implied_t(problem, witness, v, d)
            except QvpError:
                implied = t_mid  # witness on a denominator boundary
            t_hi = max(t_lo, min(t_mid, implied))
        else:
            t_lo = t_mid

    # Confirm the reported pair by direct evaluation.
    final_extras = [sublevel(f, v[j] + t_hi * d[j]) for j, f in enumerate(problem.objectives)]
    worst = max(c.value(witness) for c in final_extras)
    worst = max(worst, problem.feasible.violation(witness))
    if worst > max(10 * tol_feas, 1e-9 * max(1.0, abs(t_hi))):
        out = trial(t_hi, escalate=True)
        if out.feasible:
            witness = out.x
        else:
            raise QvpError("final verification of the scalarization witness failed")

    return ScalarizationResult(
        x=witness,
        t=float(t_hi),
        w=v + t_hi * d,
        bracket_width=float(t_hi - t_lo),
        trials=trials,
    )


def generate_wes(problem: QvpProblem, v, d_hat, **kwargs):
    """Weakly efficient solution and weakly nondominated point from v."""
    res = solve_chebyshev(problem, v, d_hat, **kwargs)
    return res.x, res.w


def verify_wes(
    problem: QvpProblem,
    x_star,
    d_hat,
    *,
    tol_scalar: float = DEFAULT_TOL_SCALAR,
    m=None,
    tol_feas: float = DEFAULT_TOL_FEAS,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """Whether x_star is weakly efficient: the scalarization anchored at its
    own objective vector must have optimal value zero."""
    x_star = np.asarray(x_star, dtype=float)
    viol = problem.feasible.violation(x_star)
    if viol > tol_feas:
        raise InfeasiblePoint(f"point violates the feasible set by {viol:.3e}")
    v = problem.evaluate(x_star)
    res = solve_chebyshev(
        problem, v, d_hat, tol_scalar=tol_scalar, m=m, tol_feas=tol_feas,
        budget=budget, x_init=x_star,
    )
    return abs(res.t) <= tol_scalar
