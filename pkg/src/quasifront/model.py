"""Problem data model: objective classes, convex feasible sets, and the
transformation of quasiconvex objectives into convex sublevel constraints.

Supported objective classes are the ratio of two affine functions, the ratio
of a nonnegative convex quadratic over a positive concave quadratic (or
affine) denominator, and plain convex quadratics. Each class knows how to
turn ``f(x) <= level`` into a closed-form convex constraint, which is what
makes every downstream subproblem a structurally convex feasibility check.

All model objects are immutable after construction and safe to share between
concurrent workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import (
    DenominatorNonPositive,
    DimensionMismatch,
    InfeasibleSet,
    NonnegativityViolated,
    ValidationError,
)

# Minimum admissible denominator value for fractional objectives.
TAU_DEN = 1e-8
# Eigenvalue tolerance when validating curvature signs of quadratic forms.
EIG_TOL = 1e-8


def _vector(x, n=None, name="x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"{name} has dimension {arr.shape[0]}, expected {n}")
    return arr


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Quadratic:
    """The form x'Qx + c'x + d with symmetric Q; Q == 0 makes it affine."""

    Q: np.ndarray
    c: np.ndarray
    d: float

    def value(self, x) -> float:
        return float(x @ self.Q @ x + self.c @ x + self.d)

    def gradient(self, x) -> np.ndarray:
        return 2.0 * (self.Q @ x) + self.c

    @property
    def is_affine(self) -> bool:
        return not self.Q.any()


def make_quadratic(Q, c, d, n, name="quadratic") -> Quadratic:
    """Build a Quadratic, symmetrizing Q and validating dimensions."""
    if Q is None:
        Qm = np.zeros((n, n))
    else:
        Qm = np.asarray(Q, dtype=float)
        if Qm.shape != (n, n):
            raise DimensionMismatch(f"{name}: Q has shape {Qm.shape}, expected ({n}, {n})")
        Qm = 0.5 * (Qm + Qm.T)
    cv = np.zeros(n) if c is None else _vector(c, n, f"{name}: c")
    return Quadratic(_frozen(Qm), _frozen(cv), float(d if d is not None else 0.0))


def _check_curvature(q: Quadratic, sign: str, name: str) -> None:
    """Validate that q's matrix is PSD ('convex') or NSD ('concave') up to EIG_TOL."""
    if q.is_affine:
        return
    eigs = np.linalg.eigvalsh(q.Q)
    if sign == "convex" and eigs.min() < -EIG_TOL:
        raise ValidationError(f"{name}: matrix has negative eigenvalue {eigs.min():.3e}, not convex")
    if sign == "concave" and eigs.max() > EIG_TOL:
        raise ValidationError(f"{name}: matrix has positive eigenvalue {eigs.max():.3e}, not concave")


# ---------------------------------------------------------------------------
# Constraints g(x) <= 0
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearIneq:
    """a'x + b <= 0."""

    a: np.ndarray
    b: float

    def value(self, x) -> float:
        return float(self.a @ x + self.b)

    def gradient(self, x) -> np.ndarray:
        return self.a


@dataclass(frozen=True, eq=False)
class QuadIneq:
    """form(x) <= 0 with convex form."""

    form: Quadratic

    def value(self, x) -> float:
        return self.form.value(x)

    def gradient(self, x) -> np.ndarray:
        return self.form.gradient(x)


SublevelConstraint = Union[LinearIneq, QuadIneq]


def canonical_infeasible(n: int) -> LinearIneq:
    """The constraint 0'x + 1 <= 0, satisfiable nowhere; used when a sublevel set
    is empty by sign reasoning alone."""
    return LinearIneq(_frozen(np.zeros(n)), 1.0)


def is_canonical_infeasible(c: SublevelConstraint) -> bool:
    return isinstance(c, LinearIneq) and not c.a.any() and c.b > 0.0


# ---------------------------------------------------------------------------
# Objective classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearFractional:
    """(a'x + a0) / (b'x + b0) with positive denominator on the feasible set."""

    a: np.ndarray
    a0: float
    b: np.ndarray
    b0: float

    def evaluate(self, x) -> float:
        den = float(self.b @ x + self.b0)
        if den <= TAU_DEN:
            raise DenominatorNonPositive(f"denominator {den:.3e} <= {TAU_DEN:.0e} at evaluation point")
        return float(self.a @ x + self.a0) / den

    def sublevel(self, level: float) -> LinearIneq:
        # Cross-multiplied form, equivalent to f <= level wherever den > 0.
        return LinearIneq(_frozen(self.a - level * self.b), float(self.a0 - level * self.b0))


@dataclass(frozen=True, eq=False)
class ConvexQuadratic:
    """x'Qx + c'x + d with Q positive semidefinite."""

    form: Quadratic

    def evaluate(self, x) -> float:
        return self.form.value(x)

    def sublevel(self, level: float) -> QuadIneq:
        f = self.form
        return QuadIneq(Quadratic(f.Q, f.c, f.d - level))


@dataclass(frozen=True, eq=False)
class ConvexOverConcaveFractional:
    """num(x) / den(x) with num nonnegative convex and den positive concave on
    the feasible set; num may be affine (zero matrix) and den affine likewise."""

    num: Quadratic
    den: Quadratic

    def evaluate(self, x) -> float:
        d = self.den.value(x)
        if d <= TAU_DEN:
            raise DenominatorNonPositive(f"denominator {d:.3e} <= {TAU_DEN:.0e} at evaluation point")
        nval = self.num.value(x)
        if nval < -TAU_DEN:
            raise NonnegativityViolated(f"numerator {nval:.3e} negative at evaluation point")
        return nval / d

    def sublevel(self, level: float):
        n = self.num.c.shape[0]
        if level < 0.0:
            # Nonnegative over positive can never be negative.
            return canonical_infeasible(n)
        # num - level*den is convex for level >= 0 (den concave).
        return QuadIneq(
            Quadratic(
                _frozen(self.num.Q - level * self.den.Q),
                _frozen(self.num.c - level * self.den.c),
                self.num.d - level * self.den.d,
            )
        )


ObjectiveFunction = Union[LinearFractional, ConvexQuadratic, ConvexOverConcaveFractional]


def evaluate(f: ObjectiveFunction, x) -> float:
    """Evaluate an objective at x with denominator and sign guards."""
    return f.evaluate(np.asarray(x, dtype=float))


def sublevel(f: ObjectiveFunction, level: float) -> SublevelConstraint:
    """Convex constraint whose solution set inside the feasible set equals
    {x : f(x) <= level}."""
    return f.sublevel(float(level))


# ---------------------------------------------------------------------------
# Feasible set
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """Linear inequalities Ax <= r, convex quadratic inequalities q(x) <= 0,
    and variable bounds lo <= x <= hi (entries may be infinite)."""

    n: int
    A: np.ndarray
    r: np.ndarray
    quads: tuple[Quadratic, ...]
    lo: np.ndarray
    hi: np.ndarray

    def constraint_values(self, x) -> np.ndarray:
        """All constraint function values at x (negative means satisfied);
        bounds contribute lo - x and x - hi componentwise."""
        x = _vector(x, self.n)
        parts = [self.A @ x - self.r] if self.A.size else [np.empty(0)]
        if self.quads:
            parts.append(np.array([q.value(x) for q in self.quads]))
        finite_lo = np.isfinite(self.lo)
        finite_hi = np.isfinite(self.hi)
        if finite_lo.any():
            parts.append(self.lo[finite_lo] - x[finite_lo])
        if finite_hi.any():
            parts.append(x[finite_hi] - self.hi[finite_hi])
        return np.concatenate(parts) if parts else np.empty(0)

    def violation(self, x) -> float:
        """Worst constraint violation, floored at zero."""
        vals = self.constraint_values(x)
        return float(max(0.0, vals.max())) if vals.size else 0.0

    @property
    def linear_only(self) -> bool:
        return not self.quads

    def is_structurally_bounded(self) -> bool:
        """Finite box, or at least one strictly convex quadratic constraint
        (an enclosing ellipsoid)."""
        if np.isfinite(self.lo).all() and np.isfinite(self.hi).all():
            return True
        for q in self.quads:
            if not q.is_affine and np.linalg.eigvalsh(q.Q).min() >= EIG_TOL:
                return True
        return False


def evaluate_constraints(S: FeasibleSet, x) -> float:
    """Worst violation of S at x; zero iff x is feasible (in exact arithmetic)."""
    return S.violation(x)


# ---------------------------------------------------------------------------
# Problem container and file format
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QvpProblem:
    """A validated multiobjective problem instance.

    Attributes:
        n: decision-space dimension.
        objectives: the p objective functions.
        feasible: the convex feasible set.
        box_m, box_M: optional user-supplied corners of the outcome box.
        direction: optional strictly positive scalarization direction.
        feasible_point: a point of the feasible set found at load time.
    """

    n: int
    objectives: tuple[ObjectiveFunction, ...]
    feasible: FeasibleSet
    box_m: np.ndarray | None
    box_M: np.ndarray | None
    direction: np.ndarray | None
    feasible_point: np.ndarray

    @property
    def p(self) -> int:
        return len(self.objectives)

    def evaluate(self, x) -> np.ndarray:
        """Objective vector f(x)."""
        x = _vector(x, self.n)
        return np.array([f.evaluate(x) for f in self.objectives])


def _parse_objective(entry: dict, n: int, idx: int) -> ObjectiveFunction:
    kind = entry.get("type")
    name = f"objective[{idx}]"
    if kind == "linear_fractional":
        num, den = entry["num"], entry["den"]
        return LinearFractional(
            _frozen(_vector(num["a"], n, f"{name}: a")),
            float(num.get("a0", 0.0)),
            _frozen(_vector(den["b"], n, f"{name}: b")),
            float(den.get("b0", 0.0)),
        )
    if kind == "quadratic":
        q = make_quadratic(entry.get("Q"), entry.get("c"), entry.get("d"), n, name)
        _check_curvature(q, "convex", name)
        return ConvexQuadratic(q)
    if kind == "convex_over_concave":
        num = entry["num"]
        den = entry["den"]
        qn = make_quadratic(num.get("Q"), num.get("c"), num.get("d"), n, f"{name}: num")
        qd = make_quadratic(den.get("Q"), den.get("c"), den.get("d"), n, f"{name}: den")
        _check_curvature(qn, "convex", f"{name}: num")
        _check_curvature(qd, "concave", f"{name}: den")
        return ConvexOverConcaveFractional(qn, qd)
    raise ValidationError(f"{name}: unknown objective type {kind!r}")


def _parse_feasible(entry: dict, n: int) -> FeasibleSet:
    linear = entry.get("linear")
    if linear:
        A = np.asarray(linear["A"], dtype=float)
        if A.ndim != 2 or A.shape[1] != n:
            raise DimensionMismatch(f"constraint matrix has shape {A.shape}, expected (*, {n})")
        r = _vector(linear["r"], A.shape[0], "constraints: r")
    else:
        A = np.zeros((0, n))
        r = np.zeros(0)
    quads = []
    for i, q in enumerate(entry.get("quadratic", ())):
        quad = make_quadratic(q.get("Q"), q.get("c"), q.get("d"), n, f"constraint quadratic[{i}]")
        _check_curvature(quad, "convex", f"constraint quadratic[{i}]")
        quads.append(quad)
    bounds = entry.get("bounds", {})
    lo = bounds.get("lo")
    hi = bounds.get("hi")
    lo = np.full(n, -np.inf) if lo is None else _vector(lo, n, "bounds: lo")
    hi = np.full(n, np.inf) if hi is None else _vector(hi, n, "bounds: hi")
    if np.any(lo > hi):
        raise ValidationError("bounds: lo exceeds hi in some coordinate")
    return FeasibleSet(n, _frozen(A), _frozen(r), tuple(quads), _frozen(lo), _frozen(hi))


def problem_from_dict(data: dict, *, tol_feas: float = 1e-7, budget: int = 50_000) -> QvpProblem:
    """Build and validate a problem from its dictionary form.

    Validation covers shapes, quadratic curvature signs, structural
    boundedness of the feasible set, and nonemptiness (a feasibility solve
    whose witness is kept on the problem). Raises ValidationError,
    DimensionMismatch, or InfeasibleSet accordingly.
    """
    try:
        n = int(data["n"])
    except KeyError as exc:
        raise ValidationError("problem file lacks field 'n'") from exc
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    objs = data.get("objectives") or ()
    if len(objs) < 1:
        raise ValidationError("problem needs at least one objective")
    objectives = tuple(_parse_objective(o, n, i) for i, o in enumerate(objs))
    feasible = _parse_feasible(data.get("constraints", {}), n)
    if not feasible.is_structurally_bounded():
        raise ValidationError(
            "feasible set is not structurally bounded: supply finite bounds "
            "or an enclosing ball constraint"
        )

    box = data.get("box", {})
    box_m = box.get("m")
    box_M = box.get("M")
    p = len(objectives)
    box_m = None if box_m is None else _frozen(_vector(box_m, p, "box: m"))
    box_M = None if box_M is None else _frozen(_vector(box_M, p, "box: M"))
    if box_m is not None and box_M is not None and not np.all(box_m < box_M):
        raise ValidationError("box: m must be strictly below M componentwise")

    direction = data.get("direction")
    if direction is not None:
        direction = _frozen(_vector(direction, p, "direction"))
        if not np.all(direction > 0.0):
            raise ValidationError("direction must be strictly positive")

    from .oracle import check_feasible  # deferred: oracle depends on this module

    outcome = check_feasible(feasible, tol_feas=tol_feas, budget=budget)
    if not outcome.feasible:
        raise InfeasibleSet(
            f"feasible set appears empty (best violation {outcome.violation:.3e})"
        )

    return QvpProblem(
        n=n,
        objectives=objectives,
        feasible=feasible,
        box_m=box_m,
        box_M=box_M,
        direction=direction,
        feasible_point=_frozen(outcome.x),
    )


def load_problem(source, *, tol_feas: float = 1e-7, budget: int = 50_000) -> QvpProblem:
    """Load a problem from a JSON file path or an already-parsed dict."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    elif isinstance(source, dict):
        data = source
    else:
        raise ValidationError(f"cannot load problem from {type(source).__name__}")
    return problem_from_dict(data, tol_feas=tol_feas, budget=budget)
