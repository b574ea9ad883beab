import numpy as np
import pytest

from quasifront.errors import InfeasibleSet
from quasifront.model import FeasibleSet, LinearIneq, canonical_infeasible, load_problem, sublevel
from quasifront.oracle import check_feasible, minimize_linear

from conftest import polytope_vertices


def box_set(lo, hi):
    n = len(lo)
    return FeasibleSet(n, np.zeros((0, n)), np.zeros(0), (),
                       np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))


def test_feasible_polytope(linear_fractional_problem):
    out = check_feasible(linear_fractional_problem.feasible)
    assert out.feasible
    assert out.violation <= 1e-7
    assert linear_fractional_problem.feasible.violation(out.x) <= 1e-7


def test_infeasible_linear_with_best_violation():
    S = box_set([0.0, 0.0], [1.0, 1.0])
    con = LinearIneq(np.array([1.0, 1.0]), 1.0)  # x1 + x2 <= -1
    out = check_feasible(S, [con])
    assert not out.feasible
    assert out.violation >= 1.0 - 1e-9


def test_infeasible_ball_region(convex_quadratic_problem):
    ball = convex_quadratic_problem.feasible
    S = FeasibleSet(3, ball.A, ball.r, ball.quads,
                    np.array([9.0, 9.0, 9.0]), ball.hi)
    out = check_feasible(S)
    assert not out.feasible
    assert out.violation >= 143.0 - 1e-6 - 1e-3  # 3*81 - 100 at the corner


def test_canonical_infeasible_constraint():
    S = box_set([0.0, 0.0], [1.0, 1.0])
    out = check_feasible(S, [canonical_infeasible(2)])
    assert not out.feasible
    assert out.violation >= 1.0 - 1e-9


def test_feasible_with_quadratic_sublevel(convex_fractional_problem):
    prob = convex_fractional_problem
    con = sublevel(prob.objectives[1], 6.0)
    out = check_feasible(prob.feasible, [con])
    assert out.feasible
    assert prob.objectives[1].evaluate(out.x) <= 6.0 + 1e-5


def test_monotonicity_adding_constraints(linear_fractional_problem):
    # Once infeasible, adding constraints cannot make it feasible.
    S = linear_fractional_problem.feasible
    tight = LinearIneq(np.array([0.0, 1.0]), 10.0)  # x2 <= -10, impossible
    base = check_feasible(S, [tight])
    assert not base.feasible
    more = check_feasible(S, [tight, LinearIneq(np.array([1.0, 0.0]), -5.0)])
    assert not more.feasible


def test_minimize_linear_vertex_oracle(linear_fractional_problem):
    # Independent oracle: enumerate polytope vertices and take the best.
    S = linear_fractional_problem.feasible
    verts = polytope_vertices(S.A, S.r, S.lo, S.hi)
    assert len(verts) >= 4
    for c in ([1.0, 1.0], [-1.0, -1.0], [1.0, 0.0], [0.3, -2.0]):
        c = np.array(c)
        x, val = minimize_linear(c, S)
        expected = min(verts @ c)
        assert val == pytest.approx(expected, abs=1e-6)
        assert S.violation(x) <= 1e-7


def test_maximal_coordinate_sum(linear_fractional_problem):
    # max <e, x> over the bundled polytope is 13 at (6, 7); confirmed by the
    # vertex-enumeration oracle above.
    S = linear_fractional_problem.feasible
    x, val = minimize_linear(np.array([-1.0, -1.0]), S)
    assert -val == pytest.approx(13.0, abs=1e-7)
    np.testing.assert_allclose(x, [6.0, 7.0], atol=1e-6)


def test_minimize_linear_unit_square():
    S = box_set([0.0, 0.0], [1.0, 1.0])
    x, val = minimize_linear(np.array([1.0, 0.0]), S)
    assert val == pytest.approx(0.0, abs=1e-9)


def test_minimize_linear_lower_bound_row(convex_fractional_problem):
    _, val = minimize_linear(np.array([0.0, 1.0]), convex_fractional_problem.feasible)
    assert val == pytest.approx(1.0, abs=1e-7)


def test_minimize_linear_on_ball(convex_quadratic_problem):
    # min -(x1+x2+x3) over ball(10) cap [0,10]^3 -> -10*sqrt(3).
    S = convex_quadratic_problem.feasible
    x, val = minimize_linear(-np.ones(3), S)
    assert -val == pytest.approx(10.0 * np.sqrt(3.0), abs=1e-5)


def test_minimize_linear_infeasible():
    S = FeasibleSet(2, np.array([[1.0, 1.0]]), np.array([-1.0]), (),
                    np.zeros(2), np.ones(2))
    with pytest.raises(InfeasibleSet):
        minimize_linear(np.array([1.0, 0.0]), S)


def test_determinism(convex_fractional_problem):
    prob = convex_fractional_problem
    con = sublevel(prob.objectives[0], 0.4)
    a = check_feasible(prob.feasible, [con], seed=7)
    b = check_feasible(prob.feasible, [con], seed=7)
    assert a.feasible == b.feasible
    assert a.violation == b.violation
    if a.feasible:
        np.testing.assert_array_equal(a.x, b.x)


def test_feasible_points_pass_constraint_check(identity_problem, convex_quadratic_problem):
    for prob in (identity_problem, convex_quadratic_problem):
        out = check_feasible(prob.feasible)
        assert out.feasible
        assert prob.feasible.violation(out.x) <= 1e-7
