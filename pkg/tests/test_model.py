import json

import numpy as np
import pytest

from quasifront import problems
from quasifront.errors import (
    DenominatorNonPositive,
    DimensionMismatch,
    InfeasibleSet,
    NonnegativityViolated,
    ValidationError,
)
from quasifront.model import (
    evaluate,
    evaluate_constraints,
    is_canonical_infeasible,
    load_problem,
    sublevel,
)

from conftest import identity_problem_dict, sample_feasible


def test_evaluate_linear_fractional(linear_fractional_problem):
    f1 = linear_fractional_problem.objectives[0]
    assert evaluate(f1, [1.0, 1.0]) == pytest.approx(-0.5)


def test_evaluate_quadratic_at_origin(convex_quadratic_problem):
    f1 = convex_quadratic_problem.objectives[0]
    assert evaluate(f1, [0.0, 0.0, 0.0]) == pytest.approx(0.0)


def test_evaluate_convex_over_concave(convex_fractional_problem):
    f2 = convex_fractional_problem.objectives[1]
    assert evaluate(f2, [1.0, 1.0]) == pytest.approx(12.0)


def test_evaluate_denominator_guard(linear_fractional_problem):
    f1 = linear_fractional_problem.objectives[0]
    with pytest.raises(DenominatorNonPositive):
        evaluate(f1, [0.0, 0.0])
    with pytest.raises(DenominatorNonPositive):
        evaluate(f1, [1.0, -1.0])


def test_evaluate_nonnegativity_guard():
    prob = load_problem({
        "n": 1,
        "objectives": [{
            "type": "convex_over_concave",
            "num": {"c": [1.0], "d": -5.0},
            "den": {"c": [0.0], "d": 1.0},
        }],
        "constraints": {"bounds": {"lo": [0.0], "hi": [10.0]}},
    })
    with pytest.raises(NonnegativityViolated):
        evaluate(prob.objectives[0], [0.0])
    assert evaluate(prob.objectives[0], [6.0]) == pytest.approx(1.0)


def test_evaluate_dimension_mismatch(linear_fractional_problem):
    with pytest.raises(DimensionMismatch):
        linear_fractional_problem.evaluate([1.0, 2.0, 3.0])


def test_sublevel_linear_fractional_cross_multiplication(linear_fractional_problem):
    f1 = linear_fractional_problem.objectives[0]
    c = sublevel(f1, -0.3596)
    np.testing.assert_allclose(c.a, [-1.0 + 0.3596, 0.3596])
    assert c.b == pytest.approx(0.0)


def test_sublevel_sign_agreement(linear_fractional_problem, convex_fractional_problem):
    # The constraint value and f(x) - level must agree in sign on samples.
    for prob in (linear_fractional_problem, convex_fractional_problem):
        pts = sample_feasible(prob, 1000, seed=3)
        for f in prob.objectives:
            vals = np.array([evaluate(f, x) for x in pts])
            for level in np.quantile(vals, [0.2, 0.5, 0.9]):
                con = sublevel(f, level)
                scale = max(1.0, abs(level))
                for x, fv in zip(pts, vals):
                    cv = con.value(x)
                    if fv < level - 1e-9 * scale:
                        assert cv <= 1e-9 * scale
                    elif fv > level + 1e-9 * scale:
                        assert cv >= -1e-9 * scale


def test_sublevel_quadratic_is_constant_shift(convex_quadratic_problem):
    f = convex_quadratic_problem.objectives[0]
    con = sublevel(f, 7.5)
    x = np.array([1.0, 2.0, 3.0])
    assert con.value(x) == pytest.approx(evaluate(f, x) - 7.5)


def test_sublevel_negative_level_is_infeasible(convex_fractional_problem):
    f1 = convex_fractional_problem.objectives[0]
    assert is_canonical_infeasible(sublevel(f1, -1.0))
    assert not is_canonical_infeasible(sublevel(f1, 0.5))


def test_sublevel_nesting(convex_fractional_problem):
    # Lower levels give smaller feasible regions (sample-based).
    prob = convex_fractional_problem
    pts = sample_feasible(prob, 300, seed=5)
    f = prob.objectives[1]
    c_low, c_high = sublevel(f, 3.0), sublevel(f, 6.0)
    for x in pts:
        if c_low.value(x) <= 0:
            assert c_high.value(x) <= 1e-12


def test_evaluate_constraints_examples(linear_fractional_problem, convex_quadratic_problem):
    S = linear_fractional_problem.feasible
    assert evaluate_constraints(S, [2.0, 1.0]) == pytest.approx(0.0)
    # At (7, 1) the binding row is x1 - 2*x2 <= 2, violated by 3 (the x1 <= 6
    # row is violated by only 1).
    assert evaluate_constraints(S, [7.0, 1.0]) == pytest.approx(3.0)
    assert evaluate_constraints(S, [6.0, 2.5]) == pytest.approx(0.0)
    ball = convex_quadratic_problem.feasible
    assert ball.quads[0].value(np.array([10.0, 10.0, 10.0])) == pytest.approx(200.0)


def test_load_is_deterministic():
    p1 = problems.load("linear_fractional_2d")
    p2 = problems.load("linear_fractional_2d")
    for f1, f2 in zip(p1.objectives, p2.objectives):
        np.testing.assert_array_equal(f1.a, f2.a)
        np.testing.assert_array_equal(f1.b, f2.b)
    np.testing.assert_array_equal(p1.feasible.A, p2.feasible.A)
    np.testing.assert_array_equal(p1.feasible_point, p2.feasible_point)


def test_symmetrization_on_load():
    prob = load_problem({
        "n": 2,
        "objectives": [{"type": "quadratic", "Q": [[1.0, 0.4], [0.0, 1.0]], "c": [0.0, 0.0], "d": 0.0}],
        "constraints": {"bounds": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]}},
    })
    Q = prob.objectives[0].form.Q
    np.testing.assert_allclose(Q, Q.T)
    np.testing.assert_allclose(Q[0, 1], 0.2)


def test_curvature_validation():
    bad = {
        "n": 2,
        "objectives": [{"type": "quadratic", "Q": [[-1.0, 0.0], [0.0, 1.0]], "c": [0.0, 0.0], "d": 0.0}],
        "constraints": {"bounds": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]}},
    }
    with pytest.raises(ValidationError):
        load_problem(bad)


def test_unbounded_rejected():
    with pytest.raises(ValidationError):
        load_problem({
            "n": 2,
            "objectives": [{"type": "quadratic", "c": [1.0, 0.0], "d": 0.0}],
            "constraints": {"linear": {"A": [[1.0, 0.0]], "r": [1.0]}},
        })


def test_ball_counts_as_bounded():
    prob = load_problem({
        "n": 2,
        "objectives": [{"type": "quadratic", "c": [1.0, 0.0], "d": 0.0}],
        "constraints": {"quadratic": [{"Q": [[1.0, 0.0], [0.0, 1.0]], "c": [0.0, 0.0], "d": -4.0}]},
    })
    assert prob.feasible.is_structurally_bounded()


def test_infeasible_rejected():
    data = identity_problem_dict()
    data["constraints"]["linear"] = {"A": [[1.0, 1.0]], "r": [-1.0]}
    with pytest.raises(InfeasibleSet):
        load_problem(data)


def test_load_from_path(tmp_path):
    src = identity_problem_dict()
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(src))
    prob = load_problem(path)
    assert prob.n == 2 and prob.p == 2


def test_feasible_point_is_feasible(linear_fractional_problem, convex_fractional_problem,
                                    convex_quadratic_problem):
    for prob in (linear_fractional_problem, convex_fractional_problem, convex_quadratic_problem):
        assert prob.feasible.violation(prob.feasible_point) <= 1e-7
