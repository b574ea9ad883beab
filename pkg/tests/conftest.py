import itertools

import numpy as np
import pytest

from quasifront import problems
from quasifront.model import load_problem


@pytest.fixture(scope="session")
def linear_fractional_problem():
    return problems.load("linear_fractional_2d")


@pytest.fixture(scope="session")
def convex_fractional_problem():
    return problems.load("convex_fractional_2d")


@pytest.fixture(scope="session")
def convex_quadratic_problem():
    return problems.load("convex_quadratic_3d")


def identity_problem_dict():
    """f(x) = x over the unit square."""
    return {
        "n": 2,
        "objectives": [
            {"type": "quadratic", "c": [1.0, 0.0], "d": 0.0},
            {"type": "quadratic", "c": [0.0, 1.0], "d": 0.0},
        ],
        "constraints": {"bounds": {"lo": [0.0, 0.0], "hi": [1.0, 1.0]}},
    }


@pytest.fixture(scope="session")
def identity_problem():
    return load_problem(identity_problem_dict())


def sample_feasible(problem, k, seed=0):
    """Draw k feasible points by rejection inside the variable box."""
    rng = np.random.default_rng(seed)
    lo = np.where(np.isfinite(problem.feasible.lo), problem.feasible.lo, -10.0)
    hi = np.where(np.isfinite(problem.feasible.hi), problem.feasible.hi, 10.0)
    out = []
    x0 = problem.feasible_point
    attempts = 0
    while len(out) < k and attempts < 400 * k:
        x = lo + rng.random(problem.n) * (hi - lo)
        attempts += 1
        if problem.feasible.violation(x) <= 1e-9:
            out.append(x)
    while len(out) < k:
        # Thin sets: shrink random box points toward the known witness.
        x = lo + rng.random(problem.n) * (hi - lo)
        lam = rng.random()
        cand = x0 + lam * (x - x0)
        for _ in range(40):
            if problem.feasible.violation(cand) <= 1e-9:
                out.append(cand)
                break
            cand = x0 + 0.5 * (cand - x0)
    return np.array(out)


def polytope_vertices(A, r, lo, hi):
    """Brute-force vertex enumeration for 2-d polytopes: intersect every pair
    of constraint lines (bounds included) and keep the feasible points."""
    rows = [(*A[i], r[i]) for i in range(A.shape[0])]
    for j, (l, h) in enumerate(zip(lo, hi)):
        e = [0.0, 0.0]
        e[j] = 1.0
        if np.isfinite(h):
            rows.append((*e, h))
        if np.isfinite(l):
            rows.append((-e[0], -e[1], -l))
    verts = []
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(rows, 2):
        det = a1 * b2 - a2 * b1
        if abs(det) < 1e-12:
            continue
        x = np.array([(c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det])
        if all(a * x[0] + b * x[1] <= c + 1e-9 for a, b, c in rows):
            verts.append(x)
    uniq = []
    for v in verts:
        if not any(np.allclose(v, u, atol=1e-8) for u in uniq):
            uniq.append(v)
    return np.array(uniq)
