"""Main refinement loop.

Starting from the single vertex at the lower box corner, each round picks
unclassified vertices, solves the Chebyshev scalarization at each, and either
classifies the vertex as resolved (its boundary point is within epsilon) or
cuts it, replacing it by up to p raised copies. Objective vectors of the
scalarization witnesses accumulate into the inner approximation; the vertex
set at termination is the outer one. The loop ends when every vertex is
classified, at which point the two conormal hulls sandwich the attainable
region's nondominated boundary to within epsilon.

Scalarizations of a round are independent and can run in a process pool;
results are applied sequentially in selection order, so the output is
identical for any worker count.
"""

from __future__ import annotations

import enum
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import OutcomeBox, make_box
from .copolyblock import VertexSet, geometry_tolerance
from .errors import DimensionMismatch, IterationCapExceeded, QvpError
from .model import QvpProblem
from .oracle import DEFAULT_BUDGET, DEFAULT_TOL_FEAS
from .scalarize import DEFAULT_TOL_SCALAR, solve_chebyshev

DEFAULT_MAX_SCALARIZATIONS = 10_000_000


@dataclass(frozen=True)
class YwnEntry:
    """A recorded weakly nondominated value with its decision-space witness."""

    w: np.ndarray
    f: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class LogEntry:
    k: int
    v: np.ndarray
    t: float
    w: np.ndarray
    action: str  # "accepted" | "cut"


class Membership(enum.Enum):
    IN_ES = "in_es"
    NOT_IN_ES = "not_in_es"
    UNKNOWN = "unknown"


@dataclass
class SolveState:
    """Live loop state; read-only for observers such as gap_report."""

    V: VertexSet
    classified: list[int] = field(default_factory=list)
    gaps: dict = field(default_factory=dict)
    round_gaps: list = field(default_factory=list)
    ywn: list = field(default_factory=list)
    log: list = field(default_factory=list)
    k: int = 0
    scalarizations: int = 0


def gap_report(state: SolveState):
    """(current gap, scalarizations done, |V|, |V_eps|) snapshot."""
    current = max(state.round_gaps) if state.round_gaps else 0.0
    return current, state.scalarizations, len(state.V), len(state.classified)


@dataclass(frozen=True)
class SolveResult:
    """Final approximation data.

    V_eps holds the vertices of the outer hull, Y_WN the weakly nondominated
    values (with witnesses) spanning the inner hull.
    """

    epsilon: float
    direction: np.ndarray
    box: OutcomeBox
    V_eps: list
    Y_WN: list
    final_gap: float
    iterations: int
    scalarizations: int
    wall_time_s: float
    log: list

    def vertex_set(self) -> VertexSet:
        """The outer hull's vertex set, rebuilt from V_eps."""
        return VertexSet(self.V_eps, self.box.m, self.box.M)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "direction": [float(x) for x in self.direction],
            "box": {
                "m": [float(x) for x in self.box.m],
                "M": [float(x) for x in self.box.M],
            },
            "V_eps": [[float(c) for c in v] for v in self.V_eps],
            "Y_WN": [
                {
                    "w": [float(c) for c in e.w],
                    "f": [float(c) for c in e.f],
                    "x": [float(c) for c in e.x],
                }
                for e in self.Y_WN
            ],
            "final_gap": self.final_gap,
            "iterations": self.iterations,
            "scalarizations": self.scalarizations,
            "wall_time_s": self.wall_time_s,
            "log": [
                {
                    "k": e.k,
                    "v": [float(c) for c in e.v],
                    "t": e.t,
                    "w": [float(c) for c in e.w],
                    "action": e.action,
                }
                for e in self.log
            ],
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=1)
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def result_from_dict(data: dict) -> SolveResult:
    box = OutcomeBox(
        m=np.asarray(data["box"]["m"], dtype=float),
        M=np.asarray(data["box"]["M"], dtype=float),
        m_source="user",
        M_source="user",
    )
    return SolveResult(
        epsilon=float(data["epsilon"]),
        direction=np.asarray(data["direction"], dtype=float),
        box=box,
        V_eps=[np.asarray(v, dtype=float) for v in data["V_eps"]],
        Y_WN=[
            YwnEntry(
                w=np.asarray(e["w"], dtype=float),
                f=np.asarray(e["f"], dtype=float),
                x=np.asarray(e["x"], dtype=float),
            )
            for e in data["Y_WN"]
        ],
        final_gap=float(data["final_gap"]),
        iterations=int(data["iterations"]),
        scalarizations=int(data["scalarizations"]),
        wall_time_s=float(data["wall_time_s"]),
        log=[
            LogEntry(
                k=int(e["k"]),
                v=np.asarray(e["v"], dtype=float),
                t=float(e["t"]),
                w=np.asarray(e["w"], dtype=float),
                action=e["action"],
            )
            for e in data["log"]
        ],
    )


def result_from_json(path) -> SolveResult:
    with open(path, "r", encoding="utf-8") as fh:
        return result_from_dict(json.load(fh))


def initial_vertex_set(box: OutcomeBox) -> VertexSet:
    """The first outer approximation is the whole box: one vertex at m."""
    return VertexSet([box.m], box.m, box.M)


# -- worker-side scalarization ----------------------------------------------

_WORKER_CTX = {}


def _pool_init(problem, d, m, tol_scalar, tol_feas, budget, seed):
    _WORKER_CTX["args"] = (problem, d, m, tol_scalar, tol_feas, budget, seed)


def _pool_task(payload):
    seq, v = payload
    problem, d, m, tol_scalar, tol_feas, budget, seed = _WORKER_CTX["args"]
    res = solve_chebyshev(
        problem, v, d, tol_scalar=tol_scalar, m=m, tol_feas=tol_feas,
        budget=budget, seed=seed,
    )
    return seq, res.t, res.w, res.x, problem.evaluate(res.x)


def solve(
    problem: QvpProblem,
    epsilon: float,
    d_hat=None,
    *,
    selection: str = "fifo",
    workers: int = 1,
    tol_scalar: float = DEFAULT_TOL_SCALAR,
    tol_feas: float = DEFAULT_TOL_FEAS,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    max_scalarizations: int = DEFAULT_MAX_SCALARIZATIONS,
    progress=None,
) -> SolveResult:
    """Run the outer approximation loop down to tolerance epsilon.

    Args:
        problem: validated problem instance.
        epsilon: positive termination tolerance on ||w - v||.
        d_hat: strictly positive direction; defaults to the problem file's
            direction, else the all-ones vector.
        selection: "fifo" (insertion order, the default and fully
            reproducible choice) or "max_gap" (vertices created by wider cuts
            first).
        workers: process count for per-round scalarizations; any value yields
            the same result.
        progress: optional callback receiving the SolveState after each round.

    Raises IterationCapExceeded when max_scalarizations is hit.
    """
    if epsilon <= 0.0:
        raise QvpError("epsilon must be positive")
    if selection not in ("fifo", "max_gap"):
        raise QvpError(f"unknown selection rule {selection!r}")
    if workers < 1:
        raise QvpError("workers must be >= 1")

    if d_hat is None:
        d = problem.direction if problem.direction is not None else np.ones(problem.p)
    else:
        d = np.asarray(d_hat, dtype=float)
    if d.shape != (problem.p,) or np.any(d <= 0.0):
        raise QvpError("direction must be strictly positive with one entry per objective")

    t_start = time.perf_counter()
    # The loop's first scalarization at m doubles as the attained-ideal
    # check, so the box is assembled without its own.
    box = make_box(problem, d, tol_scalar=tol_scalar, tol_feas=tol_feas,
                   budget=budget, check_degenerate=False)
    tau = geometry_tolerance(box.m, box.M)

    state = SolveState(V=initial_vertex_set(box))
    priorities = {0: np.inf}
    ywn_stack = None  # (k, p) array mirror of state.ywn for dedup

    pool = None
    try:
        if workers > 1:
            pool = ProcessPoolExecutor(
                max_workers=workers,
                initializer=_pool_init,
                initargs=(problem, d, box.m, tol_scalar, tol_feas, budget, seed),
            )
        else:
            _pool_init(problem, d, box.m, tol_scalar, tol_feas, budget, seed)

        while True:
            done = set(state.classified)
            pending = [
                (seq, state.V.vertices[i])
                for i, seq in enumerate(state.V.seqs)
                if seq not in done
            ]
            if selection == "fifo":
                pending.sort(key=lambda sv: sv[0])
            else:
                pending.sort(key=lambda sv: (-priorities.get(sv[0], 0.0), sv[0]))
            if not pending:
                break
            if state.scalarizations + len(pending) > max_scalarizations:
                raise IterationCapExceeded(
                    f"scalarization cap {max_scalarizations} reached",
                    scalarizations=state.scalarizations,
                )

            if pool is not None:
                chunk = max(1, len(pending) // (4 * workers))
                results = list(pool.map(_pool_task, pending, chunksize=chunk))
            else:
                results = [_pool_task(item) for item in pending]

            state.round_gaps = []
            for seq, t, w, x, fx in results:
                state.scalarizations += 1
                try:
                    idx = state.V.seqs.index(seq)
                except ValueError:
                    continue  # vertex removed by an earlier cut this round
                v = state.V.vertices[idx]
                gap = float(np.linalg.norm(w - v))
                state.gaps[seq] = gap
                state.round_gaps.append(gap)

                # Record the weakly efficient value before the epsilon test,
                # merging duplicates and keeping the first witness.
                if ywn_stack is None or not np.any(
                    np.all(np.abs(ywn_stack - fx) <= tau, axis=1)
                ):
                    state.ywn.append(YwnEntry(w=w, f=fx, x=x))
                    ywn_stack = (
                        fx[None, :]
                        if ywn_stack is None
                        else np.vstack([ywn_stack, fx])
                    )

                if gap <= epsilon:
                    state.classified.append(seq)
                    action = "accepted"
                else:
                    before = set(state.V.seqs)
                    state.V = state.V.cut(v, w)
                    for new_seq in state.V.seqs:
                        if new_seq not in before:
                            priorities[new_seq] = gap
                    action = "cut"
                state.log.append(LogEntry(k=state.k, v=v, t=float(t), w=w, action=action))
                state.k += 1
            if progress is not None:
                progress(state)
    finally:
        if pool is not None:
            pool.shutdown()

    final_gap = max((state.gaps[seq] for seq in state.classified), default=0.0)
    order = {seq: i for i, seq in enumerate(state.classified)}
    v_eps = [None] * len(state.classified)
    for i, seq in enumerate(state.V.seqs):
        if seq in order:
            v_eps[order[seq]] = state.V.vertices[i].copy()

    return SolveResult(
        epsilon=float(epsilon),
        direction=d.copy(),
        box=box,
        V_eps=v_eps,
        Y_WN=list(state.ywn),
        final_gap=float(final_gap),
        iterations=state.k,
        scalarizations=state.scalarizations,
        wall_time_s=time.perf_counter() - t_start,
        log=list(state.log),
    )


def es_membership(result: SolveResult, problem: QvpProblem, x, *, tol_feas: float = DEFAULT_TOL_FEAS) -> Membership:
    """Sufficient test for membership in the approximate solution set.

    A feasible x belongs when some certified attainable value y >= f(x) lies
    in the outer hull without being epsilon-dominated by one of its vertices.
    The test can answer UNKNOWN: it tries only y = f(x) and the recorded
    nondominated values above f(x).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise DimensionMismatch(f"point has shape {x.shape}, expected ({problem.n},)")
    if problem.feasible.violation(x) > tol_feas:
        return Membership.NOT_IN_ES

    fx = problem.evaluate(x)
    m, M = result.box.m, result.box.M
    tau = geometry_tolerance(m, M)
    vs = result.vertex_set()
    eps = result.epsilon

    candidates = []
    if np.all(fx <= M + tau):
        candidates.append(np.minimum(fx, M))
    for entry in result.Y_WN:
        if np.all(entry.w >= fx - tau) and np.all(entry.w <= M + tau):
            candidates.append(np.asarray(entry.w, dtype=float))

    verts = vs.vertices
    for y in candidates:
        if not vs.contains(y):
            continue
        if len(vs) and bool(np.any(np.all(verts < y - eps + tau, axis=1))):
            continue  # y is epsilon-dominated inside the outer hull
        return Membership.IN_ES
    return Membership.UNKNOWN
