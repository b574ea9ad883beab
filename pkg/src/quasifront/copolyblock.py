"""Vertex-set representation of the outer-approximating copolyblock.

A copolyblock inside the box [m, M] is the union of the boxes [v, M] over a
finite set of proper vertices v (proper: no other vertex lies componentwise
below it). Refinement happens by cutting the cone w - R+^p out of the set at
a boundary point w above a vertex v: the vertex is replaced by the p points
obtained by raising one coordinate of v to w (clamped to M), after which
newly inserted vertices that became dominated are dropped.

Vertex sets are persistent: cut() returns a new set and never mutates the
receiver, so earlier refinement stages stay valid for nesting checks.
Insertion sequence numbers make first-in-first-out selection well defined.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, VertexNotInSet, WNotAbove


def geometry_tolerance(m, M) -> float:
    """Scale-aware tolerance for componentwise comparisons in [m, M]."""
    return 1e-9 * max(1.0, float(np.abs(np.asarray(M) - np.asarray(m)).max()))


class VertexSet:
    """Proper vertices of a copolyblock in [m, M], with insertion order."""

    def __init__(self, vertices, m, M, seqs=None, next_seq=None, tau=None):
        self.m = np.asarray(m, dtype=float)
        self.M = np.asarray(M, dtype=float)
        verts = [np.asarray(v, dtype=float) for v in vertices]
        p = self.m.shape[0]
        for v in verts:
            if v.shape != (p,):
                raise DimensionMismatch(f"vertex has shape {v.shape}, expected ({p},)")
        self._verts = np.array(verts, dtype=float).reshape(len(verts), p)
        self.seqs = list(range(len(verts))) if seqs is None else list(seqs)
        if len(self.seqs) != len(verts):
            raise DimensionMismatch("one sequence number per vertex required")
        self.next_seq = (max(self.seqs) + 1 if self.seqs else 0) if next_seq is None else next_seq
        self.tau = geometry_tolerance(self.m, self.M) if tau is None else tau

    # -- read side ---------------------------------------------------------

    def __len__(self) -> int:
        return self._verts.shape[0]

    @property
    def p(self) -> int:
        return self.m.shape[0]

    @property
    def vertices(self) -> np.ndarray:
        """(k, p) array of vertices in insertion order (read-only view)."""
        out = self._verts.view()
        out.setflags(write=False)
        return out

    def contains(self, y) -> bool:
        """Whether y lies in the union of [v, M] over the vertices."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.p,):
            raise DimensionMismatch(f"point has shape {y.shape}, expected ({self.p},)")
        if np.any(y > self.M + self.tau):
            return False
        if not len(self):
            return False
        return bool(np.any(np.all(self._verts <= y + self.tau, axis=1)))

    def gap(self, w_of) -> float:
        """max ||w_v - v|| over vertices v present in the mapping w_of,
        keyed by tuple(v); an upper bound on the distance to the enclosed set."""
        worst = 0.0
        for v in self._verts:
            w = w_of.get(tuple(v))
            if w is not None:
                worst = max(worst, float(np.linalg.norm(np.asarray(w, dtype=float) - v)))
        return worst

    def index_of(self, v) -> int:
        v = np.asarray(v, dtype=float)
        hits = np.nonzero(np.all(np.abs(self._verts - v) <= self.tau, axis=1))[0]
        if hits.size == 0:
            raise VertexNotInSet(f"vertex {v} not found in the set")
        return int(hits[0])

    # -- refinement --------------------------------------------------------

    def cut(self, v, w) -> "VertexSet":
        """Replace vertex v by the p single-coordinate raises toward w.

        w must dominate v (w >= v); it is clamped to M before use and raises
        that would land on the M face are discarded. A w equal to v leaves
        the set unchanged.
        """
        idx = self.index_of(v)
        v = self._verts[idx]
        w = np.asarray(w, dtype=float)
        if w.shape != (self.p,):
            raise DimensionMismatch(f"w has shape {w.shape}, expected ({self.p},)")
        if np.any(w < v - self.tau):
            raise WNotAbove(f"cut point {w} does not dominate vertex {v}")
        w = np.minimum(w, self.M)
        if np.all(np.abs(w - v) <= self.tau):
            return self._copy()

        keep = [i for i in range(len(self)) if i != idx]
        verts = [self._verts[i] for i in keep]
        seqs = [self.seqs[i] for i in keep]
        nxt = self.next_seq
        candidates = []
        for i in range(self.p):
            if w[i] >= self.M[i] - self.tau:
                continue  # degenerate sliver on the M face
            z = v.copy()
            z[i] = w[i]
            verts.append(z)
            seqs.append(nxt)
            candidates.append(z)
            nxt += 1
        out = VertexSet(verts, self.m, self.M, seqs=seqs, next_seq=nxt, tau=self.tau)
        return out.remove_improper(candidates)

    def remove_improper(self, candidates) -> "VertexSet":
        """Drop every candidate vertex dominated by some other vertex.

        Only newly inserted vertices can be improper: a pre-existing proper
        vertex u with z <= u would give v <= z <= u against the properness
        of the previous set. Candidates are matched by value.
        """
        if not candidates or not len(self):
            return self._copy()
        cand = np.array([np.asarray(c, dtype=float) for c in candidates])
        drop = set()
        # Descending order so that of two equal vertices the newer one goes,
        # keeping first-in-first-out selection stable.
        for i in sorted(range(len(self)), reverse=True):
            z = self._verts[i]
            if not np.any(np.all(np.abs(cand - z) <= self.tau, axis=1)):
                continue
            for j in range(len(self)):
                if j == i or j in drop:
                    continue
                if np.all(self._verts[j] <= z + self.tau):
                    drop.add(i)
                    break
        if not drop:
            return self._copy()
        keep = [i for i in range(len(self)) if i not in drop]
        return VertexSet(
            [self._verts[i] for i in keep],
            self.m,
            self.M,
            seqs=[self.seqs[i] for i in keep],
            next_seq=self.next_seq,
            tau=self.tau,
        )

    def _copy(self) -> "VertexSet":
        return VertexSet(
            list(self._verts), self.m, self.M, seqs=list(self.seqs),
            next_seq=self.next_seq, tau=self.tau,
        )

    def is_proper(self) -> bool:
        """Exhaustive pairwise check that no vertex dominates another."""
        k = len(self)
        for i in range(k):
            for j in range(k):
                if i != j and np.all(self._verts[i] <= self._verts[j] + self.tau):
                    return False
        return True
