"""Minimum-weight maximum-cardinality bipartite matching with dual variables.

Successive shortest augmenting paths (Hungarian method, Tarjan's
formulation). Every augmentation runs Dijkstra from all free left vertices
at once over reduced costs ``w - a[u] - b[v]``, which the dual variables keep
nonnegative. After each augmentation the duals are shifted by the search
distances, so that

* ``a[u] + b[v] <= w`` for every edge ``(u, v, w)``, and
* ``a[u] + b[v] == w`` for every matched edge.

Two search kernels share the same update rule: a binary-heap kernel for
sparse graphs and a vectorized array kernel for dense ones.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

INF = math.inf

# Graphs at least this dense are searched with the array kernel.
DENSE_FRACTION = 0.25


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Weighted bipartite graph with left vertices ``0..n_left-1`` and right
    vertices ``0..n_right-1``. Parallel edges are collapsed to the lightest."""

    n_left: int
    n_right: int
    adj_left: tuple[tuple[tuple[int, float], ...], ...]
    adj_right: tuple[tuple[tuple[int, float], ...], ...]
    weights: dict[tuple[int, int], float] = field(repr=False)
    dense: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_edges(cls, n_left: int, n_right: int,
                   edges: Iterable[tuple[int, int, float]],
                   dense: Optional[bool] = None) -> "BipartiteGraph":
        weights: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            u = int(u)
            v = int(v)
            w = float(w)
            if not (0 <= u < n_left and 0 <= v < n_right):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if not (w >= 0 and math.isfinite(w)):
                raise ValueError(f"edge ({u}, {v}) has invalid weight {w}")
            old = weights.get((u, v))
            if old is None or w < old:
                weights[(u, v)] = w
        adj_l: list[list[tuple[int, float]]] = [[] for _ in range(n_left)]
        adj_r: list[list[tuple[int, float]]] = [[] for _ in range(n_right)]
        for (u, v), w in sorted(weights.items()):
            adj_l[u].append((v, w))
            adj_r[v].append((u, w))
        mat = None
        if dense is None:
            dense = len(weights) >= DENSE_FRACTION * n_left * n_right and n_left * n_right > 0
        if dense:
            mat = np.full((n_left, n_right), INF)
            for (u, v), w in weights.items():
                mat[u, v] = w
            mat.setflags(write=False)
        return cls(n_left, n_right,
                   tuple(tuple(a) for a in adj_l), tuple(tuple(a) for a in adj_r),
                   weights, mat)

    @classmethod
    def from_matrix(cls, matrix) -> "BipartiteGraph":
        """Edges are the finite entries of ``matrix`` (``inf`` means no edge)."""
        m = np.asarray(matrix, dtype=float)
        us, vs = np.nonzero(np.isfinite(m))
        return cls.from_edges(m.shape[0], m.shape[1],
                              zip(us.tolist(), vs.tolist(), m[us, vs].tolist()),
                              dense=True)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(u, v, w) for (u, v), w in sorted(self.weights.items())]

    @property
    def num_edges(self) -> int:
        return len(self.weights)

    @property
    def max_weight(self) -> float:
        return max(self.weights.values(), default=0.0)

    def weight(self, u: int, v: int) -> float:
        return self.weights[(u, v)]


@dataclass
class MatchingWithDuals:
    """A matching plus dual variables ``a`` (left) and ``b`` (right).

    ``mate_left[u]`` is the right vertex matched to ``u`` or -1; likewise
    ``mate_right``. Duals may be negative.
    """

    mate_left: list[int]
    mate_right: list[int]
    a: np.ndarray
    b: np.ndarray
    total_weight: float = 0.0

    @classmethod
    def empty(cls, g: BipartiteGraph) -> "MatchingWithDuals":
        return cls([-1] * g.n_left, [-1] * g.n_right,
                   np.zeros(g.n_left), np.zeros(g.n_right), 0.0)

    @property
    def cardinality(self) -> int:
        return sum(1 for v in self.mate_left if v >= 0)

    def pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in enumerate(self.mate_left) if v >= 0]

    def copy(self) -> "MatchingWithDuals":
        return MatchingWithDuals(list(self.mate_left), list(self.mate_right),
                                 self.a.copy(), self.b.copy(), self.total_weight)

    def is_perfect(self) -> bool:
        return all(v >= 0 for v in self.mate_left) and all(u >= 0 for u in self.mate_right)


class DualCheck(NamedTuple):
    ok: bool
    violations: list[tuple[str, int, int, float]]


def dual_tolerance(g: BipartiteGraph) -> float:
    return 1e-9 * (1.0 + g.max_weight)


def verify_duals(g: BipartiteGraph, m: MatchingWithDuals,
                 eps: Optional[float] = None) -> DualCheck:
    """Check dual feasibility on every edge and tightness on matched edges.

    Violations are ``(kind, u, v, amount)`` with kind ``"infeasible"``
    (``a[u] + b[v]`` exceeds ``w`` by amount), ``"loose"`` (a matched edge
    whose dual sum misses ``w`` by amount), ``"mate"`` (inconsistent mate maps)
    or ``"nonedge"`` (matched pair that is not an edge).
    """
    if eps is None:
        eps = dual_tolerance(g)
    bad: list[tuple[str, int, int, float]] = []
    if len(m.mate_left) != g.n_left or len(m.mate_right) != g.n_right:
        return DualCheck(False, [("mate", len(m.mate_left), len(m.mate_right), INF)])
    for u, v in enumerate(m.mate_left):
        if v >= 0 and m.mate_right[v] != u:
            bad.append(("mate", u, v, INF))
    for v, u in enumerate(m.mate_right):
        if u >= 0 and m.mate_left[u] != v:
            bad.append(("mate", u, v, INF))
    a, b = m.a, m.b
    for (u, v), w in g.weights.items():
        excess = a[u] + b[v] - w
        if excess > eps:
            bad.append(("infeasible", u, v, float(excess)))
        elif m.mate_left[u] == v and -excess > eps:
            bad.append(("loose", u, v, float(-excess)))
    for u, v in enumerate(m.mate_left):
        if v >= 0 and (u, v) not in g.weights:
            bad.append(("nonedge", u, v, INF))
    bad.sort(key=lambda t: (t[1], t[2], t[0]))
    return DualCheck(not bad, bad)


def min_weight_matching(g: BipartiteGraph) -> MatchingWithDuals:
    """Minimum-weight matching among those of maximum cardinality.

    Starts from the empty matching with zero duals (feasible because weights
    are nonnegative). O(mn + n^2 log n) with the heap kernel, O(n^3) with the
    array kernel.
    """
    m = MatchingWithDuals.empty(g)
    _augment_to_maximum(g, m)
    return m


def resume_matching(g: BipartiteGraph, m: MatchingWithDuals,
                    max_augmentations: Optional[int] = None) -> MatchingWithDuals:
    """Extend a partial matching with valid duals by shortest augmenting paths.

    The input is not modified. Raises ValueError if its duals are invalid.
    """
    check = verify_duals(g, m)
    if not check.ok:
        raise ValueError(f"invalid starting duals: {check.violations[:3]}")
    out = m.copy()
    _augment_to_maximum(g, out, max_augmentations)
    return out


def _augment_to_maximum(g: BipartiteGraph, m: MatchingWithDuals,
                        limit: Optional[int] = None) -> int:
    if g.dense is not None:
        steps = _augment_dense(g, m, limit)
    else:
        steps = _augment_sparse(g, m, limit)
    m.total_weight = math.fsum(g.weights[(u, v)] for u, v in m.pairs())
    return steps


def _augment_sparse(g: BipartiteGraph, m: MatchingWithDuals,
                    limit: Optional[int]) -> int:
    # Stored duals differ from the true ones by +off on the left and -off on
    # the right, so reduced costs never see the offset and unreached vertices
    # need no per-augmentation update.
    mate_l = m.mate_left
    mate_r = m.mate_right
    a = m.a.tolist()
    b = m.b.tolist()
    off = 0.0
    adj = g.adj_left
    free_left = [u for u in range(g.n_left) if mate_l[u] < 0]
    steps = 0
    while free_left and (limit is None or steps < limit):
        dist_r: dict[int, float] = {}
        pred: dict[int, int] = {}
        settled_l: dict[int, float] = {}
        settled_r: dict[int, float] = {}
        heap: list[tuple[float, int]] = []

        def relax(u: int, du: float) -> None:
            au = a[u]
            for v, w in adj[u]:
                if v in settled_r:
                    continue
                nd = du + (w - au - b[v])
                if nd < du:
                    nd = du
                old = dist_r.get(v)
                if old is None or nd < old:
                    dist_r[v] = nd
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))

        for u in free_left:
            settled_l[u] = 0.0
            relax(u, 0.0)
        end = -1
        big_d = 0.0
        while heap:
            d, v = heapq.heappop(heap)
            if v in settled_r or d > dist_r[v]:
                continue
            settled_r[v] = d
            u2 = mate_r[v]
            if u2 < 0:
                end = v
                big_d = d
                break
            settled_l[u2] = d
            relax(u2, d)
        if end < 0:
            break
        off -= big_d
        for u, du in settled_l.items():
            a[u] += big_d - du
        for v, dv in settled_r.items():
            b[v] -= big_d - dv
        v = end
        while True:
            u = pred[v]
            prev = mate_l[u]
            mate_l[u] = v
            mate_r[v] = u
            if prev < 0:
                break
            v = prev
        free_left.remove(u)
        steps += 1
    m.a = np.array(a, dtype=float) + off
    m.b = np.array(b, dtype=float) - off
    return steps


def _augment_dense(g: BipartiteGraph, m: MatchingWithDuals,
                   limit: Optional[int]) -> int:
    w_mat = g.dense
    n_l, n_r = w_mat.shape
    mate_l = m.mate_left
    mate_r = m.mate_right
    a = m.a.astype(float).copy()
    b = m.b.astype(float).copy()
    steps = 0
    while limit is None or steps < limit:
        free = np.array([u for u in range(n_l) if mate_l[u] < 0], dtype=np.intp)
        if free.size == 0:
            break
        red = w_mat[free] - a[free, None]
        pick = np.argmin(red, axis=0)
        dist_r = red[pick, np.arange(n_r)] - b
        np.maximum(dist_r, 0.0, out=dist_r)
        pred = free[pick]
        dist_l = np.full(n_l, INF)
        dist_l[free] = 0.0
        done_r = np.zeros(n_r, dtype=bool)
        end = -1
        while True:
            cand = np.where(done_r, INF, dist_r)
            v = int(np.argmin(cand))
            d = cand[v]
            if not d < INF:
                break
            done_r[v] = True
            u2 = mate_r[v]
            if u2 < 0:
                end = v
                break
            dist_l[u2] = d
            nd = d + (w_mat[u2] - a[u2] - b)
            np.maximum(nd, d, out=nd)
            upd = (nd < dist_r) & ~done_r
            dist_r[upd] = nd[upd]
            pred[upd] = u2
        if end < 0:
            break
        big_d = dist_r[end]
        a -= np.minimum(dist_l, big_d)
        b += np.where(done_r, dist_r, big_d)
        v = end
        while True:
            u = int(pred[v])
            prev = mate_l[u]
            mate_l[u] = v
            mate_r[v] = u
            if prev < 0:
                break
            v = prev
        steps += 1
    m.a = a
    m.b = b
    return steps


def matching_from_pairs(g: BipartiteGraph, pairs: Sequence[tuple[int, int]],
                        a: Sequence[float], b: Sequence[float]) -> MatchingWithDuals:
    """Assemble a matching with given duals (for seeding ``resume_matching``)."""
    mate_l = [-1] * g.n_left
    mate_r = [-1] * g.n_right
    for u, v in pairs:
        if mate_l[u] >= 0 or mate_r[v] >= 0:
            raise ValueError(f"pair ({u}, {v}) reuses a matched vertex")
        mate_l[u] = v
        mate_r[v] = u
    total = math.fsum(g.weights[(u, v)] for u, v in pairs)
    return MatchingWithDuals(mate_l, mate_r, np.asarray(a, dtype=float).copy(),
                             np.asarray(b, dtype=float).copy(), total)
