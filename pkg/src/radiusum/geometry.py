"""Faster solving for point sets in low-dimensional L_p spaces.

Only pairs whose nearest-neighbor balls overlap or touch can appear in a
minimum cycle cover, and only those pairs need checking for overlap. That
nearest-neighbor overlap graph is sparse and has small sphere separators, so
the matching on its double cover is solved by divide and conquer over a
separator hierarchy: solve both sides (each including the separator), merge
the two dual systems by taking minima at separator vertices, and repair the
merged matching with a few augmenting paths.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from radiusum.cover import double_cover
from radiusum.matching import (BipartiteGraph, MatchingWithDuals, _augment_to_maximum,
                               min_weight_matching)
from radiusum.metric import MetricError, MetricInstance, _norm_rows
from radiusum.solver import BallAssignment, assignment_from_matching, solve_general

log = logging.getLogger(__name__)

LEAF_SIZE = 32
BALANCE = 0.75
TRIALS = 20
SAMPLE_SIZE = 500
IMBALANCE_PENALTY = 0.5
# Relative slack in the overlap rule; extra edges are harmless, missing
# ones are not.
EDGE_RTOL = 1e-12


@dataclass(frozen=True)
class NNOverlapGraph:
    delta: np.ndarray
    edges: np.ndarray          # shape (m, 2), rows (i, j) with i < j, sorted
    lengths: np.ndarray        # d(i, j) per edge

    @property
    def n(self) -> int:
        return len(self.delta)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges.tolist():
            adj[i].append(j)
            adj[j].append(i)
        return adj


@dataclass
class SepNode:
    vertices: np.ndarray
    separator: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    left: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    right: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    children: Optional[tuple[int, int]] = None
    method: str = "leaf"

    @property
    def is_leaf(self) -> bool:
        return self.children is None


@dataclass
class SeparatorTree:
    nodes: list[SepNode]
    leaf_size: int
    balance: float
    seed: int

    @property
    def root(self) -> SepNode:
        return self.nodes[0]

    def depth(self) -> int:
        best = 0
        stack = [(0, 0)]
        while stack:
            k, d = stack.pop()
            best = max(best, d)
            ch = self.nodes[k].children
            if ch is not None:
                stack.extend((c, d + 1) for c in ch)
        return best


def _coords(inst: MetricInstance) -> np.ndarray:
    if not inst.is_coordinate:
        raise MetricError("the geometric path needs coordinate input")
    return inst.points


def _kd_p(p: float) -> float:
    return np.inf if math.isinf(p) else p


def nearest_neighbor_distances(inst: MetricInstance) -> np.ndarray:
    """Distance from each point to its nearest other point (k-d tree query,
    O(n log n) expected in bounded dimension)."""
    pts = _coords(inst)
    if inst.n < 2:
        raise MetricError("nearest neighbors need at least two points")
    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=2, p=_kd_p(inst.p))
    me = np.arange(inst.n)
    # A duplicate may be reported before the point itself.
    nn = np.where(idx[:, 0] != me, idx[:, 0], idx[:, 1])
    return inst_distances(inst, me, nn)


def inst_distances(inst: MetricInstance, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Elementwise distances, evaluated with the smaller index first so the
    values agree bit-for-bit with ``MetricInstance.distance``."""
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    return _norm_rows(inst.points[lo] - inst.points[hi], inst.p)


def build_nn_overlap_graph(inst: MetricInstance,
                           delta: Optional[np.ndarray] = None) -> NNOverlapGraph:
    """Edges ``(i, j)`` with ``d(i, j) <= delta_i + delta_j``.

    An edge whose endpoint ``i`` has the larger radius lies within ``2 delta_i``
    of ``p_i``, so one ball query per point of that radius finds every edge.
    """
    pts = _coords(inst)
    if delta is None:
        delta = nearest_neighbor_distances(inst)
    tree = cKDTree(pts)
    radius = 2.0 * delta * (1 + 4 * EDGE_RTOL) + 1e-300
    hits = tree.query_ball_point(pts, radius, p=_kd_p(inst.p))
    src, dst = [], []
    for i, js in enumerate(hits):
        for j in js:
            if j == i:
                continue
            if delta[j] < delta[i] or (delta[j] == delta[i] and j > i):
                src.append(i)
                dst.append(j)
    src = np.array(src, dtype=np.intp)
    dst = np.array(dst, dtype=np.intp)
    d = inst_distances(inst, src, dst)
    keep = d <= (delta[src] + delta[dst]) * (1 + EDGE_RTOL)
    e = np.stack([np.minimum(src, dst)[keep], np.maximum(src, dst)[keep]], axis=1)
    order = np.lexsort((e[:, 1], e[:, 0])) if len(e) else np.zeros(0, dtype=np.intp)
    e = e[order].reshape(-1, 2)
    return NNOverlapGraph(np.asarray(delta, dtype=float), e, d[keep][order])


def _split(t: np.ndarray, delta: np.ndarray):
    # t is the signed offset of each center from the cut surface; a ball
    # meets the (closed) surface when |t| <= delta.
    on = np.abs(t) <= delta * (1 + EDGE_RTOL)
    inside = ~on & (t < 0)
    outside = ~on & (t > 0)
    return on, inside, outside


def _score(on, inside, outside) -> tuple[float, int, int]:
    nl = int(inside.sum())
    nr = int(outside.sum())
    return int(on.sum()) + IMBALANCE_PENALTY * abs(nl - nr), nl, nr


def _find_separator(pts: np.ndarray, delta: np.ndarray, p: float,
                    rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray, str]:
    m, dim = pts.shape
    limit = BALANCE * m
    sample = pts if m <= SAMPLE_SIZE else pts[rng.choice(m, SAMPLE_SIZE, replace=False)]
    centre = np.median(sample, axis=0)
    spread = float(np.median(_norm_rows(sample - centre, p))) or 1.0
    # Cuts exactly through a center always catch that ball; a small shift
    # lets the surface pass between neighbouring balls.
    jitter = float(np.median(delta))
    best = None
    for _ in range(TRIALS):
        # A sphere through the approximate centerpoint with a random normal
        # direction and a log-uniform curvature; very large spheres act as
        # hyperplanes.
        u = rng.standard_normal(dim)
        u /= np.linalg.norm(u) or 1.0
        scale = spread * math.exp(rng.uniform(-1.0, 4.0))
        c = centre + u * scale
        rho = float(_norm_rows(centre - c, p)) + jitter * rng.uniform(-0.5, 0.5)
        t = _norm_rows(pts - c, p) - rho
        on, inside, outside = _split(t, delta)
        sc, nl, nr = _score(on, inside, outside)
        if nl == 0 or nr == 0 or max(nl, nr) > limit:
            continue
        if best is None or sc < best[0]:
            best = (sc, on, inside, outside)
    if best is not None:
        return best[1], best[2], best[3], "sphere"
    # Median cuts along axes, widest first. An L_p ball of radius r reaches
    # exactly r along every coordinate axis.
    widths = pts.max(axis=0) - pts.min(axis=0)
    fallback = None
    for k in np.argsort(-widths, kind="stable"):
        t = pts[:, k] - np.median(pts[:, k])
        on, inside, outside = _split(t, delta)
        sc, nl, nr = _score(on, inside, outside)
        if nl == 0 or nr == 0:
            continue
        if max(nl, nr) <= limit:
            return on, inside, outside, "median"
        if fallback is None or sc < fallback[0]:
            fallback = (sc, on, inside, outside)
    if fallback is not None:
        return fallback[1], fallback[2], fallback[3], "median-unbalanced"
    return None


def build_separator_tree(nn: NNOverlapGraph, inst: MetricInstance,
                         seed: int = 0, leaf_size: int = LEAF_SIZE) -> SeparatorTree:
    """Recursive separator hierarchy over the nearest-neighbor balls.

    Each internal node splits its vertices into a separator S (balls meeting
    a cut sphere or hyperplane), L (inside) and R (outside); children are
    built on S+L and S+R. A node that cannot be split into two smaller
    parts becomes a leaf.
    """
    pts = _coords(inst)
    rng = np.random.default_rng(seed)
    adj = nn.adjacency()
    nodes = [SepNode(np.arange(nn.n, dtype=np.intp))]
    label = np.full(nn.n, -1, dtype=np.int8)
    queue = [0]
    while queue:
        k = queue.pop(0)
        node = nodes[k]
        vs = node.vertices
        if len(vs) <= leaf_size:
            continue
        found = _find_separator(pts[vs], nn.delta[vs], inst.p, rng)
        if found is None:
            node.method = "leaf-unsplittable"
            continue
        on, inside, outside, method = found
        # Guard against rounding: any remaining L-R edge moves its L end into S.
        label[vs[on]] = 0
        label[vs[inside]] = 1
        label[vs[outside]] = 2
        for v in vs[inside]:
            if any(label[w] == 2 for w in adj[v]):
                label[v] = 0
        sep = vs[label[vs] == 0]
        left = vs[label[vs] == 1]
        right = vs[label[vs] == 2]
        label[vs] = -1
        if len(left) == 0 or len(right) == 0:
            node.method = "leaf-unsplittable"
            continue
        node.separator, node.left, node.right, node.method = sep, left, right, method
        a = len(nodes)
        nodes.append(SepNode(np.sort(np.concatenate([sep, left]))))
        nodes.append(SepNode(np.sort(np.concatenate([sep, right]))))
        node.children = (a, a + 1)
        queue.extend([a, a + 1])
    return SeparatorTree(nodes, leaf_size, BALANCE, seed)


def double_cover_of(nn: NNOverlapGraph) -> BipartiteGraph:
    return double_cover(nn.n, zip(nn.edges[:, 0].tolist(), nn.edges[:, 1].tolist(),
                                  nn.lengths.tolist()), dense=False)


def _induced(g2: BipartiteGraph, vs: np.ndarray, stamp: np.ndarray, token: int) -> BipartiteGraph:
    local = {int(v): k for k, v in enumerate(vs.tolist())}
    stamp[vs] = token
    edges = []
    for v in vs.tolist():
        lv = local[v]
        for w, wt in g2.adj_left[v]:
            if stamp[w] == token:
                edges.append((lv, local[w], wt))
    return BipartiteGraph.from_edges(len(vs), len(vs), edges, dense=False)


def separated_matching(g2: BipartiteGraph, tree: SeparatorTree) -> MatchingWithDuals:
    """Maximum-cardinality matching with feasible, tight duals on the double
    cover ``g2`` of a graph, by divide and conquer over ``tree``.

    At a separator vertex the two children disagree; its dual becomes the
    smaller of the two values (the left child wins ties) and a matched edge
    survives only if its child supplied the dual at every separator endpoint.
    The merged matching is then completed by shortest augmenting paths.
    """
    n = g2.n_left
    if g2.n_right != n or len(tree.root.vertices) != n:
        raise ValueError("separator tree does not match the graph")
    stamp = np.zeros(n, dtype=np.int64)
    counter = [0]

    def solve(k: int):
        node = tree.nodes[k]
        vs = node.vertices
        counter[0] += 1
        g = _induced(g2, vs, stamp, counter[0])
        if node.is_leaf:
            m = min_weight_matching(g)
            return vs, m
        parts = [solve(c) for c in node.children]
        return vs, _merge(g, vs, set(node.separator.tolist()), parts)

    vs, m = solve(0)
    return m


def _merge(g: BipartiteGraph, vs: np.ndarray, sep: set[int], parts) -> MatchingWithDuals:
    n = len(vs)
    local = {int(v): k for k, v in enumerate(vs.tolist())}
    a = np.full(n, math.inf)
    b = np.full(n, math.inf)
    from_a = np.full(n, -1)
    from_b = np.full(n, -1)
    for side, (cvs, cm) in enumerate(parts):
        idx = np.array([local[int(v)] for v in cvs.tolist()], dtype=np.intp)
        # Strict comparison: on equal duals the first (left) child supplies.
        upd = cm.a < a[idx]
        a[idx[upd]] = cm.a[upd]
        from_a[idx[upd]] = side
        upd = cm.b < b[idx]
        b[idx[upd]] = cm.b[upd]
        from_b[idx[upd]] = side
    mate_l = [-1] * n
    mate_r = [-1] * n
    for side, (cvs, cm) in enumerate(parts):
        for cu, cv in cm.pairs():
            u = local[int(cvs[cu])]
            v = local[int(cvs[cv])]
            if from_a[u] == side and from_b[v] == side:
                mate_l[u] = v
                mate_r[v] = u
    m = MatchingWithDuals(mate_l, mate_r, a, b)
    _augment_to_maximum(g, m)
    return m


def solve_euclidean(inst: MetricInstance, seed: int = 0,
                    leaf_size: int = LEAF_SIZE) -> BallAssignment:
    """Optimal radii for a coordinate point set via the nearest-neighbor
    overlap graph and separator-based matching. Same optimum as
    ``solve_general``."""
    _coords(inst)
    if inst.n < 2:
        return solve_general(inst)
    nn = build_nn_overlap_graph(inst)
    tree = build_separator_tree(nn, inst, seed=seed, leaf_size=leaf_size)
    g2 = double_cover_of(nn)
    m = separated_matching(g2, tree)
    return assignment_from_matching(inst, m, g2)
