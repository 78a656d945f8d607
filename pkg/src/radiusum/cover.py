"""Cycle covers and the bipartite double cover.

A cycle cover uses every vertex exactly twice (counting multiplicity), so it
is a union of vertex-disjoint cycles where a 2-cycle is a single doubled
edge. Perfect matchings of the bipartite double cover ``2G`` (red copy on the
left, blue copy on the right) are exactly the oriented cycle covers of ``G``:
red ``i`` matched to blue ``j`` means the cycle through ``i`` leaves towards
``j``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from radiusum.matching import BipartiteGraph, MatchingWithDuals
from radiusum.metric import MetricInstance


@dataclass(frozen=True)
class CycleCover:
    """Cycle cover of the vertices ``0..n-1``.

    ``edges`` holds ``(i, j, multiplicity)`` with ``i < j``; ``cycles`` holds
    each cycle as a vertex sequence in canonical orientation (starts at its
    smallest vertex and continues to the smaller of its two neighbours).
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    cycles: tuple[tuple[int, ...], ...]
    lengths: dict[tuple[int, int], float] = field(repr=False, compare=False)
    total_weight: float = 0.0

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Iterable[int]],
                    lengths: dict[tuple[int, int], float]) -> "CycleCover":
        canon = sorted(_canonical_cycle(list(c)) for c in cycles)
        mult: Counter = Counter()
        for cyc in canon:
            for i, j in _cycle_edges(cyc):
                mult[(min(i, j), max(i, j))] += 1
        edges = tuple(sorted((i, j, k) for (i, j), k in mult.items()))
        lens = {(i, j): float(lengths[(i, j)]) for i, j, _ in edges}
        total = math.fsum(k * lens[(i, j)] for i, j, k in edges)
        return cls(n, edges, tuple(canon), lens, total)

    def edge_length(self, i: int, j: int) -> float:
        return self.lengths[(min(i, j), max(i, j))]

    def to_list(self) -> list[list[int]]:
        return [[i, j, k] for i, j, k in self.edges]


def _canonical_cycle(cyc: list[int]) -> tuple[int, ...]:
    if len(cyc) < 2:
        raise ValueError(f"cycle {cyc} is too short")
    k = cyc.index(min(cyc))
    cyc = cyc[k:] + cyc[:k]
    if len(cyc) > 2 and cyc[-1] < cyc[1]:
        cyc = [cyc[0]] + cyc[:0:-1]
    return tuple(cyc)


def _cycle_edges(cyc: tuple[int, ...]) -> list[tuple[int, int]]:
    if len(cyc) == 2:
        return [(cyc[0], cyc[1]), (cyc[1], cyc[0])]
    return [(cyc[t], cyc[(t + 1) % len(cyc)]) for t in range(len(cyc))]


GraphLike = Union[BipartiteGraph, MetricInstance]


def _length(g: GraphLike, i: int, j: int) -> Optional[float]:
    """Edge length in the base graph, or None if ``(i, j)`` is not an edge."""
    if i == j:
        return None
    if isinstance(g, BipartiteGraph):
        return g.weights.get((i, j))
    return g.distance(i, j)


def double_cover(n: int, edges: Iterable[tuple[int, int, float]],
                 dense: Optional[bool] = None) -> BipartiteGraph:
    """Bipartite double cover: each edge ``(i, j, w)`` of the base graph
    becomes red ``i`` -- blue ``j`` and red ``j`` -- blue ``i``, both weight w."""
    doubled = []
    for i, j, w in edges:
        if i == j:
            raise ValueError(f"self-loop at vertex {i}")
        doubled.append((i, j, w))
        doubled.append((j, i, w))
    return BipartiteGraph.from_edges(n, n, doubled, dense=dense)


def double_cover_complete(inst: MetricInstance) -> BipartiteGraph:
    """Double cover of the complete graph on the instance, as a dense graph."""
    mat = inst.distance_matrix()
    np.fill_diagonal(mat, np.inf)
    return BipartiteGraph.from_matrix(mat)


def matching_to_cover(m: MatchingWithDuals, g2: BipartiteGraph) -> CycleCover:
    """Cycle cover from a perfect matching of the double cover ``g2``."""
    n = g2.n_left
    if g2.n_right != n or not m.is_perfect():
        raise ValueError("matching is not perfect on a double cover")
    sigma = m.mate_left
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = []
        v = start
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = sigma[v]
        cycles.append(cyc)
    lengths = {}
    for u, v in enumerate(sigma):
        lengths[(min(u, v), max(u, v))] = g2.weights[(u, v)]
    return CycleCover.from_cycles(n, cycles, lengths)


def cover_to_matching(c: CycleCover) -> list[tuple[int, int]]:
    """Perfect matching of the double cover as ``(red, blue)`` pairs, one per
    vertex, following each cycle in its canonical orientation."""
    ok, report = validate_cover(c)
    if not ok:
        raise ValueError(f"invalid cycle cover: {report}")
    pairs = []
    for cyc in c.cycles:
        for t, v in enumerate(cyc):
            pairs.append((v, cyc[(t + 1) % len(cyc)]))
    pairs.sort()
    return pairs


def split_even_cycles(c: CycleCover) -> CycleCover:
    """Replace every even cycle of length >= 4 by 2-cycles on the lighter of
    its two alternating perfect matchings. Never increases the weight."""
    cycles: list[tuple[int, ...]] = []
    for cyc in c.cycles:
        k = len(cyc)
        if k < 4 or k % 2:
            cycles.append(cyc)
            continue
        es = [(min(cyc[t], cyc[(t + 1) % k]), max(cyc[t], cyc[(t + 1) % k])) for t in range(k)]
        halves = [es[0::2], es[1::2]]
        weights = [math.fsum(c.lengths[e] for e in h) for h in halves]
        if weights[0] != weights[1]:
            pick = 0 if weights[0] < weights[1] else 1
        else:
            pick = 0 if min(halves[0]) < min(halves[1]) else 1
        cycles.extend(halves[pick])
    return CycleCover.from_cycles(c.n, cycles, c.lengths)


@dataclass
class CoverReport:
    degree_errors: dict[int, int] = field(default_factory=dict)
    bad_multiplicity: list[tuple[int, int, int]] = field(default_factory=list)
    non_edges: list[tuple[int, int]] = field(default_factory=list)
    bad_cycles: list[tuple[int, ...]] = field(default_factory=list)
    weight_error: float = 0.0

    @property
    def ok(self) -> bool:
        return not (self.degree_errors or self.bad_multiplicity or self.non_edges
                    or self.bad_cycles or self.weight_error)


def validate_cover(c: CycleCover, g: Optional[GraphLike] = None,
                   tol: float = 1e-9) -> tuple[bool, CoverReport]:
    """Check degree 2 everywhere, multiplicities in {1, 2}, that edges exist
    in ``g`` with the recorded lengths, that the cycle list matches the edge
    list, and that the total weight adds up."""
    rep = CoverReport()
    deg = [0] * c.n
    for i, j, k in c.edges:
        if not (0 <= i < c.n and 0 <= j < c.n) or i == j:
            rep.non_edges.append((i, j))
            continue
        if k not in (1, 2):
            rep.bad_multiplicity.append((i, j, k))
        deg[i] += k
        deg[j] += k
        if g is not None:
            w = _length(g, i, j)
            rec = c.lengths.get((i, j))
            if w is None or rec is None or abs(w - rec) > tol * (1.0 + abs(w)):
                rep.non_edges.append((i, j))
    for v, dv in enumerate(deg):
        if dv != 2:
            rep.degree_errors[v] = dv
    mult: Counter = Counter()
    for cyc in c.cycles:
        if len(cyc) < 2 or len(set(cyc)) != len(cyc):
            rep.bad_cycles.append(cyc)
            continue
        for i, j in _cycle_edges(cyc):
            mult[(min(i, j), max(i, j))] += 1
    listed = {(i, j): k for i, j, k in c.edges}
    if dict(mult) != listed:
        for cyc in c.cycles:
            es = [(min(i, j), max(i, j)) for i, j in _cycle_edges(cyc)]
            if any(listed.get(e) != mult[e] for e in es) and cyc not in rep.bad_cycles:
                rep.bad_cycles.append(cyc)
    try:
        total = math.fsum(k * c.lengths[(i, j)] for i, j, k in c.edges)
        if abs(total - c.total_weight) > tol * (1.0 + abs(total)):
            rep.weight_error = total - c.total_weight
    except KeyError:
        rep.weight_error = math.inf
    return rep.ok, rep
