"""Exact radius-sum solver for arbitrary finite metrics.

Minimum-weight perfect matching on the double cover of the complete graph
gives a minimum cycle cover; averaging the red and blue dual variables of
each point gives radii whose sum is half the cover weight.
"""

from __future__ import annotations

import math
import heapq
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from radiusum.cover import (CycleCover, double_cover, double_cover_complete,
                            matching_to_cover, split_even_cycles)
from radiusum.matching import BipartiteGraph, MatchingWithDuals, min_weight_matching
from radiusum.metric import MetricInstance, feasibility_tolerance

CERTIFIED = "certified-optimal"
INCONCLUSIVE = "inconclusive"
INFEASIBLE = "infeasible"


@dataclass
class BallAssignment:
    radii: np.ndarray
    value: float
    cover: Optional[CycleCover]
    a: np.ndarray
    b: np.ndarray
    eps: float = 0.0
    normalized: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.radii)


@dataclass
class OptimalityCertificate:
    verdict: str
    touching_graph: list[tuple[int, int]]
    component_shapes: list[tuple[tuple[int, ...], str]]
    tight_cover: Optional[CycleCover] = None
    worst_overlap: float = 0.0


def radii_from_duals(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """Average the two duals of each point: ``r_i = (a_i + b_i) / 2``."""
    return (np.asarray(a, dtype=float) + np.asarray(b, dtype=float)) / 2


def odd_cycle_radii(lengths: Sequence[float], eps: Optional[float] = None) -> np.ndarray:
    """Radii for the vertices of an odd cycle, given ``lengths[i]`` between
    vertex ``i`` and ``i + 1``. Each radius is half an alternating sum of the
    lengths, positive on the two edges at that vertex, so consecutive balls
    touch exactly.

    Raises ValueError if a radius comes out below ``-eps``: the cycle cannot
    then belong to a minimum cycle cover.
    """
    ell = np.asarray(lengths, dtype=float)
    k = len(ell)
    if k < 3 or k % 2 == 0:
        raise ValueError(f"need an odd cycle of length >= 3, got {k}")
    if eps is None:
        eps = 1e-8 * (1.0 + float(ell.sum()))
    signs = np.where(np.arange(k) % 2 == 0, 1.0, -1.0)
    r = np.array([math.fsum(signs * np.roll(ell, -j)) / 2 for j in range(k)])
    if r.min() < -eps:
        j = int(np.argmin(r))
        raise ValueError(f"radius {r[j]:g} at cycle position {j} is negative; "
                         f"cycle is not part of a minimum cover")
    return r


def assignment_from_matching(inst: MetricInstance, m: MatchingWithDuals,
                             g2: BipartiteGraph) -> BallAssignment:
    """Radii and cover from a perfect minimum-weight matching of a double
    cover whose edge set contains a minimum cycle cover."""
    if not m.is_perfect():
        raise RuntimeError(f"double cover has no perfect matching "
                           f"({m.cardinality} of {g2.n_left} matched)")
    cover = split_even_cycles(matching_to_cover(m, g2))
    eps = feasibility_tolerance(inst)
    moved = nonnegative_duals(g2, m, eps)
    radii = radii_from_duals(m.a, m.b)
    # Only rounding noise is left below zero here.
    np.maximum(radii, 0.0, out=radii)
    return BallAssignment(radii, math.fsum(radii), cover, m.a, m.b, eps, moved)


def nonnegative_duals(g2: BipartiteGraph, m: MatchingWithDuals,
                      eps: float = 0.0) -> list[int]:
    """Shift the duals of a perfect matching on a double cover so every
    averaged radius ``(a_i + b_i) / 2`` is nonnegative, keeping them feasible
    and tight. Modifies ``m`` in place; returns the left vertices whose dual
    changed.

    With the matching fixed, ``b`` is determined by ``a`` through the matched
    edges, and both feasibility and ``a_i + b_i >= 0`` become difference
    constraints on ``a``: an unmatched edge ``(u, v)`` with ``u2`` matched to
    ``v`` gives ``a_u <= a_u2 + w(u, v) - w(u2, v)``, and point ``i`` with red
    ``u2`` matched to blue ``i`` gives ``a_u2 <= a_i + w(u2, i)``. Any optimal
    nonnegative radii ``r`` satisfy the system with ``a = b = r``, so it is
    feasible, and relaxing from the current duals reaches a solution.
    """
    n = g2.n_left
    mate_l = m.mate_left
    mate_r = m.mate_right
    w = g2.weights
    a = m.a.tolist()
    b = m.b.tolist()
    bad = [i for i in range(n) if a[i] + b[i] < -eps]
    if not bad:
        return []
    # Label-correcting search, largest pending decrease first. Feasible
    # edges have nonnegative reduced cost, so this behaves like Dijkstra and
    # only the violated nonnegativity arcs can cause a vertex to be revisited.
    start = list(a)
    heap = [(-0.0, i) for i in bad]
    heapq.heapify(heap)
    changed = set()
    pops = 0
    cap = 4 * n * n + 16
    while heap:
        neg, x = heapq.heappop(heap)
        if -neg < start[x] - a[x]:
            continue
        pops += 1
        if pops > cap:
            raise RuntimeError("dual normalization did not converge")
        ax = a[x]
        v = mate_l[x]
        wx = w[(x, v)]
        u2 = mate_r[x]
        arcs = [(u, wu - wx) for u, wu in g2.adj_right[v] if u != x]
        arcs.append((u2, w[(u2, x)]))
        for y, c in arcs:
            cand = ax + c
            if cand < a[y] - 1e-15 * (1.0 + abs(a[y])):
                a[y] = cand
                changed.add(y)
                heapq.heappush(heap, (a[y] - start[y], y))
    for v in range(n):
        u = mate_r[v]
        b[v] = w[(u, v)] - a[u]
    m.a = np.array(a, dtype=float)
    m.b = np.array(b, dtype=float)
    return sorted(changed)


def solve_general(inst: MetricInstance) -> BallAssignment:
    """Optimal radii for any finite metric in O(n^3) time.

    A single point has no pair constraint and gets radius 0 by convention.
    """
    if inst.n == 1:
        z = np.zeros(1)
        return BallAssignment(z, 0.0, None, z.copy(), z.copy(), feasibility_tolerance(inst))
    g2 = double_cover_complete(inst)
    m = min_weight_matching(g2)
    return assignment_from_matching(inst, m, g2)


def touching_pairs(inst: MetricInstance, radii: np.ndarray, eps: float) -> tuple[list[tuple[int, int]], float]:
    pairs = []
    worst = max(0.0, float(-radii.min())) if len(radii) else 0.0
    for i in range(inst.n - 1):
        js = np.arange(i + 1, inst.n)
        slack = inst.distances_from(i, js) - radii[i] - radii[js]
        worst = max(worst, float(-slack.min()))
        for j in js[np.abs(slack) <= eps]:
            pairs.append((i, int(j)))
    return pairs, worst


def _components(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _shape(comp: list[int], edges: list[tuple[int, int]]) -> str:
    k = len(comp)
    if k == 1:
        return "isolated-vertex"
    if k == 2 and len(edges) == 1:
        return "isolated-edge"
    deg: dict[int, int] = {v: 0 for v in comp}
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    if len(edges) == k and all(d == 2 for d in deg.values()):
        return "odd-cycle" if k % 2 else "even-cycle"
    return "other"


def check_optimality_certificate(inst: MetricInstance, radii: Sequence[float],
                                 eps: Optional[float] = None) -> OptimalityCertificate:
    """Classify radii as certified-optimal, infeasible or inconclusive.

    Certified when the balls do not overlap and the touching graph contains
    a cycle cover (every component an odd cycle or an isolated edge is the
    simplest case). Such a cover is tight against the radii, so its half
    weight equals the radius sum and no larger sum is possible.
    """
    r = np.asarray(radii, dtype=float)
    if eps is None:
        eps = feasibility_tolerance(inst)
    touch, worst = touching_pairs(inst, r, eps)
    by_comp: dict[int, list[tuple[int, int]]] = {}
    comps = _components(inst.n, touch)
    where = {}
    for k, comp in enumerate(comps):
        for v in comp:
            where[v] = k
    for i, j in touch:
        by_comp.setdefault(where[i], []).append((i, j))
    shapes = [(tuple(c), _shape(c, by_comp.get(k, []))) for k, c in enumerate(comps)]
    if worst > eps:
        return OptimalityCertificate(INFEASIBLE, touch, shapes, None, worst)
    tight = _tight_cover(inst, touch) if touch else None
    verdict = CERTIFIED if tight is not None else INCONCLUSIVE
    return OptimalityCertificate(verdict, touch, shapes, tight, worst)


def _tight_cover(inst: MetricInstance, touch: list[tuple[int, int]]) -> Optional[CycleCover]:
    # A cycle cover inside the touching graph is a perfect matching of its
    # double cover; zero weights make this a pure cardinality question.
    g2 = double_cover(inst.n, [(i, j, 0.0) for i, j in touch], dense=False)
    m = min_weight_matching(g2)
    if not m.is_perfect():
        return None
    lengths = {(i, j): inst.distance(i, j) for i, j in touch}
    sigma = m.mate_left
    seen = [False] * inst.n
    cycles = []
    for s in range(inst.n):
        if seen[s]:
            continue
        cyc, v = [], s
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = sigma[v]
        cycles.append(cyc)
    return CycleCover.from_cycles(inst.n, cycles, lengths)
