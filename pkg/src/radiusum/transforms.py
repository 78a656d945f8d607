"""Reductions to the unconstrained radius-sum problem.

* Radii bounded below by ``delta``: shrink every distance by ``2 delta``,
  restore the triangle inequality by shortest-path closure, solve, and add
  ``delta`` back.
* Star embedding with minimum total hub distance: solve on
  ``2D - d`` (D the diameter) and read hub distances off as ``D - r``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from radiusum.metric import MetricError, MetricInstance, build_instance, diameter, feasibility_tolerance
from radiusum.solver import BallAssignment, solve_general

log = logging.getLogger(__name__)


class InfeasibleError(ValueError):
    """The requested constraints admit no solution."""


@dataclass
class ConstrainedSolution:
    radii: np.ndarray
    value: float
    delta: float
    shrunk: np.ndarray          # d - 2 delta, off the diagonal
    closure: MetricInstance     # shortest-path closure of ``shrunk``
    inner: BallAssignment       # unconstrained solution on ``closure``


@dataclass
class StarEmbedding:
    h: np.ndarray
    total: float
    diameter: float
    flipped: MetricInstance     # 2D - d off the diagonal
    inner: BallAssignment
    negative_hubs: list[int] = field(default_factory=list)


def path_closure(matrix: np.ndarray) -> np.ndarray:
    """All-pairs shortest-path distances of a complete graph (Floyd-Warshall,
    O(n^3)).

    Rounding can leave a triangle violated by an ulp after one pass, so
    passes repeat until nothing changes; the result is then a fixpoint and
    closing it again is a no-op.
    """
    d = np.array(matrix, dtype=float)
    n = d.shape[0]
    for _ in range(n + 2):
        before = d.copy()
        for k in range(n):
            np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
        if np.array_equal(d, before):
            return d
    raise RuntimeError("shortest-path closure did not settle")


def lower_bounded_radii(inst: MetricInstance, delta: float) -> ConstrainedSolution:
    """Maximum radius sum subject to every radius being at least ``delta``.

    Raises:
        InfeasibleError: if ``2 * delta`` exceeds the smallest pairwise
            distance (the ``delta`` balls would already overlap).
        ValueError: if ``delta`` is negative.
    """
    delta = float(delta)
    if not delta >= 0:
        raise ValueError(f"minimum radius must be nonnegative, got {delta}")
    d = inst.distance_matrix()
    n = inst.n
    if n >= 2:
        closest = float(d[~np.eye(n, dtype=bool)].min())
        if 2 * delta > closest:
            raise InfeasibleError(
                f"minimum radius {delta:g} exceeds half the closest-pair distance {closest / 2:g}")
    shrunk = d - 2 * delta
    np.fill_diagonal(shrunk, 0.0)
    np.maximum(shrunk, 0.0, out=shrunk)
    closure = path_closure(shrunk)
    closure = build_instance(matrix=np.minimum(closure, closure.T))
    inner = solve_general(closure)
    radii = inner.radii + delta
    return ConstrainedSolution(radii, math.fsum(radii), delta, shrunk, closure, inner)


def star_embedding(inst: MetricInstance) -> StarEmbedding:
    """Hub distances ``h`` with ``h_i + h_j >= d(i, j)`` for all pairs and
    minimum total. Negative hub distances, if any, are reported in
    ``negative_hubs`` rather than clamped."""
    if inst.n < 2:
        raise MetricError("star embedding needs at least two points")
    big_d = diameter(inst)
    d = inst.distance_matrix()
    flipped = 2 * big_d - d
    np.fill_diagonal(flipped, 0.0)
    flipped = build_instance(matrix=flipped)
    inner = solve_general(flipped)
    h = big_d - inner.radii
    eps = feasibility_tolerance(inst)
    negative = [int(i) for i in np.nonzero(h < -eps)[0]]
    if negative:
        log.warning("star embedding has negative hub distances at %s", negative)
    # Reported as n·D minus the inner optimum so the two agree exactly.
    return StarEmbedding(h, inst.n * big_d - inner.value, big_d, flipped, inner, negative)
