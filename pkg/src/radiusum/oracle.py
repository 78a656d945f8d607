"""Brute-force oracles and certificate checks, independent of the solvers.

The optimum radius sum equals half the weight of a minimum cycle cover, and
oriented cycle covers of ``n`` points are exactly the permutations without
fixed points. Enumerating those gives ground truth for small ``n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from radiusum.metric import MetricInstance, feasibility_tolerance

MAX_ORACLE_N = 9


@dataclass(frozen=True)
class OracleResult:
    value: Union[float, Fraction]
    witness: tuple[int, ...]
    enumerated: int

    @property
    def cover_weight(self) -> Union[float, Fraction]:
        return 2 * self.value


@lru_cache(maxsize=None)
def _derangements(n: int) -> np.ndarray:
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8)
    keep = np.all(perms != np.arange(n, dtype=np.int8), axis=1)
    out = perms[keep]
    out.setflags(write=False)
    return out


def brute_force_optimum(inst_or_matrix: Union[MetricInstance, np.ndarray]) -> OracleResult:
    """Exact maximum radius sum by enumerating all fixed-point-free
    permutations. Integer distance matrices are summed exactly and the value
    is returned as a Fraction; ties go to the lexicographically smallest
    permutation."""
    if isinstance(inst_or_matrix, MetricInstance):
        mat = inst_or_matrix.distance_matrix()
    else:
        mat = np.asarray(inst_or_matrix, dtype=float)
    n = mat.shape[0]
    if not 2 <= n <= MAX_ORACLE_N:
        raise ValueError(f"oracle supports 2 <= n <= {MAX_ORACLE_N}, got {n}")
    perms = _derangements(n).astype(np.intp)
    rows = np.arange(n)
    if np.all(mat == np.round(mat)) and np.max(np.abs(mat)) < 2**52 / n:
        costs = mat.astype(np.int64)[rows, perms].sum(axis=1)
        k = int(np.argmin(costs))
        value: Union[float, Fraction] = Fraction(int(costs[k]), 2)
    else:
        costs = mat[rows, perms].sum(axis=1)
        k = int(np.argmin(costs))
        value = math.fsum(mat[rows, perms[k]]) / 2
    return OracleResult(value, tuple(int(x) for x in perms[k]), len(perms))


def witness_cover_edges(witness: Sequence[int]) -> set[tuple[int, int]]:
    """Undirected edges used by a permutation viewed as a cycle cover."""
    return {(min(i, j), max(i, j)) for i, j in enumerate(witness)}


class Feasibility(NamedTuple):
    ok: bool
    worst: Optional[tuple[int, int]]
    violation: float


def check_feasible(inst: MetricInstance, radii: Sequence[float],
                   eps: Optional[float] = None) -> Feasibility:
    """All-pairs check of ``r_i + r_j <= d(i, j)`` and ``r_i >= 0``.

    ``worst`` is the most violated pair (``(i, i)`` for a negative radius) and
    ``violation`` its excess; ``ok`` holds when that excess is within eps.
    """
    r = np.asarray(radii, dtype=float)
    if r.shape != (inst.n,):
        raise ValueError(f"expected {inst.n} radii, got shape {r.shape}")
    if eps is None:
        eps = feasibility_tolerance(inst)
    worst: Optional[tuple[int, int]] = None
    excess = 0.0
    if inst.n:
        k = int(np.argmin(r))
        if -r[k] > excess:
            worst, excess = (k, k), float(-r[k])
    for i in range(inst.n - 1):
        js = np.arange(i + 1, inst.n)
        over = r[i] + r[js] - inst.distances_from(i, js)
        k = int(np.argmax(over))
        if over[k] > excess:
            worst, excess = (i, int(js[k])), float(over[k])
    return Feasibility(excess <= eps, worst, excess)


@dataclass
class SlackReport:
    gaps: list[tuple[int, int, float]]
    value: float
    half_weight: float
    eps: float
    feasible: bool = True

    @property
    def max_gap(self) -> float:
        return max((abs(g) for _, _, g in self.gaps), default=0.0)

    @property
    def value_mismatch(self) -> float:
        return self.value - self.half_weight

    @property
    def optimal(self) -> bool:
        return (self.feasible and self.max_gap <= self.eps
                and abs(self.value_mismatch) <= self.eps * max(1, len(self.gaps)))


def lp_slack_report(inst: MetricInstance, radii: Sequence[float], cover,
                    eps: Optional[float] = None) -> SlackReport:
    """Complementary slackness between radii and a cycle cover: every cover
    edge must be tight and the radius sum must equal half the cover weight."""
    if eps is None:
        eps = feasibility_tolerance(inst)
    r = [float(x) for x in radii]
    gaps = []
    weight = 0.0
    parts = []
    for i, j, k in cover.edges:
        d = inst.distance(i, j)
        gaps.append((i, j, d - r[i] - r[j]))
        parts.append(k * d)
    weight = math.fsum(parts)
    feas = check_feasible(inst, r, eps)
    return SlackReport(gaps, math.fsum(r), weight / 2, eps, feas.ok)
