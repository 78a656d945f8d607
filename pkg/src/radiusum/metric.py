"""Finite metric spaces: coordinate point sets under an L_p norm, or explicit
distance matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np


class MetricError(ValueError):
    """Raised when an input does not describe a valid finite metric space."""


@dataclass(frozen=True)
class MetricReport:
    symmetric: bool
    nonnegative: bool
    zero_diagonal: bool
    triangle_violations: list[tuple[int, int, int, float]] = field(default_factory=list)

    @property
    def is_metric(self) -> bool:
        return (self.symmetric and self.nonnegative and self.zero_diagonal
                and not self.triangle_violations)


def _norm_rows(diff: np.ndarray, p: float) -> np.ndarray:
    """L_p norm along the last axis."""
    a = np.abs(diff)
    if p == 2.0:
        return np.sqrt(np.einsum("...i,...i->...", a, a))
    if p == 1.0:
        return a.sum(axis=-1)
    if math.isinf(p):
        return a.max(axis=-1) if a.shape[-1] else np.zeros(a.shape[:-1])
    return (a ** p).sum(axis=-1) ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class MetricInstance:
    """Immutable set of n points with a distance function.

    Exactly one of ``points`` (with norm exponent ``p``) or ``matrix`` is set.
    Distances between coordinate points are computed on demand.
    """

    n: int
    kind: str
    points: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None
    p: float = 2.0

    @property
    def is_coordinate(self) -> bool:
        return self.kind == "coordinates"

    @property
    def dim(self) -> int:
        if self.points is None:
            raise MetricError("matrix instances have no dimension")
        return int(self.points.shape[1])

    def distance(self, i: int, j: int) -> float:
        return distance(self, i, j)

    def distances_from(self, i: int, js: Optional[np.ndarray] = None) -> np.ndarray:
        """Distances from point ``i`` to the points ``js`` (all points by default)."""
        if js is None:
            js = np.arange(self.n)
        js = np.asarray(js, dtype=np.intp)
        if self.matrix is not None:
            return self.matrix[i, js].copy()
        lo = np.minimum(i, js)
        hi = np.maximum(i, js)
        return _norm_rows(self.points[lo] - self.points[hi], self.p)

    def distance_matrix(self) -> np.ndarray:
        """Full n x n distance matrix (materialized; O(n^2) memory)."""
        if self.matrix is not None:
            return self.matrix.copy()
        out = np.zeros((self.n, self.n))
        for i in range(self.n - 1):
            row = self.distances_from(i, np.arange(i + 1, self.n))
            out[i, i + 1:] = row
            out[i + 1:, i] = row
        return out

    def scaled(self, factor: float) -> "MetricInstance":
        if self.matrix is not None:
            return MetricInstance(self.n, self.kind, matrix=self.matrix * factor, p=self.p)
        return MetricInstance(self.n, self.kind, points=self.points * factor, p=self.p)

    def subset(self, idx: Sequence[int]) -> "MetricInstance":
        idx = np.asarray(idx, dtype=np.intp)
        if self.matrix is not None:
            return MetricInstance(len(idx), self.kind, matrix=self.matrix[np.ix_(idx, idx)], p=self.p)
        return MetricInstance(len(idx), self.kind, points=self.points[idx], p=self.p)


def distance(inst: MetricInstance, i: int, j: int) -> float:
    if not (0 <= i < inst.n and 0 <= j < inst.n):
        raise IndexError(f"point index out of range: ({i}, {j}) for n={inst.n}")
    if i == j:
        return 0.0
    if i > j:
        i, j = j, i
    if inst.matrix is not None:
        return float(inst.matrix[i, j])
    return float(inst.distances_from(i, np.array([j]))[0])


def triangle_tolerance(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return 1e-9 * float(np.max(np.abs(matrix)))


def check_metric_axioms(matrix, tol: Optional[float] = None) -> MetricReport:
    """Check symmetry, nonnegativity, zero diagonal and all triangle inequalities.

    Each triangle violation is reported once as ``(i, j, k, slack)`` with
    ``i < k``, meaning ``d(i, k) > d(i, j) + d(j, k)`` by ``slack``.
    O(n^3) time.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MetricError(f"distance matrix must be square, got shape {m.shape}")
    n = m.shape[0]
    if tol is None:
        tol = triangle_tolerance(m)
    symmetric = bool(np.array_equal(m, m.T))
    nonnegative = bool(np.all(m >= 0))
    zero_diagonal = bool(np.all(np.diag(m) == 0))
    violations: list[tuple[int, int, int, float]] = []
    iu = np.triu(np.ones((n, n), dtype=bool), k=1)
    for j in range(n):
        via = m[:, j][:, None] + m[j, :][None, :]
        slack = m - via
        bad = (slack > tol) & iu
        bad[j, :] = False
        bad[:, j] = False
        for i, k in zip(*np.nonzero(bad)):
            violations.append((int(i), j, int(k), float(slack[i, k])))
    violations.sort()
    return MetricReport(symmetric, nonnegative, zero_diagonal, violations)


def build_instance(points=None, *, matrix=None, p: float = 2.0) -> MetricInstance:
    """Validate and wrap a point set or a distance matrix.

    Raises:
        MetricError: on dimension mismatch, asymmetry, negative or non-finite
            entries, nonzero diagonal, or a triangle violation beyond
            ``1e-9 * max entry``.
    """
    if (points is None) == (matrix is None):
        raise MetricError("give exactly one of points or matrix")
    if matrix is not None:
        try:
            m = np.array(matrix, dtype=float)
        except ValueError as exc:
            raise MetricError(f"matrix rows have inconsistent lengths: {exc}") from None
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise MetricError(f"distance matrix must be square, got shape {m.shape}")
        if m.shape[0] < 1:
            raise MetricError("need at least one point")
        if not np.all(np.isfinite(m)):
            raise MetricError("distance matrix has non-finite entries")
        rep = check_metric_axioms(m)
        if not rep.symmetric:
            raise MetricError("distance matrix is not symmetric")
        if not rep.nonnegative:
            raise MetricError("distance matrix has a negative entry")
        if not rep.zero_diagonal:
            raise MetricError("distance matrix has a nonzero diagonal entry")
        if rep.triangle_violations:
            i, j, k, slack = rep.triangle_violations[0]
            raise MetricError(
                f"triangle violation at ({i},{j},{k}): d({i},{k}) exceeds "
                f"d({i},{j}) + d({j},{k}) by {slack:g}")
        m.setflags(write=False)
        return MetricInstance(m.shape[0], "matrix", matrix=m, p=p)

    p = float(p)
    if not (p >= 1.0):
        raise MetricError(f"norm exponent must be in [1, inf], got {p}")
    try:
        pts = np.array(points, dtype=float)
    except ValueError:
        raise MetricError("points do not all have the same dimension") from None
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise MetricError("points do not all have the same dimension")
    if pts.shape[0] < 1:
        raise MetricError("need at least one point")
    if not np.all(np.isfinite(pts)):
        raise MetricError("coordinates must be finite")
    pts.setflags(write=False)
    return MetricInstance(pts.shape[0], "coordinates", points=pts, p=p)


def diameter(inst: MetricInstance) -> float:
    if inst.n < 2:
        raise MetricError("diameter needs at least two points")
    if inst.matrix is not None:
        return float(inst.matrix.max())
    best = 0.0
    for i in range(inst.n - 1):
        row = _norm_rows(inst.points[i] - inst.points[i + 1:], inst.p)
        best = max(best, float(row.max()))
    return best


def parse_norm(name: str) -> float:
    """Map a metric name (``l1``, ``l2``, ``linf``, ``lp:<p>``) to its exponent."""
    name = name.strip().lower()
    if name == "l1":
        return 1.0
    if name == "l2":
        return 2.0
    if name == "linf":
        return math.inf
    if name.startswith("lp:"):
        try:
            p = float(name[3:])
        except ValueError:
            raise MetricError(f"bad norm exponent in {name!r}") from None
        if not p >= 1.0:
            raise MetricError(f"norm exponent must be in [1, inf], got {p}")
        return p
    raise MetricError(f"unknown metric {name!r}")


def _data_lines(lines: Iterable[str]) -> list[list[float]]:
    rows = []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError:
            raise MetricError(f"line {lineno}: not a list of numbers") from None
    return rows


def parse_points(text: str) -> np.ndarray:
    rows = _data_lines(text.splitlines())
    if not rows:
        raise MetricError("point file has no points")
    dim = len(rows[0])
    for k, row in enumerate(rows):
        if len(row) != dim:
            raise MetricError(f"point {k} has dimension {len(row)}, expected {dim}")
    return np.array(rows, dtype=float)


def parse_matrix(text: str) -> np.ndarray:
    rows = _data_lines(text.splitlines())
    if not rows or len(rows[0]) != 1 or rows[0][0] != int(rows[0][0]):
        raise MetricError("matrix file must start with the point count n")
    n = int(rows[0][0])
    body = rows[1:]
    if len(body) != n or any(len(r) != n for r in body):
        raise MetricError(f"matrix file must have {n} rows of {n} numbers")
    return np.array(body, dtype=float).reshape(n, n)


def load_points(path, p: float = 2.0) -> MetricInstance:
    return build_instance(parse_points(Path(path).read_text()), p=p)


def load_matrix(path) -> MetricInstance:
    return build_instance(matrix=parse_matrix(Path(path).read_text()))


def diameter_bound(inst: MetricInstance) -> float:
    """Exact diameter for small inputs; the bounding-box diagonal (at most
    twice the diameter) for large coordinate sets."""
    if inst.n < 2:
        return 0.0
    if inst.matrix is not None or inst.n <= 4096:
        return diameter(inst)
    span = inst.points.max(axis=0) - inst.points.min(axis=0)
    return float(_norm_rows(span, inst.p))


def feasibility_tolerance(inst: MetricInstance) -> float:
    """Absolute slack allowed in ``r_i + r_j <= d(i, j)`` checks."""
    return 1e-8 * (1.0 + diameter_bound(inst))
