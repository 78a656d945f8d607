"""Nonoverlapping metric balls with maximum sum of radii.

The package solves the radius-sum problem through its dual, the minimum
cycle cover, which in turn is a minimum-weight perfect matching on the
bipartite double cover of the point set.
"""

from radiusum.metric import MetricInstance, MetricReport, MetricError, build_instance
from radiusum.matching import BipartiteGraph, MatchingWithDuals, min_weight_matching
from radiusum.cover import CycleCover
from radiusum.solver import BallAssignment, OptimalityCertificate, solve_general
from radiusum.geometry import solve_euclidean
from radiusum.transforms import lower_bounded_radii, star_embedding

__all__ = [
    "MetricInstance",
    "MetricReport",
    "MetricError",
    "build_instance",
    "BipartiteGraph",
    "MatchingWithDuals",
    "min_weight_matching",
    "CycleCover",
    "BallAssignment",
    "OptimalityCertificate",
    "solve_general",
    "solve_euclidean",
    "lower_bounded_radii",
    "star_embedding",
]
