import math
from fractions import Fraction

import numpy as np
import pytest

from helpers import lp_max_radii, random_instance
from radiusum.cover import CycleCover
from radiusum.metric import build_instance
from radiusum.oracle import (brute_force_optimum, check_feasible, lp_slack_report,
                             witness_cover_edges)
from radiusum.solver import solve_general


def test_collinear(collinear):
    res = brute_force_optimum(collinear)
    assert res.value == 3
    assert res.cover_weight == 6
    assert witness_cover_edges(res.witness) == {(0, 1), (1, 2), (0, 2)}


def test_unit_square(unit_square):
    res = brute_force_optimum(unit_square)
    assert res.value == pytest.approx(2.0, abs=1e-15)
    assert res.enumerated == 9
    assert witness_cover_edges(res.witness) in ({(0, 1), (2, 3)}, {(1, 2), (0, 3)})


def test_two_points():
    res = brute_force_optimum(build_instance([[0.0], [5.0]]))
    assert res.value == 5 and res.witness == (1, 0)


def test_integer_matrix_exact():
    res = brute_force_optimum(np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]]))
    assert isinstance(res.value, Fraction) and res.value == 2


def test_size_limits():
    with pytest.raises(ValueError):
        brute_force_optimum(np.zeros((1, 1)))
    with pytest.raises(ValueError):
        brute_force_optimum(np.zeros((10, 10)))


def test_derangement_counts():
    # Subfactorials !n.
    for n, count in [(2, 1), (3, 2), (4, 9), (5, 44), (6, 265)]:
        assert brute_force_optimum(np.ones((n, n)) - np.eye(n)).enumerated == count


def test_matches_linear_program(rng):
    for k in range(40):
        n = int(rng.integers(2, 8))
        inst = random_instance(rng, n, "coords" if k % 2 else "matrix")
        assert brute_force_optimum(inst).value == pytest.approx(
            lp_max_radii(inst.distance_matrix()), abs=1e-9)


def test_feasible_examples(collinear):
    assert check_feasible(collinear, [1, 0, 2]).ok
    bad = check_feasible(build_instance([[0.0], [3.0]]), [2, 2])
    assert not bad.ok and bad.worst == (0, 1) and bad.violation == 1


def test_zero_radii_always_feasible(rng):
    for _ in range(10):
        inst = random_instance(rng, int(rng.integers(1, 12)))
        assert check_feasible(inst, np.zeros(inst.n)).ok


def test_negative_radius_reported(collinear):
    f = check_feasible(collinear, [1, -0.5, 2])
    assert not f.ok and f.worst == (1, 1) and f.violation == 0.5


def test_radii_shape_checked(collinear):
    with pytest.raises(ValueError):
        check_feasible(collinear, [1, 2])


def test_slack_solver_output(rng):
    for _ in range(20):
        inst = random_instance(rng, int(rng.integers(2, 20)))
        sol = solve_general(inst)
        rep = lp_slack_report(inst, sol.radii, sol.cover)
        assert rep.optimal and rep.max_gap <= rep.eps


def test_slack_scaled_radii(collinear):
    cover = CycleCover.from_cycles(3, [(0, 1, 2)], {(0, 1): 1.0, (1, 2): 2.0, (0, 2): 3.0})
    rep = lp_slack_report(collinear, np.array([1.0, 0.0, 2.0]) * 0.9, cover)
    assert all(g > 0 for _, _, g in rep.gaps if g)
    assert rep.max_gap == pytest.approx(0.3)
    assert not rep.optimal


def test_slack_value_mismatch(collinear):
    # Tight on the 2-cycle but the cover is not the minimum: weight 2 vs sum 1.
    cover = CycleCover.from_cycles(2, [(0, 1)], {(0, 1): 1.0})
    inst = collinear.subset([0, 1])
    rep = lp_slack_report(inst, [0.25, 0.25], cover)
    assert rep.value_mismatch == pytest.approx(-0.5)
    assert not rep.optimal


def test_slack_reports_infeasible(collinear):
    cover = CycleCover.from_cycles(3, [(0, 1, 2)], {(0, 1): 1.0, (1, 2): 2.0, (0, 2): 3.0})
    rep = lp_slack_report(collinear, [2.0, -1.0, 2.0], cover)
    assert not rep.feasible and not rep.optimal
    assert math.isclose(rep.value, 3.0)


def test_relabel_and_scale_invariance(rng):
    for _ in range(20):
        n = int(rng.integers(2, 8))
        inst = random_instance(rng, n)
        base = brute_force_optimum(inst).value
        perm = rng.permutation(n)
        assert brute_force_optimum(inst.subset(perm)).value == pytest.approx(base, abs=1e-12)
        assert brute_force_optimum(inst.scaled(3.0)).value == pytest.approx(3 * base, rel=1e-12)
