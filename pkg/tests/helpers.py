import itertools

import numpy as np
from radiusum.metric import build_instance


def random_instance(rng, n, kind="coords", dim=2, p=2.0):
    """Random coordinate instance, or a metric matrix from random L1 points
    pushed through a random monotone concave transform (still a metric)."""
    if kind == "coords":
        return build_instance(rng.random((n, dim)), p=p)
    pts = rng.random((n, 3))
    d = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=-1)
    d = d ** rng.uniform(0.3, 1.0)
    np.fill_diagonal(d, 0.0)
    return build_instance(matrix=d)


def brute_bipartite(n_left, n_right, weights):
    """(max cardinality, min weight at that cardinality) by dynamic
    programming over subsets of used right vertices. ``weights`` maps
    (u, v) to w."""
    best = {0: (0, 0.0)}
    for u in range(n_left):
        nxt = dict(best)
        for mask, (card, wt) in best.items():
            for v in range(n_right):
                if mask >> v & 1 or (u, v) not in weights:
                    continue
                key = mask | 1 << v
                cand = (card + 1, wt + weights[(u, v)])
                old = nxt.get(key)
                if old is None or (-cand[0], cand[1]) < (-old[0], old[1]):
                    nxt[key] = cand
        best = nxt
    return min(best.values(), key=lambda t: (-t[0], t[1]))


def brute_assignment(w):
    """Minimum over all permutations of a square weight matrix."""
    n = len(w)
    return min(sum(w[i][s[i]] for i in range(n)) for s in itertools.permutations(range(n)))




def certificate_problems(inst, sol, g2):
    """Everything the duality checks object to in a solver result on the
    double cover ``g2`` it was computed from (empty when all pass)."""
    from radiusum.cover import cover_to_matching
    from radiusum.matching import matching_from_pairs, verify_duals
    from radiusum.oracle import check_feasible, lp_slack_report

    out = []
    feas = check_feasible(inst, sol.radii)
    if not feas.ok:
        out.append(f"overlap {feas.violation} at {feas.worst}")
    m = matching_from_pairs(g2, cover_to_matching(sol.cover), sol.a, sol.b)
    check = verify_duals(g2, m)
    if not check.ok:
        out.append(f"duals {check.violations[:3]}")
    if abs(sol.value - sol.cover.total_weight / 2) > 1e-9 * (1 + sol.value):
        out.append(f"value {sol.value} vs half cover {sol.cover.total_weight / 2}")
    rep = lp_slack_report(inst, sol.radii, sol.cover)
    if not rep.optimal:
        out.append(f"slack gap {rep.max_gap}, mismatch {rep.value_mismatch}")
    return out


def lp_max_radii(matrix, lower=0.0):
    """Maximum of sum(r) subject to r_i + r_j <= d_ij and r_i >= lower,
    solved directly as a linear program."""
    from scipy.optimize import linprog

    d = np.asarray(matrix, dtype=float)
    n = d.shape[0]
    rows, rhs = [], []
    for i, j in itertools.combinations(range(n), 2):
        row = np.zeros(n)
        row[i] = row[j] = 1.0
        rows.append(row)
        rhs.append(d[i, j])
    res = linprog(-np.ones(n), A_ub=np.array(rows) if rows else None,
                  b_ub=np.array(rhs) if rhs else None,
                  bounds=[(lower, None)] * n, method="highs")
    assert res.status == 0, res.message
    return -res.fun


def lp_min_star(matrix):
    """Minimum of sum(h) subject to h_i + h_j >= d_ij, as a linear program."""
    from scipy.optimize import linprog

    d = np.asarray(matrix, dtype=float)
    n = d.shape[0]
    rows, rhs = [], []
    for i, j in itertools.combinations(range(n), 2):
        row = np.zeros(n)
        row[i] = row[j] = -1.0
        rows.append(row)
        rhs.append(-d[i, j])
    res = linprog(np.ones(n), A_ub=np.array(rows), b_ub=np.array(rhs),
                  bounds=[(None, None)] * n, method="highs")
    assert res.status == 0, res.message
    return res.fun
