"""Independent oracles for the algorithmic tests.

Everything here deliberately avoids the library's own routing machinery:
shortest paths come from exhaustive simple-path enumeration, and the
min-max-congestion reference solves the full path-based LP with scipy's
simplex-free HiGHS backend.
"""

import itertools

import numpy as np
from scipy.optimize import linprog

from tekit import graphops


def enumerate_simple_paths(adj, source, target):
    out = []

    def walk(path, seen):
        node = path[-1]
        if node == target:
            out.append(tuple(path))
            return
        for nbr in sorted(adj[node]):
            if nbr not in seen:
                walk(path + [nbr], seen | {nbr})

    walk([source], {source})
    return out


def path_cost(lengths, path):
    return sum(lengths[(path[i], path[i + 1])] for i in range(len(path) - 1))


def brute_shortest(adj, lengths, source, target):
    """Minimum (cost, hops, lexicographic) simple path by enumeration."""
    paths = enumerate_simple_paths(adj, source, target)
    return min(paths, key=lambda p: (path_cost(lengths, p), len(p), p))


def brute_min_cost_set(adj, lengths, source, target, tol=1e-9):
    paths = enumerate_simple_paths(adj, source, target)
    best = min(path_cost(lengths, p) for p in paths)
    return sorted((p for p in paths if path_cost(lengths, p) <= best + tol),
                  key=lambda p: (len(p), p))


def brute_k_shortest(adj, lengths, source, target, k):
    paths = enumerate_simple_paths(adj, source, target)
    ranked = sorted(paths, key=lambda p: (path_cost(lengths, p), len(p), p))
    return ranked[:k]


def lp_min_max_congestion(topo, commodities):
    """Exact min-max utilization over all simple switch paths (LP oracle).

    ``commodities`` is a list of (src_switch, dst_switch, demand).  Returns
    the optimal theta considering switch-switch edges only.
    """
    adj = graphops.switch_graph(topo)
    switch_edges = sorted(graphops.weight_lengths(topo))
    eidx = {e: i for i, e in enumerate(switch_edges)}
    caps = np.array([topo.edges[e].capacity for e in switch_edges])

    all_paths = []  # (commodity index, edge index list)
    for ci, (s, t, _) in enumerate(commodities):
        for p in enumerate_simple_paths(adj, s, t):
            hops = [eidx[(p[i], p[i + 1])] for i in range(len(p) - 1)]
            all_paths.append((ci, hops))

    n_vars = len(all_paths) + 1  # path flows + theta
    theta = n_vars - 1
    a_eq = np.zeros((len(commodities), n_vars))
    b_eq = np.array([d for (_, _, d) in commodities], dtype=float)
    for pi, (ci, _) in enumerate(all_paths):
        a_eq[ci, pi] = 1.0
    a_ub = np.zeros((len(switch_edges), n_vars))
    for pi, (_, hops) in enumerate(all_paths):
        for e in hops:
            a_ub[e, pi] = 1.0
    a_ub[:, theta] = -caps
    c = np.zeros(n_vars)
    c[theta] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(switch_edges)),
                  A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * n_vars,
                  method="highs")
    assert res.status == 0, res.message
    return float(res.x[theta])


def bellman_ford_distances(adj, lengths, source):
    """Independent shortest-path distances by dynamic programming."""
    dist = {n: float("inf") for n in adj}
    dist[source] = 0.0
    for _ in range(len(adj) - 1):
        changed = False
        for u in adj:
            for v in adj[u]:
                cand = dist[u] + lengths[(u, v)]
                if cand < dist[v] - 1e-15:
                    dist[v] = cand
                    changed = True
        if not changed:
            break
    return dist


def random_commodities(topo, rng, count):
    switches = list(topo.switches)
    pairs = [(a, b) for a, b in itertools.permutations(switches, 2)]
    picks = rng.choice(len(pairs), size=count, replace=False)
    return [(pairs[i][0], pairs[i][1], float(rng.uniform(1.0, 20.0)))
            for i in picks]
