"""Min-max-congestion flow solving by multiplicative weights.

The solver maintains a weight per switch edge (a point on the simplex) and
repeatedly routes every commodity along its shortest path under lengths
w(e)/c(e), then multiplicatively inflates the weights of the edges the
iteration loaded.  Averaging the per-iteration routings yields a fractional
flow whose max utilization converges to the optimum; by LP duality the same
lengths give a lower bound sum_j d_j * dist(j) on any routing's max
congestion, so the loop stops exactly when the averaged flow is within the
requested factor of the bound.  The returned solution therefore carries a
certified optimality gap rather than a heuristic one.

``semi_mcf`` runs the same machinery with each commodity's path choice
restricted to a fixed base path set, which is how fixed-path schemes get
their sending rates re-balanced as demands evolve.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import graphops
from .baseline import spf
from .model import (Path, Scheme, Topology, TopologyError, TrafficMatrix,
                    attach_stubs, normalized, path_edges)

#: Paths carrying less than this probability are dropped and the rest
#: renormalized; keeps emitted schemes close to one path per pair when the
#: optimum is concentrated.
PRUNE_BELOW = 1e-6


class PhaseLimitError(RuntimeError):
    """Solver hit max_phases before certifying the requested gap.

    The best solution found so far is attached as ``.solution``.
    """

    def __init__(self, message: str, solution: "FlowSolution"):
        super().__init__(message)
        self.solution = solution


class MissingPathsError(ValueError):
    """A base scheme lacks paths for pairs with positive demand."""

    def __init__(self, pairs: Sequence[tuple[str, str]]):
        super().__init__(f"base scheme has no path for pairs: {sorted(pairs)}")
        self.pairs = tuple(sorted(pairs))


class EmptyWindowError(ValueError):
    """Demand envelope of an empty sequence."""


class DisconnectedScenarioError(ValueError):
    """Removing a candidate failure link would partition the network."""

    def __init__(self, link: tuple[str, str]):
        super().__init__(f"removing link {link} disconnects the topology")
        self.link = link


@dataclass(frozen=True)
class MwConfig:
    """Solver knobs.  ``accuracy`` is the certified multiplicative gap:
    returned max congestion <= (1 + accuracy) * optimum."""

    accuracy: float = 0.05
    max_phases: int = 5000
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.accuracy <= 0.5):
            raise ValueError("accuracy must lie in (0, 0.5]")
        if self.max_phases < 1:
            raise ValueError("max_phases must be >= 1")


@dataclass
class FlowSolution:
    scheme: Scheme
    max_congestion: float
    per_edge_util: dict[tuple[str, str], float]
    solve_time: float
    iterations: int = 0
    lower_bound: float = 0.0

    def to_report(self) -> str:
        lines = [f"max_congestion {self.max_congestion!r}",
                 f"solve_time {self.solve_time:.6f}"]
        for pair in sorted(self.scheme):
            for path, prob in sorted(self.scheme[pair].items()):
                lines.append(f"{pair[0]} {pair[1]} {prob!r} {'-'.join(path)}")
        return "\n".join(lines) + "\n"


def evaluate_scheme(topo: Topology, scheme: Scheme, tm: TrafficMatrix,
                    ) -> tuple[float, dict[tuple[str, str], float]]:
    """Exact per-edge utilization of a scheme under a demand matrix."""
    util = {k: 0.0 for k in topo.edges}
    for pair, dist in scheme.items():
        demand = tm.get(*pair)
        if demand == 0:
            continue
        for path, prob in dist.items():
            share = demand * prob
            for hop in path_edges(path):
                util[hop] += share
    for k, e in topo.edges.items():
        util[k] /= e.capacity
    max_c = max(util.values(), default=0.0)
    return max_c, util


def _solution(topo, scheme, tm, t0, iterations, lower_bound) -> FlowSolution:
    max_c, util = evaluate_scheme(topo, scheme, tm)
    return FlowSolution(scheme, max_c, util, time.perf_counter() - t0,
                        iterations, lower_bound)


#: Multiplicative-weights learning rate.  Decoupled from the certified
#: accuracy: the primal/dual certificate alone guarantees the returned gap,
#: the rate only affects how fast the certificate is reached.
MW_ETA = 0.25


def _mw_core(topo: Topology, commodities: list[tuple], shortest_fn,
             cfg: MwConfig, switch_edges: list[tuple[str, str]]):
    """Shared multiplicative-weights loop.

    ``commodities`` is a list of (key, normalized_demand); ``shortest_fn``
    maps current lengths to {key: (path, switch_hop_index_array, dist)}
    where dist is the length of the chosen path over its switch hops and
    the index array refers to positions in ``switch_edges``.  Returns (path
    counts per key, iterations, certified normalized lower bound) for the
    best averaged iterate.
    """
    m = len(switch_edges)
    cap = np.array([topo.edges[e].capacity for e in switch_edges])
    chat = cap / cap.max()
    w = np.full(m, 1.0 / m)
    load_sum = np.zeros(m)
    counts: dict = {key: {} for key, _ in commodities}
    best = None  # (ub, snapshot counts, t)
    best_lb = 0.0
    grow = 1.0 + cfg.accuracy
    log_eta = math.log1p(MW_ETA)

    for t in range(1, cfg.max_phases + 1):
        lengths = w / chat
        routed = shortest_fn(lengths)
        lb = sum(d * routed[key][2] for key, d in commodities)
        best_lb = max(best_lb, lb)
        load = np.zeros(m)
        for key, d in commodities:
            path, hop_idx = routed[key][0], routed[key][1]
            counts[key][path] = counts[key].get(path, 0) + 1
            load[hop_idx] += d
        load_sum += load
        ub = float((load_sum / chat).max() / t)
        if best is None or ub < best[0]:
            best = (ub, {key: dict(c) for key, c in counts.items()}, t)
        if best[0] <= grow * best_lb:
            return best[1], best[2], best_lb, t, True
        w = w * np.exp(np.minimum(load / chat, 1000.0) * log_eta)
        w /= w.sum()
    return best[1], best[2], best_lb, cfg.max_phases, False


def _counts_to_dist(counts: Mapping[Path, int], denom: int) -> dict[Path, float]:
    dist = {p: c / denom for p, c in counts.items()}
    kept = {p: v for p, v in dist.items() if v >= PRUNE_BELOW}
    return normalized(kept if kept else dist)


def mcf_mw(topo: Topology, tm: TrafficMatrix, cfg: MwConfig = MwConfig()
           ) -> FlowSolution:
    """Fractional flow minimizing the maximum link utilization.

    Demands are aggregated per switch pair and routed freely over the switch
    graph.  Pairs with zero demand receive their shortest path with
    probability 1 so every consumer downstream sees full pair coverage.
    Raises PhaseLimitError (solution attached) if the certificate is not
    reached within max_phases.
    """
    t0 = time.perf_counter()
    spf_scheme = spf(topo)
    scheme: Scheme = {}
    demands: dict[tuple[str, str], float] = {}
    pair_sw: dict[tuple[str, str], tuple[str, str]] = {}
    for src in topo.hosts:
        for dst in topo.hosts:
            if src == dst:
                continue
            s_sw, d_sw = topo.host_switch(src), topo.host_switch(dst)
            d = tm.get(src, dst)
            if d == 0 or s_sw == d_sw:
                scheme[(src, dst)] = spf_scheme[(src, dst)]
            else:
                pair_sw[(src, dst)] = (s_sw, d_sw)
                demands[(s_sw, d_sw)] = demands.get((s_sw, d_sw), 0.0) + d

    if not demands:
        return _solution(topo, scheme, tm, t0, 0, 0.0)

    d_ref = sum(demands.values())
    commodities = sorted((key, d / d_ref) for key, d in demands.items())
    switch_edges = sorted(graphops.weight_lengths(topo))
    edge_index = {e: i for i, e in enumerate(switch_edges)}
    adj = graphops.switch_graph(topo)
    sources = sorted({s for (s, _) in demands})
    targets = {s: sorted(d for (s2, d) in demands if s2 == s) for s in sources}
    hops_cache: dict[Path, np.ndarray] = {}

    def shortest_fn(lengths):
        lmap = dict(zip(switch_edges, lengths))
        out = {}
        for s in sources:
            dist, best = graphops.dijkstra(adj, lmap, s)
            for d in targets[s]:
                path = best[d]
                hops = hops_cache.get(path)
                if hops is None:
                    hops = np.array([edge_index[h] for h in path_edges(path)])
                    hops_cache[path] = hops
                out[(s, d)] = (path, hops, dist[d])
        return out

    counts, denom, lb, iters, converged = _mw_core(
        topo, commodities, shortest_fn, cfg, switch_edges)

    for pair, sw_key in pair_sw.items():
        dist = _counts_to_dist(counts[sw_key], denom)
        scheme[pair] = normalized({attach_stubs(topo, *pair, p): v
                                   for p, v in dist.items()})
    c_ref = max(topo.edges[e].capacity for e in switch_edges)
    sol = _solution(topo, scheme, tm, t0, iters, lb * d_ref / c_ref)
    if not converged:
        raise PhaseLimitError(
            f"no certificate after {cfg.max_phases} phases "
            f"(ub={sol.max_congestion:.4g})", sol)
    return sol


def semi_mcf(topo: Topology, tm: TrafficMatrix, base: Scheme,
             cfg: MwConfig = MwConfig()) -> FlowSolution:
    """Re-balance sending rates over a fixed base path set.

    Same objective and certificate as mcf_mw, but each pair may only use its
    base paths, so the output's path set per pair is a subset of the base.
    Pairs with zero demand keep their base distribution unchanged.
    """
    t0 = time.perf_counter()
    scheme: Scheme = {}
    commodities: list[tuple] = []
    missing = []
    d_ref = 0.0
    for pair, dist in base.items():
        d = tm.get(*pair)
        if d == 0:
            scheme[pair] = normalized(dist)
        elif not dist:
            missing.append(pair)
        else:
            d_ref += d
    for pair in tm.pairs():
        if tm.get(*pair) > 0 and pair not in base:
            missing.append(pair)
    if missing:
        raise MissingPathsError(missing)
    if d_ref == 0:
        return _solution(topo, scheme, tm, t0, 0, 0.0)

    # Strip host stubs for length computation: stubs are shared by all of a
    # pair's paths, so they never affect the argmin.  Path lengths for every
    # candidate are computed in one (paths x edges) matrix product.
    switch_edges = sorted(graphops.weight_lengths(topo))
    edge_index = {e: i for i, e in enumerate(switch_edges)}
    pairs = sorted(pair for pair in base if tm.get(*pair) > 0)
    flat_paths: list[Path] = []
    flat_hops: list[np.ndarray] = []
    group: list[tuple[int, int]] = []  # [start, stop) per pair
    for pair in pairs:
        start = len(flat_paths)
        for path in sorted(base[pair]):
            hops = np.array([edge_index[h] for h in path_edges(path)
                             if h in edge_index], dtype=int)
            flat_paths.append(path)
            flat_hops.append(hops)
        group.append((start, len(flat_paths)))
    incidence = np.zeros((len(flat_paths), len(switch_edges)))
    for i, hops in enumerate(flat_hops):
        incidence[i, hops] = 1.0

    commodities = sorted((pair, tm.get(*pair) / d_ref) for pair in pairs)

    def shortest_fn(lengths):
        plens = incidence @ lengths
        out = {}
        for pair, (start, stop) in zip(pairs, group):
            k = start + int(np.argmin(plens[start:stop]))
            out[pair] = (flat_paths[k], flat_hops[k], float(plens[k]))
        return out

    counts, denom, lb, iters, converged = _mw_core(
        topo, commodities, shortest_fn, cfg, switch_edges)

    for pair in pairs:
        scheme[pair] = _counts_to_dist(counts[pair], denom)
    c_ref = max(topo.edges[e].capacity for e in switch_edges)
    sol = _solution(topo, scheme, tm, t0, iters, lb * d_ref / c_ref)
    if not converged:
        raise PhaseLimitError(
            f"no certificate after {cfg.max_phases} phases "
            f"(ub={sol.max_congestion:.4g})", sol)
    return sol


def demand_envelope(tms: Sequence[TrafficMatrix]) -> TrafficMatrix:
    """Element-wise maximum across a window of traffic matrices."""
    if not tms:
        raise EmptyWindowError("demand envelope of an empty window")
    hosts = tms[0].hosts
    rates = tms[0].rates.copy()
    for tm in tms[1:]:
        if tm.hosts != hosts:
            raise ValueError("traffic matrices cover different host sets")
        rates = np.maximum(rates, tm.rates)
    return TrafficMatrix(hosts, rates)


def semi_mcf_env(topo: Topology, window: Sequence[TrafficMatrix],
                 cfg: MwConfig = MwConfig()) -> Scheme:
    """Base paths from solving the demand envelope of a window.

    The returned scheme's weights are the envelope solution's weights; they
    are meant to be re-solved per traffic matrix with semi_mcf at run time.
    """
    return mcf_mw(topo, demand_envelope(window), cfg).scheme


def semi_mcf_ft_env(topo: Topology, window: Sequence[TrafficMatrix],
                    failure_set: Iterable[tuple[str, str]] | None = None,
                    cfg: MwConfig = MwConfig()) -> Scheme:
    """Failure-tolerant base paths: union of envelope solutions across
    single-link failure scenarios (plus the intact topology), with uniform
    initial weights over each pair's union set."""
    if failure_set is None:
        failure_set = topo.links()
    scenarios: list[tuple[tuple[str, str], ...]] = [()]
    scenarios += [((a, b) if a < b else (b, a),) for (a, b) in failure_set]

    union: dict[tuple[str, str], set[Path]] = {}
    for scenario in scenarios:
        try:
            reduced = topo.without_links(scenario)
        except TopologyError:
            raise DisconnectedScenarioError(scenario[0]) from None
        part = semi_mcf_env(reduced, window, cfg)
        for pair, dist in part.items():
            union.setdefault(pair, set()).update(dist)

    scheme: Scheme = {}
    for pair, paths in union.items():
        share = 1.0 / len(paths)
        scheme[pair] = {p: share for p in sorted(paths)}
    return scheme


def optimal_mcf_step(topo_current: Topology, tm_actual: TrafficMatrix,
                     cfg: MwConfig = MwConfig()) -> FlowSolution:
    """Omniscient baseline: re-solve on the current (possibly
    failure-reduced) topology with the actual, unpredicted demands."""
    return mcf_mw(topo_current, tm_actual, cfg)
