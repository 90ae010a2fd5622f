"""Oblivious baseline path selectors: SPF, ECMP, KSP and load-balanced
routing through random intermediates (VLB).

All four consume only the topology (never demands), route on the switch
subgraph under latency weights, and prepend/append the host stub edges to
every emitted path.  Outputs are deterministic: equal-cost alternatives are
resolved by hop count and then lexicographic node sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import graphops
from .model import Scheme, Topology, attach_stubs, normalized


@dataclass(frozen=True)
class KspConfig:
    """Number of shortest loopless paths to keep per pair."""

    k: int = 4

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


def _pair_switches(topo: Topology):
    for src in topo.hosts:
        for dst in topo.hosts:
            if src != dst:
                yield (src, dst), topo.host_switch(src), topo.host_switch(dst)


def spf(topo: Topology) -> Scheme:
    """One shortest path per pair, probability 1."""
    adj = graphops.switch_graph(topo)
    lengths = graphops.weight_lengths(topo)
    best = {s: graphops.dijkstra(adj, lengths, s)[1] for s in topo.switches}
    scheme: Scheme = {}
    for pair, s_sw, d_sw in _pair_switches(topo):
        path = best[s_sw][d_sw]
        scheme[pair] = {attach_stubs(topo, *pair, path): 1.0}
    return scheme


def ecmp(topo: Topology) -> Scheme:
    """Every minimum-cost simple path per pair, uniform probabilities."""
    adj = graphops.switch_graph(topo)
    lengths = graphops.weight_lengths(topo)
    scheme: Scheme = {}
    cache: dict[tuple[str, str], list] = {}
    for pair, s_sw, d_sw in _pair_switches(topo):
        if (s_sw, d_sw) not in cache:
            if s_sw == d_sw:
                cache[(s_sw, d_sw)] = [(s_sw,)]
            else:
                cache[(s_sw, d_sw)] = graphops.min_cost_paths(adj, lengths, s_sw, d_sw)
        paths = cache[(s_sw, d_sw)]
        share = 1.0 / len(paths)
        scheme[pair] = {attach_stubs(topo, *pair, p): share for p in paths}
    return scheme


def ksp(topo: Topology, cfg: KspConfig = KspConfig()) -> Scheme:
    """The k shortest loopless paths per pair, uniform probabilities.

    Pairs with fewer than k distinct simple paths keep what exists.
    """
    adj = graphops.switch_graph(topo)
    lengths = graphops.weight_lengths(topo)
    scheme: Scheme = {}
    cache: dict[tuple[str, str], list] = {}
    for pair, s_sw, d_sw in _pair_switches(topo):
        if (s_sw, d_sw) not in cache:
            if s_sw == d_sw:
                cache[(s_sw, d_sw)] = [(s_sw,)]
            else:
                cache[(s_sw, d_sw)] = graphops.k_shortest_paths(
                    adj, lengths, s_sw, d_sw, cfg.k)
        paths = cache[(s_sw, d_sw)]
        share = 1.0 / len(paths)
        scheme[pair] = {attach_stubs(topo, *pair, p): share for p in paths}
    return scheme


def vlb(topo: Topology) -> Scheme:
    """Route via every possible intermediate switch, splitting uniformly.

    For a pair on switches (S, T), each intermediate i not in {S, T}
    contributes the concatenation of the shortest S->i and i->T paths,
    loop-shortcut to a simple path.  Concatenations that collapse to the
    same simple path merge by summing their probability shares.  Pairs with
    no available intermediate (same switch, or a two-switch network) fall
    back to the direct shortest path.
    """
    if len(topo.switches) < 2:
        raise ValueError("load-balanced routing needs at least 2 switches")
    adj = graphops.switch_graph(topo)
    lengths = graphops.weight_lengths(topo)
    best = {s: graphops.dijkstra(adj, lengths, s)[1] for s in topo.switches}
    scheme: Scheme = {}
    for pair, s_sw, d_sw in _pair_switches(topo):
        intermediates = [i for i in topo.switches if i not in (s_sw, d_sw)]
        if s_sw == d_sw or not intermediates:
            path = (s_sw,) if s_sw == d_sw else best[s_sw][d_sw]
            scheme[pair] = {attach_stubs(topo, *pair, path): 1.0}
            continue
        share = 1.0 / len(intermediates)
        dist: dict = {}
        for i in intermediates:
            walk = graphops.concatenate(best[s_sw][i], best[i][d_sw])
            path = attach_stubs(topo, *pair, graphops.shortcut(walk))
            dist[path] = dist.get(path, 0.0) + share
        scheme[pair] = normalized(dist)
    return scheme
