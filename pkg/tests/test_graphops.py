import numpy as np
import pytest

from tekit import graphops

from conftest import random_topology
from helpers import brute_k_shortest, brute_min_cost_set, brute_shortest


def _adj_and_lengths(topo, unit=True):
    adj = graphops.switch_graph(topo)
    lengths = (graphops.unit_lengths(topo) if unit
               else graphops.weight_lengths(topo))
    return adj, lengths


@pytest.mark.parametrize("seed", range(8))
def test_dijkstra_matches_enumeration(seed):
    topo = random_topology(seed, n_switches=7, extra_links=4)
    adj, lengths = _adj_and_lengths(topo)
    switches = topo.switches
    for s in switches:
        _, best = graphops.dijkstra(adj, lengths, s)
        for t in switches:
            if s != t:
                assert best[t] == brute_shortest(adj, lengths, s, t)


@pytest.mark.parametrize("seed", range(8))
def test_min_cost_paths_matches_enumeration(seed):
    topo = random_topology(seed + 100, n_switches=7, extra_links=4)
    adj, lengths = _adj_and_lengths(topo)
    rng = np.random.default_rng(seed)
    switches = list(topo.switches)
    for _ in range(5):
        s, t = rng.choice(len(switches), size=2, replace=False)
        s, t = switches[s], switches[t]
        assert (graphops.min_cost_paths(adj, lengths, s, t)
                == brute_min_cost_set(adj, lengths, s, t))


@pytest.mark.parametrize("seed", range(8))
def test_yen_matches_brute_force_top_k(seed):
    topo = random_topology(seed + 200, n_switches=7, extra_links=4)
    adj, lengths = _adj_and_lengths(topo)
    rng = np.random.default_rng(seed)
    switches = list(topo.switches)
    for _ in range(4):
        s, t = rng.choice(len(switches), size=2, replace=False)
        s, t = switches[s], switches[t]
        got = graphops.k_shortest_paths(adj, lengths, s, t, 4)
        assert got == brute_k_shortest(adj, lengths, s, t, 4)


def test_yen_handles_fewer_paths_than_k(line4):
    adj, lengths = _adj_and_lengths(line4)
    assert graphops.k_shortest_paths(adj, lengths, "a", "d", 5) == [
        ("a", "b", "c", "d")]


def test_shortcut_removes_loops():
    assert graphops.shortcut(("a", "b", "c", "b", "d")) == ("a", "b", "d")
    assert graphops.shortcut(("a", "b", "a", "c")) == ("a", "c")
    assert graphops.shortcut(("a", "b", "c")) == ("a", "b", "c")
    # nested loops collapse fully
    assert graphops.shortcut(("a", "b", "c", "b", "c", "d", "a", "e")) == ("a", "e")


def test_shortcut_never_adds_edges():
    rng = np.random.default_rng(1)
    nodes = list("abcdef")
    for _ in range(100):
        walk = [nodes[rng.integers(6)] for _ in range(8)]
        walk = tuple(walk)
        cut = graphops.shortcut(walk)
        assert len(set(cut)) == len(cut)
        assert cut[0] == walk[0] and cut[-1] == walk[-1]
        walk_edges = set(zip(walk, walk[1:]))
        for e in zip(cut, cut[1:]):
            assert e in walk_edges


def test_concatenate_validates_junction():
    assert graphops.concatenate(("a", "b"), ("b", "c")) == ("a", "b", "c")
    with pytest.raises(ValueError):
        graphops.concatenate(("a", "b"), ("c", "d"))
