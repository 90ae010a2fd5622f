import math
import warnings

import pytest

import tekit
from tekit import graphops, validate_scheme
from tekit.demand import GravityState, gravity_tm, mh_step
from tekit.raecke import (RaeckeConfig, RoutingTree, frt_tree,
                          paths_from_distribution, raecke_distribution, stretch)

from conftest import build_topology, random_topology


@pytest.fixture(scope="module")
def single_edge():
    return build_topology("single", [("u", "v")])


@pytest.fixture(scope="module")
def star4():
    return build_topology("star4", [("hub", "a"), ("hub", "b"), ("hub", "c")])


def test_frt_single_edge_unique_tree(single_edge):
    lengths = graphops.unit_lengths(single_edge)
    tree = frt_tree(single_edge, lengths, seed=0)
    assert tree.clusters[0] == frozenset({"u", "v"})
    leaves = [c for c in tree.clusters if len(c) == 1]
    assert sorted(map(tuple, leaves)) == [("u",), ("v",)]
    for i, path in enumerate(tree.edge_paths):
        if tree.parent[i] is not None and len(path) > 1:
            assert set(zip(path, path[1:])) <= {("u", "v"), ("v", "u")}


def test_frt_leaves_biject_switches(abilene):
    lengths = graphops.unit_lengths(abilene)
    for seed in range(10):
        tree = frt_tree(abilene, lengths, seed)
        assert sorted(tree.leaf_index) == sorted(abilene.switches)
        singles = [c for c in tree.clusters if len(c) == 1]
        assert len(singles) == len(abilene.switches)
        # laminar: every non-root cluster is a strict subset of its parent
        for i, c in enumerate(tree.clusters):
            p = tree.parent[i]
            if p is not None:
                assert c < tree.clusters[p]


@pytest.mark.parametrize("seed", range(12))
def test_frt_walks_are_contiguous(seed):
    topo = random_topology(seed + 800, n_switches=7, extra_links=4)
    lengths = graphops.unit_lengths(topo)
    tree = frt_tree(topo, lengths, seed)
    for (u, v) in topo.links():
        walk = tree.walk(u, v)
        assert walk[0] == u and walk[-1] == v
        for hop in zip(walk, walk[1:]):
            assert hop in topo.edges


def test_stretch_single_edge_is_one(single_edge):
    lengths = graphops.unit_lengths(single_edge)
    tree = frt_tree(single_edge, lengths, seed=1)
    assert stretch(tree, single_edge, lengths) == pytest.approx(1.0)


def test_stretch_star_with_itself():
    topo = build_topology("star4", [("hub", "a"), ("hub", "b"), ("hub", "c")])
    members = frozenset({"hub", "a", "b", "c"})
    tree = RoutingTree(
        clusters=(members, frozenset({"hub"}), frozenset({"a"}),
                  frozenset({"b"}), frozenset({"c"})),
        parent=(None, 0, 0, 0, 0),
        reps=("hub", "hub", "a", "b", "c"),
        edge_paths=(("hub",), ("hub",), ("hub", "a"), ("hub", "b"),
                    ("hub", "c")),
        leaf_index={"hub": 1, "a": 2, "b": 3, "c": 4},
    )
    lengths = graphops.unit_lengths(topo)
    for (u, v) in topo.links():
        walk = tree.walk(u, v)
        assert graphops.path_cost(lengths, walk) / lengths[(u, v)] == 1.0
    assert stretch(tree, topo, lengths) >= 1.0


def test_stretch_at_least_one_under_metric_lengths(path8):
    lengths = graphops.unit_lengths(path8)
    for seed in range(20):
        tree = frt_tree(path8, lengths, seed)
        assert stretch(tree, path8, lengths) >= 1.0 - 1e-12


def test_frt_stretch_envelope_path8(path8):
    """200 seeded trees on the 8-switch line stay within the logarithmic
    stretch envelope."""
    lengths = graphops.unit_lengths(path8)
    bound = 32.0 * math.log(8)
    worst = 0.0
    for seed in range(200):
        tree = frt_tree(path8, lengths, seed)
        worst = max(worst, stretch(tree, path8, lengths))
    assert worst <= bound


def test_distribution_single_edge(single_edge):
    dist = raecke_distribution(single_edge, RaeckeConfig(seed=3))
    assert len(dist.trees) == 1
    assert dist.trees[0][1] == pytest.approx(1.0)


def test_distribution_abilene_diverse(abilene):
    dist = raecke_distribution(abilene, RaeckeConfig(seed=7))
    assert len(dist.trees) >= 2
    assert sum(p for _, p in dist.trees) == pytest.approx(1.0, abs=1e-9)
    assert all(p > 0 for _, p in dist.trees)


def test_distribution_lengths_monotone(abilene):
    dist = raecke_distribution(abilene, RaeckeConfig(seed=5))
    init = graphops.inverse_capacity_lengths(abilene)
    for edge, ln in dist.lengths_final.items():
        assert ln >= init[edge] - 1e-15


def test_distribution_deterministic(abilene):
    a = raecke_distribution(abilene, RaeckeConfig(seed=11)).serialize()
    b = raecke_distribution(abilene, RaeckeConfig(seed=11)).serialize()
    assert a.encode() == b.encode()
    c = raecke_distribution(abilene, RaeckeConfig(seed=12)).serialize()
    assert a != c


def test_distribution_iteration_limit_reported(abilene):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dist = raecke_distribution(abilene, RaeckeConfig(seed=1, max_iterations=1))
    assert dist.hit_iteration_limit
    assert dist.trees  # distribution still returned
    assert any("max_iterations" in str(w.message) for w in caught)


def test_paths_single_tree_deterministic(triangle):
    dist = raecke_distribution(triangle, RaeckeConfig(seed=2))
    one_tree = type(dist)(trees=(dist.trees[0][0], ), lengths_final={})
    # rebuild with a single tree at probability 1
    one_tree = type(dist)(trees=((dist.trees[0][0], 1.0),), lengths_final={})
    scheme = paths_from_distribution(one_tree, triangle)
    for pair, d in scheme.items():
        assert len(d) == 1
        assert sum(d.values()) == pytest.approx(1.0)


@pytest.mark.parametrize("topo_name", ["abilene", "triangle", "diamond"])
def test_paths_probabilities_sum_to_one(topo_name):
    topo = tekit.load_bundled_topology(topo_name)
    for seed in range(50):
        dist = raecke_distribution(topo, RaeckeConfig(seed=seed))
        scheme = paths_from_distribution(dist, topo)
        for pair, d in scheme.items():
            assert sum(d.values()) == pytest.approx(1.0, abs=1e-9)


def test_routing_tree_walk_concatenates_figure_fixture():
    """A 9-node fixture with a hand-built 3-level tree: the walk between
    distant leaves concatenates the per-edge physical paths into one
    contiguous physical walk."""
    topo = build_topology("nine", [
        ("A", "B"), ("B", "C"), ("C", "D"), ("A", "D"), ("C", "E"),
        ("E", "F"), ("D", "F"), ("E", "G"), ("F", "G"), ("G", "H"),
        ("F", "I"), ("H", "I")], hosts_on=["A", "G"])
    tree = RoutingTree(
        clusters=(
            frozenset("ABCDEFGHI"), frozenset("ABCDEF"), frozenset("G"),
            frozenset("H"), frozenset("I"), frozenset("ABCD"), frozenset("E"),
            frozenset("F"), frozenset("A"), frozenset("B"), frozenset("C"),
            frozenset("D"),
        ),
        parent=(None, 0, 0, 0, 0, 1, 1, 1, 5, 5, 5, 5),
        reps=("I", "E", "G", "H", "I", "C", "E", "F", "A", "B", "C", "D"),
        edge_paths=(
            ("I",), ("I", "F", "E"), ("I", "H", "G"), ("I", "H"), ("I",),
            ("E", "C"), ("E",), ("E", "F"), ("C", "B", "A"), ("C", "B"),
            ("C",), ("C", "D"),
        ),
        leaf_index={"A": 8, "B": 9, "C": 10, "D": 11, "E": 6, "F": 7,
                    "G": 2, "H": 3, "I": 4},
    )
    walk = tree.walk("A", "G")
    assert walk[0] == "A" and walk[-1] == "G"
    for hop in zip(walk, walk[1:]):
        assert hop in topo.edges
    # the sub-paths A->C (via the first tree edge), C->E, E->I, I->G appear
    # in order as one contiguous physical walk
    assert walk == ("A", "B", "C", "E", "F", "I", "H", "G")


def test_schemes_validate_on_bundled_topologies_100_seeds():
    for name in ("abilene", "triangle", "diamond", "path8"):
        topo = tekit.load_bundled_topology(name)
        for seed in range(100):
            dist = raecke_distribution(topo, RaeckeConfig(seed=seed))
            scheme = paths_from_distribution(dist, topo)
            assert validate_scheme(scheme, topo) == []


@pytest.mark.parametrize("topo_name", ["triangle", "diamond", "path8"])
def test_congestion_within_small_factor_of_optimum(topo_name):
    """Tree-based oblivious routing stays within 2.5x of the re-optimized
    flow on gravity demands (the Abilene case runs in the acceptance
    suite)."""
    topo = tekit.load_bundled_topology(topo_name)
    dist = raecke_distribution(topo, RaeckeConfig(seed=0))
    scheme = paths_from_distribution(dist, topo)
    state = GravityState.initial(topo.hosts, seed=1)
    good = 0
    for _ in range(100):
        tm = gravity_tm(state, 100.0)
        opt = tekit.mcf_mw(topo, tm).max_congestion
        got, _ = tekit.evaluate_scheme(topo, scheme, tm)
        if got <= 2.5 * opt:
            good += 1
        state = mh_step(state)
    assert good >= 95
