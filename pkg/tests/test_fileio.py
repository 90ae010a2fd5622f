import numpy as np
import pytest

from tekit import TrafficMatrix
from tekit.fileio import (ParseError, bundled_topology_names, format_tm_line,
                          format_topology, load_bundled_topology,
                          parse_tm_line, parse_topology, read_tm_sequence,
                          write_tm_sequence)

SAMPLE = """
# demo network
node s1 switch
node s2 switch
node h1 host   # trailing comment
node h2 host
link s1 s2 cap=5e9bps weight=2.5
link h1 s1 cap=1e10bps
link h2 s2 cap=1e10bps
"""


def test_parse_topology():
    topo = parse_topology(SAMPLE, name="demo")
    assert topo.switches == ("s1", "s2")
    assert topo.hosts == ("h1", "h2")
    assert topo.edges[("s1", "s2")].capacity == 5e9
    assert topo.edges[("s2", "s1")].weight == 2.5
    assert topo.edges[("h1", "s1")].weight == 1.0  # default


def test_topology_round_trip():
    topo = parse_topology(SAMPLE, name="demo")
    again = parse_topology(format_topology(topo), name="demo")
    assert again.nodes == topo.nodes
    assert again.edges == topo.edges


@pytest.mark.parametrize("bad, msg", [
    ("node x widget", "unknown kind"),
    ("link a b cap=1bps\nnode a switch", "unknown node"),
    ("node a switch\nnode b switch\nlink a b weight=1", "missing cap"),
    ("node a switch\nnode b switch\nlink a b cap=1bps speed=3", "unknown attribute"),
    ("frob a b", "unknown directive"),
])
def test_parse_errors(bad, msg):
    with pytest.raises((ParseError, Exception), match=msg):
        parse_topology(bad)


def test_bundled_topologies_load():
    names = bundled_topology_names()
    assert {"abilene", "diamond", "triangle", "path8"} <= set(names)
    ab = load_bundled_topology("abilene")
    assert len(ab.switches) == 12
    assert len(ab.links()) == 15
    assert ("s12", "s2") in ab.edges or ("s2", "s12") in ab.edges


def test_tm_line_round_trip_exact():
    rng = np.random.default_rng(3)
    hosts = ("a", "b", "c")
    rates = rng.uniform(0, 1e9, size=(3, 3))
    np.fill_diagonal(rates, 0.0)
    tm = TrafficMatrix(hosts, rates)
    back = parse_tm_line(format_tm_line(tm), hosts)
    assert np.array_equal(back.rates, tm.rates)


def test_tm_sequence_file_round_trip(tmp_path):
    hosts = ("a", "b")
    tms = [TrafficMatrix(hosts, np.array([[0.0, float(i)], [2.0 * i, 0.0]]))
           for i in range(1, 4)]
    path = tmp_path / "seq.tms"
    write_tm_sequence(path, tms)
    back = read_tm_sequence(path, hosts)
    assert len(back) == 3
    for tm, b in zip(tms, back):
        assert np.array_equal(tm.rates, b.rates)


def test_tm_line_wrong_arity():
    with pytest.raises(ParseError):
        parse_tm_line("1 2 3", ("a", "b"))
