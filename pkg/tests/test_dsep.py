from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bninv.dsep import (Trail, d_connected, d_separated, d_separated_bruteforce, d_separated_by_reachability,
                        enumerate_trails, find_active_trail, is_blocked)
from bninv.errors import InvalidTrailError, ResourceLimitError, UnknownNodeError
from bninv.graph import Dag

from conftest import chain, dags


def subsets(nodes):
    for k in range(len(nodes) + 1):
        yield from combinations(nodes, k)


class TestTrail:
    def test_through_reads_directions(self, fig):
        t = Trail.through(fig("fig1_G"), ["z1", "x", "z2"])
        assert t.forward == (True, False)
        assert t.colliders() == (1,)
        assert str(t) == "z1 -> x <- z2"
        assert str(t.reversed()) == "z2 -> x <- z1"
        assert t.edges() == [("z1", "x"), ("z2", "x")]

    def test_rejects_repeated_node(self):
        with pytest.raises(InvalidTrailError):
            Trail(("a", "b", "a"), (True, False))

    def test_rejects_flag_count(self):
        with pytest.raises(InvalidTrailError):
            Trail(("a", "b"), ())

    def test_rejects_non_edge(self):
        with pytest.raises(InvalidTrailError):
            Trail.through(chain("a", "b", "c"), ["a", "c"])

    def test_validate_flags_against_graph(self):
        with pytest.raises(InvalidTrailError):
            is_blocked(chain("a", "b"), Trail(("a", "b"), (False,)))


class TestBlocking:
    def test_collider_blocks(self, fig):
        t = Trail.through(fig("fig1_G"), ["z1", "x", "z2"])
        assert is_blocked(fig("fig1_G"), t, ())
        assert not is_blocked(fig("fig1_G"), t, {"x"})

    def test_non_collider_in_set_blocks(self):
        g = chain("a", "b", "c")
        assert is_blocked(g, Trail.through(g, "abc"), {"b"})

    def test_descendant_of_collider_activates(self):
        g = Dag("abcd", [("a", "c"), ("b", "c"), ("c", "d")])
        t = Trail.through(g, "acb")
        assert not is_blocked(g, t, {"d"})

    def test_endpoint_in_set_blocks(self):
        g = chain("a", "b")
        assert is_blocked(g, Trail.through(g, "ab"), {"a"})


class TestSeparation:
    def test_fig1(self, fig):
        g = fig("fig1_G")
        assert d_separated(g, "z1", "z2")
        assert not d_separated(g, "z1", "z2", {"x"})

    def test_a_inside_given(self, fig):
        g = fig("fig6_G")
        assert d_separated(g, {"r1", "r2"}, "r5", {"r1", "r2"})

    def test_diseases_dependence(self, fig):
        assert not d_separated(fig("fig2_G"), "muscle_pain", "hayfever", {"congestion"})

    def test_overlap_not_given_is_connected(self):
        assert not d_separated(Dag("ab"), {"a"}, {"a", "b"})

    def test_unknown_node(self):
        with pytest.raises(UnknownNodeError):
            d_separated(chain("a", "b"), "a", "q")

    def test_d_connected(self, fig):
        assert d_connected(fig("fig1_G"), "z1", {"x"}) == {"z1", "z2"}
        assert d_connected(fig("fig1_G"), "z1") == {"z1", "x"}


class TestWitness:
    def test_fig1(self, fig):
        assert str(find_active_trail(fig("fig1_G"), "z1", "z2", {"x"})) == "z1 -> x <- z2"

    def test_separated_gives_none(self, fig):
        assert find_active_trail(fig("fig1_G"), "z1", "z2") is None

    def test_diseases_trail(self, fig):
        # the only simple trail from muscle_pain to hayfever, found by enumeration
        g = fig("fig2_G")
        trails = enumerate_trails(g, "muscle_pain", "hayfever")
        assert [str(t) for t in trails] == ["muscle_pain <- flu -> congestion <- hayfever"]
        assert find_active_trail(g, "muscle_pain", "hayfever", {"congestion"}) == trails[0]


class TestEnumeration:
    def test_examples(self, fig):
        assert len(enumerate_trails(chain("a", "b", "c"), "a", "c")) == 1
        assert [t.nodes for t in enumerate_trails(fig("fig1_G"), "z1", "z2")] == [("z1", "x", "z2")]
        assert enumerate_trails(Dag("abc"), "a", "c") == []

    def test_bound(self):
        g = Dag([f"n{i}" for i in range(11)])
        with pytest.raises(ResourceLimitError):
            enumerate_trails(g, "n0", "n1")


# --- properties ------------------------------------------------------------


@given(dags(max_nodes=7))
@settings(max_examples=40)
def test_three_deciders_agree_on_singleton_queries(g):
    """Moralization, reachability and literal trail enumeration on every
    (a, b, S) with singleton a, b and any S, overlapping ones included."""
    trails = {(s, t): enumerate_trails(g, s, t) for s in g.nodes for t in g.nodes}
    for given_ in subsets(g.nodes):
        for (s, t), ts in trails.items():
            brute = all(is_blocked(g, tr, given_) for tr in ts)
            assert d_separated(g, s, t, given_) == brute
            assert d_separated_by_reachability(g, s, t, given_) == brute


@given(dags(max_nodes=6), st.data())
def test_set_queries_agree(g, data):
    pick = st.sets(st.sampled_from(g.nodes))
    a, b, s = data.draw(pick), data.draw(pick), data.draw(pick)
    expect = d_separated_bruteforce(g, a, b, s)
    assert d_separated(g, a, b, s) == expect
    assert d_separated_by_reachability(g, a, b, s) == expect


@given(dags(max_nodes=6), st.data())
def test_symmetry(g, data):
    pick = st.sets(st.sampled_from(g.nodes))
    a, b, s = data.draw(pick), data.draw(pick), data.draw(pick)
    assert d_separated(g, a, b, s) == d_separated(g, b, a, s)


@given(dags(max_nodes=6), st.data())
def test_witness_trails_are_unblocked(g, data):
    pick = st.sets(st.sampled_from(g.nodes))
    a, b, s = data.draw(pick), data.draw(pick), data.draw(pick)
    trail = find_active_trail(g, a, b, s)
    assert (trail is None) == d_separated(g, a, b, s)
    if trail is not None:
        assert trail.start in a and trail.end in b
        assert not is_blocked(g, trail, s)


@given(dags(min_nodes=3, max_nodes=6), st.data())
def test_adding_common_non_collider_keeps_separation(g, data):
    s, t = data.draw(st.lists(st.sampled_from(g.nodes), min_size=2, max_size=2, unique=True))
    given_ = data.draw(st.sets(st.sampled_from([v for v in g.nodes if v not in (s, t)])))
    if not d_separated(g, s, t, given_):
        return
    trails = enumerate_trails(g, s, t)
    for v in g.nodes:
        if v in given_ or v in (s, t):
            continue
        on_every = all(v in tr.nodes[1:-1] and tr.nodes.index(v) not in tr.colliders() for tr in trails)
        if on_every:
            assert d_separated(g, s, t, set(given_) | {v})
