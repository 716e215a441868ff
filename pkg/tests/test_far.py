from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from spinfer.far import (
    LEXICAL, ROOT, CommonNode, EquivalenceRelation, SpecGraph, connected_components, far, merge_scc,
    to_graph, to_spec, weight,
)
from spinfer.generate import random_flat_tree, random_snf
from spinfer.oracle import prop_equiv
from spinfer.refine import contradictory
from spinfer.spec import Atom, Case, Disjunction, Distrib, Leaf, all_atoms, alternatives, cases, flatten, from_cases, leaf

SLOW_LEXICAL = EquivalenceRelation("lexical-pairwise", lambda x, y: x.text == y.text)


def _case(pre, rest=()):
    return Case(tuple(Atom.parse(t) for t in pre), tuple(Atom.parse(t) for t in rest))


def _brute_weight(l, r):
    return sum(1 for x in l.pre for y in r.pre if x.text == y.text)


def test_weight_counts_related_pre_pairs():
    l, r = _case(["a", "b", "c"]), _case(["b", "c", "d"])
    assert weight(l, r, LEXICAL) == 2 == _brute_weight(l, r)
    assert weight(l, r, SLOW_LEXICAL) == 2


def test_to_graph_edges_follow_positive_weights():
    V = {0: _case(["a"]), 1: _case(["a", "b"]), 2: _case(["c"])}
    g, W = to_graph(V)
    assert set(g.vertices) == {0, 1, 2}
    assert sorted(g.edges) == [(0, 1), (1, 0)]
    assert W[(0, 2)] == 0 and W[(0, 1)] == W[(1, 0)] == 1


def test_components_are_sorted_by_smallest_member():
    V = {0: _case(["a"]), 1: _case(["c"]), 2: _case(["a", "b"]), 3: _case(["c", "d"])}
    g, _ = to_graph(V)
    assert connected_components(g) == [frozenset({0, 2}), frozenset({1, 3})]
    assert connected_components(g, symmetric=False) == [frozenset({0, 2}), frozenset({1, 3})]


def test_merge_scc_two_cases_sharing_a():
    V = {0: _case(["a", "b"], ["x"]), 1: _case(["a", "c"], ["y"])}
    g, W = to_graph(V)
    residual, rem = merge_scc(V, W, connected_components(g), SpecGraph(), LEXICAL, g)
    assert rem == {}
    assert to_spec(residual) == Distrib((Atom.parse("a"),),
                                        Disjunction((Leaf(_case(["b"], ["x"])), Leaf(_case(["c"], ["y"])))))


def test_merge_scc_takes_the_heaviest_pair_first():
    V = {1: _case(["a", "b"], ["x"]), 2: _case(["a", "b", "c"], ["y"]), 3: _case(["c", "d"], ["z"])}
    g, W = to_graph(V)
    assert (W[(1, 2)], W[(2, 3)], W[(1, 3)]) == (2, 1, 0)
    residual, rem = merge_scc(V, W, connected_components(g), SpecGraph(), LEXICAL, g)
    assert list(rem) == [3]
    common = [v for v in residual.vertices.values() if isinstance(v, CommonNode)]
    assert [a.text for a in common[0].atoms] == ["a", "b"]


def test_singleton_components_are_untouched():
    V = {0: _case(["a"]), 1: _case(["b"])}
    g, W = to_graph(V)
    residual, rem = merge_scc(V, W, connected_components(g), SpecGraph(), LEXICAL, g)
    assert rem == V and not residual.vertices


def test_single_case_is_returned_unchanged():
    s = leaf(["p"], ["q"])
    assert far(s) == s


def test_disjoint_pre_sets_stay_flat():
    s = from_cases([_case(["p"], ["x"]), _case(["q"], ["y"]), _case(["r"], ["z"])])
    assert far(s) == s


def test_cmp_cases_recombine_to_the_nested_shape():
    s = from_cases([
        _case(["a < b"], ["\\result == -1"]),
        _case(["!(a < b)", "a > b"], ["\\result == 1"]),
        _case(["!(a < b)", "!(a > b)"], ["\\result == 0"]),
    ])
    expected = Disjunction((
        Leaf(_case(["a < b"], ["\\result == -1"])),
        Distrib((Atom.parse("!(a < b)"),), Disjunction((
            Leaf(_case(["a > b"], ["\\result == 1"])),
            Leaf(_case(["!(a > b)"], ["\\result == 0"])),
        ))),
    ))
    assert far(s) == expected


def test_contained_pre_set_leaves_an_unconditional_child():
    s = from_cases([_case(["a"], ["x"]), _case(["a", "b"], ["y"])])
    out = far(s)
    assert isinstance(out, Distrib)
    assert [c.pre for c in (ch.case for ch in out.body.children)][0] == ()


def test_to_spec_on_a_cycle_is_an_error():
    g = SpecGraph()
    g.add("c0", CommonNode((Atom.parse("a"),)))
    g.add("c1", CommonNode((Atom.parse("b"),)))
    g.edges += [(ROOT, "c0"), ("c0", "c1"), ("c1", "c0")]
    with pytest.raises(ValueError, match="cycle"):
        to_spec(g)


def test_to_spec_one_common_node():
    g = SpecGraph()
    l1, l2 = _case(["p"], ["x"]), _case(["q"], ["y"])
    g.add("c0", CommonNode((Atom.parse("a"),)))
    g.add("v1", l1)
    g.add("v2", l2)
    g.edges += [(ROOT, "c0"), ("c0", "v1"), ("c0", "v2")]
    assert to_spec(g) == Distrib((Atom.parse("a"),), Disjunction((Leaf(l1), Leaf(l2))))


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_flat_tree_gives_the_disjunction_of_its_leaves(seed):
    g, leaves = random_flat_tree(seed)
    out = to_spec(g)
    assert alternatives(out) == tuple(Leaf(c) for c in leaves)


@settings(max_examples=200)
@given(st.integers(0, 10**6))
def test_far_is_propositionally_equivalent(seed):
    s = random_snf(seed)
    assert prop_equiv(s, far(s))


@settings(max_examples=200)
@given(st.integers(0, 10**6))
def test_far_keeps_exactly_the_input_cases_when_flattened(seed):
    s = random_snf(seed)
    assert Counter(flatten(far(s))) == Counter(cases(s))


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_far_invents_no_atoms(seed):
    s = random_snf(seed)
    before = {a.text for a in all_atoms(s)}
    assert {a.text for a in all_atoms(far(s))} <= before


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_unmerged_count_strictly_decreases(seed):
    trace = []
    far(random_snf(seed), trace=trace)
    assert all(b < a for a, b in zip(trace, trace[1:]))
    assert all((a - b) % 2 == 0 for a, b in zip(trace, trace[1:]))


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_incremental_rounds_match_the_rebuilt_graph_rounds(seed):
    s = random_snf(seed)
    assert far(s, LEXICAL) == far(s, SLOW_LEXICAL)


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_far_is_deterministic(seed):
    s = random_snf(seed)
    assert repr(far(s)) == repr(far(random_snf(seed)))


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_disjoint_input_gives_disjoint_top_level_alternatives(seed):
    # make every pair of cases disagree on a shared proposition
    s = random_snf(seed)
    cs = list(cases(s))
    tagged = []
    for i, c in enumerate(cs):
        bits = [Atom.parse(f"b{k}" if (i >> k) & 1 else f"!b{k}") for k in range(max(1, len(cs).bit_length()))]
        tagged.append(Case(c.pre + tuple(bits), c.rest))
    out = far(from_cases(tagged))
    alts = alternatives(out)
    for i in range(len(alts)):
        for j in range(i + 1, len(alts)):
            for ci in flatten(alts[i]):
                for cj in flatten(alts[j]):
                    assert contradictory(ci.pre + cj.pre)


@given(st.lists(st.sampled_from(["p", "!p", "a < b", "(a < b)", "q"]), min_size=3, max_size=3))
def test_lexical_relation_is_an_equivalence(texts):
    x, y, z = (Atom.parse(t) for t in texts)
    assert LEXICAL(x, x)
    assert LEXICAL(x, y) == LEXICAL(y, x)
    if LEXICAL(x, y) and LEXICAL(y, z):
        assert LEXICAL(x, z)
