import pytest

from spinfer.spec import (
    Atom, Case, Disjunction, Distrib, Leaf, NotSNF, all_atoms, cases, disjoin, flatten, is_snf, leaf, pre, rest,
)


def test_atoms_compare_by_canonical_text():
    assert Atom.parse("a+b < c") == Atom.parse("(a + b) < c")
    assert Atom.parse("a < b") != Atom.parse("b > a")


def test_case_equality_is_set_equality():
    assert Case((Atom.parse("p"), Atom.parse("q")), ()) == Case((Atom.parse("q"), Atom.parse("p"), Atom.parse("p")), ())
    assert len(Case(("p", "p", "q"), ()).pre) == 2


def test_cases_deduplicates_in_first_seen_order():
    s = disjoin([leaf(["p"], ["x"]), leaf(["q"], ["y"]), leaf(["p"], ["x"])])
    assert [c.text() for c in cases(s)] == ["{p} => {x}", "{q} => {y}"]


def test_cases_requires_normal_form():
    nested = Distrib((Atom.parse("p"),), disjoin([leaf(["q"]), leaf(["r"])]))
    assert not is_snf(nested)
    with pytest.raises(NotSNF):
        cases(nested)


def test_pre_and_rest_union_over_the_tree():
    s = Distrib(("a",), disjoin([leaf(["b"], ["x"]), leaf(["c"], ["y"])]))
    assert [x.text for x in pre(s)] == ["a", "b", "c"]
    assert [x.text for x in rest(s)] == ["x", "y"]


def test_flatten_distributes_common_preconditions():
    s = Distrib(("a",), disjoin([leaf(["b"], ["x"]), leaf([], ["y"])]))
    assert [c.text() for c in flatten(s)] == ["{a; b} => {x}", "{a} => {y}"]
    assert len(all_atoms(s)) == 4


def test_disjoin_splices_and_unwraps():
    one = leaf(["p"])
    assert disjoin([one]) is one
    d = disjoin([disjoin([one, leaf(["q"])]), leaf(["r"])])
    assert isinstance(d, Disjunction) and len(d.children) == 3
    with pytest.raises(ValueError):
        Disjunction(())


def test_leaf_helper_builds_a_single_case():
    assert leaf(["p"], ["q"]) == Leaf(Case((Atom.parse("p"),), (Atom.parse("q"),)))
