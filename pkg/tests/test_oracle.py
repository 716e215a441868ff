import pytest
from hypothesis import given, settings, strategies as st

from spinfer.generate import random_method_source, random_snf
from spinfer.lang import canonical, parse_expr
from spinfer.lang.ast import Binary, IntLit, Var
from spinfer.oracle import (
    AtomLimitExceeded, OutOfFuel, Stuck, Valuation, eval_atom, eval_expr, interpret, pre_states, prop_equiv,
    satisfies,
)
from spinfer.passive import passivize
from spinfer.pipeline import load_program
from spinfer.refine import externalize, prune_unsat
from spinfer.spec import Atom, Case, Distrib, cases, disjoin, flatten, from_cases, leaf
from spinfer.spengine import infer_raw

CMP_SPEC = disjoin([
    leaf(["a < b"], ["\\result == -1"]),
    leaf(["!(a < b)", "a > b"], ["\\result == 1"]),
    leaf(["!(a < b)", "!(a > b)"], ["\\result == 0"]),
])


def _cmp(cmp_source):
    prog = load_program(cmp_source)
    return prog, prog.methods[0]


# -- evaluation ---------------------------------------------------------------

@pytest.mark.parametrize("text, expected", [
    ("1 + 2 * 3", 7),
    ("-7 / 2", -3),
    ("7 / -2", -3),
    ("-7 / -2", 3),
    ("a < b && b < 3", True),
    ("false ==> 1 / 0 == 0", True),
    ("true || 1 / 0 == 0", True),
    ("!(a == 1)", False),
])
def test_eval_examples(text, expected):
    assert eval_expr(parse_expr(text), {"a": 1, "b": 2}) == expected


def test_division_by_zero_is_stuck():
    with pytest.raises(Stuck):
        eval_expr(parse_expr("a / 0"), {"a": 1})


def test_old_reads_the_pre_state():
    v = Valuation({"g": 1}, {"g": 2, "\\result": 2})
    assert eval_atom(Atom.parse("g == \\old(g) + 1"), v)
    assert eval_atom(Atom.parse("\\result == g"), v)
    assert eval_atom(Atom.parse("g == 1"), v, role="pre")


def test_interpret_cmp(cmp_source):
    _, m = _cmp(cmp_source)
    assert interpret(m, {"a": 1, "b": 2})["\\result"] == -1
    assert interpret(m, {"a": 2, "b": 1})["\\result"] == 1
    assert interpret(m, {"a": 0, "b": 0})["\\result"] == 0


def test_interpret_keeps_entry_parameters_and_updates_globals():
    prog = load_program("global int g; int f(int x) { x = x + 1; g = x; return x; }")
    post = interpret(prog.methods[0], {"x": 1, "g": 0})
    assert post == {"x": 1, "g": 2, "\\result": 2}


def test_nonterminating_loop_runs_out_of_fuel():
    prog = load_program("void f() { int i = 0; while (true) invariant (true) { i = i + 1; } }")
    with pytest.raises(OutOfFuel):
        interpret(prog.methods[0], {}, fuel=50)


def test_pre_states_cover_the_domain(cmp_source):
    prog, m = _cmp(cmp_source)
    states = list(pre_states(m, prog, bound=2))
    assert len(states) == 25
    assert {"a": -2, "b": 2} in states


# -- satisfies ----------------------------------------------------------------

def test_cmp_satisfies_its_specification(cmp_source):
    prog, m = _cmp(cmp_source)
    res = satisfies(m, CMP_SPEC, prog, bound=2)
    assert res.ok and res.checked == 25 and res.excluded == 0


def test_swapped_results_give_a_counterexample(cmp_source):
    prog, m = _cmp(cmp_source)
    wrong = disjoin([
        leaf(["a < b"], ["\\result == 1"]),
        leaf(["!(a < b)", "a > b"], ["\\result == -1"]),
        leaf(["!(a < b)", "!(a > b)"], ["\\result == 0"]),
    ])
    res = satisfies(m, wrong, prog)
    assert not res
    ce = res.counterexample
    assert ce["pre"]["a"] < ce["pre"]["b"] and ce["atom"] == "\\result == 1"


def test_unsatisfiable_precondition_is_vacuously_met(cmp_source):
    prog, m = _cmp(cmp_source)
    assert satisfies(m, leaf(["a < b", "!(a < b)"], ["false"]), prog)


def test_stuck_runs_are_excluded():
    prog = load_program("int f(int a) { return 10 / a; }")
    res = satisfies(prog.methods[0], leaf(["a == 1"], ["\\result == 10"]), prog, bound=1)
    assert res.ok and res.checked == 2 and res.excluded == 1


# -- propositional equivalence ------------------------------------------------

def test_prop_equiv_distributes_common_preconditions():
    flat = from_cases([Case(("a", "b"), ("x",)), Case(("a", "c"), ("y",))])
    nested = Distrib(("a",), disjoin([leaf(["b"], ["x"]), leaf(["c"], ["y"])]))
    assert prop_equiv(flat, nested)


def test_case_split_on_p_collapses():
    assert prop_equiv(disjoin([leaf(["p"], ["q"]), leaf(["!p"], ["q"])]), leaf([], ["q"]))


def test_negated_postcondition_differs():
    assert not prop_equiv(leaf(["p"], ["q"]), leaf(["p"], ["!q"]))


def test_prop_equiv_detects_a_changed_postcondition():
    assert not prop_equiv(leaf(["p"], ["x"]), leaf(["p"], ["y"]))
    assert not prop_equiv(disjoin([leaf(["p"], ["x"]), leaf(["q"], ["y"])]), leaf(["p"], ["x"]))


def test_prop_equiv_treats_literals_as_constants():
    assert prop_equiv(leaf(["true", "p"], ["x"]), leaf(["p"], ["x"]))
    assert prop_equiv(leaf(["false"], ["x"]), leaf(["q"], ["true"]))


def test_prop_equiv_folds_negation():
    assert prop_equiv(leaf(["!!p"], ["x"]), leaf(["p"], ["x"]))
    assert prop_equiv(leaf(["p", "!p"], ["x"]), leaf([], []))


def test_pre_and_post_readings_are_distinct_propositions():
    assert not prop_equiv(leaf(["p"], ["p"]), leaf([], []))


def test_atom_limit():
    s = from_cases([Case((f"p{i}",), (f"q{i}",)) for i in range(11)])
    with pytest.raises(AtomLimitExceeded):
        prop_equiv(s, s)
    assert prop_equiv(s, s, limit=22)


# -- properties ---------------------------------------------------------------

_int = st.recursive(
    st.one_of(st.sampled_from(["a", "b"]).map(Var), st.integers(-3, 3).map(IntLit)),
    lambda ch: st.tuples(st.sampled_from(["+", "-", "*", "/"]), ch, ch).map(lambda t: Binary(*t)),
    max_leaves=6,
)
_cmp_atom = st.tuples(st.sampled_from(["<", "<=", "==", "!="]), _int, _int).map(lambda t: Binary(*t))


def _outcome(e, s):
    try:
        return eval_expr(e, s)
    except Stuck:
        return "stuck"


@settings(max_examples=200)
@given(_cmp_atom, st.integers(-2, 2), st.integers(-2, 2))
def test_lexically_equal_atoms_evaluate_alike(e, a, b):
    reparsed = Atom.parse(canonical(e))
    assert reparsed == Atom(e)
    s = {"a": a, "b": b}
    assert _outcome(reparsed.expr, s) == _outcome(e, s)


@settings(max_examples=100)
@given(st.integers(0, 10**6))
def test_prop_equiv_is_reflexive_and_order_blind(seed):
    s = random_snf(seed)
    assert prop_equiv(s, s)
    assert prop_equiv(s, from_cases(list(reversed(cases(s)))))


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_pruning_never_breaks_satisfaction(seed):
    prog = load_program(random_method_source(seed))
    m = prog.methods[0]
    pm = passivize(m, prog)
    snf = externalize(infer_raw(pm).spec, pm)
    # a contradictory case with a false postcondition is vacuous, pruning drops it
    padded = disjoin([snf, leaf(["a < b", "!(a < b)"], ["false"])])
    assert satisfies(m, padded, prog)
    pruned = prune_unsat(padded)
    assert satisfies(m, pruned, prog)
    assert all("false" not in c.text() for c in flatten(pruned))
