"""Acceptance criteria, one test per criterion.

The terminal summary prints a `criterion N [PASS|FAIL]` line for each, with
the measured figures.
"""

import random
import time

from conftest import CORPUS, GOLDEN
from spinfer.cli import main
from spinfer.emit import lint_contract, load_json, metrics, parse_contract
from spinfer.far import ROOT, far, to_spec
from spinfer.generate import blowup_source, random_flat_tree, random_method_source, random_snf
from spinfer.lang.ast import Binary
from spinfer.oracle import prop_equiv, satisfies
from spinfer.pipeline import Options, Status, infer_source, load_program
from spinfer.refine import is_trivial
from spinfer.spec import Disjunction, Distrib, Leaf, alternatives, cases, flatten
from spinfer.spengine import raw_tree


def test_criterion_1_cmp_end_to_end(cmp_source, record_property):
    t0 = time.perf_counter()
    (r,) = infer_source(cmp_source, Options(precondition="true"))
    elapsed = time.perf_counter() - t0
    assert r.status is Status.INFERRED
    # the three SNF cases, atom sets compared by canonical text
    expected = load_json((GOLDEN / "cmp.snf.json").read_text())["spec"]
    assert cases(r.snf) == cases(expected)
    # refined + compacted: one `a < b` case, then a group under `!(a < b)`
    top = alternatives(r.spec)
    assert len(top) == 2
    assert isinstance(top[0], Leaf) and [a.text for a in top[0].case.pre] == ["a < b"]
    assert isinstance(top[1], Distrib) and [a.text for a in top[1].pre] == ["!(a < b)"]
    inner = alternatives(top[1].body)
    assert [[a.text for a in x.case.pre] for x in inner] == [["a > b"], ["!(a > b)"]]
    assert r.contract == (GOLDEN / "cmp.spec").read_text()
    record_property("detail", f"{elapsed * 1000:.1f} ms")
    assert elapsed < 1.0


def test_criterion_2_far_soundness_on_1000_random_specs(record_property):
    t0 = time.perf_counter()
    failures = [seed for seed in range(1000)
                if not prop_equiv(s := random_snf(seed, cases=(2, 16), pool=12, pre_size=(1, 5)), far(s))]
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{len(failures)} failures, {elapsed:.1f} s")
    assert failures == []
    assert elapsed < 60


def test_criterion_3_sp_agrees_with_the_interpreter(record_property):
    t0 = time.perf_counter()
    bad = []
    for seed in range(200):
        src = random_method_source(seed, max_vars=3, max_depth=4)
        program = load_program(src)
        (r,) = infer_source(src)
        assert r.status is Status.INFERRED, (seed, r.message)
        method = program.methods[0]
        if not (satisfies(method, r.spec, program, bound=2) and satisfies(method, r.snf, program, bound=2)):
            bad.append(seed)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{200 - len(bad)}/200 satisfied, {elapsed:.1f} s")
    assert bad == []
    assert elapsed < 120


def _has_pair(spec, l, r) -> bool:
    if isinstance(spec, Disjunction):
        kids = [c.case for c in spec.children if isinstance(c, Leaf)]
        if l in kids and r in kids:
            return True
        return any(_has_pair(c, l, r) for c in spec.children)
    if isinstance(spec, Distrib):
        return _has_pair(spec.body, l, r)
    return False


def test_criterion_4_flat_trees_and_leaf_pairs(record_property):
    rng = random.Random(4)
    pairs = 0
    for seed in range(100):
        g, leaves = random_flat_tree(seed, leaves=(1, 50))
        assert alternatives(to_spec(g)) == tuple(Leaf(c) for c in leaves)
        if len(leaves) < 2:
            continue
        ids = [v for v in g.vertices if v != ROOT]
        i, j = rng.sample(range(len(ids)), 2)
        l, r = g.vertices[ids[i]], g.vertices[ids[j]]
        assert _has_pair(to_spec(g), l, r)
        # drop r from V: the pair must disappear
        g.vertices.pop(ids[j])
        g.edges = [e for e in g.edges if ids[j] not in e]
        out = to_spec(g)
        assert not _has_pair(out, l, r) and not (isinstance(out, Leaf) and out.case == r)
        pairs += 1
    record_property("detail", f"100 trees, {pairs} pair checks")


def test_criterion_5_blowup_is_compacted(record_property):
    (r,) = infer_source(blowup_source(8))
    assert r.status is Status.INFERRED
    raw_cases = len(cases(r.raw.spec))
    assert raw_cases == 2 ** 8
    raw_len = metrics(raw_tree(r.raw.spec), r.frame)["length"]
    after = r.after
    ratio = after["length"] / raw_len
    record_property("detail", f"{raw_cases} raw cases, length {raw_len} -> {after['length']} "
                              f"({ratio:.1%}), nesting {r.before['nesting']} -> {after['nesting']}")
    assert after["nesting"] < r.before["nesting"]
    assert ratio < 0.25


def _atoms_of_contract(text):
    _, spec = parse_contract(text)
    return [a for c in flatten(spec) for a in c.pre + c.rest]


def test_criterion_6_corpus_contracts_are_practical(record_property):
    problems = []
    checked = 0
    for path in sorted(CORPUS.glob("*.imp")):
        for r in infer_source(path.read_text()):
            if r.status is not Status.INFERRED:
                problems.append(f"{path.name}::{r.method}: {r.status}")
                continue
            checked += 1
            text = r.contract
            problems += [f"{path.name}::{r.method}: {p}" for p in lint_contract(text)]
            for a in _atoms_of_contract(text):
                e = a.expr
                if a.text == "true" or is_trivial(a):
                    problems.append(f"{path.name}::{r.method}: trivial {a.text}")
                if isinstance(e, Binary) and e.op == "==" and e.left == e.right:
                    problems.append(f"{path.name}::{r.method}: e == e atom {a.text}")
            first = text.splitlines()[0]
            assert first == "pure" or "assignable" in text
    record_property("detail", f"{checked} contracts, {len(problems)} violations")
    assert problems == []


def test_criterion_7_runs_are_deterministic(tmp_path, capsys, record_property):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main(["infer", str(CORPUS), "--out", str(out / "contracts"), "--jobs", "2"]) == 0
        assert main(["metrics", str(CORPUS), "--out", str(out / "metrics.csv"), "--jobs", "2"]) == 0
        outs.append({p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    capsys.readouterr()
    record_property("detail", f"{len(outs[0])} files compared")
    assert outs[0] == outs[1]
    assert "metrics.csv" in outs[0] and len(outs[0]) > 20
