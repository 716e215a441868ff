"""Rendering of specifications: contract text, single postcondition, JSON.

Contract dialect, one clause per line::

    contract  ::= ["pure"] block ("also" block)*
    block     ::= "public normal_behavior" clause*
    clause    ::= "requires" expr ";" | "assignable" name ("," name)* ";"
                | "ensures" expr ";" | group
    group     ::= "{|" clause* ("also" clause*)* "|}"

A block holding a group distributes its `requires` lines over every
alternative inside the group.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

from spinfer.lang.ast import Binary, Old, conj
from spinfer.lang.parser import ParseError
from spinfer.lang.printer import canonical
from spinfer.refine import FrameInfo, _shape, contradictory, is_trivial
from spinfer.spec import Atom, Case, Disjunction, Distrib, Leaf, alternatives, disjoin, leaves

SCHEMA_ID = "snf-v1"
BLOCK = "public normal_behavior"
IND = "  "


class SchemaError(ValueError):
    pass


class ContractSyntaxError(ValueError):
    pass


# -- contract text ------------------------------------------------------------


def _clauses(alt, depth: int) -> list:
    pad = IND * depth
    if isinstance(alt, Leaf):
        return [f"{pad}requires {a.text};" for a in alt.case.pre] + \
               [f"{pad}ensures {a.text};" for a in alt.case.rest]
    if isinstance(alt, Distrib):
        lines = [f"{pad}requires {a.text};" for a in alt.pre]
        body = alternatives(alt.body)
        if len(body) == 1:
            return lines + _clauses(body[0], depth)
        lines.append(f"{pad}{{|")
        for i, sub in enumerate(body):
            if i:
                lines.append(f"{pad}also")
            lines += _clauses(sub, depth + 1)
        lines.append(f"{pad}|}}")
        return lines
    raise TypeError(f"not an alternative: {alt!r}")


def emit_contract(spec, frame: FrameInfo | None = None) -> str:
    """Contract text; `also` separates top-level alternatives."""
    frame = frame or FrameInfo()
    lines = ["pure"] if frame.pure else []
    for i, alt in enumerate(alternatives(spec)):
        if i:
            lines.append("also")
        lines.append(BLOCK)
        body = _clauses(alt, 1)
        if not frame.pure:
            clause = f"{IND}assignable {', '.join(frame.assigned)};"
            n = 0
            while n < len(body) and body[n].startswith(f"{IND}requires "):
                n += 1
            body.insert(n, clause)
        lines += body
    return "\n".join(lines) + "\n"


def nesting(spec) -> int:
    """Depth of nested case groups as emitted; a flat specification is 1."""
    def depth(alt):
        if isinstance(alt, Leaf):
            return 1
        body = alternatives(alt.body)
        inner = max(depth(b) for b in body)
        return inner if len(body) == 1 else inner + 1

    return max(depth(a) for a in alternatives(spec))


def metrics(spec, frame: FrameInfo | None = None) -> dict:
    return {
        "length": emit_contract(spec, frame).count("\n"),
        "nesting": nesting(spec),
        "cases": len(leaves(spec)),
    }


def parse_contract(text: str):
    """Read contract text back. Returns (FrameInfo, specification)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    pos = 0
    pure = False
    assigned: set = set()
    if lines and lines[0] == "pure":
        pure, pos = True, 1

    def expect(tok):
        nonlocal pos
        if pos >= len(lines) or lines[pos] != tok:
            got = lines[pos] if pos < len(lines) else "end of contract"
            raise ContractSyntaxError(f"line {pos + 1}: expected {tok!r}, found {got!r}")
        pos += 1

    def clause_body(stop):
        nonlocal pos
        reqs, ens, group = [], [], None
        while pos < len(lines) and lines[pos] not in stop:
            ln = lines[pos]
            if ln == "{|":
                pos += 1
                group = alts(("|}",), sub=True)
                expect("|}")
                continue
            head, _, tail = ln.partition(" ")
            if not tail.endswith(";"):
                raise ContractSyntaxError(f"line {pos + 1}: clause must end with ';'")
            tail = tail[:-1]
            try:
                if head == "requires":
                    reqs.append(Atom.parse(tail))
                elif head == "ensures":
                    ens.append(Atom.parse(tail))
                elif head == "assignable":
                    assigned.update(n.strip() for n in tail.split(","))
                else:
                    raise ContractSyntaxError(f"line {pos + 1}: unknown clause {head!r}")
            except ParseError as err:
                raise ContractSyntaxError(f"line {pos + 1}: {err}") from None
            pos += 1
        if group is not None:
            if ens:
                raise ContractSyntaxError("a block cannot mix ensures with a nested group")
            return Distrib(tuple(reqs), group) if reqs else group
        return Leaf(Case(tuple(reqs), tuple(ens)))

    def alts(stop, sub=False):
        nonlocal pos
        out = []
        while True:
            if not sub:
                expect(BLOCK)
            out.append(clause_body(("also",) + stop))
            if pos < len(lines) and lines[pos] == "also":
                pos += 1
                continue
            return disjoin(out)

    spec = alts(())
    if pos != len(lines):
        raise ContractSyntaxError(f"line {pos + 1}: unexpected {lines[pos]!r}")
    return FrameInfo(tuple(sorted(assigned)), pure), spec


def lint_contract(text: str) -> list:
    """Violations of the practical-contract rules, as messages."""
    problems = []
    if "$" in text:
        problems.append("internal version name ($) in contract")
    try:
        frame, spec = parse_contract(text)
    except ContractSyntaxError as err:
        return problems + [f"unparseable contract: {err}"]
    if not frame.pure and not frame.assigned:
        problems.append("neither pure nor assignable")

    def check(s, acc):
        if isinstance(s, Leaf):
            for a in s.case.pre + s.case.rest:
                if is_trivial(a):
                    problems.append(f"tautological atom {a.text}")
            if contradictory(acc + s.case.pre):
                problems.append(f"contradictory preconditions in {s.case.text()}")
            return
        if isinstance(s, Distrib):
            for a in s.pre:
                if is_trivial(a):
                    problems.append(f"tautological atom {a.text}")
            check(s.body, acc + s.pre)
            return
        shapes = [_shape(c) for c in s.children]
        if len(set(shapes)) != len(shapes):
            problems.append("duplicated sibling cases")
        for c in s.children:
            check(c, acc)

    check(spec, ())
    return problems


# -- single postcondition -----------------------------------------------------


def tr_expr(spec):
    """Conjunction over cases of `\\old(pre) ==> rest`."""
    def implies(pre_atoms, rhs):
        if not pre_atoms:
            return rhs
        return Binary("==>", Old(conj(a.expr for a in pre_atoms)), rhs)

    def go(s):
        if isinstance(s, Leaf):
            return implies(s.case.pre, conj(a.expr for a in s.case.rest))
        if isinstance(s, Distrib):
            return implies(s.pre, go(s.body))
        return conj(go(c) for c in s.children)

    return go(spec)


def emit_tr(spec) -> str:
    return canonical(tr_expr(spec))


# -- JSON ---------------------------------------------------------------------


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads(resources.files("spinfer").joinpath("schemas/snf-v1.json").read_text())


def to_json_obj(spec) -> dict:
    if isinstance(spec, Leaf):
        return {"kind": "leaf", "pre": [a.text for a in spec.case.pre], "rest": [a.text for a in spec.case.rest]}
    if isinstance(spec, Distrib):
        return {"kind": "distrib", "pre": [a.text for a in spec.pre], "body": to_json_obj(spec.body)}
    return {"kind": "disjunction", "children": [to_json_obj(c) for c in spec.children]}


def emit_json(spec, *, method: str | None = None, frame: FrameInfo | None = None) -> str:
    doc: dict = {"schema": SCHEMA_ID}
    if method is not None:
        doc["method"] = method
    if frame is not None:
        doc["assignable"] = list(frame.assigned)
    doc["spec"] = to_json_obj(spec)
    return json.dumps(doc, indent=2) + "\n"


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def load_json(text: str) -> dict:
    """Parse and validate a document; returns {"spec", "method", "frame"}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"/: invalid JSON ({err})") from None
    errors = sorted(jsonschema.Draft202012Validator(schema()).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise SchemaError(f"{_pointer(best.absolute_path)}: {best.message}")

    def atoms(items, path):
        out = []
        for i, t in enumerate(items):
            try:
                out.append(Atom.parse(t))
            except ParseError as err:
                raise SchemaError(f"{_pointer(path + [i])}: {err}") from None
        return tuple(out)

    def node(o, path):
        kind = o["kind"]
        if kind == "leaf":
            return Leaf(Case(atoms(o["pre"], path + ["pre"]), atoms(o["rest"], path + ["rest"])))
        if kind == "distrib":
            return Distrib(atoms(o["pre"], path + ["pre"]), node(o["body"], path + ["body"]))
        return Disjunction(tuple(node(c, path + ["children", i]) for i, c in enumerate(o["children"])))

    assigned = doc.get("assignable")
    frame = None if assigned is None else FrameInfo(tuple(assigned), not assigned)
    return {"spec": node(doc["spec"], ["spec"]), "method": doc.get("method"), "frame": frame}


def parse_json(text: str):
    return load_json(text)["spec"]
