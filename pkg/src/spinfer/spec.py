"""Specification trees.

A specification is a disjunction of alternatives, where an alternative is
either a leaf case (precondition atoms, other atoms) or a set of
preconditions distributed over a sub-specification. Specification normal
form (SNF) is a disjunction of leaves only.

Atoms are compared by canonical text; within a case, pre and rest are ordered
sets modulo that text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from spinfer.lang.parser import parse_expr
from spinfer.lang.printer import canonical


class NotSNF(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Atom:
    """An atomic formula: a Boolean expression treated as an opaque unit."""

    expr: object
    text: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "text", canonical(self.expr))

    @classmethod
    def parse(cls, text: str) -> "Atom":
        return cls(parse_expr(text))

    def __eq__(self, other):
        return isinstance(other, Atom) and self.text == other.text

    def __hash__(self):
        return hash(self.text)

    def __repr__(self):
        return f"Atom({self.text!r})"

    def __str__(self):
        return self.text


def atom_set(atoms: Iterable) -> tuple:
    """Ordered de-duplication modulo canonical text."""
    seen, out = set(), []
    for a in atoms:
        if not isinstance(a, Atom):
            a = Atom.parse(a) if isinstance(a, str) else Atom(a)
        if a.text not in seen:
            seen.add(a.text)
            out.append(a)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Case:
    """One specification case. Equality is set equality of pre and of rest."""

    pre: tuple = ()
    rest: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pre", atom_set(self.pre))
        object.__setattr__(self, "rest", atom_set(self.rest))

    def _key(self):
        return (frozenset(a.text for a in self.pre), frozenset(a.text for a in self.rest))

    def __eq__(self, other):
        return isinstance(other, Case) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def text(self) -> str:
        return "{" + "; ".join(a.text for a in self.pre) + "} => {" + "; ".join(a.text for a in self.rest) + "}"


@dataclass(frozen=True)
class Leaf:
    case: Case


@dataclass(frozen=True)
class Disjunction:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("a disjunction needs at least one alternative")


@dataclass(frozen=True)
class Distrib:
    """Preconditions `pre` distributed over every case of `body`."""

    pre: tuple
    body: "Spec"

    def __post_init__(self):
        object.__setattr__(self, "pre", atom_set(self.pre))


Spec = Union[Leaf, Disjunction, Distrib]


def leaf(pre=(), rest=()) -> Leaf:
    return Leaf(Case(tuple(pre), tuple(rest)))


def disjoin(parts) -> Spec:
    """Disjunction of alternatives, splicing nested disjunctions; a single
    alternative is returned as is."""
    flat = []
    for p in parts:
        if isinstance(p, Disjunction):
            flat.extend(p.children)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Disjunction(tuple(flat))


def from_cases(cs) -> Spec:
    return disjoin([Leaf(c) for c in cs])


def alternatives(spec: Spec) -> tuple:
    return spec.children if isinstance(spec, Disjunction) else (spec,)


def is_snf(spec: Spec) -> bool:
    return all(isinstance(a, Leaf) for a in alternatives(spec))


def cases(spec: Spec) -> tuple:
    """The cases of an SNF specification, duplicates removed, in first
    appearance order."""
    if not is_snf(spec):
        raise NotSNF("cases() needs a specification in normal form")
    seen, out = set(), []
    for alt in alternatives(spec):
        if alt.case not in seen:
            seen.add(alt.case)
            out.append(alt.case)
    return tuple(out)


def pre(x) -> tuple:
    if isinstance(x, Case):
        return x.pre
    if isinstance(x, Leaf):
        return x.case.pre
    if isinstance(x, Distrib):
        return atom_set(x.pre + pre(x.body))
    if isinstance(x, Disjunction):
        return atom_set(a for c in x.children for a in pre(c))
    raise TypeError(x)


def rest(x) -> tuple:
    if isinstance(x, Case):
        return x.rest
    if isinstance(x, Leaf):
        return x.case.rest
    if isinstance(x, Distrib):
        return rest(x.body)
    if isinstance(x, Disjunction):
        return atom_set(a for c in x.children for a in rest(c))
    raise TypeError(x)


def flatten(spec: Spec) -> tuple:
    """Distribute every precondition down to the leaves; returns the SNF cases
    (duplicates kept, in order)."""
    out: list = []

    def go(s, acc):
        if isinstance(s, Leaf):
            out.append(Case(acc + s.case.pre, s.case.rest))
        elif isinstance(s, Distrib):
            go(s.body, acc + s.pre)
        else:
            for c in s.children:
                go(c, acc)

    go(spec, ())
    return tuple(out)


def leaves(spec: Spec) -> list:
    """Leaf cases as written (not distributed)."""
    if isinstance(spec, Leaf):
        return [spec.case]
    if isinstance(spec, Distrib):
        return leaves(spec.body)
    return [c for ch in spec.children for c in leaves(ch)]


def all_atoms(spec: Spec) -> list:
    """Every atom occurrence, common-node copies included."""
    if isinstance(spec, Leaf):
        return list(spec.case.pre) + list(spec.case.rest)
    if isinstance(spec, Distrib):
        return list(spec.pre) + all_atoms(spec.body)
    return [a for ch in spec.children for a in all_atoms(ch)]


def map_atoms(spec: Spec, fn_pre, fn_rest=None) -> Spec:
    """Rebuild a spec applying atom-tuple transforms to pre and rest sets."""
    fn_rest = fn_rest or fn_pre
    if isinstance(spec, Leaf):
        return Leaf(Case(fn_pre(spec.case.pre), fn_rest(spec.case.rest)))
    if isinstance(spec, Distrib):
        return Distrib(fn_pre(spec.pre), map_atoms(spec.body, fn_pre, fn_rest))
    return Disjunction(tuple(map_atoms(c, fn_pre, fn_rest) for c in spec.children))
