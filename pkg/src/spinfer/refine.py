"""Post-processing passes that turn raw SP output into practical contracts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from spinfer.lang.ast import (
    BOOL, Assign, Binary, BoolLit, Old, Result, Unary, Var, conj, names, negate, substitute,
)
from spinfer.lang.printer import canonical
from spinfer.passive import PassiveLoop, PassiveMethod, base_name, walk
from spinfer.spec import Atom, Case, Distrib, Leaf, alternatives, disjoin, flatten, from_cases


class UnresolvableName(ValueError):
    pass


class VacuousSpecification(ValueError):
    pass


@dataclass(frozen=True)
class FrameInfo:
    assigned: tuple = ()
    pure: bool = True


def infer_frame(method, program=None) -> FrameInfo:
    """Syntactic write set over the declared globals, reachable or not."""
    written = tuple(sorted(method.globals_written(program))) if program is not None else ()
    return FrameInfo(written, not written)


# -- externalize --------------------------------------------------------------


def _def_table(pm: PassiveMethod) -> dict:
    """Text of every assignment atom in the passive body -> (version, rhs)."""
    table = {}
    for st in walk(pm.body):
        if isinstance(st, Assign):
            a = Atom(Binary("==", Var(st.target), st.rhs, ty=BOOL))
            table[a.text] = (st.target, st.rhs)
    return table


def _is_version(n: str) -> bool:
    return "$" in n


class _Resolver:
    def __init__(self, defs: dict):
        self.defs = defs
        self.memo: dict = {}

    def __call__(self, e):
        return substitute(e, self._lookup)

    def _lookup(self, n):
        if n not in self.defs:
            return None
        if n not in self.memo:
            self.memo[n] = None  # cycle guard; SSA makes this unreachable
            self.memo[n] = self(self.defs[n])
        return self.memo[n]


def _mentions(e, vs) -> bool:
    return any(n in vs for n in names(e))


def _to_pre(e):
    return substitute(e, lambda n: Var(base_name(n), ty=None) if n.endswith("$0") else None)


def _to_post(e, final: dict):
    def ren(n):
        if n.endswith("$0"):
            return Old(Var(base_name(n)))
        return final.get(n)
    return substitute(e, ren)


def _has_version(e) -> bool:
    return any(_is_version(n) for n in names(e))


def _loop_facts(pm: PassiveMethod) -> set:
    """Texts of the invariant and exit-condition atoms SP adds after loops."""
    out = set()
    for st in walk(pm.body):
        if isinstance(st, PassiveLoop):
            out.add(Atom(st.invariant).text)
            out.add(Atom(negate(st.cond)).text)
    return out


def _post_names(rest, havoc) -> dict:
    """Havocked versions that the post-state can name: a global's final
    version (from its frame atom) or a version returned as is."""
    final = {}
    for r in rest:
        e = r.expr
        if isinstance(e, Binary) and e.op == "==" and isinstance(e.right, Var) and e.right.name in havoc:
            if isinstance(e.left, Var) and not _is_version(e.left.name):
                final[e.right.name] = e.left
            elif isinstance(e.left, Result):
                final.setdefault(e.right.name, e.left)
    return final


def externalize(spec, pm: PassiveMethod):
    """Replace internal version names by source-level names.

    Assignment atoms are consumed as definitions and substituted away. Entry
    versions become plain names in preconditions and `\\old(..)` elsewhere.
    Loop-havocked versions are only nameable as a global's final value or as
    the returned value. Loop invariant and exit atoms hold in the post-state
    and join the other atoms; later branch conditions over havocked versions
    cannot be stated on the pre-state, so they become an antecedent of the
    other atoms. Anything that stays unnameable is dropped, which only
    weakens the case."""
    table = _def_table(pm)
    loop_facts = _loop_facts(pm)
    out = []
    for c in flatten(spec):
        defs, kept = {}, []
        for a in c.pre:
            if a.text in table:
                v, rhs = table[a.text]
                defs.setdefault(v, rhs)
            else:
                kept.append(a)
        resolve = _Resolver(defs)
        final = _post_names(c.rest, pm.havoc)
        pre_atoms, facts, conds = [], [], []
        for a in kept:
            e = resolve(a.expr)
            if _mentions(e, pm.havoc):
                (facts if a.text in loop_facts else conds).append(_to_post(e, final))
            else:
                e = _to_pre(e)
                if _has_version(e):
                    raise UnresolvableName(f"unresolvable internal name in {canonical(e)}")
                pre_atoms.append(Atom(e))
        rest_atoms = []
        if not any(_has_version(f) for f in conds):
            ante = conj(conds) if conds else None
            for e in [_to_post(resolve(r.expr), final) for r in c.rest] + facts:
                if _has_version(e):
                    continue  # mentions a havocked local the post-state cannot name
                if is_trivial(Atom(e)):
                    continue
                if ante is not None:
                    e = Binary("||", Unary("!", ante, ty=BOOL), e, ty=BOOL)
                rest_atoms.append(Atom(e))
        out.append(Case(tuple(pre_atoms), tuple(rest_atoms)))
    return from_cases(out)


# -- simplification -----------------------------------------------------------


def _closed_value(e):
    from spinfer.oracle import Stuck, eval_expr

    if names(e) or any(isinstance(x, (Old, Result)) for x in _subexprs(e)):
        return None
    try:
        return eval_expr(e, {})
    except Stuck:
        return None


def _subexprs(e):
    yield e
    for attr in ("left", "right", "operand", "expr"):
        sub = getattr(e, attr, None)
        if sub is not None and not isinstance(sub, (str, int, bool)):
            yield from _subexprs(sub)


def is_trivial(a: Atom) -> bool:
    """Literal `true`, `e == e`, or any closed expression that is true."""
    e = a.expr
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Binary) and e.op == "==" and canonical(e.left) == canonical(e.right):
        return True
    return _closed_value(e) is True


def is_false(a: Atom) -> bool:
    e = a.expr
    if isinstance(e, BoolLit):
        return not e.value
    if isinstance(e, Binary) and e.op == "!=" and canonical(e.left) == canonical(e.right):
        return True
    return _closed_value(e) is False


def _polar(e):
    neg = False
    while isinstance(e, Unary) and e.op == "!":
        neg, e = not neg, e.operand
    return canonical(e), neg


def contradictory(atoms) -> bool:
    """A syntactic complement pair p, !p (negations folded) or a closed false
    atom."""
    seen: dict = {}
    for a in atoms:
        if is_false(a):
            return True
        base, neg = _polar(a.expr)
        if seen.get(base, neg) != neg:
            return True
        seen[base] = neg
    return False


def strip_trivial(spec, default=None):
    """Remove tautological atoms and the default precondition; drop common
    nodes left without atoms."""
    drop = {default.text if isinstance(default, Atom) else default} - {None}

    def keep(atoms):
        return tuple(a for a in atoms if not is_trivial(a) and a.text not in drop)

    def go(s):
        if isinstance(s, Leaf):
            return Leaf(Case(keep(s.case.pre), keep(s.case.rest)))
        if isinstance(s, Distrib):
            body = go(s.body)
            p = keep(s.pre)
            return Distrib(p, body) if p else body
        return disjoin([go(c) for c in s.children])

    return go(spec)


def _satisfiable(atoms, env: dict, bound: int) -> bool:
    from spinfer.oracle import Stuck, eval_expr

    free = sorted({n for a in atoms for n in names(a.expr)})
    domains = [(False, True) if env.get(n) == BOOL else range(-bound, bound + 1) for n in free]
    for combo in itertools.product(*domains):
        s = dict(zip(free, combo))
        try:
            if all(eval_expr(a.expr, s, s) for a in atoms):
                return True
        except Stuck:
            continue
    return False


def prune_unsat(spec, *, deep: bool = False, env: dict | None = None, bound: int = 2):
    """Delete cases whose accumulated precondition is contradictory.

    The default check is syntactic. With `deep`, a case is also deleted when
    no state of the bounded domain satisfies its precondition."""
    env = env or {}

    def dead(atoms):
        return contradictory(atoms) or (deep and not _satisfiable(atoms, env, bound))

    def go(s, acc):
        if isinstance(s, Leaf):
            return None if dead(acc + s.case.pre) else s
        if isinstance(s, Distrib):
            if dead(acc + s.pre):
                return None
            body = go(s.body, acc + s.pre)
            return None if body is None else Distrib(s.pre, body)
        kids = [k for k in (go(c, acc) for c in s.children) if k is not None]
        return disjoin(kids) if kids else None

    out = go(spec, ())
    if out is None:
        raise VacuousSpecification("vacuous specification: every case has an unsatisfiable precondition")
    return out


def _shape(s):
    if isinstance(s, Leaf):
        return ("leaf", s.case._key())
    if isinstance(s, Distrib):
        return ("distrib", frozenset(a.text for a in s.pre), _shape(s.body))
    return ("or", tuple(_shape(c) for c in s.children))


def dedupe_cases(spec):
    """Collapse structurally identical sibling alternatives, at every level."""
    def go(s):
        if isinstance(s, Leaf):
            return s
        if isinstance(s, Distrib):
            return Distrib(s.pre, go(s.body))
        seen, kids = set(), []
        for c in alternatives(s):
            c = go(c)
            k = _shape(c)
            if k not in seen:
                seen.add(k)
                kids.append(c)
        return disjoin(kids)

    return go(spec)
