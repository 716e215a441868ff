"""Executable semantics for testing inference.

A bounded-domain interpreter gives the state transformer of a method; the
satisfaction check runs it over every pre-state of the domain and evaluates
each case whose preconditions hold. `prop_equiv` compares two specifications
propositionally, one variable per atom class, over all assignments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from spinfer.lang.ast import (
    BOOL, INT, Assign, Binary, BoolLit, Decl, If, IntLit, Old, Result, Return,
    Seq, Skip, Unary, Var, While,
)
from spinfer.passive import Exit, PassiveLoop, PassiveMethod
from spinfer.spec import Distrib, Leaf, flatten

RESULT = "\\result"
DEFAULT_BOUND = 2
DEFAULT_FUEL = 1000
DEFAULT_ATOM_LIMIT = 20


class Stuck(Exception):
    """Evaluation cannot proceed (division by zero, unbound name, no fuel)."""


class OutOfFuel(Stuck):
    pass


class AtomLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Valuation:
    pre: dict
    post: dict = field(default_factory=dict)


def _div(a: int, b: int) -> int:
    if b == 0:
        raise Stuck("division by zero")
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def _binop(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return _div(a, b)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    raise ValueError(op)


def eval_expr(e, state: dict, pre_state: dict | None = None):
    """Evaluate over `state`; `\\old(..)` reads `pre_state`, `\\result` reads
    `state['\\result']`."""
    if isinstance(e, IntLit) or isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Var):
        try:
            return state[e.name]
        except KeyError:
            raise Stuck(f"unbound name {e.name!r}") from None
    if isinstance(e, Result):
        try:
            return state[RESULT]
        except KeyError:
            raise Stuck("no result value") from None
    if isinstance(e, Old):
        base = state if pre_state is None else pre_state
        return eval_expr(e.expr, base, base)
    if isinstance(e, Unary):
        v = eval_expr(e.operand, state, pre_state)
        return (not v) if e.op == "!" else -v
    if isinstance(e, Binary):
        if e.op in ("&&", "||", "==>"):
            left = eval_expr(e.left, state, pre_state)
            if e.op == "&&" and not left:
                return False
            if e.op == "||" and left:
                return True
            if e.op == "==>" and not left:
                return True
            return bool(eval_expr(e.right, state, pre_state))
        return _binop(e.op, eval_expr(e.left, state, pre_state), eval_expr(e.right, state, pre_state))
    raise TypeError(f"not an expression: {e!r}")


def eval_atom(f, v: Valuation, *, role: str = "rest") -> bool:
    """Truth of an atom. Pre atoms are evaluated at (s, s); rest atoms at
    (s, s') with plain names reading the post-state."""
    expr = getattr(f, "expr", f)
    if role == "pre":
        return bool(eval_expr(expr, v.pre, v.pre))
    return bool(eval_expr(expr, v.post, v.pre))


# -- interpreters -------------------------------------------------------------


class _Returned(Exception):
    def __init__(self, value):
        self.value = value


def interpret(method, pre_state: dict, *, fuel: int = DEFAULT_FUEL) -> dict:
    """Big-step run of a source method. The post-state holds the globals,
    the parameters with their entry values (call by value) and `\\result`."""
    state = dict(pre_state)
    budget = [fuel]

    def run(s):
        if isinstance(s, Skip):
            return
        if isinstance(s, Decl):
            if s.init is not None:
                state[s.name] = eval_expr(s.init, state)
        elif isinstance(s, Assign):
            state[s.target] = eval_expr(s.rhs, state)
        elif isinstance(s, Seq):
            run(s.first)
            run(s.second)
        elif isinstance(s, If):
            if eval_expr(s.cond, state):
                run(s.then)
            elif s.else_ is not None:
                run(s.else_)
        elif isinstance(s, While):
            while eval_expr(s.cond, state):
                budget[0] -= 1
                if budget[0] < 0:
                    raise OutOfFuel("loop fuel exhausted")
                run(s.body)
        elif isinstance(s, Return):
            raise _Returned(None if s.value is None else eval_expr(s.value, state))
        else:
            raise TypeError(f"not a statement: {s!r}")

    result = None
    try:
        run(method.body)
    except _Returned as r:
        result = r.value
    post = {k: v for k, v in state.items() if k in pre_state}
    post.update({p.name: pre_state[p.name] for p in method.params})
    if result is not None:
        post[RESULT] = result
    return post


def run_passive(pm: PassiveMethod, pre_state: dict) -> tuple:
    """Execute a loop-free passive body. Returns (versions env, exit) where
    `exit` is the Exit node reached."""
    env = {f"{k}$0": v for k, v in pre_state.items()}

    def run(s):
        if isinstance(s, Skip):
            return None
        if isinstance(s, Assign):
            env[s.target] = eval_expr(s.rhs, env)
            return None
        if isinstance(s, Seq):
            return run(s.first) or run(s.second)
        if isinstance(s, If):
            if eval_expr(s.cond, env):
                return run(s.then)
            return None if s.else_ is None else run(s.else_)
        if isinstance(s, Exit):
            if s.value is not None:
                env[RESULT] = eval_expr(s.value, env)
            return s
        if isinstance(s, PassiveLoop):
            raise Stuck("passive loops cannot be executed")
        raise TypeError(f"not a passive statement: {s!r}")

    return env, run(pm.body)


def passive_post_state(pm: PassiveMethod, pre_state: dict) -> dict:
    """Post-state of a passive run projected through the exit's live
    versions, comparable with `interpret`."""
    env, ex = run_passive(pm, pre_state)
    live = ex.live_map()
    post = {g: env[live[g]] for g in pm.globals if g in pre_state}
    post.update({p.name: pre_state[p.name] for p in pm.original.params})
    if RESULT in env:
        post[RESULT] = env[RESULT]
    return post


# -- satisfaction -------------------------------------------------------------


def domain_values(ty: str, bound: int):
    if ty == BOOL:
        return (False, True)
    if ty == INT:
        return tuple(range(-bound, bound + 1))
    raise ValueError(ty)


def pre_states(method, program=None, bound: int = DEFAULT_BOUND):
    """Every pre-state over params and globals with ints in [-bound, bound]."""
    decls = [(p.name, p.type) for p in method.params]
    if program is not None:
        decls += [(g.name, g.type) for g in program.globals]
    names = [n for n, _ in decls]
    for combo in itertools.product(*(domain_values(t, bound) for _, t in decls)):
        yield dict(zip(names, combo))


@dataclass
class SatResult:
    ok: bool
    checked: int = 0
    excluded: int = 0
    counterexample: dict | None = None

    def __bool__(self):
        return self.ok


def spec_violation(spec_cases, v: Valuation):
    """First (case index, atom) violated at the valuation, or None. Raises
    Stuck if a precondition cannot be evaluated."""
    for i, c in enumerate(spec_cases):
        if all(eval_atom(p, v, role="pre") for p in c.pre):
            for q in c.rest:
                try:
                    ok = eval_atom(q, v, role="rest")
                except Stuck:
                    ok = False
                if not ok:
                    return i, q
    return None


def spec_holds(spec, v: Valuation) -> bool:
    return spec_violation(flatten(spec), v) is None


def satisfies(method, spec, program=None, *, bound: int = DEFAULT_BOUND, fuel: int = DEFAULT_FUEL) -> SatResult:
    """Check that `method` satisfies `spec` on every pre-state of the bounded
    domain. Runs that get stuck are excluded and counted."""
    spec_cases = flatten(spec)
    res = SatResult(True)
    for s in pre_states(method, program, bound):
        try:
            post = interpret(method, s, fuel=fuel)
            bad = spec_violation(spec_cases, Valuation(s, post))
        except Stuck:
            res.excluded += 1
            continue
        res.checked += 1
        if bad is not None:
            i, atom = bad
            res.ok = False
            res.counterexample = {"pre": s, "post": post, "case": i, "atom": atom.text}
            return res
    return res


# -- propositional equivalence ------------------------------------------------


def _polar(expr):
    neg = False
    while isinstance(expr, Unary) and expr.op == "!":
        neg = not neg
        expr = expr.operand
    return expr, neg


class _Props:
    """Maps atoms to propositional variables modulo the relation, with
    leading negations folded into polarity."""

    def __init__(self, rel):
        self.rel = rel
        self.index: dict = {}
        self.reps: list = []

    def var(self, atom, role):
        from spinfer.spec import Atom

        base, neg = _polar(atom.expr)
        if isinstance(base, BoolLit):
            return None, base.value != neg
        base_atom = Atom(base)
        if self.rel.key is not None:
            k = (role, self.rel.key(base_atom))
        else:
            k = None
            for i, (r_role, rep) in enumerate(self.reps):
                if r_role == role and self.rel(base_atom, rep):
                    k = (role, i)
                    break
            if k is None:
                self.reps.append((role, base_atom))
                k = (role, len(self.reps) - 1)
        if k not in self.index:
            self.index[k] = len(self.index)
        return self.index[k], neg


def _collect(spec, props, out):
    if isinstance(spec, Leaf):
        out.extend((props.var(a, "pre"), ) for a in spec.case.pre)
        out.extend((props.var(a, "rest"), ) for a in spec.case.rest)
    elif isinstance(spec, Distrib):
        out.extend((props.var(a, "pre"), ) for a in spec.pre)
        _collect(spec.body, props, out)
    else:
        for c in spec.children:
            _collect(c, props, out)


def _pattern(i: int, n: int) -> int:
    block = 1 << i
    size = 1 << n
    m = ((1 << block) - 1) << block
    width = 2 * block
    while width < size:
        m |= m << width
        width *= 2
    return m


def tr_mask(spec, props, n: int) -> int:
    """Truth table (as an int bitset over 2**n assignments) of the single
    postcondition obtained by conjoining `old(pre) ==> rest` over cases."""
    full = (1 << (1 << n)) - 1
    cache: dict = {}

    def lit(atom, role):
        idx, neg = props.var(atom, role)
        if idx is None:
            val = neg  # constant: `neg` holds the literal's truth value
            return full if val else 0
        if idx not in cache:
            cache[idx] = _pattern(idx, n)
        m = cache[idx]
        return full ^ m if neg else m

    def conj(atoms, role):
        m = full
        for a in atoms:
            m &= lit(a, role)
        return m

    def go(s):
        if isinstance(s, Leaf):
            return (full ^ conj(s.case.pre, "pre")) | conj(s.case.rest, "rest")
        if isinstance(s, Distrib):
            return (full ^ conj(s.pre, "pre")) | go(s.body)
        m = full
        for c in s.children:
            m &= go(c)
        return m

    return go(spec)


def prop_equiv(s1, s2, rel=None, *, limit: int = DEFAULT_ATOM_LIMIT) -> bool:
    """Are the Tr translations of s1 and s2 equivalent when each atom class
    (pre-state and post-state readings kept apart) is a free proposition?"""
    if rel is None:
        from spinfer.far import LEXICAL as rel
    props = _Props(rel)
    _collect(s1, props, [])
    _collect(s2, props, [])
    n = len(props.index)
    if n > limit:
        raise AtomLimitExceeded(f"{n} distinct atoms exceed the limit of {limit}")
    return tr_mask(s1, props, n) == tr_mask(s2, props, n)
