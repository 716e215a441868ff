"""Strongest-postcondition symbolic execution over passive method bodies."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from spinfer.lang.ast import BOOL, TRUE, Assign, Binary, If, Result, Seq, Skip, Var, negate
from spinfer.passive import Exit, PassiveLoop, PassiveMethod, cfg_size
from spinfer.spec import Atom, Case, Distrib, Leaf, disjoin, flatten, from_cases

DEFAULT_MAX_CFG = 500
DEFAULT_TIMEOUT_S = 300.0


class InferenceTimeout(Exception):
    pass


class InferenceRefused(Exception):
    pass


@dataclass
class RawSpec:
    """SP output for one method: the SNF specification plus unchecked loop
    obligations."""

    spec: object
    method: PassiveMethod
    precondition: Atom
    warnings: list = field(default_factory=list)


class _Engine:
    def __init__(self, frame=(), deadline=None, warnings=None):
        self.frame = tuple(frame)
        self.deadline = deadline
        self.warnings = warnings if warnings is not None else []

    def tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise InferenceTimeout("wall-clock budget exceeded during symbolic execution")

    def run(self, s, paths):
        """paths: list of (pre, rest) tuples of atoms still running.
        Returns (still running, exited) in path order."""
        self.tick()
        if not paths:
            return [], []
        if isinstance(s, Skip):
            return paths, []
        if isinstance(s, Seq):
            running, done = self.run(s.first, paths)
            running, done2 = self.run(s.second, running)
            return running, done + done2
        if isinstance(s, Assign):
            atom = Atom(Binary("==", Var(s.target, ty=s.rhs.ty), s.rhs, ty=BOOL))
            return [(p + (atom,), r) for p, r in paths], []
        if isinstance(s, If):
            b = Atom(s.cond)
            nb = Atom(negate(s.cond))
            run_t, done_t = self.run(s.then, [(p + (b,), r) for p, r in paths])
            else_paths = [(p + (nb,), r) for p, r in paths]
            if s.else_ is None:
                run_e, done_e = else_paths, []
            else:
                run_e, done_e = self.run(s.else_, else_paths)
            return run_t + run_e, done_t + done_e
        if isinstance(s, PassiveLoop):
            self.warnings.append(
                f"loop invariant {Atom(s.invariant).text} assumed, not checked "
                f"(initiation and preservation are left to a verifier)"
            )
            inv, exit_cond = Atom(s.invariant), Atom(negate(s.cond))
            return [(p + (inv, exit_cond), r) for p, r in paths], []
        if isinstance(s, Exit):
            live = s.live_map()
            post: list = []
            if s.value is not None:
                post.append(Atom(Binary("==", Result(ty=s.value.ty), s.value, ty=BOOL)))
            for g in self.frame:
                post.append(Atom(Binary("==", Var(g), Var(live[g]), ty=BOOL)))
            return [], [(p, r + tuple(post)) for p, r in paths]
        raise TypeError(f"not a passive statement: {s!r}")


def sp(stmt, pre, *, frame=(), deadline=None, warnings=None):
    """Strongest postcondition of a passive statement, casewise over the SNF
    specification `pre` (each case is one accumulated path condition).

    Exited cases come back with `\\result == e` (and final global versions)
    in their rest; cases still running keep the rest they came in with."""
    paths = [(c.pre, c.rest) for c in flatten(pre)]
    running, done = _Engine(frame, deadline, warnings).run(stmt, paths)
    return from_cases([Case(p, r) for p, r in done + running])


def infer_raw(pm: PassiveMethod, precondition=None, *, max_cfg: int | None = DEFAULT_MAX_CFG,
              deadline: float | None = None) -> RawSpec:
    """Run SP over a whole passive method starting from `precondition`
    (default the literal `true`)."""
    if max_cfg is not None and cfg_size(pm) > max_cfg:
        raise InferenceRefused(f"control flow graph has {cfg_size(pm)} nodes (limit {max_cfg})")
    phi = Atom(TRUE if precondition is None else precondition)
    warnings: list = []
    spec = sp(pm.body, Leaf(Case((phi,), ())), frame=pm.frame, deadline=deadline, warnings=warnings)
    return RawSpec(spec, pm, phi, warnings)


def raw_tree(spec) -> object:
    """Re-nest SNF cases along their shared precondition prefixes.

    SP appends atoms in control-flow order, so the prefix tree of the cases
    is the branch structure of the method: the shape a contract has when the
    SP formula is translated without flattening."""
    return _trie(list(flatten(spec)))


def _trie(cs):
    if len(cs) == 1:
        return Leaf(cs[0])
    n = 0
    shortest = min(len(c.pre) for c in cs)
    while n < shortest and all(c.pre[n].text == cs[0].pre[n].text for c in cs):
        n += 1
    common = cs[0].pre[:n]
    groups: dict = {}
    for i, c in enumerate(cs):
        rem = Case(c.pre[n:], c.rest)
        key = rem.pre[0].text if rem.pre else ("", i)
        groups.setdefault(key, []).append(rem)
    body = disjoin([_trie(g) for g in groups.values()])
    return Distrib(common, body) if common else body
