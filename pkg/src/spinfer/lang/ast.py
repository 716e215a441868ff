"""AST of the toy imperative language.

Nodes are frozen dataclasses. Source positions and inferred types ride along
as non-comparing fields, so two trees are equal iff they are structurally
equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

INT = "Int"
BOOL = "Boolean"
VOID = "Void"

Pos = Optional[tuple]


# -- expressions --------------------------------------------------------------


def _cached_hash(self):
    # trees built by substitution share subtrees; hashing each node once keeps
    # memoised printing linear in the DAG size
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self._key_fields))
        object.__setattr__(self, "_hash", h)
    return h


@dataclass(frozen=True)
class IntLit:
    value: int
    ty: Optional[str] = field(default=None, compare=False, repr=False)
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BoolLit:
    value: bool
    ty: Optional[str] = field(default=None, compare=False, repr=False)
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    ty: Optional[str] = field(default=None, compare=False, repr=False)
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"
    ty: Optional[str] = field(default=None, compare=False, repr=False)
    pos: Pos = field(default=None, compare=False, repr=False)

    _key_fields = ("op", "operand")
    __hash__ = _cached_hash


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    ty: Optional[str] = field(default=None, compare=False, repr=False)
    pos: Pos = field(default=None, compare=False, repr=False)

    _key_fields = ("op", "left", "right")
    __hash__ = _cached_hash


@dataclass(frozen=True)
class Old:
    """`\\old(e)`: e read in the pre-state. Specification-only."""

    expr: "Expr"
    ty: Optional[str] = field(default=None, compare=False, repr=False)
    pos: Pos = field(default=None, compare=False, repr=False)

    _key_fields = ("expr",)
    __hash__ = _cached_hash


@dataclass(frozen=True)
class Result:
    """`\\result`. Specification-only."""

    ty: Optional[str] = field(default=None, compare=False, repr=False)
    pos: Pos = field(default=None, compare=False, repr=False)


Expr = Union[IntLit, BoolLit, Var, Unary, Binary, Old, Result]

ARITH_OPS = ("+", "-", "*", "/")
COMPARE_OPS = ("<", "<=", ">", ">=")
EQUALITY_OPS = ("==", "!=")
LOGIC_OPS = ("&&", "||", "==>")
BINARY_OPS = ARITH_OPS + COMPARE_OPS + EQUALITY_OPS + LOGIC_OPS

TRUE = BoolLit(True)
FALSE = BoolLit(False)


def negate(e: Expr) -> Expr:
    return Unary("!", e, ty=BOOL)


def conj(parts) -> Expr:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = Binary("&&", out, p, ty=BOOL)
    return out


def children(e: Expr) -> tuple:
    if isinstance(e, Unary):
        return (e.operand,)
    if isinstance(e, Binary):
        return (e.left, e.right)
    if isinstance(e, Old):
        return (e.expr,)
    return ()


def names(e: Expr) -> set[str]:
    """Variable names read by `e` (including passive version names)."""
    out: set[str] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Var):
            out.add(n.name)
        stack.extend(children(n))
    return out


def substitute(e: Expr, mapping) -> Expr:
    """Replace variables by expressions. `mapping` is a callable name -> Expr|None."""
    if isinstance(e, Var):
        repl = mapping(e.name)
        return e if repl is None else repl
    if isinstance(e, Unary):
        inner = substitute(e.operand, mapping)
        return e if inner is e.operand else Unary(e.op, inner, ty=e.ty)
    if isinstance(e, Binary):
        left = substitute(e.left, mapping)
        right = substitute(e.right, mapping)
        if left is e.left and right is e.right:
            return e
        return Binary(e.op, left, right, ty=e.ty)
    if isinstance(e, Old):
        inner = substitute(e.expr, mapping)
        return e if inner is e.expr else Old(inner, ty=e.ty)
    return e


def is_closed(e: Expr) -> bool:
    """No variables and no `\\result`: the value does not depend on any state."""
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, (Var, Result)):
            return False
        stack.extend(children(n))
    return True


# -- statements ---------------------------------------------------------------


@dataclass(frozen=True)
class Skip:
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    target: str
    rhs: Expr
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Decl:
    """Local variable declaration, optionally initialised (`int c = a;`)."""

    name: str
    type: str
    init: Optional[Expr] = None
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    else_: Optional["Stmt"] = None
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    invariant: Expr
    body: "Stmt"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None
    pos: Pos = field(default=None, compare=False, repr=False)


Stmt = Union[Skip, Assign, Decl, Seq, If, While, Return]


def seq(*stmts) -> Stmt:
    """Right-nested sequence; an empty sequence is `skip`."""
    stmts = [s for s in stmts if s is not None]
    if not stmts:
        return Skip()
    out = stmts[-1]
    for s in reversed(stmts[:-1]):
        out = Seq(s, out)
    return out


def flatten_seq(s: Stmt) -> list:
    if isinstance(s, Seq):
        return flatten_seq(s.first) + flatten_seq(s.second)
    return [s]


def assigned_vars(s: Stmt) -> set[str]:
    """Names on the left of any assignment or initialised declaration in `s`."""
    out: set[str] = set()
    stack = [s]
    while stack:
        n = stack.pop()
        if isinstance(n, Assign):
            out.add(n.target)
        elif isinstance(n, Decl) and n.init is not None:
            out.add(n.name)
        elif isinstance(n, Seq):
            stack += [n.first, n.second]
        elif isinstance(n, If):
            stack.append(n.then)
            if n.else_ is not None:
                stack.append(n.else_)
        elif isinstance(n, While):
            stack.append(n.body)
    return out


# -- declarations -------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    name: str
    type: str
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class GlobalDecl:
    name: str
    type: str
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple
    ret_type: str
    body: Stmt
    pos: Pos = field(default=None, compare=False, repr=False)

    @property
    def param_names(self) -> tuple:
        return tuple(p.name for p in self.params)

    def locals(self) -> dict:
        """Declared locals, name -> type, in declaration order."""
        out: dict = {}
        stack = [self.body]
        while stack:
            n = stack.pop()
            if isinstance(n, Decl):
                out[n.name] = n.type
            elif isinstance(n, Seq):
                stack += [n.second, n.first]
            elif isinstance(n, If):
                if n.else_ is not None:
                    stack.append(n.else_)
                stack.append(n.then)
            elif isinstance(n, While):
                stack.append(n.body)
        return out

    def globals_written(self, program: "Program") -> set[str]:
        gnames = {g.name for g in program.globals}
        return assigned_vars(self.body) & gnames

    def globals_read(self, program: "Program") -> set[str]:
        gnames = {g.name for g in program.globals}
        out: set[str] = set()
        stack = [self.body]
        while stack:
            n = stack.pop()
            if isinstance(n, Assign):
                out |= names(n.rhs)
            elif isinstance(n, Decl) and n.init is not None:
                out |= names(n.init)
            elif isinstance(n, Seq):
                stack += [n.first, n.second]
            elif isinstance(n, If):
                out |= names(n.cond)
                stack.append(n.then)
                if n.else_ is not None:
                    stack.append(n.else_)
            elif isinstance(n, While):
                out |= names(n.cond) | names(n.invariant)
                stack.append(n.body)
            elif isinstance(n, Return) and n.value is not None:
                out |= names(n.value)
        return out & (gnames - {p.name for p in self.params} - set(self.locals()))


@dataclass(frozen=True)
class Program:
    globals: tuple = ()
    methods: tuple = ()

    def method(self, name: str) -> MethodDecl:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)

    def global_types(self) -> dict:
        return {g.name: g.type for g in self.globals}
