"""Type checking: annotates every expression with its type and enforces the
static rules inference relies on (definite assignment, no dead code, every
path of a value-returning method ends in `return`)."""

from __future__ import annotations

from dataclasses import replace

from spinfer.lang.ast import (
    ARITH_OPS, BOOL, COMPARE_OPS, EQUALITY_OPS, INT, VOID,
    Assign, Binary, BoolLit, Decl, If, IntLit, MethodDecl, Old, Program, Result,
    Return, Seq, Skip, Unary, Var, While,
)
from spinfer.lang.parser import Diagnostic


class TypeCheckError(Exception):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class TypeEnv(dict):
    """Names to types. Passive version names `x$k` resolve through `x`."""

    def lookup(self, name: str) -> str:
        if name in self:
            return self[name]
        base = name.split("$", 1)[0]
        if base != name and base in self:
            return self[base]
        raise KeyError(name)


def _pos(node):
    return node.pos or (0, 0)


class _ExprChecker:
    def __init__(self, env: TypeEnv, errors: list, *, spec: bool, result_type=None):
        self.env = env
        self.errors = errors
        self.spec = spec
        self.result_type = result_type

    def fail(self, node, msg):
        line, col = _pos(node)
        self.errors.append(Diagnostic(line, col, msg))

    def check(self, e):
        """Return an annotated copy of `e` (type None on error)."""
        if isinstance(e, IntLit):
            return replace(e, ty=INT)
        if isinstance(e, BoolLit):
            return replace(e, ty=BOOL)
        if isinstance(e, Var):
            try:
                return replace(e, ty=self.env.lookup(e.name))
            except KeyError:
                self.fail(e, f"undeclared variable {e.name!r}")
                return e
        if isinstance(e, Result):
            if not self.spec:
                self.fail(e, "\\result is only allowed in specifications")
                return e
            if self.result_type in (None, VOID):
                self.fail(e, "\\result used in a method without a return value")
                return e
            return replace(e, ty=self.result_type)
        if isinstance(e, Old):
            if not self.spec:
                self.fail(e, "\\old is only allowed in specifications")
                return e
            inner = self.check(e.expr)
            return replace(e, expr=inner, ty=inner.ty)
        if isinstance(e, Unary):
            inner = self.check(e.operand)
            want = INT if e.op == "-" else BOOL
            if inner.ty is not None and inner.ty != want:
                self.fail(e, f"operator {e.op!r} expects {want}, got {inner.ty}")
                return replace(e, operand=inner)
            return replace(e, operand=inner, ty=want if inner.ty else None)
        if isinstance(e, Binary):
            left, right = self.check(e.left), self.check(e.right)
            out = replace(e, left=left, right=right)
            if left.ty is None or right.ty is None:
                return out
            if e.op == "==>" and not self.spec:
                self.fail(e, "'==>' is only allowed in specifications")
                return out
            if e.op in ARITH_OPS or e.op in COMPARE_OPS:
                if left.ty != INT or right.ty != INT:
                    self.fail(e, f"operator {e.op!r} expects Int x Int, got {left.ty} x {right.ty}")
                    return out
                return replace(out, ty=INT if e.op in ARITH_OPS else BOOL)
            if e.op in EQUALITY_OPS:
                if left.ty != right.ty:
                    self.fail(e, f"operator {e.op!r} compares {left.ty} with {right.ty}")
                    return out
                return replace(out, ty=BOOL)
            if left.ty != BOOL or right.ty != BOOL:
                self.fail(e, f"operator {e.op!r} expects Boolean x Boolean, got {left.ty} x {right.ty}")
                return out
            return replace(out, ty=BOOL)
        raise TypeError(f"not an expression: {e!r}")


def check_expr(e, env, *, spec: bool = True, result_type=None):
    """Annotate a standalone expression; raises TypeCheckError on failure."""
    errors: list = []
    out = _ExprChecker(TypeEnv(env), errors, spec=spec, result_type=result_type).check(e)
    if errors:
        raise TypeCheckError(errors)
    return out


class _MethodChecker:
    def __init__(self, program: Program, method: MethodDecl, errors: list):
        self.m = method
        self.errors = errors
        self.globals = program.global_types()
        self.env = TypeEnv(self.globals)
        self.local_names: set[str] = set()
        seen = set()
        for p in method.params:
            if p.name in seen or p.name in self.globals:
                self.fail(p, f"duplicate declaration {p.name!r}")
            seen.add(p.name)
            self.env[p.name] = p.type
        self.exprs = _ExprChecker(self.env, errors, spec=False)

    def fail(self, node, msg):
        line, col = _pos(node)
        self.errors.append(Diagnostic(line, col, msg))

    def cond(self, e, what):
        out = self.exprs.check(e)
        if out.ty is not None and out.ty != BOOL:
            self.fail(e, f"{what} must be Boolean, got {out.ty}")
        return out

    def reads(self, e, assigned):
        stack = [e]
        while stack:
            n = stack.pop()
            if isinstance(n, Var) and n.name in self.local_names and n.name not in assigned:
                self.fail(n, f"local {n.name!r} may be read before it is assigned")
            if isinstance(n, Unary):
                stack.append(n.operand)
            elif isinstance(n, Binary):
                stack += [n.left, n.right]

    def stmt(self, s, assigned: frozenset):
        """Return (annotated stmt, definitely-assigned set after s or None if s
        never completes normally)."""
        if isinstance(s, Skip):
            return s, assigned
        if isinstance(s, Decl):
            if s.name in self.env:
                self.fail(s, f"duplicate declaration {s.name!r}")
            self.env[s.name] = s.type
            self.local_names.add(s.name)
            if s.init is None:
                return s, assigned
            self.reads(s.init, assigned)
            init = self.exprs.check(s.init)
            if init.ty is not None and init.ty != s.type:
                self.fail(s, f"cannot initialise {s.type} variable {s.name!r} with {init.ty}")
            return replace(s, init=init), assigned | {s.name}
        if isinstance(s, Assign):
            self.reads(s.rhs, assigned)
            rhs = self.exprs.check(s.rhs)
            try:
                target_ty = self.env.lookup(s.target)
            except KeyError:
                self.fail(s, f"undeclared variable {s.target!r}")
                return replace(s, rhs=rhs), assigned
            if rhs.ty is not None and rhs.ty != target_ty:
                self.fail(s, f"cannot assign {rhs.ty} to {target_ty} variable {s.target!r}")
            return replace(s, rhs=rhs), assigned | {s.target}
        if isinstance(s, Seq):
            first, after = self.stmt(s.first, assigned)
            if after is None:
                self.fail(s.second, "unreachable statement")
                return replace(s, first=first), None
            second, after = self.stmt(s.second, after)
            return replace(s, first=first, second=second), after
        if isinstance(s, If):
            self.reads(s.cond, assigned)
            cond = self.cond(s.cond, "if condition")
            then, a_then = self.stmt(s.then, assigned)
            if s.else_ is None:
                else_, a_else = None, assigned
            else:
                else_, a_else = self.stmt(s.else_, assigned)
            out = replace(s, cond=cond, then=then, else_=else_)
            if a_then is None:
                return out, a_else
            if a_else is None:
                return out, a_then
            return out, a_then & a_else
        if isinstance(s, While):
            self.reads(s.cond, assigned)
            self.reads(s.invariant, assigned)
            cond = self.cond(s.cond, "loop condition")
            inv = self.cond(s.invariant, "loop invariant")
            body, _ = self.stmt(s.body, assigned)
            return replace(s, cond=cond, invariant=inv, body=body), assigned
        if isinstance(s, Return):
            if s.value is None:
                if self.m.ret_type != VOID:
                    self.fail(s, f"method {self.m.name!r} must return a {self.m.ret_type}")
                return s, None
            if self.m.ret_type == VOID:
                self.fail(s, f"void method {self.m.name!r} cannot return a value")
                return s, None
            self.reads(s.value, assigned)
            value = self.exprs.check(s.value)
            if value.ty is not None and value.ty != self.m.ret_type:
                self.fail(s, f"return type mismatch: expected {self.m.ret_type}, got {value.ty}")
            return replace(s, value=value), None
        raise TypeError(f"not a statement: {s!r}")

    def run(self) -> MethodDecl:
        start = frozenset(self.env)
        body, after = self.stmt(self.m.body, start)
        if after is not None and self.m.ret_type != VOID:
            self.fail(self.m, f"method {self.m.name!r} can complete without returning a value")
        return replace(self.m, body=body)


def typecheck(program: Program) -> Program:
    """Return the program with every expression annotated with its type.

    Raises TypeCheckError listing every problem found."""
    errors: list = []
    methods = tuple(_MethodChecker(program, m, errors).run() for m in program.methods)
    if errors:
        raise TypeCheckError(errors)
    return replace(program, methods=methods)


def method_env(program: Program, method: MethodDecl) -> TypeEnv:
    """Type environment of a method: globals, params and locals."""
    env = TypeEnv(program.global_types())
    env.update({p.name: p.type for p in method.params})
    env.update(method.locals())
    return env
