"""Passive (single-assignment) form of a type-checked method.

Every assignment targets a fresh version `x$k`; parameters and globals enter
as `x$0`. Versions assigned in both arms of an `if` are unified by renaming
so that the continuation reads one name; when only one arm assigns, the
other arm gets a copy assignment to the same version. Along any execution
path each version is therefore assigned at most once.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from spinfer.lang.ast import (
    Assign, Binary, Decl, If, MethodDecl, Old, Program, Return, Seq, Skip,
    Unary, Var, While, assigned_vars, flatten_seq, seq, substitute,
)
from spinfer.lang.checker import TypeEnv, method_env
from spinfer.lang.printer import pretty, print_stmt


class UnsupportedConstruct(Exception):
    pass


def version(name: str, k: int) -> str:
    return f"{name}${k}"


def base_name(v: str) -> str:
    return v.split("$", 1)[0]


def version_index(v: str) -> int | None:
    if "$" not in v:
        return None
    return int(v.rsplit("$", 1)[1])


@dataclass(frozen=True)
class Exit:
    """A passive `return`: the returned expression plus the live version of
    every variable at this exit."""

    value: object
    live: tuple  # ((var, version), ...) sorted by var

    def live_map(self) -> dict:
        return dict(self.live)

    def render(self, indent):
        pad = "  " * indent
        ret = "return;" if self.value is None else f"return {pretty(self.value)};"
        binds = ", ".join(f"{k}={v}" for k, v in self.live)
        return [f"{pad}{ret}  // live: {binds}"]


@dataclass(frozen=True)
class PassiveLoop:
    """A loop after havocking: `havoc` pairs each body-assigned variable with
    the fresh version it holds after the loop; cond and invariant are read
    over those versions. `body` is kept for display and proof obligations."""

    cond: object
    invariant: object
    body: object
    havoc: tuple  # ((var, version), ...)
    entry: tuple  # ((var, version), ...) live on loop entry

    def render(self, indent):
        pad = "  " * indent
        hv = ", ".join(v for _, v in self.havoc)
        lines = [f"{pad}havoc {hv};" if hv else f"{pad}havoc;",
                 f"{pad}while ({pretty(self.cond)}) invariant ({pretty(self.invariant)}) {{"]
        lines += print_stmt(self.body, indent + 1)
        lines.append(f"{pad}}}")
        return lines


@dataclass(frozen=True)
class PassiveMethod:
    original: MethodDecl
    body: object
    versions: dict  # var -> tuple of version names in creation order
    env: TypeEnv
    globals: tuple  # global names, declaration order
    frame: tuple  # globals assigned anywhere in the method, sorted
    defined: frozenset = field(default=frozenset())  # versions that are assignment targets
    havoc: frozenset = field(default=frozenset())  # versions created by loop havoc

    @property
    def name(self) -> str:
        return self.original.name

    def exits(self) -> list:
        return [s for s in walk(self.body) if isinstance(s, Exit)]

    def render(self) -> str:
        return "\n".join([f"// passive form of {self.name}"] + print_stmt(self.body, 0))


def walk(s):
    """Yield every statement node of a (passive) body, pre-order."""
    stack = [s]
    while stack:
        n = stack.pop()
        yield n
        if isinstance(n, Seq):
            stack += [n.second, n.first]
        elif isinstance(n, If):
            if n.else_ is not None:
                stack.append(n.else_)
            stack.append(n.then)
        elif isinstance(n, (While, PassiveLoop)):
            stack.append(n.body)


def _rename_expr(e, env):
    return substitute(e, lambda n: Var(env[n], ty=None) if n in env else None)


def _retag(e, types):
    # keep types on renamed variables so downstream atoms stay annotated
    if isinstance(e, Var):
        return replace(e, ty=types.get(base_name(e.name), e.ty))
    if isinstance(e, Unary):
        return replace(e, operand=_retag(e.operand, types))
    if isinstance(e, Binary):
        return replace(e, left=_retag(e.left, types), right=_retag(e.right, types))
    if isinstance(e, Old):
        return replace(e, expr=_retag(e.expr, types))
    return e


def rename_version(s, old: str, new: str, ty=None):
    """Rename one version name throughout a passive statement."""
    def ren(e):
        return substitute(e, lambda n: Var(new, ty=ty) if n == old else None)

    if isinstance(s, Seq):
        return Seq(rename_version(s.first, old, new, ty), rename_version(s.second, old, new, ty))
    if isinstance(s, Assign):
        return Assign(new if s.target == old else s.target, ren(s.rhs))
    if isinstance(s, If):
        return If(ren(s.cond), rename_version(s.then, old, new, ty),
                  None if s.else_ is None else rename_version(s.else_, old, new, ty))
    if isinstance(s, Exit):
        return Exit(None if s.value is None else ren(s.value),
                    tuple((k, new if v == old else v) for k, v in s.live))
    if isinstance(s, PassiveLoop):
        return PassiveLoop(ren(s.cond), ren(s.invariant), rename_version(s.body, old, new, ty),
                           tuple((k, new if v == old else v) for k, v in s.havoc),
                           tuple((k, new if v == old else v) for k, v in s.entry))
    return s


class _Passivizer:
    def __init__(self, types: dict):
        self.types = types
        self.counter: dict = {}
        self.created: list = []

    def fresh(self, var: str) -> str:
        k = self.counter.get(var, 1)
        self.counter[var] = k + 1
        v = version(var, k)
        self.created.append(v)
        return v

    def expr(self, e, env):
        return _retag(_rename_expr(e, env), self.types)

    def block(self, s, env):
        """Passivize a statement; returns (list of passive stmts, env after or
        None when every path has exited)."""
        out: list = []
        for st in flatten_seq(s):
            if env is None:
                break
            stmts, env = self.stmt(st, env)
            out += stmts
        return out, env

    def stmt(self, s, env):
        if isinstance(s, Skip):
            return [Skip()], env
        if isinstance(s, Decl):
            if s.init is None:
                return [], env
            s = Assign(s.name, s.init)
        if isinstance(s, Assign):
            rhs = self.expr(s.rhs, env)
            v = self.fresh(s.target)
            return [Assign(v, rhs)], {**env, s.target: v}
        if isinstance(s, If):
            cond = self.expr(s.cond, env)
            mark = len(self.created)
            then, env_t = self.block(s.then, dict(env))
            made_then = set(self.created[mark:])
            mark = len(self.created)
            else_, env_e = (self.block(s.else_, dict(env)) if s.else_ is not None else ([], dict(env)))
            made_else = set(self.created[mark:])
            if env_t is None or env_e is None:
                out_env = env_e if env_t is None else env_t
            else:
                out_env = {}
                for var in sorted(env_t.keys() & env_e.keys()):
                    t, e = env_t[var], env_e[var]
                    if t == e:
                        out_env[var] = t
                    elif t in made_then and e in made_else:
                        else_ = [rename_version(st, e, t, self.types.get(var)) for st in else_]
                        self.created.remove(e)
                        out_env[var] = t
                    elif t in made_then:
                        else_.append(Assign(t, _retag(Var(e), self.types)))
                        out_env[var] = t
                    else:
                        then.append(Assign(e, _retag(Var(t), self.types)))
                        out_env[var] = e
            return [If(cond, seq(*then), seq(*else_) if else_ else None)], out_env
        if isinstance(s, While):
            if any(isinstance(n, Return) for n in walk(s.body)):
                raise UnsupportedConstruct("return inside a loop body is not supported")
            entry = tuple(sorted(env.items()))
            touched = sorted(assigned_vars(s.body) & env.keys())
            havoc = tuple((var, self.fresh(var)) for var in touched)
            env_after = {**env, **dict(havoc)}
            cond = self.expr(s.cond, env_after)
            inv = self.expr(s.invariant, env_after)
            body, _ = self.block(s.body, dict(env_after))
            return [PassiveLoop(cond, inv, seq(*body), havoc, entry)], env_after
        if isinstance(s, Return):
            value = None if s.value is None else self.expr(s.value, env)
            return [Exit(value, tuple(sorted(env.items())))], None
        raise TypeError(f"not a statement: {s!r}")


def passivize(method: MethodDecl, program: Program | None = None) -> PassiveMethod:
    """Convert a type-checked method to passive form."""
    program = program or Program()
    env_types = method_env(program, method)
    gnames = tuple(g.name for g in program.globals)
    p = _Passivizer(dict(env_types))
    start = {name: version(name, 0) for name in list(method.param_names) + list(gnames)}
    body, env = p.block(method.body, dict(start))
    if env is not None:
        body.append(Exit(None, tuple(sorted(env.items()))))
    body = seq(*body)

    versions: dict = {name: [v] for name, v in start.items()}
    defined, havoc = set(), set()
    for st in walk(body):
        if isinstance(st, Assign):
            defined.add(st.target)
        elif isinstance(st, PassiveLoop):
            havoc.update(v for _, v in st.havoc)
    for v in p.created:
        if v in defined or v in havoc:
            versions.setdefault(base_name(v), []).append(v)
    frame = tuple(sorted(method.globals_written(program)))
    return PassiveMethod(
        original=method,
        body=body,
        versions={k: tuple(v) for k, v in versions.items()},
        env=env_types,
        globals=gnames,
        frame=frame,
        defined=frozenset(defined),
        havoc=frozenset(havoc),
    )


def cfg_size(pm) -> int:
    """Statement and branch node count of a passive body (or plain statement)."""
    body = pm.body if isinstance(pm, PassiveMethod) else pm
    return _size(body)


def _size(s) -> int:
    if s is None:
        return 0
    if isinstance(s, Seq):
        return _size(s.first) + _size(s.second)
    if isinstance(s, If):
        return 1 + _size(s.then) + _size(s.else_)
    if isinstance(s, (While, PassiveLoop)):
        return 1 + _size(s.body)
    return 1
