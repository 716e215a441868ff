"""Seeded generators for programs and specifications used by tests and demos."""

from __future__ import annotations

import random

from spinfer.far import SpecGraph, ROOT
from spinfer.spec import Atom, Case, from_cases

_NAMES = ("a", "b", "c")


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


# -- programs -----------------------------------------------------------------


class _MethodGen:
    def __init__(self, rng: random.Random, variables, max_depth: int, max_branches: int):
        self.rng = rng
        self.vars = list(variables)
        self.max_depth = max_depth
        self.branches = max_branches

    def term(self):
        r = self.rng
        if r.random() < 0.6:
            return r.choice(self.vars)
        return str(r.randint(-2, 2))

    def expr(self, depth=0):
        r = self.rng
        if depth >= 2 or r.random() < 0.4:
            return self.term()
        op = r.choice(["+", "-", "*", "+", "-", "/"])
        return f"({self.expr(depth + 1)} {op} {self.expr(depth + 1)})"

    def cond(self):
        r = self.rng
        op = r.choice(["<", "<=", ">", ">=", "==", "!="])
        c = f"{self.expr(1)} {op} {self.expr(1)}"
        return f"!({c})" if r.random() < 0.15 else c

    def block(self, depth, indent):
        """Returns (lines, every path returns)."""
        r = self.rng
        pad = "  " * indent
        lines = []
        for _ in range(r.randint(1, 3)):
            k = r.random()
            if k < 0.45 or depth >= self.max_depth or self.branches <= 0:
                lines.append(f"{pad}{r.choice(self.vars)} = {self.expr()};")
            elif k < 0.9:
                self.branches -= 1
                lines.append(f"{pad}if ({self.cond()}) {{")
                then, t_ret = self.block(depth + 1, indent + 1)
                lines += then
                e_ret = False
                if r.random() < 0.75:
                    lines.append(f"{pad}}} else {{")
                    else_, e_ret = self.block(depth + 1, indent + 1)
                    lines += else_
                lines.append(f"{pad}}}")
                if t_ret and e_ret:
                    return lines, True
            else:
                lines.append(f"{pad}return {self.expr()};")
                return lines, True
        return lines, False


def random_method_source(seed, *, max_vars: int = 3, max_depth: int = 4, max_branches: int = 6,
                         name: str = "m") -> str:
    """A loop-free int method over at most `max_vars` int variables, one of
    which may be a global, with if-nesting depth at most `max_depth` and at
    most `max_branches` if statements."""
    rng = _rng(seed)
    variables = list(_NAMES[: rng.randint(1, max_vars)])
    glob = variables[-1] if len(variables) > 1 and rng.random() < 0.3 else None
    params = [v for v in variables if v != glob]
    gen = _MethodGen(rng, variables, max_depth, max_branches)
    lines = [f"global int {glob};"] if glob else []
    lines.append(f"int {name}({', '.join(f'int {p}' for p in params)}) {{")
    body, returns = gen.block(0, 1)
    lines += body
    if not returns:
        lines.append(f"  return {gen.expr()};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def blowup_source(k: int = 8, conditions=("a < b", "b < c", "a < c")) -> str:
    """`k` sequential if/else statements whose conditions cycle through a
    small pool, so the 2**k syntactic paths overlap heavily."""
    lines = ["int blowup(int a, int b, int c) {", "  int x = 0;"]
    for i in range(k):
        cond = conditions[i % len(conditions)]
        lines += [f"  if ({cond}) {{", f"    x = x + {i + 1};", "  } else {", f"    x = x - {i + 1};", "  }"]
    lines += ["  return x;", "}"]
    return "\n".join(lines) + "\n"


# -- specifications -----------------------------------------------------------


def atom_pool(n: int = 12, prefix: str = "p") -> list:
    return [Atom.parse(f"{prefix}{i}") for i in range(n)]


def random_snf(seed, *, cases=(2, 16), pool: int = 12, pre_size=(1, 5), rest_pool: int = 4,
               negate: float = 0.3):
    """A random SNF specification; pre atoms come from `pool` propositions
    (optionally negated), rest atoms from a separate small pool."""
    rng = _rng(seed)
    out = []
    for _ in range(rng.randint(*cases)):
        k = rng.randint(*pre_size)
        pre = [f"!p{i}" if rng.random() < negate else f"p{i}" for i in rng.sample(range(pool), min(k, pool))]
        rest = [f"q{i}" for i in rng.sample(range(rest_pool), rng.randint(0, 2))]
        out.append(Case(tuple(Atom.parse(t) for t in pre), tuple(Atom.parse(t) for t in rest)))
    return from_cases(out)


def random_flat_tree(seed, *, leaves=(1, 50)):
    """A residual graph whose every vertex is a leaf adjacent to the root.
    Returns (graph, leaf cases in edge order)."""
    rng = _rng(seed)
    g = SpecGraph()
    cs = []
    for i in range(rng.randint(*leaves)):
        pre = tuple(Atom.parse(f"x{i} > {j}") for j in range(rng.randint(0, 3)))
        c = Case(pre, (Atom.parse(f"\\result == {i}"),))
        g.add(f"u{i}", c, rank=i)
        g.edges.append((ROOT, f"u{i}"))
        cs.append(c)
    return g, cs
