"""Text renderings of expressions and programs.

`canonical` is the atom identity used by lexical equivalence: every nested
binary operation is parenthesised, so the rendering is injective on
structure. `pretty` uses minimal parentheses and is what the program printer
emits.
"""

from __future__ import annotations

from functools import lru_cache

from spinfer.lang.ast import (
    BOOL, INT, VOID,
    Assign, Binary, BoolLit, Decl, If, IntLit, Old, Result, Return, Seq, Skip,
    Unary, Var, While, flatten_seq,
)

_PREC = {"==>": 0, "||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, "<=": 4, ">": 4, ">=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6}
_TYPE_WORD = {INT: "int", BOOL: "bool", VOID: "void"}


def _atomic(e) -> str | None:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Result):
        return "\\result"
    return None


@lru_cache(maxsize=65536)
def canonical(e) -> str:
    text = _atomic(e)
    if text is not None:
        return text
    if isinstance(e, Old):
        return f"\\old({canonical(e.expr)})"
    if isinstance(e, Unary):
        inner = canonical(e.operand)
        if _atomic(e.operand) is None and not isinstance(e.operand, Old):
            inner = f"({inner})"
        return f"{e.op}{inner}"
    if isinstance(e, Binary):
        return f"{_canon_operand(e.left)} {e.op} {_canon_operand(e.right)}"
    raise TypeError(f"not an expression: {e!r}")


def _canon_operand(e) -> str:
    text = canonical(e)
    return f"({text})" if isinstance(e, Binary) else text


def pretty(e, parent_prec: int = -1) -> str:
    text = _atomic(e)
    if text is not None:
        return text
    if isinstance(e, Old):
        return f"\\old({pretty(e.expr)})"
    if isinstance(e, Unary):
        inner = pretty(e.operand, 7)
        if isinstance(e.operand, Unary) or (e.op == "-" and isinstance(e.operand, IntLit)):
            inner = f"({inner})"
        return f"{e.op}{inner}"
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        if e.op == "==>":
            left, right = pretty(e.left, prec + 1), pretty(e.right, prec)
        else:
            left, right = pretty(e.left, prec), pretty(e.right, prec + 1)
        out = f"{left} {e.op} {right}"
        return f"({out})" if prec < parent_prec else out
    raise TypeError(f"not an expression: {e!r}")


def print_stmt(s, indent: int = 1) -> list[str]:
    pad = "  " * indent
    out: list[str] = []
    for st in flatten_seq(s):
        if isinstance(st, Skip):
            out.append(f"{pad}skip;")
        elif isinstance(st, Assign):
            out.append(f"{pad}{st.target} = {pretty(st.rhs)};")
        elif isinstance(st, Decl):
            init = "" if st.init is None else f" = {pretty(st.init)}"
            out.append(f"{pad}{_TYPE_WORD[st.type]} {st.name}{init};")
        elif isinstance(st, If):
            out.append(f"{pad}if ({pretty(st.cond)}) {{")
            out += print_stmt(st.then, indent + 1)
            if st.else_ is not None:
                out.append(f"{pad}}} else {{")
                out += print_stmt(st.else_, indent + 1)
            out.append(f"{pad}}}")
        elif isinstance(st, While):
            out.append(f"{pad}while ({pretty(st.cond)}) invariant ({pretty(st.invariant)}) {{")
            out += print_stmt(st.body, indent + 1)
            out.append(f"{pad}}}")
        elif isinstance(st, Return):
            out.append(f"{pad}return;" if st.value is None else f"{pad}return {pretty(st.value)};")
        elif hasattr(st, "render"):
            out += st.render(indent)
        else:
            raise TypeError(f"not a statement: {st!r}")
    return out


def print_method(m) -> str:
    params = ", ".join(f"{_TYPE_WORD[p.type]} {p.name}" for p in m.params)
    lines = [f"{_TYPE_WORD[m.ret_type]} {m.name}({params}) {{"]
    lines += print_stmt(m.body, 1)
    lines.append("}")
    return "\n".join(lines)


def print_program(p) -> str:
    chunks = []
    if p.globals:
        chunks.append("\n".join(f"global {_TYPE_WORD[g.type]} {g.name};" for g in p.globals))
    chunks += [print_method(m) for m in p.methods]
    return "\n\n".join(chunks) + ("\n" if chunks else "")
