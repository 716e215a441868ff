"""Recursive-descent parser for `.imp` source files and specification atoms."""

from __future__ import annotations

import re
from dataclasses import dataclass

from spinfer.lang.ast import (
    BOOL, INT, VOID,
    Assign, Binary, BoolLit, Decl, GlobalDecl, If, IntLit, MethodDecl, Old,
    Param, Program, Result, Return, Skip, Unary, Var, While, seq,
)

KEYWORDS = {
    "int", "bool", "void", "global", "if", "else", "while", "invariant",
    "return", "skip", "true", "false",
}
TYPE_WORDS = {"int": INT, "bool": BOOL}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*|/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<special>\\old|\\result)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:\$\d+)?)
  | (?P<op>==>|==|!=|<=|>=|&&|\|\||[-+*/<>!=(){},;])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # int, ident, keyword, special, op, eof
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class ParseError(Exception):
    """Syntax error(s); `errors` holds one Diagnostic per problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


def tokenize(text: str, *, spec_mode: bool = False) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError([Diagnostic(line, i - line_start + 1, f"unexpected character {text[i]!r}")])
        kind = m.lastgroup
        tok = m.group()
        col = i - line_start + 1
        if kind != "ws":
            if kind == "ident":
                if "$" in tok and not spec_mode:
                    raise ParseError([Diagnostic(line, col, f"'$' is not allowed in identifiers: {tok!r}")])
                if tok in KEYWORDS:
                    kind = "keyword"
            elif kind == "special" and not spec_mode:
                raise ParseError([Diagnostic(line, col, f"{tok} is only allowed in specifications")])
            tokens.append(Token(kind, tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = i + tok.rfind("\n") + 1
        i = m.end()
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


# binary precedence levels, loosest first; `==>` is right-associative
_LEVELS = [("==>",), ("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("+", "-"), ("*", "/")]


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def error(self, expected):
        tok = self.cur
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        exp = ", ".join(sorted(expected))
        raise ParseError([Diagnostic(tok.line, tok.col, f"expected one of {{{exp}}}, found {found}")])

    def at(self, *texts) -> bool:
        tok = self.cur
        return tok.kind in ("op", "keyword", "special") and tok.text in texts

    def accept(self, *texts):
        if self.at(*texts):
            tok = self.cur
            self.i += 1
            return tok
        return None

    def expect(self, *texts) -> Token:
        tok = self.accept(*texts)
        if tok is None:
            self.error(set(texts))
        return tok

    def ident(self) -> Token:
        tok = self.cur
        if tok.kind != "ident":
            self.error({"identifier"})
        self.i += 1
        return tok

    # -- expressions

    def expr(self, level: int = 0):
        if level == len(_LEVELS):
            return self.unary()
        ops = _LEVELS[level]
        left = self.expr(level + 1)
        if ops == ("==>",):
            tok = self.accept("==>")
            if tok:
                right = self.expr(level)
                return Binary("==>", left, right, pos=(tok.line, tok.col))
            return left
        while True:
            tok = self.accept(*ops)
            if tok is None:
                return left
            right = self.expr(level + 1)
            left = Binary(tok.text, left, right, pos=(tok.line, tok.col))

    def unary(self):
        tok = self.accept("!", "-")
        if tok is None:
            return self.primary()
        if tok.text == "-" and self.cur.kind == "int":
            lit = self.cur
            self.i += 1
            return IntLit(-int(lit.text), pos=(tok.line, tok.col))
        return Unary(tok.text, self.unary(), pos=(tok.line, tok.col))

    def primary(self):
        tok = self.cur
        where = (tok.line, tok.col)
        if tok.kind == "int":
            self.i += 1
            return IntLit(int(tok.text), pos=where)
        if tok.kind == "ident":
            self.i += 1
            return Var(tok.text, pos=where)
        if self.accept("true"):
            return BoolLit(True, pos=where)
        if self.accept("false"):
            return BoolLit(False, pos=where)
        if self.accept("\\result"):
            return Result(pos=where)
        if self.accept("\\old"):
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return Old(inner, pos=where)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        self.error({"expression"})

    # -- statements

    def block(self):
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.cur.kind == "eof":
                self.error({"}"})
            stmts.append(self.stmt())
        self.expect("}")
        return seq(*stmts)

    def stmt(self):
        tok = self.cur
        where = (tok.line, tok.col)
        if self.accept("skip"):
            self.expect(";")
            return Skip(pos=where)
        if self.at("int", "bool"):
            ty = TYPE_WORDS[self.cur.text]
            self.i += 1
            name = self.ident().text
            init = None
            if self.accept("="):
                init = self.expr()
            self.expect(";")
            return Decl(name, ty, init, pos=where)
        if self.accept("if"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.block()
            else_ = self.block() if self.accept("else") else None
            return If(cond, then, else_, pos=where)
        if self.accept("while"):
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect("invariant")
            self.expect("(")
            inv = self.expr()
            self.expect(")")
            body = self.block()
            return While(cond, inv, body, pos=where)
        if self.accept("return"):
            if self.accept(";"):
                return Return(None, pos=where)
            value = self.expr()
            self.expect(";")
            return Return(value, pos=where)
        if tok.kind == "ident":
            self.i += 1
            self.expect("=")
            rhs = self.expr()
            self.expect(";")
            return Assign(tok.text, rhs, pos=where)
        self.error({"skip", "int", "bool", "if", "while", "return", "identifier"})

    # -- top level

    def type_(self, allow_void=False):
        if self.at("int", "bool") or (allow_void and self.at("void")):
            word = self.cur.text
            self.i += 1
            return VOID if word == "void" else TYPE_WORDS[word]
        self.error({"int", "bool"} | ({"void"} if allow_void else set()))

    def program(self):
        globals_, methods = [], []
        while self.cur.kind != "eof":
            tok = self.cur
            where = (tok.line, tok.col)
            if self.accept("global"):
                ty = self.type_()
                name = self.ident().text
                self.expect(";")
                globals_.append(GlobalDecl(name, ty, pos=where))
                continue
            if not self.at("int", "bool", "void"):
                self.error({"global", "int", "bool", "void"})
            ret = self.type_(allow_void=True)
            name = self.ident().text
            self.expect("(")
            params = []
            if not self.at(")"):
                while True:
                    ptok = self.cur
                    pty = self.type_()
                    pname = self.ident().text
                    params.append(Param(pname, pty, pos=(ptok.line, ptok.col)))
                    if not self.accept(","):
                        break
            self.expect(")")
            body = self.block()
            methods.append(MethodDecl(name, tuple(params), ret, body, pos=where))
        return Program(tuple(globals_), tuple(methods))


def parse(source: str) -> Program:
    """Parse a whole `.imp` file. Raises ParseError on syntax errors or duplicate
    top-level declarations."""
    program = _Parser(tokenize(source)).program()
    seen: dict = {}
    errors = []
    for decl in list(program.globals) + list(program.methods):
        kind = "global" if isinstance(decl, GlobalDecl) else "method"
        key = (kind, decl.name)
        if key in seen:
            line, col = decl.pos or (0, 0)
            errors.append(Diagnostic(line, col, f"duplicate {kind} declaration {decl.name!r}"))
        seen[key] = decl
    if errors:
        raise ParseError(errors)
    return program


def parse_expr(text: str, *, spec_mode: bool = True):
    """Parse a single expression. In spec mode `\\old`, `\\result`, `==>` and
    passive names like `x$1` are accepted."""
    p = _Parser(tokenize(text, spec_mode=spec_mode))
    e = p.expr()
    if p.cur.kind != "eof":
        p.error({"end of input"})
    return e
