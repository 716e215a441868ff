"""The toy imperative language: AST, parser, printer and type checker."""

from spinfer.lang.ast import *  # noqa: F401,F403
from spinfer.lang.parser import ParseError, Diagnostic, parse, parse_expr, tokenize
from spinfer.lang.printer import canonical, pretty, print_method, print_program, print_stmt
from spinfer.lang.checker import TypeCheckError, TypeEnv, check_expr, method_env, typecheck
