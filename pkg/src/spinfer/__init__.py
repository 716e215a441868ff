"""Postcondition inference by strongest-postcondition symbolic execution,
with flatten-and-recombine compaction of the resulting specifications."""

from spinfer.lang import parse, typecheck, parse_expr
from spinfer.passive import passivize, cfg_size
from spinfer.spec import Atom, Case, Leaf, Disjunction, Distrib, cases, pre, rest, flatten
from spinfer.spengine import sp, infer_raw, raw_tree
from spinfer.far import far, LEXICAL, EquivalenceRelation
from spinfer.pipeline import infer_method, infer_source, InferenceResult, Status

__all__ = [
    "parse", "typecheck", "parse_expr",
    "passivize", "cfg_size",
    "Atom", "Case", "Leaf", "Disjunction", "Distrib", "cases", "pre", "rest", "flatten",
    "sp", "infer_raw", "raw_tree",
    "far", "LEXICAL", "EquivalenceRelation",
    "infer_method", "infer_source", "InferenceResult", "Status",
]
