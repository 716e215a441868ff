"""
Recombining cases on a toy specification
========================================

FAR works on opaque atoms, so plain letters are enough to watch it.
"""

from spinfer.emit import emit_contract
from spinfer.far import LEXICAL, far, to_graph
from spinfer.oracle import prop_equiv
from spinfer.refine import FrameInfo
from spinfer.spec import Case, from_cases

flat = from_cases([
    Case(("a", "b", "c"), ("x",)),
    Case(("a", "b", "d"), ("y",)),
    Case(("a", "e"), ("z",)),
    Case(("f",), ("w",)),
])

# edge weights count shared pre atoms
graph, W = to_graph({i: leaf.case for i, leaf in enumerate(flat.children)})
for (i, j), w in sorted(W.items()):
    if i < j and w:
        print(f"w({i},{j}) = {w}")

# one merge per component per round; the trace holds the unmerged count
trace = []
tree = far(flat, LEXICAL, trace=trace)
print("unmerged per round:", trace)

pure = FrameInfo((), True)
print(emit_contract(flat, pure))
print(emit_contract(tree, pure))

# each atom as a free proposition: nothing changed in meaning
print("equivalent:", prop_equiv(flat, tree))
