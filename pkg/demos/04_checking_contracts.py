"""
Checking contracts against the interpreter
==========================================

Bounded exhaustive checking: run the method on every small pre-state and
evaluate each enabled case on the resulting post-state.
"""

from spinfer import infer_source
from spinfer.oracle import satisfies
from spinfer.pipeline import load_program
from spinfer.spec import disjoin, leaf

source = """
global int total;
int add(int x) {
  if (x > 0) { total = total + x; }
  return total;
}
"""
program = load_program(source)
method = program.method("add")

(r,) = infer_source(source)
print(r.contract)
res = satisfies(method, r.spec, program, bound=2)
print("inferred:", res.ok, "states", res.checked)

# a hand-written contract with an off-by-one
wrong = disjoin([
    leaf(["x > 0"], ["total == \\old(total) + x + 1", "\\result == total"]),
    leaf(["!(x > 0)"], ["total == \\old(total)", "\\result == total"]),
])
res = satisfies(method, wrong, program, bound=2)
print("hand-written:", res.ok)
print(res.counterexample)
