"""
From code to a compact contract
===============================

One small method taken through every stage: passive form, raw cases,
externalized cases, the compacted tree, and the emitted contract.
"""

from spinfer import infer_source
from spinfer.emit import emit_tr
from spinfer.passive import passivize
from spinfer.pipeline import load_program
from spinfer.spec import cases

source = """
int cmp(int a, int b) {
  int c = a;
  if (c < b) { return -1; }
  else { if (c > b) { return 1; } else { return 0; } }
}
"""

# passive form: every assignment targets a fresh version, so SP needs no
# existential for the overwritten value
program = load_program(source)
pm = passivize(program.method("cmp"), program)
print(pm.render())

(r,) = infer_source(source)

# raw cases still talk about versions like c$1
for c in cases(r.raw.spec):
    print(c.text())
print()

# after externalization only parameters, \result and \old(..) remain
for c in cases(r.snf):
    print(c.text())
print()

# shared `!(a < b)` gets factored out into a nested group
print(r.contract)

# the same meaning as one postcondition
print(emit_tr(r.spec))
print(r.before, "->", r.after)
