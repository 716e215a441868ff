"""
Case explosion and how much of it survives
==========================================

k if/else statements in a row give 2**k paths. Most combinations are
contradictory once conditions repeat, and the rest share prefixes.
"""

from spinfer import infer_source
from spinfer.generate import blowup_source
from spinfer.spec import cases

print(blowup_source(3))

print(f"{'k':>2} {'raw':>5} {'kept':>5} {'len before':>10} {'len after':>9} {'nest':>6}")
for k in range(1, 9):
    (r,) = infer_source(blowup_source(k))
    raw = len(cases(r.raw.spec))
    print(f"{k:>2} {raw:>5} {r.after['cases']:>5} {r.before['length']:>10} {r.after['length']:>9} "
          f"{r.before['nesting']:>3}->{r.after['nesting']}")

# the k=8 contract, for a look at the shape
(r,) = infer_source(blowup_source(8))
print(r.contract)
