"""Identity verdicts carry witnesses you can replay.

Checks the built-in identities on three classic lattices and shows how a
failing verdict names a concrete assignment that anyone can re-evaluate,
with no trust in the original run required.
"""

from convexica.colattice import co_lattice
from convexica.lattice import from_colattice, from_leq_pairs
from convexica.poset import chain
from convexica.terms import check_identity, identity_by_name, \
    reevaluate_witness

pentagon = from_leq_pairs(
    "0 x y z 1".split(),
    [("0", "x"), ("0", "y"), ("x", "z"), ("z", "1"), ("y", "1")])
diamond = from_leq_pairs(
    "0 x y z 1".split(),
    [("0", t) for t in "xyz"] + [(t, "1") for t in "xyz"])
tall = from_colattice(co_lattice(chain(4)))

for name in ("DIST", "S", "U", "B", "L2"):
    ident = identity_by_name(name)
    print(f"--- {name} ---")
    for tag, l in (("pentagon", pentagon), ("diamond", diamond),
                   ("Co(chain(4))", tall)):
        v = check_identity(l, ident)
        line = f"  {tag:13s} holds={v.holds}"
        if not v.holds:
            line += f"  witness at #{v.index}: {v.assignment}"
        print(line)

# replaying a witness is just evaluating both sides once
v = check_identity(tall, identity_by_name("L2"))
lhs, rhs = reevaluate_witness(tall, identity_by_name("L2"), v.assignment)
print("\nreplay of the L2 witness on Co(chain(4)):")
print("  lhs =", lhs)
print("  rhs =", rhs)
print("  still a counterexample:", lhs != rhs)
