"""From generators to a bounded product of diamond lattices.

Any member of the length-two variety generated by m elements embeds into
a finite product of convex-set lattices over one-middle-point posets,
each truncated to at most 2^m - 1 outer points.  The pipeline below runs
the whole construction and verifies every step on the way: quotient
homomorphisms, kernels, truncation bounds, and injectivity of the
combined map.
"""

from convexica.colattice import co_lattice
from convexica.lattice import from_colattice
from convexica.poset import pij
from convexica.variety import sub2_canonical_form

l = from_colattice(co_lattice(pij(2, 2)))
gens = ["{i0}", "{i1}", "{p}", "{j0}", "{j1}"]
form = sub2_canonical_form(l, gens)

print("source:", l.n, "elements,", form.m, "generators")
print("outer-point bound per factor: 2^%d - 1 = %d" % (form.m, form.bound))
print("factors:")
for fac in form.factors:
    print("  kind=%-10s poset=%s" % (fac.kind, " ".join(fac.poset.labels)))
print("diagonal injective:", form.diagonal_injective)
print("all factors within bound:", form.all_within_bound)
print("generators generate:", form.gens_generate)

# the JSON view is what the CLI prints with --json
doc = form.to_json()
print("\njson keys:", sorted(doc.keys()))
print("factor kinds:", [f["kind"] for f in doc["factors"]])
