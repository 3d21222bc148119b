"""Members of the length-two variety embed into a tree-shaped host.

For a lattice in the length-two variety the library builds a poset with
one root per dependency-minimal join-irreducible and one leaf per
dependency edge, then verifies the embedding into its convex-set lattice
rather than trusting the construction.  Non-members are refused with a
replayable witness.
"""

from convexica.colattice import co_lattice
from convexica.errors import NotInSub2
from convexica.lattice import from_colattice
from convexica.poset import chain, pij
from convexica.variety import gamma_embedding, revalidate

l = from_colattice(co_lattice(pij(2, 2)))
g = gamma_embedding(l)

print("source lattice size:", l.n)
print("host poset nodes:", " ".join(g.gamma.labels))
print("host covers:", sorted((g.gamma.labels[a], g.gamma.labels[b])
                             for a, b in g.gamma.covers))
print("flags: embedding=%s bounds=%s length<=2=%s tree-like=%s" % (
    g.is_embedding, g.bounds_preserved, g.length_le_2, g.tree_like))
print("atom-preserving (only reported when the source is si):",
      g.atom_preserving)

print("\nwhere a few elements land:")
for lab in ("{i0}", "{p}", "{i0,p}", "{i0,i1}"):
    idx = l.index[lab]
    print(f"  {lab:9s} -> {sorted(g.gamma.labels_of(g.phi[idx]))}")

# a lattice of length three is turned away with evidence
tall = from_colattice(co_lattice(chain(4)))
try:
    gamma_embedding(tall)
except NotInSub2 as exc:
    print("\nCo(chain(4)) refused:", exc)
    print("witness revalidates:", revalidate(tall, exc.witness))
