"""A first walk through the library.

Builds a small poset, enumerates its order-convex subsets, and pokes at
the resulting lattice: joins are convex hulls of unions, meets are plain
intersections.  Ends with the complete-congruence summary for the poset.
"""

from convexica.colattice import co_lattice, is_completely_si
from convexica.lattice import from_colattice, join_irreducibles
from convexica.poset import length, pij, poset_from_covers

fence = poset_from_covers(
    "low mid high spur".split(),
    [("low", "mid"), ("mid", "high"), ("low", "spur")])

print("poset:", " ".join(fence.labels))
print("covers:", sorted((fence.labels[a], fence.labels[b])
                        for a, b in fence.covers))
print("length:", length(fence))

co = co_lattice(fence)
print("\nconvex subsets:", co.n)
for mask in co.elements:
    print("  ", "{" + ",".join(sorted(fence.labels_of(mask))) + "}")

l = from_colattice(co)
x = l.index["{low,mid}"]
y = l.index["{spur}"]
print("\n{low,mid} v {spur} =", l.labels[int(l.join[x, y])])
print("{low,mid} ^ {high} =",
      l.labels[int(l.meet[x, l.index['{high}']])])
print("join-irreducibles:", sorted(l.labels[i] for i in join_irreducibles(l)))

report = is_completely_si(fence)
print("\nleast nonempty dependency-closed subset exists:", report.csi)
if report.csi:
    print("it is:", sorted(fence.labels_of(report.least.mask)))

# the one-middle-point family is the csi building block of length two
diamond = pij(2, 3)
print("\npij(2,3) has", co_lattice(diamond).n, "convex subsets")
print("csi:", is_completely_si(diamond).csi)
