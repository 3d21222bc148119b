"""Finite posets with order-convexity machinery.

Elements are indexed 0..n-1 in label declaration order; subsets travel as
int bitmasks (bit i = element i).  The comparability matrix is a numpy bool
array ``leq`` with ``leq[i, j]`` meaning i <= j.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import (
    CycleDetected,
    EmptyPoset,
    TooLarge,
    UnknownLabel,
    ZeroSize,
)


class Poset:
    """An immutable finite poset over labelled elements."""

    def __init__(self, labels, leq, _validate=True):
        self.labels = tuple(str(x) for x in labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate element labels")
        leq = np.asarray(leq, dtype=bool).copy()
        n = len(self.labels)
        if leq.shape != (n, n):
            raise ValueError("leq matrix shape does not match label count")
        if _validate and n:
            if not leq.diagonal().all():
                raise ValueError("leq not reflexive")
            if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
                raise CycleDetected("leq not antisymmetric")
            if ((leq @ leq) & ~leq).any():
                raise ValueError("leq not transitive")
        leq.setflags(write=False)
        self.leq = leq
        self.index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def n(self):
        return len(self.labels)

    @cached_property
    def lt(self):
        out = self.leq & ~np.eye(self.n, dtype=bool)
        out.setflags(write=False)
        return out

    @cached_property
    def covers(self):
        """Cover pairs (i, j) with i covered by j: i < j, nothing between."""
        lt = self.lt
        cov = lt & ~(lt @ lt)
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(cov))]

    @cached_property
    def up_masks(self):
        return [_row_mask(self.leq[i]) for i in range(self.n)]

    @cached_property
    def down_masks(self):
        return [_row_mask(self.leq[:, i]) for i in range(self.n)]

    @cached_property
    def cover_triples(self):
        """All (x, p, y) with x covered by p covered by y."""
        ups = {}
        for i, j in self.covers:
            ups.setdefault(i, []).append(j)
        out = []
        for x, p in self.covers:
            for y in ups.get(p, ()):
                out.append((x, p, y))
        return out

    def full_mask(self):
        return (1 << self.n) - 1

    def mask_of(self, elems):
        """Bitmask for an iterable of labels or indices."""
        m = 0
        for e in elems:
            if isinstance(e, str):
                if e not in self.index:
                    raise UnknownLabel(f"unknown element {e!r}")
                m |= 1 << self.index[e]
            else:
                i = int(e)
                if not 0 <= i < self.n:
                    raise UnknownLabel(f"element index {i} out of range")
                m |= 1 << i
        return m

    def labels_of(self, mask):
        return tuple(self.labels[i] for i in iter_bits(mask))

    def subposet(self, keep):
        """Induced subposet on the given element indices (order inherited)."""
        keep = sorted(set(int(i) for i in keep))
        labels = [self.labels[i] for i in keep]
        sub = self.leq[np.ix_(keep, keep)]
        return Poset(labels, sub, _validate=False)

    def __repr__(self):
        return f"Poset({self.n} elements)"


def _row_mask(row):
    m = 0
    for j in np.nonzero(row)[0]:
        m |= 1 << int(j)
    return m


def iter_bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def poset_from_covers(labels, cover_pairs):
    """Build a poset as the reflexive-transitive closure of cover pairs.

    Raises CycleDetected if the pairs induce a directed cycle and
    UnknownLabel if a pair mentions an undeclared element.
    """
    labels = [str(x) for x in labels]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate element labels")
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    rel = np.eye(n, dtype=bool)
    for a, b in cover_pairs:
        for lab in (a, b):
            if lab not in index:
                raise UnknownLabel(f"unknown element {lab!r} in cover pair")
        if a == b:
            raise CycleDetected(f"self-loop on {a!r}")
        rel[index[a], index[b]] = True
    # Warshall closure via repeated boolean squaring
    while True:
        nxt = rel | (rel @ rel)
        if (nxt == rel).all():
            break
        rel = nxt
    if (rel & rel.T & ~np.eye(n, dtype=bool)).any():
        raise CycleDetected("cover pairs induce a cycle")
    return Poset(labels, rel, _validate=False)


def chain(m):
    """Chain c0 < c1 < ... < c(m-1)."""
    if m <= 0:
        raise ZeroSize("chain size must be positive")
    labels = [f"c{i}" for i in range(m)]
    return poset_from_covers(labels, [(f"c{i}", f"c{i+1}") for i in range(m - 1)])


def antichain(m):
    """m pairwise incomparable elements a0..a(m-1)."""
    if m <= 0:
        raise ZeroSize("antichain size must be positive")
    labels = [f"a{i}" for i in range(m)]
    return poset_from_covers(labels, [])


def pij(i, j):
    """i minimal elements, one middle p, j maximal elements.

    Covers are exactly ix < p < jx; this is the shape of the completely
    subdirectly irreducible posets of length 2.
    """
    if i <= 0 or j <= 0:
        raise ZeroSize("pij sides must be positive")
    labels = [f"i{k}" for k in range(i)] + ["p"] + [f"j{k}" for k in range(j)]
    covers = [(f"i{k}", "p") for k in range(i)] + [("p", f"j{k}") for k in range(j)]
    return poset_from_covers(labels, covers)


_FAMILIES = {"chain": (chain, 1), "antichain": (antichain, 1), "pij": (pij, 2)}


def build_family(kind, *sizes):
    """Dispatch to chain/antichain/pij with deterministic labels."""
    if kind not in _FAMILIES:
        raise ValueError(f"unknown family {kind!r}")
    fn, arity = _FAMILIES[kind]
    if len(sizes) != arity:
        raise ValueError(f"family {kind!r} takes {arity} size argument(s)")
    return fn(*sizes)


def length(p):
    """Longest chain cardinality minus one."""
    if p.n == 0:
        raise EmptyPoset("length undefined on the empty poset")
    order = sorted(range(p.n), key=lambda i: p.down_masks[i].bit_count())
    height = [0] * p.n
    for i in order:
        below = p.down_masks[i] & ~(1 << i)
        if below:
            height[i] = 1 + max(height[j] for j in iter_bits(below))
    return max(height)


def hull_mask(p, mask):
    """Least convex superset, as a bitmask.

    One interval pass suffices: anything between two hull members is
    already between two members of the original set.
    """
    out = 0
    for z in range(p.n):
        if (p.down_masks[z] & mask) and (p.up_masks[z] & mask):
            out |= 1 << z
    return out


def is_convex(p, elems):
    """True if the set contains everything between two of its members."""
    m = elems if isinstance(elems, int) else p.mask_of(elems)
    return hull_mask(p, m) == m


def convex_closure(p, elems):
    """Least convex set containing the given elements, as labels."""
    m = elems if isinstance(elems, int) else p.mask_of(elems)
    return frozenset(p.labels_of(hull_mask(p, m)))


def is_tree_like(p):
    """True when the undirected cover graph is acyclic (a forest)."""
    parent = list(range(p.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in p.covers:
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        parent[ri] = rj
    return True


# ---------------------------------------------------------------------------
# D-closed subsets: for every cover chain x < p < y, membership of x or y
# forces membership of p.  These index the complete congruences of the
# convex-set lattice.

@dataclass(frozen=True)
class DClosedSet:
    poset: Poset
    mask: int

    @property
    def members(self):
        return frozenset(iter_bits(self.mask))

    @property
    def labels(self):
        return self.poset.labels_of(self.mask)

    def __le__(self, other):
        return self.mask & ~other.mask == 0


def is_d_closed_mask(p, mask):
    for x, q, y in p.cover_triples:
        if ((mask >> x) & 1 or (mask >> y) & 1) and not (mask >> q) & 1:
            return False
    return True


def d_closure_mask(p, mask):
    """Least D-closed superset (fixpoint of the forcing rule)."""
    triples = p.cover_triples
    changed = True
    while changed:
        changed = False
        for x, q, y in triples:
            if ((mask >> x) & 1 or (mask >> y) & 1) and not (mask >> q) & 1:
                mask |= 1 << q
                changed = True
    return mask


D_CLOSED_ENUM_BOUND = 20


def d_closed_sets(p, bound=D_CLOSED_ENUM_BOUND):
    """All D-closed subsets plus the least nonempty one when it exists.

    Returns (sets, least_nonempty).  The family is exactly the unions of
    singleton closures (it is closed under union, and every member is the
    union of the closures of its points), so it is generated by adding one
    singleton closure at a time.  Canonical order: size, then index tuple.
    """
    if p.n > bound:
        raise TooLarge(f"D-closed enumeration limited to {bound} elements")
    gens = [d_closure_mask(p, 1 << i) for i in range(p.n)]
    family = {0}
    for g in gens:
        family |= {s | g for s in family}
    ordered = sorted(family, key=_mask_sort_key)
    sets = [DClosedSet(p, m) for m in ordered]
    least = None
    for c in gens:
        if all(c & ~other == 0 for other in gens):
            least = DClosedSet(p, c)
            break
    return sets, least


def _mask_sort_key(mask):
    return (mask.bit_count(), tuple(iter_bits(mask)))


def all_convex_masks_bruteforce(p):
    """Oracle: filter every subset for convexity.  Test use only."""
    if p.n > 20:
        raise TooLarge("brute-force scan limited to 20 elements")
    return [m for m in range(1 << p.n) if hull_mask(p, m) == m]
