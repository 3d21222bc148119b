"""The lattice Co(P) of order-convex subsets of a finite poset.

Elements are bitmasks over the host poset, kept in canonical order (size,
then sorted index tuple) with index 0 the empty set.  Meet is intersection,
join is the convex hull of the union.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotDClosed, TooLarge
from .poset import (
    DClosedSet,
    d_closed_sets,
    hull_mask,
    is_d_closed_mask,
    iter_bits,
    _mask_sort_key,
)

CO_ENUM_BOUND = 1 << 22


class CoLattice:
    """Co(P): all convex subsets of a host poset, with lattice structure."""

    def __init__(self, poset, masks):
        self.poset = poset
        self.elements = sorted(masks, key=_mask_sort_key)
        self.index = {m: i for i, m in enumerate(self.elements)}

    @property
    def n(self):
        return len(self.elements)

    def join_mask(self, a, b):
        return hull_mask(self.poset, a | b)

    def meet_mask(self, a, b):
        return a & b

    def atoms(self):
        return [1 << i for i in range(self.poset.n)]

    def label_of(self, mask):
        return "{" + ",".join(self.poset.labels_of(mask)) + "}"

    def __repr__(self):
        return f"CoLattice({self.n} convex sets over {self.poset.n} points)"


def co_lattice(p, bound=CO_ENUM_BOUND):
    """Enumerate Co(P) by growing convex sets one element at a time.

    Every nonempty convex set arises from a smaller one by adding a maximal
    member and re-closing, so the search from the empty set is exhaustive.
    """
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for m in frontier:
            for e in range(p.n):
                bit = 1 << e
                if m & bit:
                    continue
                h = hull_mask(p, m | bit)
                if h not in seen:
                    seen.add(h)
                    if len(seen) > bound:
                        raise TooLarge(
                            f"Co(P) exceeds enumeration bound {bound}")
                    nxt.append(h)
        frontier = nxt
    return CoLattice(p, seen)


@dataclass
class QuotientMap:
    """Erasure map X -> X \\ U onto the convex sets of the complement."""

    source: CoLattice
    dclosed: DClosedSet
    target: CoLattice
    mapping: np.ndarray  # source element index -> target element index
    hom_verified: bool
    kernel_verified: bool
    exhaustive: bool

    def apply_mask(self, mask):
        return _strip(mask, self.dclosed.mask, self._positions)


def _strip(mask, umask, positions):
    out = 0
    for z in iter_bits(mask & ~umask):
        out |= 1 << positions[z]
    return out


QUOTIENT_EXHAUSTIVE_BOUND = 512


def quotient(co, u, seed=0, samples=4096):
    """Quotient of Co(P) along a D-closed set U, realized on Co(P \\ U).

    Verifies the join/meet preservation and the kernel characterization
    (X ~ Y iff X and Y agree outside U): exhaustively on all pairs when the
    lattice is small, on a seeded sample otherwise.
    """
    p = co.poset
    if not is_d_closed_mask(p, u.mask):
        raise NotDClosed(f"{p.labels_of(u.mask)} is not D-closed")
    keep = [i for i in range(p.n) if not (u.mask >> i) & 1]
    positions = {orig: pos for pos, orig in enumerate(keep)}
    sub = p.subposet(keep)
    target = co_lattice(sub)
    mapping = np.empty(co.n, dtype=np.int64)
    for i, m in enumerate(co.elements):
        mapping[i] = target.index[_strip(m, u.mask, positions)]

    exhaustive = co.n <= QUOTIENT_EXHAUSTIVE_BOUND
    if exhaustive:
        pairs = ((i, j) for i in range(co.n) for j in range(co.n))
    else:
        rng = np.random.default_rng(seed)
        pairs = zip(rng.integers(0, co.n, samples),
                    rng.integers(0, co.n, samples))
    hom_ok = True
    ker_ok = True
    for i, j in pairs:
        a, b = co.elements[int(i)], co.elements[int(j)]
        ja = target.elements[mapping[int(i)]]
        jb = target.elements[mapping[int(j)]]
        if (mapping[co.index[co.join_mask(a, b)]] != target.index[target.join_mask(ja, jb)]
                or mapping[co.index[a & b]] != target.index[ja & jb]):
            hom_ok = False
        if (ja == jb) != ((a | u.mask) == (b | u.mask)):
            ker_ok = False
    qm = QuotientMap(co, u, target, mapping, hom_ok, ker_ok, exhaustive)
    qm._positions = positions
    return qm


@dataclass
class CsiReport:
    """Whether Co(P) is completely subdirectly irreducible."""

    csi: bool
    least: DClosedSet | None
    incomparable_pair: tuple | None


def is_completely_si(p):
    """Co(P) has a least nontrivial complete congruence iff the host has a
    least nonempty D-closed subset."""
    sets, least = d_closed_sets(p)
    if least is not None:
        return CsiReport(True, least, None)
    nonempty = [s for s in sets if s.mask]
    minimal = [s for s in nonempty
               if not any(t.mask != s.mask and t.mask & ~s.mask == 0
                          for t in nonempty)]
    pair = None
    for i in range(len(minimal)):
        for j in range(i + 1, len(minimal)):
            a, b = minimal[i], minimal[j]
            if a.mask & ~b.mask and b.mask & ~a.mask:
                pair = (a, b)
                break
        if pair:
            break
    return CsiReport(False, None, pair)


@dataclass
class SubdirectDecomposition:
    poset: object
    factors: list  # of (DClosedSet, QuotientMap)
    intersection_empty: bool
    diagonal_injective: bool
    factors_csi: bool


def subdirect_decomposition(p, seed=0):
    """Decompose Co(P) along the completely meet-irreducible D-closed sets.

    Each factor Co(P \\ U_i) is completely subdirectly irreducible and the
    diagonal of the quotient maps separates points.
    """
    sets, _ = d_closed_sets(p)
    masks = [s.mask for s in sets]
    factors = []
    co = co_lattice(p)
    inter = p.full_mask()
    for s in sets:
        uppers = [m for m in masks if m != s.mask and s.mask & ~m == 0]
        covers = [m for m in uppers
                  if not any(m2 != m and m2 & ~m == 0 for m2 in uppers)]
        if len(covers) == 1:
            factors.append((s, quotient(co, s, seed=seed)))
            inter &= s.mask
    intersection_empty = inter == 0
    signatures = {tuple(int(q.mapping[i]) for _, q in factors)
                  for i in range(co.n)}
    injective = len(signatures) == co.n
    csi_ok = all(is_completely_si(q.target.poset).csi for _, q in factors)
    return SubdirectDecomposition(p, factors, intersection_empty, injective, csi_ok)


@dataclass
class P2Class:
    """Shape classification of completely SI posets of length <= 2."""

    kind: str  # "singleton" | "pij" | "not_in_p2"
    i: int | None = None
    j: int | None = None
    middle: int | None = None
    i_set: frozenset = frozenset()
    j_set: frozenset = frozenset()


def classify_p2(p):
    """Match P against the singleton / one-middle-point shapes."""
    if p.n == 1:
        return P2Class("singleton")
    if p.n == 0:
        return P2Class("not_in_p2")
    mins = {i for i in range(p.n) if p.down_masks[i] == 1 << i}
    maxs = {i for i in range(p.n) if p.up_masks[i] == 1 << i}
    middles = [i for i in range(p.n) if i not in mins and i not in maxs]
    if len(middles) != 1:
        return P2Class("not_in_p2")
    q = middles[0]
    i_set = mins - maxs
    j_set = maxs - mins
    if not i_set or not j_set or i_set | j_set | {q} != set(range(p.n)):
        return P2Class("not_in_p2")
    want = {(x, q) for x in i_set} | {(q, y) for y in j_set}
    if set(p.covers) != want:
        return P2Class("not_in_p2")
    return P2Class("pij", len(i_set), len(j_set), q,
                   frozenset(i_set), frozenset(j_set))


def co_cardinality_pij(i, j):
    """Closed form for |Co(P)| on the one-middle-point posets."""
    return (1 << (i + j + 1)) - ((1 << i) - 1) * ((1 << j) - 1)
