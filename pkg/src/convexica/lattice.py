"""Finite lattices with explicit join/meet tables.

Construction paths: from an order relation (tables computed, lattice axioms
checked), from a CoLattice, or from a join presentation (generators plus
inequalities, realized as a closure system over the generator set).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapExceeded, CycleDetected, NotALattice, TooLarge, UnknownLabel
from .poset import iter_bits, _mask_sort_key


class FinLattice:
    """A finite lattice on elements 0..n-1 with precomputed tables."""

    def __init__(self, labels, leq, join, meet):
        self.labels = list(labels)
        self.leq = leq
        self.join = join
        self.meet = meet
        for m in (self.leq, self.join, self.meet):
            m.setflags(write=False)
        self.index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def n(self):
        return len(self.labels)

    @cached_property
    def lt(self):
        return self.leq & ~np.eye(self.n, dtype=bool)

    @cached_property
    def bottom(self):
        return int(np.nonzero(self.leq.all(axis=1))[0][0])

    @cached_property
    def top(self):
        return int(np.nonzero(self.leq.all(axis=0))[0][0])

    @cached_property
    def covers(self):
        """covers[i, j] true when j covers i."""
        return self.lt & ~(self.lt @ self.lt)

    @cached_property
    def join_irreducibles(self):
        """Elements with exactly one lower cover."""
        counts = self.covers.sum(axis=0)
        return [int(i) for i in np.nonzero(counts == 1)[0]]

    def lower_covers(self, i):
        return [int(j) for j in np.nonzero(self.covers[:, i])[0]]

    def join_of(self, elems):
        acc = self.bottom
        for e in elems:
            acc = int(self.join[acc, e])
        return acc

    def meet_of(self, elems):
        acc = self.top
        for e in elems:
            acc = int(self.meet[acc, e])
        return acc

    def cover_matrices(self, p):
        """For a fixed p: boolean n x n matrices over pairs (a, b) flagging
        p <= a v b, nontriviality, and minimality in each coordinate."""
        cond = self.leq[p][self.join]
        below_p = self.leq[p]
        nontrivial = cond & ~below_p[:, None] & ~below_p[None, :]
        li = self.lt.astype(np.int32)
        ci = cond.astype(np.int32)
        min_left = cond & ((li.T @ ci) == 0)
        min_right = cond & ((ci @ li) == 0)
        return cond, nontrivial, min_left, min_right

    @cached_property
    def d_edges(self):
        """The join-dependency relation on join-irreducibles: p D q when
        some q v x covers p minimally at q, with p not under q or x."""
        ji = set(self.join_irreducibles)
        out = set()
        for p in ji:
            cond, nontrivial, min_left, _ = self.cover_matrices(p)
            witness = nontrivial & min_left
            for q in ji:
                if q != p and witness[q].any():
                    out.add((p, q))
        return out

    def d_successors(self, p):
        return sorted(q for (a, q) in self.d_edges if a == p)

    def d_minimal(self):
        targets = {q for (_, q) in self.d_edges}
        return [p for p in self.join_irreducibles if p not in targets]

    @cached_property
    def mnjc_pairs(self):
        """Per join-irreducible p: the (x, y) pairs of join-irreducibles with
        p <= x v y nontrivially, minimal in both coordinates."""
        ji = self.join_irreducibles
        table = {}
        for p in ji:
            cond, nontrivial, min_left, min_right = self.cover_matrices(p)
            good = nontrivial & min_left & min_right
            table[p] = [(x, y) for x in ji for y in ji if good[x, y]]
        return table

    def __repr__(self):
        return f"FinLattice({self.n} elements)"


@dataclass(frozen=True)
class JoinCover:
    p: int
    left: int
    right: int
    nontrivial: bool
    minimal_left: bool
    minimal_right: bool


def join_covers(l, p):
    """All ordered pairs (a, b) with p <= a v b, flagged."""
    cond, nontrivial, min_left, min_right = l.cover_matrices(p)
    out = []
    for a, b in zip(*np.nonzero(cond)):
        out.append(JoinCover(p, int(a), int(b),
                             bool(nontrivial[a, b]),
                             bool(min_left[a, b]),
                             bool(min_right[a, b])))
    return out


def lattice_from_leq(labels, pairs):
    return from_leq_pairs(labels, pairs)


def join_irreducibles(l):
    return list(l.join_irreducibles)


def d_relation(l):
    return set(l.d_edges)


def d_minimal(l):
    return l.d_minimal()


def is_join_seed(l, sigma):
    """All three join-seed clauses: sigma is join-irreducible, join-dense,
    and refines every nontrivial join-cover of its members into one that is
    minimal in both coordinates with both entries inside sigma."""
    sig = sorted(set(sigma))
    if not set(sig) <= set(l.join_irreducibles):
        return False
    for x in range(l.n):
        if l.join_of([s for s in sig if l.leq[s, x]]) != x:
            return False
    for p in sig:
        _, nontrivial, min_left, min_right = l.cover_matrices(p)
        good = nontrivial & min_left & min_right
        refined = np.zeros((l.n, l.n), dtype=bool)
        for x in sig:
            for y in sig:
                if good[x, y]:
                    refined |= l.leq[x][:, None] & l.leq[y][None, :]
        if (nontrivial & ~refined).any():
            return False
    return True


def d_cycles(l, limit=64):
    """Simple cycles of the join-dependency relation, each rotated to start
    at its smallest element."""
    adj = {}
    for a, b in sorted(l.d_edges):
        adj.setdefault(a, []).append(b)
    cycles = []

    def walk(start, node, path, on_path):
        for nxt in adj.get(node, ()):
            if nxt == start:
                cycles.append(tuple(path))
                if len(cycles) >= limit:
                    raise TooLarge(f"more than {limit} dependency cycles")
            elif nxt > start and nxt not in on_path:
                on_path.add(nxt)
                walk(start, nxt, path + [nxt], on_path)
                on_path.discard(nxt)

    for s in sorted(adj):
        walk(s, s, [s], {s})
    return cycles


def _label_matrix(labels):
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate labels")
    return {lab: i for i, lab in enumerate(labels)}


def from_leq_pairs(labels, pairs):
    """Build a lattice from generating order pairs (a, b) meaning a <= b.

    Takes the reflexive transitive closure, then checks that binary joins
    and meets exist everywhere.
    """
    index = _label_matrix(labels)
    n = len(labels)
    leq = np.eye(n, dtype=bool)
    for a, b in pairs:
        if a not in index or b not in index:
            missing = a if a not in index else b
            raise UnknownLabel(f"unknown element {missing!r}")
        leq[index[a], index[b]] = True
    while True:
        nxt = leq | (leq @ leq)
        if (nxt == leq).all():
            break
        leq = nxt
    if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
        raise CycleDetected("order pairs contain a cycle")
    return from_leq_matrix(labels, leq)


def from_leq_matrix(labels, leq):
    """Tables from a verified partial order; NotALattice when a pair of
    elements lacks a least upper or greatest lower bound."""
    n = len(labels)
    if n == 0:
        raise NotALattice("a lattice needs at least one element")
    join = np.zeros((n, n), dtype=np.int32)
    meet = np.zeros((n, n), dtype=np.int32)
    up_counts = leq.sum(axis=1)
    for x in range(n):
        for y in range(x, n):
            ub = leq[x] & leq[y]
            if not ub.any():
                raise NotALattice(
                    f"{labels[x]!r} and {labels[y]!r} have no upper bound")
            cands = np.nonzero(ub)[0]
            z = int(cands[np.argmax(up_counts[cands])])
            if not (leq[z] | ~ub).all():
                raise NotALattice(
                    f"{labels[x]!r} v {labels[y]!r} is not defined")
            join[x, y] = join[y, x] = z
            lb = leq[:, x] & leq[:, y]
            if not lb.any():
                raise NotALattice(
                    f"{labels[x]!r} and {labels[y]!r} have no lower bound")
            cands = np.nonzero(lb)[0]
            w = int(cands[np.argmin(up_counts[cands])])
            if not (leq[:, w] | ~lb).all():
                raise NotALattice(
                    f"{labels[x]!r} ^ {labels[y]!r} is not defined")
            meet[x, y] = meet[y, x] = w
    return FinLattice(labels, leq, join, meet)


FROM_COLATTICE_BOUND = 4096


def from_colattice(co, bound=FROM_COLATTICE_BOUND):
    """Materialize a CoLattice as a FinLattice with set-valued labels."""
    if co.n > bound:
        raise TooLarge(f"{co.n} convex sets exceeds table bound {bound}")
    n = co.n
    masks = co.elements
    leq = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            leq[i, j] = a & ~b == 0
    join = np.zeros((n, n), dtype=np.int32)
    meet = np.zeros((n, n), dtype=np.int32)
    for i, a in enumerate(masks):
        for j in range(i, n):
            b = masks[j]
            join[i, j] = join[j, i] = co.index[co.join_mask(a, b)]
            meet[i, j] = meet[j, i] = co.index[a & b]
    labels = [co.label_of(m) for m in masks]
    return FinLattice(labels, leq, join, meet)


@dataclass(frozen=True)
class Presentation:
    """Generators with inequalities g <= h and g <= x v y v ..."""

    generators: tuple
    leq_rels: tuple  # of (g, h)
    join_rels: tuple  # of (g, frozenset of generators)


PRESENTATION_BOUND = 1 << 16


def from_presentation(pres, bound=PRESENTATION_BOUND):
    """The finite lattice of relation-closed generator subsets.

    A subset S is closed when h in S forces g in S for each rule g <= h, and
    G subset of S forces g in S for each rule g <= join of G.  Meet is
    intersection, join is closure of union.  The result carries
    generator_index mapping each generator to its principal element.
    """
    gens = list(pres.generators)
    gi = _label_matrix(gens)
    leq_rules = []
    for g, h in pres.leq_rels:
        for lab in (g, h):
            if lab not in gi:
                raise UnknownLabel(f"unknown generator {lab!r}")
        leq_rules.append((gi[g], gi[h]))
    join_rules = []
    for g, body in pres.join_rels:
        if g not in gi:
            raise UnknownLabel(f"unknown generator {g!r}")
        bodymask = 0
        for lab in body:
            if lab not in gi:
                raise UnknownLabel(f"unknown generator {lab!r}")
            bodymask |= 1 << gi[lab]
        join_rules.append((gi[g], bodymask))

    def close(mask):
        while True:
            nxt = mask
            for g, h in leq_rules:
                if (mask >> h) & 1:
                    nxt |= 1 << g
            for g, body in join_rules:
                if body & ~mask == 0:
                    nxt |= 1 << g
            if nxt == mask:
                return mask
            mask = nxt

    seen = {close(0)}
    frontier = list(seen)
    while frontier:
        nxt_frontier = []
        for m in frontier:
            for g in range(len(gens)):
                if (m >> g) & 1:
                    continue
                c = close(m | (1 << g))
                if c not in seen:
                    seen.add(c)
                    if len(seen) > bound:
                        raise TooLarge(
                            f"presentation lattice exceeds bound {bound}")
                    nxt_frontier.append(c)
        frontier = nxt_frontier

    masks = sorted(seen, key=_mask_sort_key)
    index = {m: i for i, m in enumerate(masks)}
    n = len(masks)
    leq = np.zeros((n, n), dtype=bool)
    join = np.zeros((n, n), dtype=np.int32)
    meet = np.zeros((n, n), dtype=np.int32)
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            leq[i, j] = a & ~b == 0
        for j in range(i, n):
            b = masks[j]
            join[i, j] = join[j, i] = index[close(a | b)]
            meet[i, j] = meet[j, i] = index[a & b]

    def set_label(m):
        return "{" + ",".join(gens[g] for g in iter_bits(m)) + "}"

    l = FinLattice([set_label(m) for m in masks], leq, join, meet)
    l.generator_index = {g: index[close(1 << gi[g])] for g in gens}
    return l


def lattice_from_join_presentation(pres, bound=PRESENTATION_BOUND):
    return from_presentation(pres, bound)


def generated_sublattice(l, seeds, step_cap=None):
    """Close a seed set under binary joins and meets.

    Returns the sublattice as a FinLattice whose host_indices attribute maps
    its elements back to positions in l.  Raises CapExceeded carrying the
    partial size when the closure outgrows the cap.
    """
    if not seeds:
        raise ValueError("seed set must be nonempty")
    current = sorted(set(seeds))
    members = set(current)
    frontier = list(current)
    while frontier:
        added = []
        for x in frontier:
            for y in sorted(members):
                for z in (int(l.join[x, y]), int(l.meet[x, y])):
                    if z not in members:
                        members.add(z)
                        added.append(z)
                        if step_cap is not None and len(members) > step_cap:
                            raise CapExceeded(
                                f"sublattice closure passed {step_cap} elements",
                                partial_size=len(members))
        frontier = added
    host = sorted(members)
    pos = {h: i for i, h in enumerate(host)}
    m = len(host)
    leq = np.zeros((m, m), dtype=bool)
    join = np.zeros((m, m), dtype=np.int32)
    meet = np.zeros((m, m), dtype=np.int32)
    for i, a in enumerate(host):
        for j, b in enumerate(host):
            leq[i, j] = l.leq[a, b]
            join[i, j] = pos[int(l.join[a, b])]
            meet[i, j] = pos[int(l.meet[a, b])]
    sub = FinLattice([l.labels[h] for h in host], leq, join, meet)
    sub.host_indices = host
    return sub


SI_BOUND = 300


@dataclass
class SIVerdict:
    is_si: bool
    monolith_pair: tuple | None
    distinct_principal: int


def is_subdirectly_irreducible(l, bound=SI_BOUND):
    """Check for a least nontrivial congruence by closing each principal
    congruence under the one-sided join/meet translations."""
    n = l.n
    if n > bound:
        raise TooLarge(f"{n} elements exceeds congruence bound {bound}")

    def principal(a, b):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        work = [(a, b)]
        while work:
            x, y = work.pop()
            rx, ry = find(x), find(y)
            if rx == ry:
                continue
            parent[rx] = ry
            for c in range(n):
                work.append((int(l.join[x, c]), int(l.join[y, c])))
                work.append((int(l.meet[x, c]), int(l.meet[y, c])))
        return tuple(find(x) for x in range(n))

    congs = {}
    for a in range(n):
        for b in range(a + 1, n):
            key = principal(a, b)
            blocks = {}
            canon = []
            for r in key:
                if r not in blocks:
                    blocks[r] = len(blocks)
                canon.append(blocks[r])
            congs.setdefault(tuple(canon), (a, b))
    if not congs:
        return SIVerdict(False, None, 0)

    def refines(c1, c2):
        seen = {}
        for x in range(n):
            if c1[x] in seen:
                if c2[x] != seen[c1[x]]:
                    return False
            else:
                seen[c1[x]] = c2[x]
        return True

    items = list(congs.items())
    for cand, pair in items:
        if all(refines(cand, other) for other, _ in items):
            return SIVerdict(True, pair, len(items))
    return SIVerdict(False, None, len(items))
