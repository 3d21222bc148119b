"""Membership procedures for the convexity varieties, plus the two
constructions that make the length-two case concrete: the embedding into
the convex sets of a tree-like poset, and the truncation pipeline that
cuts every subdirect factor down to a bounded two-level diamond.

Every negative verdict carries a witness (a failing assignment, a track,
or a D-chain) that revalidate() checks against its defining condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BadArity,
    ConvexicaError,
    NoPartition,
    NotAHomomorphism,
    NotInSub2,
    PartitionMissing,
    TooFewGenerators,
)
from .poset import Poset, hull_mask, is_tree_like, iter_bits, length, poset_from_covers
from .colattice import classify_p2, subdirect_decomposition
from .lattice import FinLattice, is_subdirectly_irreducible
from .terms import (
    BiStirlitzTrack,
    StirlitzTrack,
    check_identity,
    find_bi_stirlitz,
    find_stirlitz_tracks,
    identity_by_name,
    reevaluate_witness,
    udav_bond_partition,
    verify_bi_stirlitz,
    verify_stirlitz_track,
)

NAIVE = "naive-identity"
STRUCTURAL = "structural"


@dataclass
class MembershipReport:
    lattice: FinLattice
    variety: str  # "SUB" | "SUB2" | "SUBn"
    n: Optional[int]
    member: bool
    method: str
    witness: Optional[dict]
    passed: tuple = ()

    def variety_name(self):
        return self.variety if self.n is None else f"SUBn({self.n})"

    def to_json(self):
        return {
            "variety": self.variety_name(),
            "n": self.n,
            "lattice_size": self.lattice.n,
            "member": self.member,
            "method": self.method,
            "checks_passed": list(self.passed),
            "witness": self.witness,
        }


def _canon_method(method):
    if method in ("naive", NAIVE):
        return NAIVE
    if method == STRUCTURAL:
        return STRUCTURAL
    raise ValueError(f"unknown method {method!r}")


def _identity_witness(ident, verdict):
    return {
        "kind": "identity",
        "identity": ident.name,
        "assignment": verdict.assignment,
        "lhs": verdict.lhs_value,
        "rhs": verdict.rhs_value,
    }


def _run_identities(l, names, budget):
    """Check identities in order; first failure wins.

    Returns (witness or None, tuple of names that held).
    """
    passed = []
    for name in names:
        ident = identity_by_name(name)
        v = check_identity(l, ident, budget=budget, prune=True)
        if not v.holds:
            return _identity_witness(ident, v), tuple(passed)
        passed.append(name)
    return None, tuple(passed)


def decide_sub(l, budget=None):
    """Membership in the base variety: the three defining identities."""
    witness, passed = _run_identities(l, ("S", "U", "B"), budget)
    return MembershipReport(l, "SUB", None, witness is None, NAIVE, witness, passed)


def _precondition_budget(l):
    """Exact cost of the pruned five-variable precondition checks.

    Structural decisions must not fail on lattice size, so they carry
    their own budget; the caller-supplied one caps naive evaluation only.
    """
    return max(1, len(l.join_irreducibles)) * l.n ** 4


def _d_chain(l):
    """Lexicographically first (p, q, r) over J(L) with p D q and q D r."""
    succ = {}
    for a, b in l.d_edges:
        succ.setdefault(a, set()).add(b)
    for p in sorted(succ):
        for q in sorted(succ[p]):
            if q in succ:
                return p, q, min(succ[q])
    return None


def decide_sub2(l, method=STRUCTURAL, budget=None):
    """Membership in the length-two variety.

    The naive method evaluates the three defining identities.  The
    structural method checks the preconditions that make J(L) a join-seed
    and then looks for a two-step chain in the join-dependency relation;
    either one refutes membership on its own.  budget caps the naive
    method; structural preconditions always run.
    """
    method = _canon_method(method)
    if method == NAIVE:
        witness, passed = _run_identities(l, ("L2", "U", "B"), budget)
        return MembershipReport(l, "SUB2", None, witness is None, NAIVE,
                                witness, passed)
    witness, passed = _run_identities(l, ("D2D", "S", "U", "B"),
                                      _precondition_budget(l))
    if witness is not None:
        return MembershipReport(l, "SUB2", None, False, STRUCTURAL,
                                witness, passed)
    chain = _d_chain(l)
    if chain is not None:
        witness = {"kind": "d_chain", "chain": [l.labels[i] for i in chain]}
        return MembershipReport(l, "SUB2", None, False, STRUCTURAL,
                                witness, passed)
    return MembershipReport(l, "SUB2", None, True, STRUCTURAL, None,
                            passed + ("no-d-chain",))


def decide_subn(l, n, method=STRUCTURAL, budget=None):
    """Membership in the length-n variety.

    n = 1 is plain distributivity and skips the track machinery entirely.
    For n >= 2 the structural method verifies the identity preconditions
    and then decides each height identity by emptiness of the matching
    track search; the naive method evaluates the identities themselves.
    budget caps naive evaluation; structural preconditions always run.
    """
    if n < 1:
        raise BadArity(f"variety index must be >= 1, got {n}")
    method = _canon_method(method)
    if n == 1:
        b = budget if method == NAIVE else _precondition_budget(l)
        witness, passed = _run_identities(l, ("DIST",), b)
        return MembershipReport(l, "SUBn", 1, witness is None, method,
                                witness, passed)
    if method == NAIVE:
        names = ["S", "U", "B", f"H:{n}"]
        names += [f"Hmn:{k},{n + 1 - k}" for k in range(2, n)]
        witness, passed = _run_identities(l, names, budget)
        return MembershipReport(l, "SUBn", n, witness is None, NAIVE,
                                witness, passed)
    witness, passed = _run_identities(l, ("S", "U", "B", "D2D"),
                                      _precondition_budget(l))
    if witness is not None:
        return MembershipReport(l, "SUBn", n, False, STRUCTURAL,
                                witness, passed)
    tracks = find_stirlitz_tracks(l, n)
    if tracks:
        witness = {"kind": "stirlitz_track", "n": n, **tracks[0].labels(l)}
        return MembershipReport(l, "SUBn", n, False, STRUCTURAL,
                                witness, passed)
    passed = passed + (f"no-track:{n}",)
    for k in range(2, n):
        bis = find_bi_stirlitz(l, k, n + 1 - k)
        if bis:
            b = bis[0]
            witness = {"kind": "bi_stirlitz", "m": k, "n": n + 1 - k,
                       **b.labels(l)}
            return MembershipReport(l, "SUBn", n, False, STRUCTURAL,
                                    witness, passed)
        passed = passed + (f"no-bi-track:{k},{n + 1 - k}",)
    return MembershipReport(l, "SUBn", n, True, STRUCTURAL, None, passed)


def _ji_form_violation(l, kind, asg_labels):
    """Recheck a join-irreducible quantifier-form violation from labels."""
    ix = {v: l.index[lab] for v, lab in asg_labels.items()}
    ji = set(l.join_irreducibles)
    if not all(e in ji for e in ix.values()):
        return False
    leq, jn = l.leq, l.join

    def cov(p, u, v):
        return bool(leq[p, jn[u, v]])

    if kind == "Uj":
        x, x0, x1, x2 = (ix[k] for k in ("x", "x0", "x1", "x2"))
        prem = cov(x, x0, x1) and cov(x, x0, x2) and cov(x, x1, x2)
        return prem and not (leq[x, x0] or leq[x, x1] or leq[x, x2])
    if kind == "Bj":
        x, a0, a1, b0, b1 = (ix[k] for k in ("x", "a0", "a1", "b0", "b1"))
        prem = cov(x, a0, a1) and cov(x, b0, b1)
        single = leq[x, a0] or leq[x, a1] or leq[x, b0] or leq[x, b1]
        cross = (cov(x, a0, b0) and cov(x, a1, b1)) or \
                (cov(x, a0, b1) and cov(x, a1, b0))
        return prem and not single and not cross
    if kind == "Sj":
        a, b, b0, b1, c = (ix[k] for k in ("a", "b", "b0", "b1", "c"))
        prem = a != b and cov(b, b0, b1) and cov(a, b, c)
        weaker = any(cov(a, int(bb), c) for bb in np.nonzero(l.lt[:, b])[0])
        con = (cov(b, a, b0) and cov(a, b0, c)) or \
              (cov(b, a, b1) and cov(a, b1, c))
        return prem and not weaker and not con
    raise ConvexicaError(f"unknown witness kind {kind!r}")


def revalidate(l, witness):
    """Replay a serialized witness against its defining condition."""
    kind = witness["kind"]
    if kind in ("Sj", "Uj", "Bj"):
        return _ji_form_violation(l, kind, witness["assignment"])
    if kind == "identity":
        ident = identity_by_name(witness["identity"])
        lv, rv = reevaluate_witness(l, ident, witness["assignment"])
        return lv == witness["lhs"] and rv == witness["rhs"] and lv != rv
    if kind == "d_chain":
        a, b, c = (l.index[x] for x in witness["chain"])
        return (a, b) in l.d_edges and (b, c) in l.d_edges
    if kind == "stirlitz_track":
        tr = StirlitzTrack(tuple(l.index[x] for x in witness["a"]),
                           tuple(l.index[x] for x in witness["aprime"]))
        return verify_stirlitz_track(l, tr)
    if kind == "bi_stirlitz":
        bt = BiStirlitzTrack(
            StirlitzTrack(tuple(l.index[x] for x in witness["sigma"]["a"]),
                          tuple(l.index[x] for x in witness["sigma"]["aprime"])),
            StirlitzTrack(tuple(l.index[x] for x in witness["tau"]["a"]),
                          tuple(l.index[x] for x in witness["tau"]["aprime"])))
        return verify_bi_stirlitz(l, bt)
    raise ConvexicaError(f"unknown witness kind {kind!r}")


@dataclass
class GammaEmbedding:
    source: FinLattice
    gamma: Poset
    phi: tuple  # per source element, a bitmask over gamma
    e_map: tuple  # gamma node index -> source element index
    is_embedding: bool
    bounds_preserved: bool
    length_le_2: bool
    tree_like: bool
    atom_preserving: Optional[bool]  # None when the source is not SI

    def to_json(self):
        g = self.gamma
        covers = [[g.labels[a], g.labels[b]] for a, b in g.covers]
        return {
            "gamma": {"elements": list(g.labels), "covers": covers},
            "e": {g.labels[i]: self.source.labels[e]
                  for i, e in enumerate(self.e_map)},
            "phi": {self.source.labels[x]: list(g.labels_of(self.phi[x]))
                    for x in range(self.source.n)},
            "is_embedding": self.is_embedding,
            "bounds_preserved": self.bounds_preserved,
            "length_le_2": self.length_le_2,
            "tree_like": self.tree_like,
            "atom_preserving": self.atom_preserving,
        }


def _atoms(l):
    return [x for x in range(l.n)
            if x != l.bottom and set(l.lower_covers(x)) == {l.bottom}]


def gamma_embedding(l):
    """Embed a member of the length-two variety into Co(Gamma).

    Gamma has a root node per join-dependency-minimal join-irreducible p
    and a pair node per dependency edge, with pair nodes placed below or
    above their root according to the bipartition of rd(p).  phi sends x
    to the set of nodes whose tag lies below x; all report flags come from
    direct verification, not from trusting the construction.
    """
    rep = decide_sub2(l, method=STRUCTURAL)
    if not rep.member:
        err = NotInSub2(f"refuted by {rep.witness['kind']} witness: "
                        f"{rep.witness}")
        err.witness = rep.witness
        raise err
    targets = {b for _, b in l.d_edges}
    roots = [p for p in l.join_irreducibles if p not in targets]
    labels, e_map, covers = [], [], []
    for p in roots:
        try:
            part = udav_bond_partition(l, p)
        except NoPartition as exc:
            raise PartitionMissing(
                f"no bipartition of the successors of {l.labels[p]}: {exc}"
            ) from exc
        root_lab = f"({l.labels[p]})"
        for a in sorted(part.a_side):
            lab = f"({l.labels[p]},{l.labels[a]})"
            labels.append(lab)
            e_map.append(a)
            covers.append((lab, root_lab))
        labels.append(root_lab)
        e_map.append(p)
        for b in sorted(part.b_side):
            lab = f"({l.labels[p]},{l.labels[b]})"
            labels.append(lab)
            e_map.append(b)
            covers.append((root_lab, lab))
    gamma = poset_from_covers(labels, covers)

    e_arr = np.asarray(e_map, dtype=np.int64)
    phi = []
    for x in range(l.n):
        below = l.leq[e_arr, x] if len(e_map) else np.zeros(0, dtype=bool)
        m = 0
        for i in np.nonzero(below)[0]:
            m |= 1 << int(i)
        phi.append(m)

    inj = len(set(phi)) == l.n
    ok = inj
    if ok:
        for x in range(l.n):
            for y in range(x, l.n):
                if phi[int(l.meet[x, y])] != phi[x] & phi[y]:
                    ok = False
                    break
                if phi[int(l.join[x, y])] != hull_mask(gamma, phi[x] | phi[y]):
                    ok = False
                    break
            if not ok:
                break
    bounds = phi[l.bottom] == 0 and phi[l.top] == gamma.full_mask()
    short = gamma.n == 0 or length(gamma) <= 2
    tree = gamma.n == 0 or is_tree_like(gamma)
    atom_ok = None
    if l.n <= 300 and is_subdirectly_irreducible(l).is_si:
        atom_ok = all(phi[a].bit_count() == 1 for a in _atoms(l))
    return GammaEmbedding(l, gamma, tuple(phi), tuple(e_map),
                          ok, bounds, short, tree, atom_ok)


def _gen_indices(l, gens):
    out = []
    for g in gens:
        if isinstance(g, (int, np.integer)):
            i = int(g)
            if not 0 <= i < l.n:
                raise ConvexicaError(f"generator index {i} out of range")
            out.append(i)
        else:
            if g not in l.index:
                raise ConvexicaError(f"unknown generator {g!r}")
            out.append(l.index[g])
    return out


def _generates(l, gidx):
    cur = set(gidx)
    while True:
        nxt = set(cur)
        for x in cur:
            for y in cur:
                nxt.add(int(l.join[x, y]))
                nxt.add(int(l.meet[x, y]))
        if len(nxt) == len(cur):
            return len(cur) == l.n
        cur = nxt


def _set_closure(seeds):
    """Union/intersection closure of a family of bitmasks."""
    out = list(dict.fromkeys(seeds))
    frontier = list(out)
    seen = set(out)
    while frontier:
        nxt = []
        for a in frontier:
            for b in out:
                for c in (a | b, a & b):
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
        out.extend(nxt)
        frontier = nxt
    return out


def _set_join_irreducibles(family, bottom):
    out = []
    for a in family:
        if a == bottom:
            continue
        u = 0
        for x in family:
            if x != a and (x & ~a) == 0:
                u |= x
        if u != a:
            out.append(a)
    return sorted(out)


def _fibers(vals):
    d = {}
    for i, v in enumerate(vals):
        d.setdefault(v, []).append(i)
    return sorted(map(tuple, d.values()))


@dataclass
class Truncation:
    host: Poset
    kept_mask: int
    i_prime: tuple  # host labels kept on the minimal side
    j_prime: tuple
    middle: str
    truncated_poset: Poset
    mapping: tuple  # per source element, mask over truncated_poset
    host_masks: tuple  # same map, still on host bits
    picks: tuple  # ((labels of a join-irreducible block, picked label), ...)
    zero_pick: Optional[str]
    m: int
    bound: int
    hom_verified: bool
    kernel_preserved: bool
    within_bound: bool
    gens_generate: bool

    def to_json(self):
        return {
            "i_prime": list(self.i_prime),
            "j_prime": list(self.j_prime),
            "middle": self.middle,
            "m": self.m,
            "bound": self.bound,
            "picks": [[list(a), k] for a, k in self.picks],
            "zero_pick": self.zero_pick,
            "hom_verified": self.hom_verified,
            "kernel_preserved": self.kernel_preserved,
            "within_bound": self.within_bound,
            "gens_generate": self.gens_generate,
        }


def _verify_co_hom(l, f, host):
    full = host.full_mask()
    for x in range(l.n):
        if f[x] & ~full:
            raise NotAHomomorphism(
                f"image of {l.labels[x]} uses undeclared elements")
        if hull_mask(host, f[x]) != f[x]:
            raise NotAHomomorphism(f"image of {l.labels[x]} is not convex")
    for x in range(l.n):
        for y in range(x, l.n):
            if f[int(l.meet[x, y])] != f[x] & f[y]:
                raise NotAHomomorphism(
                    f"meet of {l.labels[x]} and {l.labels[y]} not preserved")
            if f[int(l.join[x, y])] != hull_mask(host, f[x] | f[y]):
                raise NotAHomomorphism(
                    f"join of {l.labels[x]} and {l.labels[y]} not preserved")


def truncate_hom(l, gens, f, host):
    """Shrink a map into the convex sets of a two-level diamond.

    Given generators a_1..a_m of the source and a homomorphism f into
    Co(P) for a one-middle-point poset P, build the distributive set
    family generated by the punctured generator images, pick one index
    per join-irreducible block (and one in the least block if nonempty),
    and restrict P to the picked indices plus the middle point.  The
    composed map keeps the homomorphism property and the kernel of f,
    with at most 2^m - 1 outer points surviving.

    The kernel guarantee needs the generators to actually generate the
    source; the gens_generate flag records whether they do, and the
    verification flags report what held either way.
    """
    if len(gens) < 2:
        raise TooFewGenerators(f"need at least 2 generators, got {len(gens)}")
    gidx = _gen_indices(l, gens)
    cls = classify_p2(host)
    if cls.kind != "pij":
        raise ConvexicaError("target poset is not a two-level diamond")
    f = [int(v) for v in f]
    if len(f) != l.n:
        raise ConvexicaError("map must assign every source element")
    _verify_co_hom(l, f, host)

    mid_bit = 1 << cls.middle
    imask = 0
    for i in cls.i_set:
        imask |= 1 << i
    jmask = 0
    for j in cls.j_set:
        jmask |= 1 << j

    seeds = [f[g] & ~mid_bit for g in gidx]
    family = _set_closure(seeds)
    bottom = seeds[0]
    for s in seeds[1:]:
        bottom &= s
    picks = []
    kept = 0
    for a in _set_join_irreducibles(family, bottom):
        dagger = 0
        for x in family:
            if a & ~x:
                dagger |= x
        rest = a & ~dagger
        assert rest, "block contained in the union of its non-containers"
        k = rest & -rest
        kept |= k
        picks.append((host.labels_of(a), host.labels[k.bit_length() - 1]))
    zero_pick = None
    if bottom:
        low = bottom & -bottom
        kept |= low
        zero_pick = host.labels[low.bit_length() - 1]
    kept |= mid_bit

    pf = [v & kept for v in f]
    hom_ok = True
    for x in range(l.n):
        for y in range(x, l.n):
            if pf[int(l.meet[x, y])] != pf[x] & pf[y]:
                hom_ok = False
                break
            if pf[int(l.join[x, y])] != hull_mask(host, pf[x] | pf[y]) & kept:
                hom_ok = False
                break
        if not hom_ok:
            break
    kernel_ok = _fibers(f) == _fibers(pf)

    keep_idx = list(iter_bits(kept))
    sub = host.subposet(keep_idx)
    pos = {i: j for j, i in enumerate(keep_idx)}
    mapping = []
    for v in pf:
        m = 0
        for i in iter_bits(v):
            m |= 1 << pos[i]
        mapping.append(m)

    mcount = len(gens)
    bound = (1 << mcount) - 1
    within = (kept & imask).bit_count() + (kept & jmask).bit_count() <= bound
    return Truncation(
        host=host,
        kept_mask=kept,
        i_prime=tuple(host.labels[i] for i in iter_bits(kept & imask)),
        j_prime=tuple(host.labels[i] for i in iter_bits(kept & jmask)),
        middle=host.labels[cls.middle],
        truncated_poset=sub,
        mapping=tuple(mapping),
        host_masks=tuple(pf),
        picks=tuple(picks),
        zero_pick=zero_pick,
        m=mcount,
        bound=bound,
        hom_verified=hom_ok,
        kernel_preserved=kernel_ok,
        within_bound=within,
        gens_generate=_generates(l, gidx),
    )


@dataclass
class CanonicalFactor:
    kind: str  # "singleton" | "pij"
    poset: Poset
    mapping: tuple  # per source element, mask over poset
    truncation: Optional[Truncation]

    def to_json(self, source):
        out = {
            "kind": self.kind,
            "elements": list(self.poset.labels),
            "covers": [[self.poset.labels[a], self.poset.labels[b]]
                       for a, b in self.poset.covers],
            "map": {source.labels[x]: list(self.poset.labels_of(self.mapping[x]))
                    for x in range(source.n)},
        }
        if self.truncation is not None:
            out["truncation"] = self.truncation.to_json()
        return out


@dataclass
class CanonicalForm:
    source: FinLattice
    m: int
    bound: int
    embedding: GammaEmbedding
    factors: list
    diagonal_injective: bool
    all_within_bound: bool
    gens_generate: bool

    def to_json(self):
        return {
            "lattice_size": self.source.n,
            "m": self.m,
            "bound": self.bound,
            "gamma": self.embedding.to_json()["gamma"],
            "factors": [fa.to_json(self.source) for fa in self.factors],
            "diagonal_injective": self.diagonal_injective,
            "all_within_bound": self.all_within_bound,
            "gens_generate": self.gens_generate,
        }


def sub2_canonical_form(l, gens):
    """Full pipeline for an m-generated member of the length-two variety.

    Embed into Co(Gamma), split along the completely meet-irreducible
    D-closed subsets of Gamma, classify every factor as a point or a
    two-level diamond, and truncate each diamond factor.  Verifies that
    the truncated diagonal still separates points and that every factor
    stays within the 2^m - 1 bound.
    """
    if len(gens) < 2:
        raise TooFewGenerators(f"need at least 2 generators, got {len(gens)}")
    gidx = _gen_indices(l, gens)
    m = len(gens)
    bound = (1 << m) - 1
    ge = gamma_embedding(l)
    gens_generate = _generates(l, gidx)
    if ge.gamma.n == 0:
        return CanonicalForm(l, m, bound, ge, [], l.n == 1, True, gens_generate)
    dec = subdirect_decomposition(ge.gamma)
    factors = []
    for _, q in dec.factors:
        fp = q.target.poset
        comp = [q.apply_mask(ge.phi[x]) for x in range(l.n)]
        cls = classify_p2(fp)
        if cls.kind == "singleton":
            factors.append(CanonicalFactor("singleton", fp, tuple(comp), None))
        elif cls.kind == "pij":
            tr = truncate_hom(l, gens, comp, fp)
            factors.append(CanonicalFactor("pij", tr.truncated_poset,
                                           tr.mapping, tr))
        else:
            raise ConvexicaError(
                f"factor on {fp.labels} is neither a point nor a diamond")
    signatures = {tuple(fa.mapping[x] for fa in factors) for x in range(l.n)}
    injective = len(signatures) == l.n
    within = all(fa.truncation.within_bound for fa in factors
                 if fa.truncation is not None)
    return CanonicalForm(l, m, bound, ge, factors, injective, within,
                         gens_generate)
