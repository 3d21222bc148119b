"""Shared test utilities: exhaustive small-poset enumeration and oracles.

The enumerator grows posets one maximal element at a time (the new point
sits above an arbitrary down-set), deduplicating by a permutation-canonical
certificate.  Counts for 1..6 elements are 1, 2, 5, 16, 63, 318.
"""

import itertools
from functools import lru_cache

import numpy as np

from convexica.poset import Poset


def canonical_certificate(leq):
    """Lexicographically least bit-string of the order matrix over all
    relabelings; isomorphism-invariant and complete."""
    n = leq.shape[0]
    best = None
    for perm in itertools.permutations(range(n)):
        idx = np.asarray(perm)
        m = leq[np.ix_(idx, idx)]
        key = m.tobytes()
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def _canonical_matrices(n):
    if n == 0:
        return (np.zeros((0, 0), dtype=bool).tobytes(),)
    out = {}
    for smaller in _canonical_matrices(n - 1):
        base = np.frombuffer(smaller, dtype=bool).reshape(n - 1, n - 1)
        # candidate lower sets for the new maximal element: all down-closed
        # subsets of the smaller poset
        m = n - 1
        for bits in range(1 << m):
            members = [i for i in range(m) if bits >> i & 1]
            down_closed = all(
                base[j, i] <= (bits >> j & 1)
                for i in members for j in range(m))
            if not down_closed:
                continue
            leq = np.eye(n, dtype=bool)
            leq[:m, :m] = base
            for i in members:
                leq[i, m] = True
            out[canonical_certificate(leq)] = leq.tobytes()
    return tuple(sorted(out.values()))


def enumerate_posets(n):
    """All posets with exactly n elements, one per isomorphism class."""
    posets = []
    for blob in _canonical_matrices(n):
        leq = np.frombuffer(blob, dtype=bool).reshape(n, n).copy()
        posets.append(Poset([f"e{i}" for i in range(n)], leq))
    return posets


def enumerate_posets_upto(n):
    """All posets with 1..n elements, one per isomorphism class."""
    out = []
    for k in range(1, n + 1):
        out.extend(enumerate_posets(k))
    return out


def poset_isomorphic(p, q):
    if p.n != q.n:
        return False
    return canonical_certificate(p.leq) == canonical_certificate(q.leq)


def convex_masks_oracle(p):
    """Brute force: all subsets closed under betweenness."""
    out = []
    n = p.n
    for mask in range(1 << n):
        ok = True
        for x in range(n):
            if not mask >> x & 1:
                continue
            for y in range(n):
                if not mask >> y & 1 or not p.leq[x, y]:
                    continue
                for z in range(n):
                    if p.leq[x, z] and p.leq[z, y] and not mask >> z & 1:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            out.append(mask)
    return out


def random_poset(rng, n):
    """Random order via transitive closure of a random upper-triangular
    relation; labels e0..e{n-1}."""
    leq = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                leq[i, j] = True
    while True:
        nxt = leq | (leq @ leq)
        if (nxt == leq).all():
            break
        leq = nxt
    order = list(range(n))
    rng.shuffle(order)
    idx = np.asarray(order)
    return Poset([f"e{i}" for i in range(n)], leq[np.ix_(idx, idx)])
