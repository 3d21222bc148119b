"""Growth experiment: three-generated sublattices of Co(P) over truncations.

A truncation is a finite poset over element families a_n, b_n, c_n, d_n
(n up to some k) together with three distinguished convex subsets

    A = {a_n},  B = {d_0} + {b_n},  C = {c_n} + {d_n}.

For each truncation we close {A, B, C} under intersection and convex join,
then follow the alternating sequences

    A_0 = A,  B_0 = B,  A_{i+1} = A v (B_i ^ C),  B_{i+1} = B v (A_i ^ C)

and check that c_n and d_n enter exactly at step 2n+1: both must lie in
A_{2n+1} but not in A_{2n}.  Rising sublattice sizes across truncations are
the finite shadow of the unbounded growth this family is built to show.

The shipped truncation family is a candidate: the construction fixes the
element names and the three subsets but not the full cover diagram, so the
one built here is validated by the entry checks on every run instead of
being trusted.
"""

from dataclasses import dataclass

from .errors import BadArity, CapExceeded, InvalidReconstruction
from .poset import Poset, hull_mask, length, poset_from_covers

GROWTH_CLOSURE_CAP = 1 << 16


@dataclass(frozen=True)
class TruncatedFigure2:
    """One truncation: the poset plus the three generator masks."""

    k: int
    poset: Poset
    a_mask: int
    b_mask: int
    c_mask: int
    source: str = "candidate"

    def named_masks(self):
        return {"A": self.a_mask, "B": self.b_mask, "C": self.c_mask}

    def to_json(self):
        p = self.poset
        return {
            "k": self.k,
            "source": self.source,
            "elements": list(p.labels),
            "covers": [[p.labels[x], p.labels[y]] for x, y in p.covers],
            "A": list(p.labels_of(self.a_mask)),
            "B": list(p.labels_of(self.b_mask)),
            "C": list(p.labels_of(self.c_mask)),
        }


def build_truncated_figure2(k):
    """Candidate truncation at index k.

    Columns d_n < c_n < a_n, rungs b_{n-1} < d_n, and cross links
    d_n < c_{n-1}.  Every maximal chain from some b_{n-1} up has four
    elements, so the length is exactly 3 once k >= 1.
    """
    if k < 0:
        raise BadArity("truncation index must be >= 0")
    names = [f"{fam}{n}" for n in range(k + 1) for fam in "abcd"]
    covers = []
    for n in range(k + 1):
        covers.append((f"d{n}", f"c{n}"))
        covers.append((f"c{n}", f"a{n}"))
        if n:
            covers.append((f"b{n - 1}", f"d{n}"))
            covers.append((f"d{n}", f"c{n - 1}"))
    p = poset_from_covers(names, covers)
    a_mask = p.mask_of([f"a{n}" for n in range(k + 1)])
    b_mask = p.mask_of(["d0"] + [f"b{n}" for n in range(k + 1)])
    c_mask = p.mask_of([f"{fam}{n}" for n in range(k + 1) for fam in "cd"])
    return TruncatedFigure2(k, p, a_mask, b_mask, c_mask, "candidate")


def truncation_from_poset(p, named, source="file"):
    """TruncatedFigure2 from a parsed reconstruction; infers k from labels.

    The label set must be exactly {a0..ak, b0..bk, c0..ck, d0..dk} for one
    k, and the convex sets A, B, C must all be named.
    """
    missing = [name for name in ("A", "B", "C") if name not in named]
    if missing:
        raise InvalidReconstruction(
            f"reconstruction must name convex set(s) {', '.join(missing)}")
    have = set(p.labels)
    if not have:
        raise InvalidReconstruction("reconstruction poset is empty")
    k = -1
    while all(f"{fam}{k + 1}" in have for fam in "abcd"):
        k += 1
    expected = {f"{fam}{n}" for n in range(k + 1) for fam in "abcd"}
    if k < 0 or have != expected:
        odd = sorted(have - expected) or sorted(expected - have)
        raise InvalidReconstruction(
            "reconstruction labels must be exactly a0..ak, b0..bk, c0..ck, "
            f"d0..dk for some k; problem near {odd[:4]}")
    return TruncatedFigure2(k, p, named["A"], named["B"], named["C"], source)


def restrict_truncation(t, k):
    """Sub-truncation on the families with index <= k."""
    if not 0 <= k <= t.k:
        raise BadArity(f"restriction index must be in 0..{t.k}")
    keep_labels = {f"{fam}{n}" for n in range(k + 1) for fam in "abcd"}
    keep = [i for i, lab in enumerate(t.poset.labels) if lab in keep_labels]
    sub = t.poset.subposet(keep)
    remap = {i: new for new, i in enumerate(keep)}
    def cut(mask):
        out = 0
        for i in remap:
            if mask >> i & 1:
                out |= 1 << remap[i]
        return out
    return TruncatedFigure2(k, sub, cut(t.a_mask), cut(t.b_mask),
                            cut(t.c_mask), t.source)


def validate_truncation(t):
    """Gate problems as a list of strings; empty means the gate passes."""
    problems = []
    p = t.poset
    if p.n == 0:
        problems.append("poset is empty")
    elif length(p) > 3:
        problems.append(f"poset length is {length(p)}, need at most 3")
    for name, mask in t.named_masks().items():
        extra = hull_mask(p, mask) & ~mask
        if extra:
            problems.append(
                f"{name} is not order-convex, hull adds "
                f"{{{','.join(p.labels_of(extra))}}}")
    return problems


def closure_in_co(p, seeds, cap=GROWTH_CLOSURE_CAP):
    """Sublattice of Co(P) generated by seed masks.

    Worklist closure under pairwise intersection and convex join; raises
    CapExceeded past cap elements.
    """
    seen = set()
    elems = []
    pending = list(dict.fromkeys(seeds))
    while pending:
        x = pending.pop()
        if x in seen:
            continue
        seen.add(x)
        if len(seen) > cap:
            raise CapExceeded("sublattice closure passed the cap", len(seen))
        for y in elems:
            meet = x & y
            join = hull_mask(p, x | y)
            if meet not in seen:
                pending.append(meet)
            if join not in seen:
                pending.append(join)
        elems.append(x)
    return seen


@dataclass(frozen=True)
class GrowthRow:
    """Result for one truncation."""

    k: int
    poset_size: int
    sublattice_size: int
    checks: tuple  # of (n, c_ok, d_ok)
    base_reproduced: bool
    valid: bool

    def to_json(self):
        return {
            "k": self.k,
            "poset_size": self.poset_size,
            "sublattice_size": self.sublattice_size,
            "checks": [{"n": n, "c": c, "d": d} for n, c, d in self.checks],
            "base_reproduced": self.base_reproduced,
            "valid": self.valid,
        }


@dataclass(frozen=True)
class GrowthReport:
    source: str
    rows: tuple
    warnings: tuple

    @property
    def valid(self):
        return all(row.valid for row in self.rows)

    @property
    def sizes_strictly_increasing(self):
        sizes = [row.sublattice_size for row in self.rows]
        return all(a < b for a, b in zip(sizes, sizes[1:]))

    def to_json(self):
        return {
            "source": self.source,
            "rows": [row.to_json() for row in self.rows],
            "warnings": list(self.warnings),
            "valid": self.valid,
            "sizes_strictly_increasing": self.sizes_strictly_increasing,
        }


def run_truncation(t, cap=GROWTH_CLOSURE_CAP):
    """Gate, closure, recurrences, and entry checks for one truncation."""
    problems = validate_truncation(t)
    if problems:
        raise InvalidReconstruction("; ".join(problems))
    p = t.poset
    a, b, c = t.a_mask, t.b_mask, t.c_mask
    sub = closure_in_co(p, (a, b, c), cap=cap)
    seq_a = [a]
    seq_b = [b]
    for _ in range(2 * t.k + 1):
        seq_a.append(hull_mask(p, a | (seq_b[-1] & c)))
        seq_b.append(hull_mask(p, b | (seq_a[-2] & c)))
    index = {lab: i for i, lab in enumerate(p.labels)}
    checks = []
    for n in range(t.k + 1):
        if 2 * n + 1 > len(seq_a) - 1:
            break
        hi, lo = seq_a[2 * n + 1], seq_a[2 * n]
        cn = 1 << index[f"c{n}"]
        dn = 1 << index[f"d{n}"]
        c_ok = bool(hi & cn) and not lo & cn
        d_ok = bool(hi & dn) and not lo & dn
        checks.append((n, c_ok, d_ok))
    base_ok = seq_a[0] == a and seq_b[0] == b
    valid = base_ok and all(c_ok and d_ok for _, c_ok, d_ok in checks)
    return GrowthRow(t.k, p.n, len(sub), tuple(checks), base_ok, valid)


def run_growth_experiment(k_max, reconstruction=None, cap=GROWTH_CLOSURE_CAP):
    """Growth table for k = 1..k_max.

    With a reconstruction (poset, named masks) the family comes from
    restricting it; its own k bounds the table and a warning records any
    clipping.  Without one the shipped candidate family is used.
    """
    if k_max < 1:
        raise BadArity("k_max must be >= 1")
    warnings = []
    if reconstruction is None:
        family = [build_truncated_figure2(k) for k in range(1, k_max + 1)]
        source = "candidate"
    else:
        p, named = reconstruction
        top = truncation_from_poset(p, named)
        if top.k < 1:
            raise InvalidReconstruction(
                "reconstruction stops at k=0; the experiment needs k >= 1")
        if k_max > top.k:
            warnings.append(
                f"reconstruction only reaches k={top.k}; clipping k_max")
        family = [restrict_truncation(top, k)
                  for k in range(1, min(k_max, top.k) + 1)]
        source = top.source
    rows = tuple(run_truncation(t, cap=cap) for t in family)
    return GrowthReport(source, rows, tuple(warnings))
