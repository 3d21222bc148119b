"""Lattice terms, identities, and the combinatorial witnesses behind them.

An Identity bundles a name, an ordered variable list, and two term trees.
check_identity quantifies over all assignments in mixed-radix order (last
variable fastest) with numpy-vectorized evaluation.  The track and
partition searches live here too since they share the join-cover tables.
"""

import itertools
import os
from dataclasses import dataclass

import numpy as np

from .errors import BadArity, BudgetExceeded, NoPartition, UnboundVariable


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Join:
    args: tuple

    def __init__(self, *args):
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Meet:
    args: tuple

    def __init__(self, *args):
        object.__setattr__(self, "args", tuple(args))


def free_vars(t):
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for s in t.args:
        out |= free_vars(s)
    return out


def term_to_sexp(t):
    if isinstance(t, Var):
        return t.name
    op = "join" if isinstance(t, Join) else "meet"
    return "(" + op + " " + " ".join(term_to_sexp(s) for s in t.args) + ")"


def eval_term(t, l, asg):
    """Evaluate on single elements; asg maps variable name to index."""
    if isinstance(t, Var):
        if t.name not in asg:
            raise UnboundVariable(f"variable {t.name!r} has no value")
        return asg[t.name]
    table = l.join if isinstance(t, Join) else l.meet
    acc = eval_term(t.args[0], l, asg)
    for s in t.args[1:]:
        acc = int(table[acc, eval_term(s, l, asg)])
    return acc


def _eval_grid(t, l, env, memo):
    """Evaluate over parallel assignment arrays; shares repeated subterms."""
    key = id(t)
    if key in memo:
        return memo[key]
    if isinstance(t, Var):
        if t.name not in env:
            raise UnboundVariable(f"variable {t.name!r} has no value")
        out = env[t.name]
    else:
        table = l.join if isinstance(t, Join) else l.meet
        out = _eval_grid(t.args[0], l, env, memo)
        for s in t.args[1:]:
            out = table[out, _eval_grid(s, l, env, memo)]
    memo[key] = out
    return out


@dataclass(frozen=True)
class Identity:
    name: str
    variables: tuple
    lhs: object
    rhs: object
    # True only for the built-in identities, whose shape "v ^ M = join of
    # terms each below the left side" makes restricting v to the
    # join-irreducibles an exact check (see check_identity).
    ji_prunable: bool = False

    def __post_init__(self):
        used = free_vars(self.lhs) | free_vars(self.rhs)
        if used != set(self.variables):
            raise ValueError(
                f"identity {self.name}: declared variables "
                f"{sorted(self.variables)} != used {sorted(used)}")


def _stirlitz_identity():
    a, b, b0, b1, c = (Var(v) for v in ("a", "b", "b0", "b1", "c"))
    bp = Meet(b, Join(b0, b1))
    lhs = Meet(a, Join(bp, c))
    parts = [Meet(a, bp)]
    for bi in (b0, b1):
        parts.append(Meet(a, Join(bi, c), Join(Meet(bp, Join(a, bi)), c)))
    return Identity("S", ("a", "b", "b0", "b1", "c"), lhs, Join(*parts), True)


def _udav_identity():
    x, x0, x1, x2 = (Var(v) for v in ("x", "x0", "x1", "x2"))
    lhs = Meet(x, Join(x0, x1), Join(x1, x2), Join(x0, x2))
    rhs = Join(Meet(x, x0, Join(x1, x2)),
               Meet(x, x1, Join(x0, x2)),
               Meet(x, x2, Join(x0, x1)))
    return Identity("U", ("x", "x0", "x1", "x2"), lhs, rhs, True)


def _bond_identity():
    x, a0, a1, b0, b1 = (Var(v) for v in ("x", "a0", "a1", "b0", "b1"))
    ja, jb = Join(a0, a1), Join(b0, b1)
    parts = []
    for ai, bi in ((a0, b0), (a1, b1)):
        parts.append(Meet(x, ai, jb))
        parts.append(Meet(x, bi, ja))
    parts.append(Meet(x, ja, jb, Join(a0, b0), Join(a1, b1)))
    parts.append(Meet(x, ja, jb, Join(a0, b1), Join(a1, b0)))
    return Identity("B", ("x", "a0", "a1", "b0", "b1"), Meet(x, ja, jb),
                    Join(*parts), True)


def _l2_identity():
    a, b, bp, c, cp = (Var(v) for v in ("a", "b", "b'", "c", "c'"))
    lhs = Meet(a, Join(Meet(b, Join(c, cp)), bp))
    rhs = Join(Meet(a, b, Join(c, cp)),
               Meet(a, Join(Meet(b, c), bp)),
               Meet(a, Join(Meet(b, cp), bp)))
    return Identity("L2", ("a", "b", "b'", "c", "c'"), lhs, rhs, True)


def _d2d_identity():
    a, x, y, z = (Var(v) for v in ("a", "x", "y", "z"))
    lhs = Meet(a, Join(x, y, z))
    rhs = Join(Meet(a, Join(x, y)), Meet(a, Join(x, z)), Meet(a, Join(y, z)))
    return Identity("D2D", ("a", "x", "y", "z"), lhs, rhs, True)


def _dist_identity():
    a, b, c = Var("a"), Var("b"), Var("c")
    lhs = Meet(a, Join(b, c))
    rhs = Join(Meet(a, b), Meet(a, c))
    return Identity("DIST", ("a", "b", "c"), lhs, rhs, True)


def _height_polynomials(n, x, xp):
    """The U/V/W polynomial families over variables x0..xn, x'1..x'n.

    x is a list of n+1 terms, xp a list with xp[0] unused.  Shared subterm
    objects keep vectorized evaluation linear in the number of distinct
    nodes.
    """
    u = {n: x[n]}
    for i in range(n - 1, -1, -1):
        u[i] = Meet(x[i], Join(u[i + 1], xp[i + 1]))
    v = {}
    for i in range(n):
        v[i, i] = Join(Meet(x[i], u[i + 1]), Meet(x[i], xp[i + 1]))
        for j in range(i - 1, -1, -1):
            v[i, j] = Meet(x[j], Join(v[i, j + 1], xp[j + 1]))
    w = {}
    for i in range(n - 1):
        w[i, i] = Meet(x[i], Join(xp[i + 1], xp[i + 2]),
                       Join(Meet(u[i + 1], Join(x[i], xp[i + 2])), xp[i + 1]))
        for j in range(i - 1, -1, -1):
            w[i, j] = Meet(x[j], Join(w[i, j + 1], xp[j + 1]))
    return u, v, w


def height_polynomials(n, prefix="x"):
    """Public handle on the polynomial families, keyed by (kind, i)."""
    if n < 1:
        raise BadArity("polynomial families need n >= 1")
    x = [Var(f"{prefix}{i}") for i in range(n + 1)]
    xp = [None] + [Var(f"{prefix}'{i}") for i in range(1, n + 1)]
    return _height_polynomials(n, x, xp)


def _h_identity(n):
    if n < 1:
        raise BadArity(f"H(n) needs n >= 1, got {n}")
    x = [Var(f"x{i}") for i in range(n + 1)]
    xp = [None] + [Var(f"x'{i}") for i in range(1, n + 1)]
    u, v, w = _height_polynomials(n, x, xp)
    parts = [v[i, 0] for i in range(n)] + [w[i, 0] for i in range(n - 1)]
    rhs = parts[0] if len(parts) == 1 else Join(*parts)
    names = tuple(t.name for t in x) + tuple(t.name for t in xp[1:])
    return Identity(f"H:{n}", names, u[0], rhs, True)


def _hmn_identity(m, n):
    if m < 1 or n < 1:
        raise BadArity(f"H(m,n) needs m, n >= 1, got ({m},{n})")
    t = Var("t")
    x = [t] + [Var(f"x{i}") for i in range(1, m + 1)]
    xp = [None] + [Var(f"x'{i}") for i in range(1, m + 1)]
    y = [t] + [Var(f"y{j}") for j in range(1, n + 1)]
    yp = [None] + [Var(f"y'{j}") for j in range(1, n + 1)]
    ux, vx, wx = _height_polynomials(m, x, xp)
    uy, vy, wy = _height_polynomials(n, y, yp)
    lhs = Meet(ux[0], uy[0])
    parts = [Meet(vx[i, 0], uy[0]) for i in range(m)]
    parts += [Meet(wx[i, 0], uy[0]) for i in range(m - 1)]
    parts += [Meet(ux[0], vy[j, 0]) for j in range(n)]
    parts += [Meet(ux[0], wy[j, 0]) for j in range(n - 1)]
    parts.append(Meet(ux[0], uy[0], Join(x[1], yp[1]), Join(xp[1], y[1])))
    names = ("t",) + tuple(v.name for v in x[1:]) + \
        tuple(v.name for v in xp[1:]) + tuple(v.name for v in y[1:]) + \
        tuple(v.name for v in yp[1:])
    return Identity(f"Hmn:{m},{n}", names, lhs, Join(*parts), True)


_FIXED_IDENTITIES = {
    "S": _stirlitz_identity,
    "U": _udav_identity,
    "B": _bond_identity,
    "L2": _l2_identity,
    "D2D": _d2d_identity,
    "DIST": _dist_identity,
}


def build_identity(kind, *args):
    """S | U | B | L2 | D2D | DIST with no args; H with n; Hmn with m, n."""
    if kind in _FIXED_IDENTITIES:
        if args:
            raise BadArity(f"identity {kind} takes no parameters")
        return _FIXED_IDENTITIES[kind]()
    if kind == "H":
        if len(args) != 1:
            raise BadArity("H takes exactly one parameter")
        return _h_identity(args[0])
    if kind == "Hmn":
        if len(args) != 2:
            raise BadArity("Hmn takes exactly two parameters")
        return _hmn_identity(*args)
    raise BadArity(f"unknown identity kind {kind!r}")


def identity_by_name(name):
    """Parse CLI-style identity names: S, U, B, L2, D2D, DIST, H:3, Hmn:2,2."""
    if name in _FIXED_IDENTITIES:
        return build_identity(name)
    if name.startswith("H:"):
        return build_identity("H", _positive_int(name[2:]))
    if name.startswith("Hmn:"):
        parts = name[4:].split(",")
        if len(parts) != 2:
            raise BadArity(f"expected Hmn:<m>,<n>, got {name!r}")
        return build_identity("Hmn", *(_positive_int(p) for p in parts))
    raise BadArity(f"unknown identity {name!r}")


def _positive_int(s):
    try:
        v = int(s)
    except ValueError:
        raise BadArity(f"expected an integer, got {s!r}") from None
    if v < 1:
        raise BadArity(f"parameter must be >= 1, got {v}")
    return v


DEFAULT_BUDGET = 1 << 26
_CHUNK = 1 << 16


def effective_budget(budget=None):
    if budget is not None:
        return budget
    env = os.environ.get("CONVEXICA_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass
class Verdict:
    holds: bool
    assignment: dict | None = None
    lhs_value: str | None = None
    rhs_value: str | None = None
    index: int | None = None
    checked: int = 0
    total: int = 0
    pruned: bool = False
    kind: str = "identity"

    def to_json(self):
        return {
            "holds": self.holds, "assignment": self.assignment,
            "lhs_value": self.lhs_value, "rhs_value": self.rhs_value,
            "index": self.index, "checked": self.checked,
            "total": self.total, "pruned": self.pruned, "kind": self.kind,
        }


def check_identity(l, ident, budget=None, prune=False):
    """Universal check of ident over l.

    Assignments run in mixed-radix order over element indices, last declared
    variable fastest; the returned witness is the first counterexample in
    that order.  With prune=True and a prunable identity, the first variable
    ranges over join-irreducibles only: every other value of the outer meet
    variable is a join of such, so equality there is already decided (the
    right side never exceeds the left, and both sides are monotone).
    """
    b = effective_budget(budget)
    cache = getattr(l, "_verdict_cache", None)
    if cache is None:
        cache = l._verdict_cache = {}
    cache_key = (ident, bool(prune))
    if cache_key in cache:
        return cache[cache_key]
    n = l.n
    k = len(ident.variables)
    pruned = bool(prune and ident.ji_prunable)
    dom0 = list(l.join_irreducibles) if pruned else list(range(n))
    if not dom0:
        dom0 = [l.bottom]  # one-element lattice: single assignment
    sizes = [len(dom0)] + [n] * (k - 1)
    total = 1
    for s in sizes:
        total *= s
    if total > b:
        raise BudgetExceeded(
            f"{total} assignments exceed budget {b}; raise --budget or use "
            f"a structural method")

    suffix = 0
    block = 1
    while suffix < k and block * sizes[k - suffix - 1] <= _CHUNK:
        block *= sizes[k - suffix - 1]
        suffix += 1
    shape = tuple(sizes[k - suffix:])
    grids = np.unravel_index(np.arange(block), shape) if suffix else ()
    suffix_vals = []
    for axis, g in enumerate(grids):
        pos = k - suffix + axis
        arr = g.astype(np.int32)
        if pos == 0:
            arr = np.asarray(dom0, dtype=np.int32)[arr]
        suffix_vals.append(arr)

    prefix_domains = [dom0 if i == 0 else range(n) for i in range(k - suffix)]
    checked = 0
    for prefix in itertools.product(*prefix_domains):
        env = {}
        for i, val in enumerate(prefix):
            env[ident.variables[i]] = int(val)
        for axis, arr in enumerate(suffix_vals):
            env[ident.variables[k - suffix + axis]] = arr
        memo = {}
        lv = _eval_grid(ident.lhs, l, env, memo)
        rv = _eval_grid(ident.rhs, l, env, memo)
        ne = lv != rv
        if suffix == 0:
            ne = np.asarray([ne])
        if ne.any():
            pos = int(np.argmax(ne))
            values = list(prefix) + [int(arr[pos]) for arr in suffix_vals]
            asg = {v: int(e) for v, e in zip(ident.variables, values)}
            rank = 0
            for e in values:
                rank = rank * n + e
            lval = eval_term(ident.lhs, l, asg)
            rval = eval_term(ident.rhs, l, asg)
            verdict = Verdict(
                False,
                {v: l.labels[e] for v, e in asg.items()},
                l.labels[lval], l.labels[rval],
                rank, checked + pos + 1, total, pruned)
            cache[cache_key] = verdict
            return verdict
        checked += block if suffix else 1
    verdict = Verdict(True, None, None, None, None, checked, total, pruned)
    cache[cache_key] = verdict
    return verdict


def reevaluate_witness(l, ident, assignment_labels):
    """Replay helper: evaluate both sides under a label-keyed assignment."""
    asg = {v: l.index[lab] for v, lab in assignment_labels.items()}
    lv = eval_term(ident.lhs, l, asg)
    rv = eval_term(ident.rhs, l, asg)
    return l.labels[lv], l.labels[rv]


def check_ji_interpretation(l, kind):
    """The quantifier forms of S, U, B over join-irreducibles only."""
    if kind == "Sj":
        return _check_sj(l)
    if kind == "Uj":
        return _check_uj(l)
    if kind == "Bj":
        return _check_bj(l)
    raise BadArity(f"unknown interpretation {kind!r}")


def _ji_setup(l):
    ji = np.asarray(l.join_irreducibles, dtype=np.int64)
    return ji, len(ji)


def _check_uj(l):
    ji, k = _ji_setup(l)
    total = k ** 4
    for x in ji:
        cov = l.leq[x][l.join]
        m = cov[np.ix_(ji, ji)]
        xle = l.leq[x][ji]
        prem = m[:, :, None] & m[:, None, :] & m[None, :, :]
        concl = xle[:, None, None] | xle[None, :, None] | xle[None, None, :]
        viol = prem & ~concl
        if viol.any():
            i0, i1, i2 = (int(t) for t in np.argwhere(viol)[0])
            asg = {"x": x, "x0": ji[i0], "x1": ji[i1], "x2": ji[i2]}
            return Verdict(False, {v: l.labels[int(e)] for v, e in asg.items()},
                           total=total, kind="Uj")
    return Verdict(True, None, checked=total, total=total, kind="Uj")


def _check_bj(l):
    ji, k = _ji_setup(l)
    total = k ** 5
    for x in ji:
        cov = l.leq[x][l.join]
        m = cov[np.ix_(ji, ji)]
        xle = l.leq[x][ji]
        for a0 in range(k):
            for a1 in range(k):
                if not m[a0, a1]:
                    continue
                concl = (xle[a0] | xle[a1] | xle[:, None] | xle[None, :]
                         | (m[a0][:, None] & m[a1][None, :])
                         | (m[a0][None, :] & m[a1][:, None]))
                viol = m & ~concl
                if viol.any():
                    b0, b1 = (int(t) for t in np.argwhere(viol)[0])
                    asg = {"x": x, "a0": ji[a0], "a1": ji[a1],
                           "b0": ji[b0], "b1": ji[b1]}
                    return Verdict(
                        False, {v: l.labels[int(e)] for v, e in asg.items()},
                        total=total, kind="Bj")
    return Verdict(True, None, checked=total, total=total, kind="Bj")


def _check_sj(l):
    ji, k = _ji_setup(l)
    total = k ** 5
    for a in ji:
        cov_a = l.leq[a][l.join]      # a <= u v v over all element pairs
        for b in ji:
            if a == b:
                continue
            cov_b = l.leq[b][l.join]
            prem_b = cov_b[np.ix_(ji, ji)]          # b <= b0 v b1
            a_bc = cov_a[b][ji]                      # a <= b v c, per c
            below_b = np.nonzero(l.lt[:, b])[0]
            if below_b.size:
                weaker = cov_a[np.ix_(below_b, ji)].any(axis=0)
            else:
                weaker = np.zeros(k, dtype=bool)     # a <= bbar v c, bbar < b
            b_abi = l.leq[b][l.join[a, ji]]          # b <= a v b_i
            a_bic = cov_a[np.ix_(ji, ji)]            # a <= b_i v c
            hyp = prem_b[:, :, None] & a_bc[None, None, :]
            # conclusion axes are (b0, b1, c); i = 0 uses b0, i = 1 uses b1
            con = (b_abi[:, None, None] & a_bic[:, None, :]) | \
                  (b_abi[None, :, None] & a_bic[None, :, :])
            viol = hyp & ~weaker[None, None, :] & ~con
            if viol.any():
                i0, i1, ic = (int(t) for t in np.argwhere(viol)[0])
                asg = {"a": int(a), "b": int(b), "b0": int(ji[i0]),
                       "b1": int(ji[i1]), "c": int(ji[ic])}
                return Verdict(
                    False, {v: l.labels[e] for v, e in asg.items()},
                    total=total, kind="Sj")
    return Verdict(True, None, checked=total, total=total, kind="Sj")


@dataclass(frozen=True)
class StirlitzTrack:
    a: tuple
    aprime: tuple

    @property
    def length(self):
        return len(self.a) - 1

    def labels(self, l):
        return {"a": [l.labels[i] for i in self.a],
                "aprime": [l.labels[i] for i in self.aprime]}


@dataclass(frozen=True)
class BiStirlitzTrack:
    sigma: StirlitzTrack
    tau: StirlitzTrack

    def labels(self, l):
        return {"sigma": self.sigma.labels(l), "tau": self.tau.labels(l)}


def find_stirlitz_tracks(l, n, sigma=None):
    """All tracks of length n with entries in sigma, lexicographic order."""
    if n < 1:
        raise BadArity(f"track length must be >= 1, got {n}")
    ji = l.join_irreducibles
    if sigma is None:
        sigma = ji
    sset = set(sigma)
    if not sset <= set(ji):
        raise ValueError("sigma must consist of join-irreducible elements")
    table = {p: sorted((x, y) for (x, y) in l.mnjc_pairs[p]
                       if x in sset and y in sset)
             for p in sorted(sset)}
    out = []

    def extend(a, ap):
        i = len(a) - 1
        if i == n:
            out.append(StirlitzTrack(tuple(a), tuple(ap)))
            return
        for x, y in table[a[-1]]:
            if i >= 1 and not l.leq[a[-1], l.join[ap[-1], x]]:
                continue
            a.append(x)
            ap.append(y)
            extend(a, ap)
            a.pop()
            ap.pop()

    for a0 in sorted(sset):
        extend([a0], [])
    return out


def verify_stirlitz_track(l, tr, sigma=None):
    entries = set(tr.a) | set(tr.aprime)
    ok_sigma = entries <= (set(sigma) if sigma is not None
                           else set(l.join_irreducibles))
    if not ok_sigma or len(tr.aprime) != len(tr.a) - 1:
        return False
    n = tr.length
    # aprime is indexed from 1 in the math; tuple position i holds a'_{i+1}
    for i in range(n):
        if (tr.a[i + 1], tr.aprime[i]) not in l.mnjc_pairs[tr.a[i]]:
            return False
    for i in range(1, n):
        if not l.leq[tr.a[i], l.join[tr.aprime[i - 1], tr.a[i + 1]]]:
            return False
    return True


def find_bi_stirlitz(l, m, n):
    """All bi-tracks of index (m,n) over J(L).

    The base nontriviality (a0 not under a1 or b1) is already forced by the
    two tracks' own minimal nontrivial join-covers.
    """
    if m < 1 or n < 1:
        raise BadArity(f"bi-track index must be >= 1, got ({m},{n})")
    sig = find_stirlitz_tracks(l, m)
    tau = sig if n == m else find_stirlitz_tracks(l, n)
    by_base = {}
    for t in tau:
        by_base.setdefault(t.a[0], []).append(t)
    out = []
    for s in sig:
        for t in by_base.get(s.a[0], ()):
            if l.leq[s.a[0], l.join[s.a[1], t.a[1]]]:
                out.append(BiStirlitzTrack(s, t))
    return out


def verify_bi_stirlitz(l, bt):
    return (verify_stirlitz_track(l, bt.sigma)
            and verify_stirlitz_track(l, bt.tau)
            and bt.sigma.a[0] == bt.tau.a[0]
            and bool(l.leq[bt.sigma.a[0], l.join[bt.sigma.a[1], bt.tau.a[1]]]))


@dataclass(frozen=True)
class UdavBondPartition:
    p: int
    a_side: frozenset
    b_side: frozenset

    def labels(self, l):
        return {"p": l.labels[self.p],
                "a_side": sorted(l.labels[i] for i in self.a_side),
                "b_side": sorted(l.labels[i] for i in self.b_side)}


def udav_bond_partition(l, p):
    """Split the D-successors of p so p <= x v y holds exactly across.

    The join graph on rd(p) must be complete bipartite; the partition is
    then unique up to swapping, canonicalized so a_side holds the smallest
    element index.
    """
    if p not in set(l.join_irreducibles):
        raise ValueError(f"{l.labels[p]!r} is not join-irreducible")
    rd = l.d_successors(p)
    if not rd:
        return UdavBondPartition(p, frozenset(), frozenset())
    edges = {(x, y) for x in rd for y in rd
             if x != y and l.leq[p, l.join[x, y]]}
    v = rd[0]
    b_side = {y for y in rd if (v, y) in edges}
    a_side = set(rd) - b_side
    for part in (a_side, b_side):
        for x in part:
            for y in part:
                if x != y and (x, y) in edges:
                    raise NoPartition(
                        f"{l.labels[x]} and {l.labels[y]} join above "
                        f"{l.labels[p]} on the same side")
    for x in a_side:
        for y in b_side:
            if (x, y) not in edges:
                raise NoPartition(
                    f"{l.labels[x]} and {l.labels[y]} fail to join above "
                    f"{l.labels[p]} across sides")
    return UdavBondPartition(p, frozenset(a_side), frozenset(b_side))
