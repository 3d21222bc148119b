"""Built-in worked examples with expected facts.

Each entry carries a parseable payload in one of the standard input
formats plus a dict of expected facts.  ``run_corpus`` re-derives every
fact from the payload through the public engine calls and reports
agreement, so the corpus doubles as an end-to-end regression net: if a
refactor changes any verdict, the corpus run names the entry and the
fact that moved.

Facts are chosen to stay comfortably inside the default search budget;
entries whose lattices are too large for exhaustive identity scans only
freeze cheap facts (sizes, length, irreducibility data).
"""

from dataclasses import dataclass

from .colattice import co_lattice, co_cardinality_pij, is_completely_si
from .formats import parse_input, parse_reconstruction
from .growth import run_growth_experiment, truncation_from_poset, validate_truncation
from .lattice import d_cycles, d_relation, from_colattice, is_subdirectly_irreducible, join_irreducibles
from .poset import length
from .terms import check_identity, identity_by_name
from .variety import decide_sub, decide_sub2, decide_subn


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    kind: str  # "poset" | "presentation" | "reconstruction"
    title: str
    payload: str
    expected: tuple  # ((fact, value), ...) in report order


@dataclass(frozen=True)
class CorpusResult:
    entry: str
    fact: str
    expected: object
    actual: object

    @property
    def ok(self):
        return self.expected == self.actual

    def to_json(self):
        return {
            "entry": self.entry,
            "fact": self.fact,
            "expected": self.expected,
            "actual": self.actual,
            "ok": self.ok,
        }


def _chain_payload(m):
    lines = ["elements: " + " ".join(f"c{i}" for i in range(m))]
    if m > 1:
        lines.append("covers: " + " ".join(f"c{i}<c{i + 1}" for i in range(m - 1)))
    return "\n".join(lines) + "\n"


def _pij_payload(i, j):
    ups = [f"x{t}" for t in range(i)]
    downs = [f"y{t}" for t in range(j)]
    covers = [f"p<{u}" for u in ups] + [f"{d}<p" for d in downs]
    return (
        "elements: p " + " ".join(ups + downs) + "\n"
        "covers: " + " ".join(covers) + "\n"
    )


_SIXGEN_PAYLOAD = """\
generators: a ap b c u v
rel: ap <= a
rel: a <= b|c
rel: b <= u|v
rel: b <= ap|u
rel: a <= u|c
"""

# Triple-family truncation at depth 2; see growth.build_truncated_figure2.
_GROWTH_K2_PAYLOAD = """\
elements: a0 b0 c0 d0 a1 b1 c1 d1 a2 b2 c2 d2
covers: d0<c0 c0<a0 d1<c1 c1<a1 d2<c2 c2<a2
covers: b0<d1 d1<c0 b1<d2 d2<c1
convex: A a0 a1 a2
convex: B d0 b0 b1 b2
convex: C c0 c1 c2 d0 d1 d2
"""


def _chain_entry(m):
    expected = [("length", m - 1), ("co_size", m * (m + 1) // 2 + 1)]
    if m == 2:
        expected += [("csi", False), ("csi_witness", None)]
    else:
        expected += [("csi", True), ("csi_witness", tuple(f"c{i}" for i in range(1, m - 1)))]
    for n in range(1, 5):
        expected.append((f"in_subn:{n}", m - 1 <= n))
    return CorpusEntry(
        name=f"chain-{m}",
        kind="poset",
        title=f"{m}-element chain",
        payload=_chain_payload(m),
        expected=tuple(expected),
    )


def _pij_entry(i, j, memberships):
    expected = [
        ("length", 2),
        ("co_size", co_cardinality_pij(i, j)),
        ("csi", True),
        ("csi_witness", ("p",)),
    ]
    if memberships:
        expected += [("in_subn:1", False), ("in_subn:2", True), ("in_subn:3", True)]
    return CorpusEntry(
        name=f"pij-{i}-{j}",
        kind="poset",
        title=f"two fans glued at a point ({i} up, {j} down)",
        payload=_pij_payload(i, j),
        expected=tuple(expected),
    )


ENTRIES = (
    _chain_entry(2),
    _chain_entry(3),
    _chain_entry(4),
    _chain_entry(5),
    CorpusEntry(
        name="antichain-3",
        kind="poset",
        title="3-element antichain",
        payload="elements: x y z\n",
        expected=(
            ("length", 0),
            ("co_size", 8),
            ("csi", False),
            ("in_subn:1", True),
            ("in_subn:2", True),
            ("in_subn:3", True),
            ("in_subn:4", True),
        ),
    ),
    _pij_entry(2, 2, memberships=True),
    _pij_entry(2, 3, memberships=True),
    _pij_entry(3, 3, memberships=False),
    CorpusEntry(
        name="sixgen-sub3",
        kind="presentation",
        title="six-generator lattice separating depth 2 from depth 3",
        payload=_SIXGEN_PAYLOAD,
        expected=(
            ("ji_count", 6),
            ("d_pair:{a,ap}>{b}", True),
            ("d_pair:{b}>{u}", True),
            ("d_cycle", True),
            ("si", True),
            ("l2_holds", False),
            ("in_sub", True),
            ("in_subn:2", False),
            ("in_subn:3", True),
        ),
    ),
    CorpusEntry(
        name="growth-candidate-k2",
        kind="reconstruction",
        title="depth-2 truncation of the three-set growth family",
        payload=_GROWTH_K2_PAYLOAD,
        expected=(
            ("gate_passes", True),
            ("rows_valid", True),
            ("sublattice_sizes", (12, 16)),
            ("sizes_strictly_increasing", True),
        ),
    ),
)


def _poset_facts(entry, wanted):
    kind, p = parse_input(entry.payload)
    if kind != "poset":
        raise ValueError(f"{entry.name}: payload parsed as {kind}, expected poset")
    facts = {}
    if "length" in wanted:
        facts["length"] = length(p)
    if "csi" in wanted or "csi_witness" in wanted:
        rep = is_completely_si(p)
        facts["csi"] = rep.csi
        facts["csi_witness"] = tuple(rep.least.labels) if rep.least is not None else None
    lat = None
    if "co_size" in wanted or any(f.startswith("in_subn:") for f in wanted):
        lat = from_colattice(co_lattice(p))
    if "co_size" in wanted:
        facts["co_size"] = lat.n
    for f in wanted:
        if f.startswith("in_subn:"):
            facts[f] = decide_subn(lat, int(f.split(":")[1])).member
    return facts


def _presentation_facts(entry, wanted):
    kind, pres = parse_input(entry.payload)
    if kind != "presentation":
        raise ValueError(f"{entry.name}: payload parsed as {kind}, expected presentation")
    from .lattice import from_presentation

    lat = from_presentation(pres)
    facts = {}
    if "ji_count" in wanted:
        facts["ji_count"] = len(join_irreducibles(lat))
    pair_facts = [f for f in wanted if f.startswith("d_pair:")]
    if pair_facts:
        edges = {(lat.labels[a], lat.labels[b]) for a, b in d_relation(lat)}
        for f in pair_facts:
            upper, lower = f[len("d_pair:"):].split(">")
            facts[f] = (upper, lower) in edges
    if "d_cycle" in wanted:
        facts["d_cycle"] = bool(d_cycles(lat))
    if "si" in wanted:
        facts["si"] = is_subdirectly_irreducible(lat).is_si
    if "l2_holds" in wanted:
        facts["l2_holds"] = check_identity(lat, identity_by_name("L2"), prune=True).holds
    if "in_sub" in wanted:
        facts["in_sub"] = decide_sub(lat).member
    for f in wanted:
        if f.startswith("in_subn:"):
            n = int(f.split(":")[1])
            rep = decide_sub2(lat) if n == 2 else decide_subn(lat, n)
            facts[f] = rep.member
    return facts


def _reconstruction_facts(entry, wanted):
    p, named = parse_reconstruction(entry.payload)
    t = truncation_from_poset(p, named)
    facts = {}
    if "gate_passes" in wanted:
        facts["gate_passes"] = not validate_truncation(t)
    report = run_growth_experiment(t.k, reconstruction=(p, named))
    if "rows_valid" in wanted:
        facts["rows_valid"] = report.valid
    if "sublattice_sizes" in wanted:
        facts["sublattice_sizes"] = tuple(r.sublattice_size for r in report.rows)
    if "sizes_strictly_increasing" in wanted:
        facts["sizes_strictly_increasing"] = report.sizes_strictly_increasing
    return facts


_FACT_RUNNERS = {
    "poset": _poset_facts,
    "presentation": _presentation_facts,
    "reconstruction": _reconstruction_facts,
}


def entry_by_name(name):
    for e in ENTRIES:
        if e.name == name:
            return e
    raise KeyError(name)


def run_corpus(name_filter=None):
    """Re-derive expected facts for matching entries.

    ``name_filter`` is a case-insensitive substring match on entry names;
    None runs everything.  Results come back in declaration order.
    """
    results = []
    for entry in ENTRIES:
        if name_filter is not None and name_filter.lower() not in entry.name.lower():
            continue
        wanted = [fact for fact, _ in entry.expected]
        facts = _FACT_RUNNERS[entry.kind](entry, wanted)
        for fact, expected in entry.expected:
            results.append(CorpusResult(entry.name, fact, expected, facts.get(fact)))
    return results
