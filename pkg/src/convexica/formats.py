"""Text formats: posets, lattices, presentations, identities, reconstructions.

Every parser takes the file content as a string and raises ParseError with a
1-based line number on malformed input.  Formatters produce text the parsers
round-trip.  One declaration per line, `#` starts a comment, blank lines are
ignored.
"""

import numpy as np

from .errors import ParseError
from .lattice import FinLattice, Presentation, from_leq_matrix, from_leq_pairs
from .poset import poset_from_covers
from .terms import Identity, Join, Meet, Var

__all__ = [
    "parse_poset",
    "parse_lattice",
    "parse_presentation",
    "parse_identity",
    "parse_input",
    "parse_reconstruction",
    "format_poset",
    "format_lattice",
    "format_colattice",
    "format_reconstruction",
]

_POSET_KEYS = frozenset(("elements", "covers"))
_LATTICE_KEYS = frozenset(("elements", "leq", "jointable", "meettable"))
_PRESENTATION_KEYS = frozenset(("generators", "rel"))


def _entries(text):
    """Significant lines as (lineno, keyword, payload) triples."""
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, payload = body.partition(":")
        key = key.strip()
        if not sep or not key or " " in key:
            raise ParseError(f"expected 'keyword: ...', got {body!r}", ln)
        out.append((ln, key, payload.strip()))
    return out


def _reject_foreign(entries, allowed, what):
    for ln, key, _ in entries:
        if key not in allowed:
            raise ParseError(f"unexpected {key + ':'!r} in a {what} file", ln)


def _collect_elements(entries):
    labels = []
    seen = set()
    for ln, key, payload in entries:
        if key != "elements":
            continue
        for tok in payload.split():
            if tok in seen:
                raise ParseError(f"duplicate element {tok!r}", ln)
            seen.add(tok)
            labels.append(tok)
    return labels, seen


def _cover_pairs(entries, declared):
    pairs = []
    seen = set()
    for ln, key, payload in entries:
        if key != "covers":
            continue
        for tok in payload.split():
            x, sep, y = tok.partition("<")
            if not sep or not x or not y or "<" in y:
                raise ParseError(f"bad cover token {tok!r}, want x<y", ln)
            for lab in (x, y):
                if lab not in declared:
                    raise ParseError(f"unknown element {lab!r}", ln)
            if x == y:
                raise ParseError(f"cover {tok!r} relates an element to itself", ln)
            if (x, y) not in seen:
                seen.add((x, y))
                pairs.append((x, y))
    return pairs


def parse_poset(text):
    """Poset from `elements:` and `covers:` lines."""
    entries = _entries(text)
    _reject_foreign(entries, _POSET_KEYS, "poset")
    labels, declared = _collect_elements(entries)
    pairs = _cover_pairs(entries, declared)
    return poset_from_covers(labels, pairs)


def _parse_table(rows, labels, ln0):
    n = len(labels)
    if len(rows) != n:
        raise ParseError(
            f"table needs {n} rows (one per element), got {len(rows)}", ln0)
    index = {lab: i for i, lab in enumerate(labels)}
    table = np.zeros((n, n), dtype=np.int32)
    for r, (ln, toks) in enumerate(rows):
        if len(toks) != n:
            raise ParseError(f"table row needs {n} entries, got {len(toks)}", ln)
        for c, tok in enumerate(toks):
            if tok not in index:
                raise ParseError(f"unknown element {tok!r} in table", ln)
            table[r, c] = index[tok]
    return table


def _order_from_tables(labels, jt, mt, ln0):
    n = len(labels)
    if jt is not None:
        leq = np.equal(jt, np.arange(n)[None, :])
    else:
        leq = np.equal(mt, np.arange(n)[:, None])
    if jt is not None and mt is not None:
        alt = np.equal(mt, np.arange(n)[:, None])
        if not np.array_equal(leq, alt):
            raise ParseError("jointable and meettable disagree on the order", ln0)
    if not leq.diagonal().all():
        raise ParseError("table order is not reflexive", ln0)
    if (leq & leq.T & ~np.eye(n, dtype=bool)).any():
        raise ParseError("table order is not antisymmetric", ln0)
    closed = leq | (leq @ leq)
    if not np.array_equal(closed, leq):
        raise ParseError("table order is not transitive", ln0)
    return leq


def parse_lattice(text):
    """Lattice from `elements:` plus `leq:` pairs or join/meet table rows."""
    entries = _entries(text)
    _reject_foreign(entries, _LATTICE_KEYS, "lattice")
    labels, declared = _collect_elements(entries)
    if not labels:
        raise ParseError("lattice file needs a non-empty elements: line", 1)
    leq_pairs = []
    jt_rows, mt_rows = [], []
    first_table_ln = None
    for ln, key, payload in entries:
        if key == "leq":
            for tok in payload.split():
                x, sep, y = tok.partition("<=")
                if not sep or not x or not y:
                    raise ParseError(f"bad order token {tok!r}, want x<=y", ln)
                for lab in (x, y):
                    if lab not in declared:
                        raise ParseError(f"unknown element {lab!r}", ln)
                leq_pairs.append((x, y))
        elif key == "jointable":
            jt_rows.append((ln, payload.split()))
            first_table_ln = first_table_ln or ln
        elif key == "meettable":
            mt_rows.append((ln, payload.split()))
            first_table_ln = first_table_ln or ln
    if leq_pairs and (jt_rows or mt_rows):
        raise ParseError("give either leq: pairs or tables, not both",
                         first_table_ln)
    if leq_pairs:
        return from_leq_pairs(labels, leq_pairs)
    if not (jt_rows or mt_rows):
        raise ParseError("lattice file needs leq: pairs or a table", 1)
    jt = _parse_table(jt_rows, labels, jt_rows[0][0]) if jt_rows else None
    mt = _parse_table(mt_rows, labels, mt_rows[0][0]) if mt_rows else None
    leq = _order_from_tables(labels, jt, mt, first_table_ln)
    l = from_leq_matrix(labels, leq)
    for given, own, sym, ln in ((jt, l.join, "v", jt_rows and jt_rows[0][0]),
                                (mt, l.meet, "^", mt_rows and mt_rows[0][0])):
        if given is None:
            continue
        bad = np.argwhere(given != own)
        if len(bad):
            x, y = (int(v) for v in bad[0])
            raise ParseError(
                f"table says {labels[x]} {sym} {labels[y]} = "
                f"{labels[int(given[x, y])]}, induced order gives "
                f"{labels[int(own[x, y])]}", ln)
    return l


def parse_presentation(text):
    """Presentation from `generators:` and `rel: g <= h|k` lines."""
    entries = _entries(text)
    _reject_foreign(entries, _PRESENTATION_KEYS, "presentation")
    gens = []
    seen = set()
    raw_rels = []
    for ln, key, payload in entries:
        if key == "generators":
            for tok in payload.split():
                if tok in seen:
                    raise ParseError(f"duplicate generator {tok!r}", ln)
                seen.add(tok)
                gens.append(tok)
        else:
            left, sep, right = payload.partition("<=")
            if not sep:
                raise ParseError("rel needs the form g <= h or g <= x|y", ln)
            g = left.split()
            rhs = [part.strip() for part in right.split("|")]
            if len(g) != 1 or any(not part or " " in part for part in rhs):
                raise ParseError(f"bad relation {payload!r}", ln)
            raw_rels.append((ln, g[0], rhs))
    if not gens:
        raise ParseError("presentation needs a generators: line", 1)
    leq_rels, join_rels = [], []
    for ln, g, rhs in raw_rels:
        for lab in (g, *rhs):
            if lab not in seen:
                raise ParseError(f"unknown generator {lab!r}", ln)
        if len(rhs) == 1:
            leq_rels.append((g, rhs[0]))
        else:
            join_rels.append((g, frozenset(rhs)))
    return Presentation(tuple(gens), tuple(leq_rels), tuple(join_rels))


def _parse_term(src, variables, ln):
    toks = src.replace("(", " ( ").replace(")", " ) ").split()
    if not toks:
        raise ParseError("empty term", ln)
    pos = 0

    def walk():
        nonlocal pos
        if pos >= len(toks):
            raise ParseError("term ended early", ln)
        tok = toks[pos]
        pos += 1
        if tok == "(":
            if pos >= len(toks) or toks[pos] in ("(", ")"):
                raise ParseError("expected join or meet after '('", ln)
            head = toks[pos]
            pos += 1
            if head not in ("join", "meet"):
                raise ParseError(
                    f"operator must be join or meet, got {head!r}", ln)
            args = []
            while pos < len(toks) and toks[pos] != ")":
                args.append(walk())
            if pos >= len(toks):
                raise ParseError("missing ')'", ln)
            pos += 1
            if len(args) < 2:
                raise ParseError(f"{head} needs at least two arguments", ln)
            return Join(*args) if head == "join" else Meet(*args)
        if tok == ")":
            raise ParseError("unbalanced ')'", ln)
        if tok not in variables:
            raise ParseError(f"undeclared variable {tok!r}", ln)
        return Var(tok)

    term = walk()
    if pos != len(toks):
        raise ParseError("trailing tokens after term", ln)
    return term


def parse_identity(text):
    """Custom identity from `name:`, `vars:`, `lhs:`, `rhs:` lines."""
    entries = _entries(text)
    fields, lines = {}, {}
    for ln, key, payload in entries:
        if key not in ("name", "vars", "lhs", "rhs"):
            raise ParseError(f"unexpected {key + ':'!r} in an identity file", ln)
        if key in fields:
            raise ParseError(f"duplicate {key + ':'!r} line", ln)
        fields[key] = payload
        lines[key] = ln
    for key in ("name", "vars", "lhs", "rhs"):
        if key not in fields:
            raise ParseError(f"identity file is missing its {key + ':'!r} line", 1)
    name = fields["name"]
    if not name:
        raise ParseError("name: must not be empty", lines["name"])
    variables = fields["vars"].split()
    if len(set(variables)) != len(variables):
        raise ParseError("duplicate variable", lines["vars"])
    if not variables:
        raise ParseError("vars: must declare at least one variable", lines["vars"])
    var_set = set(variables)
    lhs = _parse_term(fields["lhs"], var_set, lines["lhs"])
    rhs = _parse_term(fields["rhs"], var_set, lines["rhs"])
    used = _term_vars(lhs) | _term_vars(rhs)
    unused = var_set - used
    if unused:
        raise ParseError(
            f"variable {sorted(unused)[0]!r} declared but never used",
            lines["vars"])
    return Identity(name, tuple(variables), lhs, rhs)


def _term_vars(t):
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in t.args:
        out |= _term_vars(a)
    return out


def parse_input(text):
    """Detect the kind of a model file; returns (kind, object).

    Kind is "presentation" when generators:/rel: lines appear, "lattice"
    when leq: or table lines appear, otherwise "poset".
    """
    entries = _entries(text)
    if not entries:
        raise ParseError("empty input", 1)
    keys = {key for _, key, _ in entries}
    if keys & _PRESENTATION_KEYS:
        return "presentation", parse_presentation(text)
    if keys & (_LATTICE_KEYS - _POSET_KEYS):
        return "lattice", parse_lattice(text)
    return "poset", parse_poset(text)


def parse_reconstruction(text):
    """Poset plus named convex subsets from extra `convex: NAME x y` lines.

    Returns (poset, {name: member mask}).  Convexity itself is not checked
    here; the growth experiment validates and reports it.
    """
    entries = _entries(text)
    _reject_foreign(entries, _POSET_KEYS | {"convex"}, "reconstruction")
    poset_entries = [e for e in entries if e[1] != "convex"]
    labels, declared = _collect_elements(poset_entries)
    pairs = _cover_pairs(poset_entries, declared)
    p = poset_from_covers(labels, pairs)
    named = {}
    for ln, key, payload in entries:
        if key != "convex":
            continue
        toks = payload.split()
        if not toks:
            raise ParseError("convex: needs a name", ln)
        name, members = toks[0], toks[1:]
        if name in named:
            raise ParseError(f"duplicate convex set {name!r}", ln)
        for lab in members:
            if lab not in declared:
                raise ParseError(f"unknown element {lab!r}", ln)
        if len(set(members)) != len(members):
            raise ParseError(f"repeated member in convex set {name!r}", ln)
        named[name] = p.mask_of(members)
    return p, named


def _check_label(lab):
    if not lab or "<" in lab or "#" in lab or any(c.isspace() for c in lab):
        raise ParseError(f"label {lab!r} is not representable in text form")


def _chunked(prefix, tokens, per_line=12):
    if not tokens:
        return []
    return [prefix + " ".join(tokens[i:i + per_line])
            for i in range(0, len(tokens), per_line)]


def format_poset(p):
    """Text form that parse_poset round-trips."""
    for lab in p.labels:
        _check_label(lab)
    lines = _chunked("elements: ", list(p.labels)) or ["elements:"]
    lines += _chunked("covers: ",
                      [f"{p.labels[x]}<{p.labels[y]}" for x, y in p.covers])
    return "\n".join(lines) + "\n"


def _cover_tokens(labels, leq):
    strict = leq & ~np.eye(len(labels), dtype=bool)
    cov = strict & ~(strict @ strict)
    return [f"{labels[x]}<={labels[y]}" for x, y in np.argwhere(cov)]


def format_lattice(l):
    """Text form (elements + leq cover pairs) that parse_lattice round-trips."""
    for lab in l.labels:
        _check_label(lab)
    lines = _chunked("elements: ", list(l.labels))
    lines += _chunked("leq: ", _cover_tokens(l.labels, l.leq))
    return "\n".join(lines) + "\n"


def format_colattice(co):
    """Lattice text for Co(P); elements are canonical set labels.

    Covers come from the one-point-extension rule: Y covers X exactly when
    Y = X + {z} is again convex, since convex sets grow one point at a time.
    """
    labels = [co.label_of(m) for m in co.elements]
    for lab in labels:
        _check_label(lab)
    index = co.index
    tokens = []
    for i, m in enumerate(co.elements):
        for z in range(co.poset.n):
            bit = 1 << z
            if m & bit:
                continue
            j = index.get(m | bit)
            if j is not None:
                tokens.append(f"{labels[i]}<={labels[j]}")
    lines = _chunked("elements: ", labels)
    lines += _chunked("leq: ", tokens)
    return "\n".join(lines) + "\n"


def format_reconstruction(p, named):
    """Reconstruction text: the poset plus one convex: line per named set."""
    out = format_poset(p)
    for name in named:
        _check_label(name)
        members = p.labels_of(named[name])
        out += "convex: " + " ".join((name, *members)).rstrip() + "\n"
    return out
