import numpy as np
import pytest

from convexica.colattice import co_lattice
from convexica.errors import ParseError
from convexica.formats import (
    format_colattice,
    format_lattice,
    format_poset,
    format_reconstruction,
    parse_identity,
    parse_input,
    parse_lattice,
    parse_poset,
    parse_presentation,
    parse_reconstruction,
)
from convexica.lattice import from_colattice, from_leq_pairs, from_presentation
from convexica.poset import chain, pij
from convexica.terms import Join, Meet, Var, term_to_sexp

from helpers import poset_isomorphic


def test_poset_round_trip():
    for p in (chain(4), pij(2, 3), chain(1)):
        q = parse_poset(format_poset(p))
        assert list(q.labels) == list(p.labels)
        assert q.covers == p.covers


def test_poset_round_trip_long_lines():
    # more than one chunked elements:/covers: line
    p = chain(30)
    text = format_poset(p)
    assert sum(ln.startswith("elements:") for ln in text.splitlines()) > 1
    q = parse_poset(text)
    assert list(q.labels) == list(p.labels) and q.covers == p.covers


def test_poset_comments_and_blank_lines():
    text = """
# a four element fence
elements: a b c d   # trailing note
covers: a<b c<b
covers: c<d
"""
    p = parse_poset(text)
    assert p.n == 4 and len(p.covers) == 3


def test_poset_parse_errors_carry_line_numbers():
    cases = [
        ("elements: a b\nnonsense without colon", 2),
        ("elements: a a", 1),
        ("elements: a b\ncovers: a<z", 2),
        ("elements: a b\ncovers: a<a", 2),
        ("elements: a b\ncovers: ab", 2),
        ("elements: a b\nleq: a<=b", 2),
    ]
    for text, line in cases:
        with pytest.raises(ParseError) as exc:
            parse_poset(text)
        assert exc.value.line == line


def test_lattice_from_leq_text():
    text = "elements: 0 x y z 1\nleq: 0<=x 0<=y 0<=z x<=1 y<=1 z<=1\n"
    l = parse_lattice(text)
    assert l.n == 5
    x, y = l.index["x"], l.index["y"]
    assert l.join[x, y] == l.top and l.meet[x, y] == l.bottom


def test_lattice_round_trip():
    src = from_leq_pairs("0 a b 1".split(),
                         [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
    l = parse_lattice(format_lattice(src))
    assert list(l.labels) == list(src.labels)
    assert (l.join == src.join).all() and (l.meet == src.meet).all()


def test_lattice_from_tables():
    text = ("elements: 0 1\n"
            "jointable: 0 1\n"
            "jointable: 1 1\n"
            "meettable: 0 0\n"
            "meettable: 0 1\n")
    l = parse_lattice(text)
    assert l.join[0, 1] == 1 and l.meet[0, 1] == 0


def test_lattice_single_table_suffices():
    text = "elements: 0 1\njointable: 0 1\njointable: 1 1\n"
    l = parse_lattice(text)
    assert l.meet[0, 1] == 0


def test_lattice_table_errors():
    with pytest.raises(ParseError) as exc:
        parse_lattice("elements: 0 1\n"
                      "jointable: 1 1\n"   # claims 0 v 0 = 1
                      "jointable: 1 1\n")
    assert "reflexive" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        parse_lattice("elements: 0 1\n"
                      "jointable: 0 1\n"
                      "jointable: 1 1\n"
                      "meettable: 0 1\n"   # meet order contradicts join order
                      "meettable: 1 1\n")
    assert "disagree" in str(exc.value)
    with pytest.raises(ParseError):
        parse_lattice("elements: 0 1\nleq: 0<=1\njointable: 0 1\n")
    with pytest.raises(ParseError):
        parse_lattice("elements: 0 1\n")
    with pytest.raises(ParseError):
        parse_lattice("elements: 0 1\njointable: 0\njointable: 1 1\n")
    with pytest.raises(ParseError):
        parse_lattice("elements: 0 1\nleq: 0<1\n")


def test_colattice_text_matches_lattice_view():
    for p in (chain(4), pij(2, 2)):
        co = co_lattice(p)
        l = parse_lattice(format_colattice(co))
        direct = from_colattice(co)
        assert list(l.labels) == list(direct.labels)
        assert (l.join == direct.join).all()
        assert (l.meet == direct.meet).all()


def test_presentation_round_trip():
    text = ("generators: a ap b c u v\n"
            "rel: ap <= a\n"
            "rel: a <= b|c\n"
            "rel: b <= u|v\n"
            "rel: b <= ap|u\n"
            "rel: a <= u|c\n")
    pres = parse_presentation(text)
    assert pres.generators == ("a", "ap", "b", "c", "u", "v")
    assert len(from_presentation(pres).join_irreducibles) == 6


def test_presentation_errors():
    cases = [
        ("generators: a a", 1),
        ("generators: a\nrel: a <= z", 2),
        ("generators: a b\nrel: a b <= a", 2),
        ("rel: a <= a", None),
    ]
    for text, line in cases:
        with pytest.raises(ParseError) as exc:
            parse_presentation(text)
        if line is not None:
            assert exc.value.line == line


def test_identity_parsing():
    text = ("name: modular\n"
            "vars: x y z\n"
            "lhs: (meet (join x (meet z y)) z)\n"
            "rhs: (join (meet x z) (meet z y))\n")
    ident = parse_identity(text)
    assert ident.name == "modular"
    assert ident.variables == ("x", "y", "z")
    assert term_to_sexp(ident.lhs) == "(meet (join x (meet z y)) z)"


def test_identity_parse_errors():
    base = "name: t\nvars: x y\n"
    cases = [
        base + "lhs: (join x y\nrhs: x",           # missing ')'
        base + "lhs: (join x)\nrhs: y",            # unary join
        base + "lhs: (or x y)\nrhs: x",            # unknown operator
        base + "lhs: (join x z)\nrhs: y",          # undeclared variable
        base + "lhs: x y\nrhs: y",                 # trailing tokens
        base + "lhs: x\nrhs: x",                   # y declared, never used
        "name: t\nvars: x x\nlhs: x\nrhs: x",
        "vars: x\nlhs: x\nrhs: x",                 # missing name
        base + "lhs: x\nlhs: y\nrhs: x y",         # duplicate lhs
    ]
    for text in cases:
        with pytest.raises(ParseError):
            parse_identity(text)


def test_input_dispatch():
    kind, p = parse_input("elements: a b\ncovers: a<b\n")
    assert kind == "poset" and p.n == 2
    kind, l = parse_input("elements: 0 1\nleq: 0<=1\n")
    assert kind == "lattice" and l.n == 2
    kind, pres = parse_input("generators: x y\n")
    assert kind == "presentation" and pres.generators == ("x", "y")
    with pytest.raises(ParseError):
        parse_input("# nothing but comments\n")


def test_reconstruction_round_trip():
    p = pij(2, 2)
    named = {"A": p.mask_of(["i0", "p"]), "B": p.mask_of(["p", "j1"])}
    text = format_reconstruction(p, named)
    q, parsed = parse_reconstruction(text)
    assert poset_isomorphic(p, q)
    assert {k: q.labels_of(v) for k, v in parsed.items()} == \
        {k: p.labels_of(v) for k, v in named.items()}


def test_reconstruction_accepts_non_convex_sets():
    # validation happens later, in the growth gate, not in the parser
    _, named = parse_reconstruction(
        "elements: a b c\ncovers: a<b b<c\nconvex: S a c\n")
    assert "S" in named


def test_reconstruction_errors():
    base = "elements: a b\ncovers: a<b\n"
    cases = [
        (base + "convex: S a\nconvex: S b", 4),
        (base + "convex: S z", 3),
        (base + "convex: S a a", 3),
        (base + "convex:", 3),
    ]
    for text, line in cases:
        with pytest.raises(ParseError) as exc:
            parse_reconstruction(text)
        assert exc.value.line == line


def test_formatters_reject_unprintable_labels():
    from convexica.poset import poset_from_covers
    bad = poset_from_covers(["a b"], [])
    with pytest.raises(ParseError):
        format_poset(bad)
    with pytest.raises(ParseError):
        format_reconstruction(chain(2), {"has space": 0})
