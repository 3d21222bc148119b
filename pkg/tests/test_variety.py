import numpy as np
import pytest

from convexica.colattice import co_lattice
from convexica.errors import (BadArity, BudgetExceeded, ConvexicaError,
                              NotAHomomorphism, NotInSub2, TooFewGenerators)
from convexica.lattice import Presentation, from_colattice, from_leq_pairs, \
    from_presentation
from convexica.poset import antichain, chain, length, pij
from convexica.terms import check_ji_interpretation, find_bi_stirlitz
from convexica.variety import (
    decide_sub,
    decide_sub2,
    decide_subn,
    gamma_embedding,
    revalidate,
    sub2_canonical_form,
    truncate_hom,
)

from helpers import enumerate_posets_upto, poset_isomorphic, random_poset

SIXGEN = Presentation(
    ("a", "ap", "b", "c", "u", "v"),
    (("ap", "a"),),
    (("a", ("b", "c")), ("b", ("u", "v")), ("b", ("ap", "u")),
     ("a", ("u", "c"))),
)


def co_of(p):
    return from_colattice(co_lattice(p))


def pentagon():
    return from_leq_pairs("0 x y z 1".split(),
                          [("0", "x"), ("0", "y"), ("x", "z"),
                           ("z", "1"), ("y", "1")])


def diamond():
    return from_leq_pairs("0 x y z 1".split(),
                          [("0", t) for t in "xyz"] +
                          [(t, "1") for t in "xyz"])


def four_atoms():
    return from_leq_pairs("0 w x y z 1".split(),
                          [("0", t) for t in "wxyz"] +
                          [(t, "1") for t in "wxyz"])


def test_decide_sub_examples():
    rep = decide_sub(from_presentation(SIXGEN))
    assert rep.member and rep.passed == ("S", "U", "B")
    bad = decide_sub(diamond())
    assert not bad.member
    assert bad.witness["kind"] == "identity"
    assert bad.witness["identity"] == "S"
    assert revalidate(diamond(), bad.witness)


def test_decide_sub2_matches_length_two():
    for p in enumerate_posets_upto(4):
        l = co_of(p)
        want = length(p) <= 2
        assert decide_sub2(l, method="structural").member == want
        assert decide_sub2(l, method="naive").member == want


def test_decide_sub2_methods_agree_on_small_lattices():
    rng = np.random.default_rng(83)
    lattices = [pentagon(), diamond(), four_atoms(),
                from_presentation(SIXGEN)]
    lattices += [co_of(random_poset(rng, int(rng.integers(1, 5))))
                 for _ in range(6)]
    for l in lattices:
        a = decide_sub2(l, method="naive")
        b = decide_sub2(l, method="structural")
        assert a.member == b.member
        for rep in (a, b):
            if not rep.member:
                assert revalidate(l, rep.witness)


def test_decide_sub2_witness_kinds():
    l = co_of(chain(4))
    st = decide_sub2(l, method="structural")
    assert not st.member and st.witness["kind"] == "d_chain"
    assert len(st.witness["chain"]) == 3
    assert revalidate(l, st.witness)
    nv = decide_sub2(l, method="naive")
    assert not nv.member and nv.witness["kind"] == "identity"
    assert nv.witness["identity"] == "L2"
    ok = decide_sub2(co_of(chain(3)), method="structural")
    assert ok.member and ok.passed[-1] == "no-d-chain"


def test_decide_subn_index_one_is_distributivity():
    assert decide_subn(co_of(chain(2)), 1).member
    rep = decide_subn(co_of(chain(3)), 1)
    assert not rep.member
    assert rep.witness["identity"] == "DIST"
    with pytest.raises(BadArity):
        decide_subn(co_of(chain(2)), 0)
    with pytest.raises(ValueError):
        decide_subn(co_of(chain(2)), 2, method="telepathy")


def test_decide_subn_matches_length_exhaustively():
    for p in enumerate_posets_upto(4):
        l = co_of(p)
        for n in range(1, 5):
            rep = decide_subn(l, n, method="structural")
            assert rep.member == (length(p) <= n)
            if not rep.member:
                assert revalidate(l, rep.witness)


def test_decide_subn_naive_agrees_where_affordable():
    for p in enumerate_posets_upto(4):
        l = co_of(p)
        rep = decide_subn(l, 2, method="naive", budget=5_000_000)
        assert rep.member == (length(p) <= 2)
    rep = decide_subn(co_of(chain(3)), 3, method="naive",
                      budget=20_000_000)
    assert rep.member
    assert rep.passed == ("S", "U", "B", "H:3", "Hmn:2,2")
    deep = decide_subn(co_of(chain(5)), 3, method="naive",
                       budget=100_000_000)
    assert not deep.member and deep.witness["identity"] == "H:3"


def test_structural_decisions_ignore_the_naive_budget():
    # the budget parameter caps naive evaluation only; structural
    # preconditions carry their own
    l = co_of(chain(3))
    with pytest.raises(BudgetExceeded):
        decide_sub2(l, method="naive", budget=1)
    rep = decide_sub2(l, method="structural", budget=1)
    assert rep.member

    big = co_of(pij(3, 3))
    with pytest.raises(BudgetExceeded):
        decide_subn(big, 1, method="naive", budget=100)
    rep = decide_subn(big, 1, method="structural", budget=100)
    assert not rep.member and rep.witness["identity"] == "DIST"


def test_decide_subn_matches_length_sampled():
    rng = np.random.default_rng(89)
    for size in (5, 6):
        for _ in range(8):
            p = random_poset(rng, size)
            l = co_of(p)
            for n in range(1, 5):
                rep = decide_subn(l, n)
                assert rep.member == (length(p) <= n)


def test_varieties_form_a_chain():
    rng = np.random.default_rng(97)
    lattices = [from_presentation(SIXGEN)]
    lattices += [co_of(random_poset(rng, int(rng.integers(1, 6))))
                 for _ in range(6)]
    for l in lattices:
        for n in range(1, 4):
            if decide_subn(l, n).member:
                assert decide_subn(l, n + 1).member


def test_sixgen_membership_profile():
    l = from_presentation(SIXGEN)
    assert not decide_sub2(l, method="structural").member
    two = decide_subn(l, 2)
    assert not two.member and two.witness["kind"] == "stirlitz_track"
    assert revalidate(l, two.witness)
    three = decide_subn(l, 3)
    assert three.member
    assert "no-track:3" in three.passed
    assert "no-bi-track:2,2" in three.passed


def test_revalidate_track_and_bi_track_witnesses():
    l = co_of(chain(4))
    rep = decide_subn(l, 2)
    assert rep.witness["kind"] == "stirlitz_track"
    assert revalidate(l, rep.witness)
    bad = dict(rep.witness)
    bad["a"] = list(reversed(bad["a"]))
    assert not revalidate(l, bad)

    bt = find_bi_stirlitz(l, 2, 1)[0]
    w = {"kind": "bi_stirlitz", "m": 2, "n": 1, **bt.labels(l)}
    assert revalidate(l, w)
    other = find_bi_stirlitz(l, 1, 2)[0]
    mixed = {"kind": "bi_stirlitz", "m": 2, "n": 1,
             "sigma": bt.labels(l)["sigma"], "tau": other.labels(l)["tau"]}
    if bt.sigma.a[0] != other.tau.a[0]:
        assert not revalidate(l, mixed)


def test_revalidate_identity_and_chain_tampering():
    l = co_of(chain(4))
    w = decide_sub2(l, method="naive").witness
    assert revalidate(l, w)
    flat = dict(w)
    flat["assignment"] = {k: "{}" for k in w["assignment"]}
    assert not revalidate(l, flat)

    ch = decide_sub2(l, method="structural").witness
    fake = {"kind": "d_chain", "chain": [ch["chain"][0], ch["chain"][1],
                                         "{}"]}
    assert not revalidate(l, fake)
    with pytest.raises(ConvexicaError):
        revalidate(l, {"kind": "sorcery"})


def test_revalidate_ji_interpretation_witnesses():
    m4 = four_atoms()
    for kind in ("Sj", "Uj"):
        v = check_ji_interpretation(m4, kind)
        w = {"kind": kind, "assignment": v.assignment}
        assert revalidate(m4, w)
        off = dict(w)
        off["assignment"] = dict(v.assignment)
        off["assignment"][next(iter(v.assignment))] = "0"
        assert not revalidate(m4, off)


def test_gamma_flags_on_short_convex_set_lattices():
    for p in enumerate_posets_upto(4):
        if length(p) > 2:
            continue
        ge = gamma_embedding(co_of(p))
        assert ge.is_embedding and ge.bounds_preserved
        assert ge.length_le_2 and ge.tree_like


def test_gamma_round_trip_on_diamond_posets():
    for i in (1, 2):
        for j in (1, 2):
            p = pij(i, j)
            ge = gamma_embedding(co_of(p))
            assert poset_isomorphic(ge.gamma, p)
            assert ge.atom_preserving is True


def test_gamma_on_pentagon():
    ge = gamma_embedding(pentagon())
    assert ge.is_embedding and ge.bounds_preserved and ge.tree_like
    assert poset_isomorphic(ge.gamma, chain(3))


def test_gamma_atom_flag_is_none_off_the_si_case():
    ge = gamma_embedding(co_of(antichain(2)))
    assert ge.atom_preserving is None


def test_gamma_rejects_non_members():
    for l in (co_of(chain(4)), from_presentation(SIXGEN), diamond()):
        with pytest.raises(NotInSub2) as exc:
            gamma_embedding(l)
        assert revalidate(l, exc.value.witness)


def test_gamma_json_shape():
    d = gamma_embedding(co_of(pij(1, 1))).to_json()
    assert set(d["gamma"]) == {"elements", "covers"}
    assert d["is_embedding"] and d["bounds_preserved"]


def _identity_map(p):
    co = co_lattice(p)
    return from_colattice(co), list(co.elements)


def test_truncate_identity_map_on_diamond():
    p = pij(2, 2)
    l, f = _identity_map(p)
    gens = ["{i0}", "{i1}", "{p}", "{j0}", "{j1}"]
    tr = truncate_hom(l, gens, f, p)
    assert tr.hom_verified and tr.kernel_preserved
    assert tr.gens_generate and tr.within_bound
    assert set(tr.i_prime) <= {"i0", "i1"}
    assert set(tr.j_prime) <= {"j0", "j1"}
    assert tr.m == 5 and tr.bound == 31
    assert len(set(tr.mapping)) == l.n


def test_truncate_into_larger_host():
    src = pij(1, 1)
    host = pij(5, 5)
    l, f0 = _identity_map(src)
    to_host = {lab: host.mask_of([lab]) for lab in src.labels}
    f = []
    for m in f0:
        out = 0
        for lab in src.labels_of(m):
            out |= to_host[lab]
        f.append(out)
    tr = truncate_hom(l, ["{i0}", "{p}", "{j0}"], f, host)
    assert tr.hom_verified and tr.kernel_preserved and tr.within_bound
    assert tr.i_prime == ("i0",) and tr.j_prime == ("j0",)
    assert poset_isomorphic(tr.truncated_poset, src)
    assert len(set(tr.mapping)) == l.n


def test_truncate_records_non_generating_seeds():
    p = pij(2, 2)
    l, f = _identity_map(p)
    tr = truncate_hom(l, ["{i0}", "{j0}"], f, p)
    assert not tr.gens_generate


def test_truncate_argument_errors():
    p = pij(1, 1)
    l, f = _identity_map(p)
    with pytest.raises(TooFewGenerators):
        truncate_hom(l, ["{i0}"], f, p)
    with pytest.raises(ConvexicaError):
        truncate_hom(l, ["{i0}", "{j0}"], f, chain(4))
    broken = list(f)
    broken[l.index["{p}"]] = p.mask_of(["i0", "j0"])
    with pytest.raises(NotAHomomorphism):
        truncate_hom(l, ["{i0}", "{j0}"], broken, p)


def test_canonical_form_on_boolean_square():
    b = from_leq_pairs("0 a b 1".split(),
                       [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
    cf = sub2_canonical_form(b, ["a", "b"])
    assert cf.m == 2 and cf.bound == 3
    assert [fa.kind for fa in cf.factors] == ["singleton", "singleton"]
    assert cf.diagonal_injective and cf.all_within_bound
    assert cf.gens_generate


def test_canonical_form_on_diamond_lattice():
    l = co_of(pij(2, 2))
    gens = ["{i0}", "{i1}", "{p}", "{j0}", "{j1}"]
    cf = sub2_canonical_form(l, gens)
    kinds = sorted(fa.kind for fa in cf.factors)
    # one diamond factor plus a singleton per almost-full dependency kernel
    assert kinds == ["pij"] + ["singleton"] * 4
    assert cf.diagonal_injective and cf.all_within_bound
    big = next(fa for fa in cf.factors if fa.kind == "pij")
    assert big.truncation.kernel_preserved and big.truncation.within_bound
    d = cf.to_json()
    assert d["m"] == 5 and d["bound"] == 31 and len(d["factors"]) == 5


def test_canonical_form_diagonal_separates_mixed_posets():
    rng = np.random.default_rng(101)
    tried = 0
    for _ in range(40):
        p = random_poset(rng, int(rng.integers(2, 6)))
        if length(p) > 2:
            continue
        l = co_of(p)
        gens = ["{" + lab + "}" for lab in p.labels]
        cf = sub2_canonical_form(l, gens)
        assert cf.diagonal_injective and cf.all_within_bound
        assert cf.gens_generate
        tried += 1
    assert tried >= 10


def test_canonical_form_errors():
    with pytest.raises(TooFewGenerators):
        sub2_canonical_form(co_of(pij(1, 1)), ["{p}"])
    with pytest.raises(NotInSub2):
        sub2_canonical_form(from_presentation(SIXGEN), ["{a,ap}", "{b}"])
