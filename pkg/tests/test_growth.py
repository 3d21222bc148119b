import pytest

from convexica.errors import BadArity, CapExceeded, InvalidReconstruction
from convexica.formats import format_reconstruction, parse_reconstruction
from convexica.growth import (
    build_truncated_figure2,
    closure_in_co,
    restrict_truncation,
    run_growth_experiment,
    run_truncation,
    truncation_from_poset,
    validate_truncation,
)
from convexica.poset import chain, hull_mask, is_convex, length


def test_candidate_shapes():
    for k in range(1, 5):
        t = build_truncated_figure2(k)
        assert t.k == k and t.poset.n == 4 * (k + 1)
        assert length(t.poset) == 3
        assert t.source == "candidate"
        for mask in t.named_masks().values():
            assert is_convex(t.poset, mask)
    with pytest.raises(BadArity):
        build_truncated_figure2(-1)


def test_candidate_named_sets():
    t = build_truncated_figure2(2)
    lab = {name: set(t.poset.labels_of(m))
           for name, m in t.named_masks().items()}
    assert lab["A"] == {"a0", "a1", "a2"}
    assert lab["B"] == {"d0", "b0", "b1", "b2"}
    assert lab["C"] == {"c0", "d0", "c1", "d1", "c2", "d2"}


def test_validate_truncation_gate():
    t = build_truncated_figure2(2)
    assert validate_truncation(t) == []
    # d0 < c0 < a0, so {d0, a0} skips the middle point
    hole = type(t)(t.k, t.poset, t.poset.mask_of(["d0", "a0"]),
                   t.b_mask, t.c_mask)
    problems = validate_truncation(hole)
    assert problems and "order-convex" in problems[0]


def test_closure_in_co():
    p = chain(2)
    got = closure_in_co(p, (p.mask_of(["c0"]), p.mask_of(["c1"])))
    assert got == {0, 1, 2, 3}
    with pytest.raises(CapExceeded) as exc:
        closure_in_co(build_truncated_figure2(3).poset,
                      build_truncated_figure2(3).named_masks().values(),
                      cap=5)
    assert exc.value.partial_size > 5


def test_run_truncation_row():
    row = run_truncation(build_truncated_figure2(2))
    assert row.valid and row.base_reproduced
    assert row.sublattice_size == 16
    assert [(n, c, d) for n, c, d in row.checks] == \
        [(0, True, True), (1, True, True), (2, True, True)]
    d = row.to_json()
    assert d["k"] == 2 and d["checks"][0] == {"n": 0, "c": True, "d": True}


def test_run_truncation_rejects_gate_failures():
    t = build_truncated_figure2(1)
    broken = type(t)(t.k, t.poset, t.a_mask, t.b_mask,
                     t.poset.mask_of(["d0", "a0"]))
    with pytest.raises(InvalidReconstruction):
        run_truncation(broken)


def test_experiment_table_growth():
    report = run_growth_experiment(4)
    assert report.source == "candidate"
    assert [row.sublattice_size for row in report.rows] == [12, 16, 20, 24]
    assert report.sizes_strictly_increasing and report.valid
    assert report.warnings == ()
    d = report.to_json()
    assert d["valid"] and len(d["rows"]) == 4
    with pytest.raises(BadArity):
        run_growth_experiment(0)


def test_restriction_keeps_the_induced_order():
    big = build_truncated_figure2(3)
    cut = restrict_truncation(big, 1)
    ref = build_truncated_figure2(1)
    assert sorted(cut.poset.labels) == sorted(ref.poset.labels)
    # induced relations survive even where the direct build has none
    bidx = {lab: i for i, lab in enumerate(big.poset.labels)}
    cidx = {lab: i for i, lab in enumerate(cut.poset.labels)}
    for x in cut.poset.labels:
        for y in cut.poset.labels:
            assert bool(cut.poset.leq[cidx[x], cidx[y]]) == \
                bool(big.poset.leq[bidx[x], bidx[y]])
    for name in "ABC":
        assert set(cut.poset.labels_of(cut.named_masks()[name])) == \
            set(ref.poset.labels_of(ref.named_masks()[name]))
    assert run_truncation(cut).valid
    with pytest.raises(BadArity):
        restrict_truncation(big, 4)


def test_reconstruction_round_trip_through_text():
    t = build_truncated_figure2(3)
    text = format_reconstruction(t.poset, t.named_masks())
    p, named = parse_reconstruction(text)
    report = run_growth_experiment(3, reconstruction=(p, named))
    assert report.valid and len(report.rows) == 3
    assert report.source == "file"


def test_reconstruction_clipping_warning():
    t = build_truncated_figure2(2)
    report = run_growth_experiment(5,
                                   reconstruction=(t.poset, t.named_masks()))
    assert len(report.rows) == 2
    assert any("clipping" in w for w in report.warnings)


def test_reconstruction_input_errors():
    t0 = build_truncated_figure2(0)
    with pytest.raises(InvalidReconstruction):
        run_growth_experiment(2, reconstruction=(t0.poset, t0.named_masks()))
    t = build_truncated_figure2(1)
    incomplete = dict(t.named_masks())
    del incomplete["C"]
    with pytest.raises(InvalidReconstruction):
        truncation_from_poset(t.poset, incomplete)
    with pytest.raises(InvalidReconstruction):
        truncation_from_poset(chain(3), t.named_masks())


def test_nonconvex_reconstruction_reports_the_set():
    t = build_truncated_figure2(1)
    named = dict(t.named_masks())
    named["A"] = t.poset.mask_of(["d0", "a0"])
    with pytest.raises(InvalidReconstruction) as exc:
        run_growth_experiment(1, reconstruction=(t.poset, named))
    assert "A is not order-convex" in str(exc.value)


def test_entry_checks_fail_on_rewired_poset():
    """Dropping the cross links stops c1/d1 from entering at step 3."""
    t = build_truncated_figure2(1)
    keep = [(x, y) for x, y in t.poset.covers
            if (t.poset.labels[x], t.poset.labels[y]) != ("d1", "c0")]
    from convexica.poset import poset_from_covers
    q = poset_from_covers(list(t.poset.labels),
                          [(t.poset.labels[x], t.poset.labels[y])
                           for x, y in keep])
    named = {n: q.mask_of(t.poset.labels_of(m))
             for n, m in t.named_masks().items()}
    rewired = truncation_from_poset(q, named)
    problems = validate_truncation(rewired)
    if problems:
        with pytest.raises(InvalidReconstruction):
            run_truncation(rewired)
    else:
        row = run_truncation(rewired)
        assert not row.valid
