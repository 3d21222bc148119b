import pytest

from convexica.corpus import (
    ENTRIES,
    CorpusEntry,
    CorpusResult,
    _FACT_RUNNERS,
    entry_by_name,
    run_corpus,
)


def test_every_entry_checks_out():
    results = run_corpus()
    assert len(results) == sum(len(e.expected) for e in ENTRIES)
    bad = [r for r in results if not r.ok]
    assert bad == []


def test_entry_names_are_unique():
    names = [e.name for e in ENTRIES]
    assert len(set(names)) == len(names)


def test_filter_is_substring_and_case_insensitive():
    chain_only = run_corpus("chain")
    assert chain_only and all("chain" in r.entry for r in chain_only)
    assert len(run_corpus("CHAIN")) == len(chain_only)
    assert run_corpus("no-such-entry") == []


def test_entry_lookup():
    e = entry_by_name("sixgen-sub3")
    assert e.kind == "presentation"
    with pytest.raises(KeyError):
        entry_by_name("made-up")


def test_selected_frozen_facts():
    facts = {(r.entry, r.fact): r.actual for r in run_corpus("sixgen")}
    assert facts[("sixgen-sub3", "ji_count")] == 6
    assert facts[("sixgen-sub3", "d_cycle")] is True
    assert facts[("sixgen-sub3", "l2_holds")] is False
    assert facts[("sixgen-sub3", "in_subn:3")] is True
    assert facts[("sixgen-sub3", "in_subn:2")] is False


def test_growth_entry_reports_sizes():
    facts = {r.fact: r.actual for r in run_corpus("growth-candidate-k2")}
    assert facts["sublattice_sizes"] == (12, 16)
    assert facts["gate_passes"] is True


def test_flipped_expectation_is_caught():
    base = entry_by_name("chain-3")
    flipped = CorpusEntry(base.name, base.kind, base.title, base.payload,
                          (("length", 99),))
    wanted = [fact for fact, _ in flipped.expected]
    facts = _FACT_RUNNERS[flipped.kind](flipped, wanted)
    res = CorpusResult(flipped.name, "length", 99, facts.get("length"))
    assert not res.ok
    d = res.to_json()
    assert d["expected"] == 99 and d["actual"] == 2 and d["ok"] is False


def test_result_json_shape():
    r = run_corpus("antichain")[0]
    d = r.to_json()
    assert set(d) == {"entry", "fact", "expected", "actual", "ok"}
    assert d["ok"] is True
