"""Command-line front end.

One command per engine capability, stable exit codes for scripting:
0 = property holds / membership confirmed, 1 = fails and a witness is
printed, 2 = usage or input error.  Reports are plain text by default
and structured with --json.  Every negative verdict can be fed back
through --replay to re-derive the same contradiction.
"""

import argparse
import json
import sys

from . import corpus as corpus_mod
from .colattice import co_lattice, is_completely_si
from .errors import (
    BudgetExceeded,
    ConvexicaError,
    InvalidReconstruction,
    NotInSub2,
    ParseError,
    TooFewGenerators,
)
from .formats import (
    format_poset,
    format_reconstruction,
    parse_identity,
    parse_input,
    parse_poset,
    parse_reconstruction,
)
from .growth import build_truncated_figure2, run_growth_experiment
from .lattice import from_colattice, from_presentation
from .poset import is_tree_like, length
from .terms import (
    check_identity,
    check_ji_interpretation,
    find_bi_stirlitz,
    find_stirlitz_tracks,
    identity_by_name,
)
from .variety import (
    _d_chain,
    decide_subn,
    gamma_embedding,
    reevaluate_witness,
    revalidate,
    sub2_canonical_form,
)

OK, FAIL, ERROR = 0, 1, 2


def _read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(args, payload, text_lines):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _target_lattice(path):
    """Lattice named by an input file; posets are checked through Co(P)."""
    kind, obj = parse_input(_read(path))
    if kind == "poset":
        return from_colattice(co_lattice(obj)), f"Co(P) for the {obj.n}-element poset"
    if kind == "presentation":
        return from_presentation(obj), "presented lattice"
    return obj, "lattice"


def _yn(b):
    return "yes" if b else "no"


# ---------------------------------------------------------------- poset-info

def cmd_poset_info(args):
    p = parse_poset(_read(args.file))
    rep = is_completely_si(p)
    covers = [[p.labels[a], p.labels[b]] for a, b in p.covers]
    payload = {
        "elements": p.n,
        "labels": list(p.labels),
        "covers": covers,
        "length": length(p),
        "tree_like": is_tree_like(p),
        "csi": rep.csi,
        "least_d_closed": sorted(rep.least.labels) if rep.least else None,
    }
    lines = [
        f"elements: {p.n}",
        "covers: " + (" ".join(f"{a}<{b}" for a, b in covers) or "(none)"),
        f"length: {payload['length']}",
        f"tree-like: {_yn(payload['tree_like'])}",
    ]
    if rep.csi:
        members = ", ".join(payload["least_d_closed"])
        lines.append(f"csi: yes (least D-closed subset: {{{members}}})")
    else:
        lines.append("csi: no (no least nonempty D-closed subset)")
        if rep.incomparable_pair is not None:
            u, v = rep.incomparable_pair
            lines.append(f"  incomparable D-closed sets: "
                         f"{{{', '.join(sorted(u.labels))}}} and "
                         f"{{{', '.join(sorted(v.labels))}}}")
    _emit(args, payload, lines)
    return OK


# --------------------------------------------------------------------- check

def _structural_preconditions(l, budget):
    for name in ("S", "U", "B", "D2D"):
        v = check_identity(l, identity_by_name(name), budget=budget, prune=True)
        if not v.holds:
            return name, v
    return None, None


def _verdict_payload(name, target, v):
    payload = {"identity": name, "target": target, **v.to_json()}
    if not v.holds:
        payload["witness"] = {"kind": "identity", "identity": name,
                              "assignment": v.assignment,
                              "lhs": v.lhs_value, "rhs": v.rhs_value}
    return payload


def _report_verdict(args, name, target, v):
    payload = _verdict_payload(name, target, v)
    if v.holds:
        _emit(args, payload, [f"{name} holds on {target} "
                              f"(checked {v.checked} of {v.total} assignments)"])
        return OK
    lines = [f"{name} fails on {target}", f"  assignment: {v.assignment}",
             f"  lhs = {v.lhs_value}", f"  rhs = {v.rhs_value}"]
    _emit(args, payload, lines)
    return FAIL


def _check_structural(args, l, target, ident):
    name = ident.name
    if name in ("S", "U", "B"):
        v = check_ji_interpretation(l, name + "j")
        payload = {"identity": name, "target": target, "form": name + "j",
                   **v.to_json()}
        if not v.holds:
            payload["witness"] = {"kind": name + "j",
                                  "assignment": v.assignment}
        if v.holds:
            _emit(args, payload, [f"{name} holds on {target} "
                                  f"(join-irreducible form {name}j)"])
            return OK
        _emit(args, payload, [f"{name} fails on {target} "
                              f"(join-irreducible form {name}j)",
                              f"  witness: {v.assignment}"])
        return FAIL

    if name == "L2" or name.startswith("H:") or name.startswith("Hmn:"):
        bad, v = _structural_preconditions(l, args.budget)
        if bad is not None:
            print(f"error: structural criterion for {name} needs S, U, B and "
                  f"the dual 2-distributive law; {bad} fails here "
                  f"(witness {v.assignment}); rerun with --method naive",
                  file=sys.stderr)
            return ERROR
        if name == "L2":
            chain = _d_chain(l)
            witness = None if chain is None else {
                "kind": "d_chain", "chain": [l.labels[i] for i in chain]}
        elif name.startswith("H:"):
            n = int(name.split(":")[1])
            tracks = find_stirlitz_tracks(l, n)
            witness = None if not tracks else {
                "kind": "stirlitz_track", "n": n, **tracks[0].labels(l)}
        else:
            m, n = (int(t) for t in name.split(":")[1].split(","))
            bis = find_bi_stirlitz(l, m, n)
            witness = None if not bis else {
                "kind": "bi_stirlitz", "m": m, "n": n, **bis[0].labels(l)}
        payload = {"identity": name, "target": target, "method": "structural",
                   "holds": witness is None, "witness": witness}
        if witness is None:
            _emit(args, payload,
                  [f"{name} holds on {target} (structural criterion)"])
            return OK
        _emit(args, payload, [f"{name} fails on {target}",
                              f"  witness: {json.dumps(witness)}"])
        return FAIL

    print(f"error: no structural decision procedure for {name}; "
          f"use --method naive", file=sys.stderr)
    return ERROR


def cmd_check(args):
    l, target = _target_lattice(args.file)
    custom = parse_identity(_read(args.identity_file)) \
        if args.identity_file else None

    if args.replay:
        return _run_replay(args, l, custom)

    if custom is not None:
        ident = custom
    elif args.identity:
        ident = identity_by_name(args.identity)
    else:
        print("error: check needs --identity or --identity-file",
              file=sys.stderr)
        return ERROR

    if args.method == "structural":
        if custom is not None:
            print("error: structural checking supports named identities only; "
                  "use --method naive for identity files", file=sys.stderr)
            return ERROR
        return _check_structural(args, l, target, ident)

    v = check_identity(l, ident, budget=args.budget, prune=custom is None)
    return _report_verdict(args, ident.name, target, v)


# -------------------------------------------------------------------- replay

def _run_replay(args, l, custom_ident=None):
    with open(args.replay, "r", encoding="utf-8") as fh:
        try:
            wobj = json.load(fh)
        except json.JSONDecodeError as e:
            print(f"error: replay file is not JSON: {e}", file=sys.stderr)
            return ERROR
    witness = None
    if isinstance(wobj, dict):
        witness = wobj["witness"] if isinstance(wobj.get("witness"), dict) \
            else wobj
    if not isinstance(witness, dict) or "kind" not in witness:
        print("error: replay file carries no witness object", file=sys.stderr)
        return ERROR
    if witness["kind"] in ("identity", "Sj", "Uj", "Bj") \
            and not isinstance(witness.get("assignment"), dict):
        print("error: witness has no assignment (did the property hold?)",
              file=sys.stderr)
        return ERROR
    try:
        if (custom_ident is not None and witness["kind"] == "identity"
                and witness.get("identity") == custom_ident.name):
            lv, rv = reevaluate_witness(l, custom_ident, witness["assignment"])
            ok = lv == witness["lhs"] and rv == witness["rhs"] and lv != rv
        else:
            ok = revalidate(l, witness)
    except (KeyError, TypeError) as e:
        print(f"error: malformed witness: {e}", file=sys.stderr)
        return ERROR
    payload = {"witness": witness, "reproduces": ok}
    if ok:
        _emit(args, payload, ["witness reproduces"])
        return OK
    _emit(args, payload, ["witness does NOT reproduce"])
    return FAIL


# ---------------------------------------------------------------------- subn

def cmd_subn(args):
    l, target = _target_lattice(args.file)
    if args.replay:
        return _run_replay(args, l)
    rep = decide_subn(l, args.n, method=args.method, budget=args.budget)
    payload = rep.to_json()
    payload["target"] = target
    name = rep.variety_name()
    if rep.member:
        passed = ", ".join(rep.passed)
        _emit(args, payload,
              [f"{target}: member of {name} (method {rep.method}; "
               f"checks passed: {passed})"])
        return OK
    _emit(args, payload, [f"{target}: NOT a member of {name}",
                          f"  witness: {json.dumps(rep.witness)}"])
    return FAIL


# ---------------------------------------------------------------- embed-sub2

def cmd_embed_sub2(args):
    l, target = _target_lattice(args.file)
    try:
        emb = gamma_embedding(l)
    except NotInSub2 as e:
        print(f"{target}: not in the length-two variety; {e}")
        return FAIL
    payload = emb.to_json()
    lines = ["gamma poset:"]
    lines += format_poset(emb.gamma).rstrip("\n").split("\n")
    lines += [
        f"is_embedding: {_yn(emb.is_embedding)}",
        f"bounds_preserved: {_yn(emb.bounds_preserved)}",
        f"length_le_2: {_yn(emb.length_le_2)}",
        f"tree_like: {_yn(emb.tree_like)}",
    ]
    if emb.atom_preserving is not None:
        lines.append(f"atom_preserving: {_yn(emb.atom_preserving)}")
    _emit(args, payload, lines)
    ok = emb.is_embedding and emb.bounds_preserved and emb.length_le_2 \
        and emb.tree_like
    return OK if ok else FAIL


# ----------------------------------------------------------------- canonical

def cmd_canonical(args):
    l, target = _target_lattice(args.file)
    gens = [g.strip() for g in args.gens.split(";") if g.strip()]
    try:
        cf = sub2_canonical_form(l, gens)
    except NotInSub2 as e:
        print(f"{target}: not in the length-two variety; {e}")
        return FAIL
    except TooFewGenerators as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR
    payload = cf.to_json()
    lines = [f"{target}: canonical form over {cf.m} generators "
             f"(factor bound {cf.bound})"]
    for i, fa in enumerate(cf.factors):
        lines.append(f"  factor {i}: {fa.kind}, {fa.poset.n} point(s) "
                     f"[{' '.join(fa.poset.labels)}]")
    lines += [
        f"diagonal_injective: {_yn(cf.diagonal_injective)}",
        f"all_within_bound: {_yn(cf.all_within_bound)}",
        f"gens_generate: {_yn(cf.gens_generate)}",
    ]
    _emit(args, payload, lines)
    ok = cf.diagonal_injective and cf.all_within_bound and cf.gens_generate
    return OK if ok else FAIL


# ---------------------------------------------------------------- corpus-run

def cmd_corpus_run(args):
    results = corpus_mod.run_corpus(args.filter)
    if not results:
        print(f"warning: no corpus entries match filter {args.filter!r}; "
              f"nothing to check", file=sys.stderr)
        if args.json:
            print("[]")
        return OK
    payload = [r.to_json() for r in results]
    lines = []
    bad = 0
    entries = []
    for r in results:
        if r.entry not in entries:
            entries.append(r.entry)
        if r.ok:
            lines.append(f"[ ok ] {r.entry}: {r.fact} = {r.expected!r}")
        else:
            bad += 1
            lines.append(f"[FAIL] {r.entry}: {r.fact} expected {r.expected!r}, "
                         f"engine says {r.actual!r}")
    lines.append(f"{len(results)} facts over {len(entries)} entries, "
                 f"{bad} mismatch(es)")
    _emit(args, payload, lines)
    return FAIL if bad else OK


# --------------------------------------------------------- experiment-nonlf3

def cmd_experiment(args):
    if args.emit_candidate:
        t = build_truncated_figure2(args.k_max)
        sys.stdout.write(format_reconstruction(t.poset, t.named_masks()))
        return OK
    reconstruction = None
    if args.reconstruction:
        reconstruction = parse_reconstruction(_read(args.reconstruction))
    report = run_growth_experiment(args.k_max, reconstruction=reconstruction)
    payload = report.to_json()
    lines = []
    if report.source == "candidate":
        lines.append("reconstruction: CANDIDATE (shipped guess, validated at "
                     "runtime, not taken from any published figure)")
    else:
        lines.append(f"reconstruction: {args.reconstruction}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    lines.append("   k  poset  sublattice  base  checks")
    for row in report.rows:
        checks = " ".join(f"n={n}:{'ok' if c and d else 'FAIL'}"
                          for n, c, d in row.checks) or "(none)"
        lines.append(f"  {row.k:>2}  {row.poset_size:>5}  "
                     f"{row.sublattice_size:>10}  "
                     f"{'ok' if row.base_reproduced else 'FAIL':<4}  {checks}")
    lines.append(f"sizes strictly increasing: "
                 f"{_yn(report.sizes_strictly_increasing)}")
    lines.append("reconstruction valid: "
                 + ("yes" if report.valid else "INVALID (a growth check failed)"))
    _emit(args, payload, lines)
    return OK if report.valid else FAIL


# ---------------------------------------------------------------- the parser

def _add_common(sp, method=False, budget=False, replay=False):
    sp.add_argument("--json", action="store_true",
                    help="structured output instead of plain text")
    if method:
        sp.add_argument("--method", choices=("naive", "structural"),
                        default="naive" if sp.prog.endswith("check")
                        else "structural",
                        help="exhaustive identity scan or the "
                             "join-irreducible criteria")
    if budget:
        sp.add_argument("--budget", type=int, default=None, metavar="N",
                        help="assignment-scan cap (default 2^26; "
                             "CONVEXICA_BUDGET overrides)")
    if replay:
        sp.add_argument("--replay", metavar="FILE",
                        help="revalidate a serialized witness instead of "
                             "searching")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="convexica",
        description="Order-convex-set lattices: identities, variety "
                    "membership, embeddings, and the growth experiment.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("poset-info", help="summarize a poset file")
    sp.add_argument("file")
    _add_common(sp)
    sp.set_defaults(func=cmd_poset_info)

    sp = sub.add_parser("check", help="check one identity on a file "
                                      "(posets are checked through Co(P))")
    sp.add_argument("file")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--identity", metavar="NAME",
                   help="S, U, B, L2, D2D, DIST, H:n, or Hmn:m,n")
    g.add_argument("--identity-file", metavar="FILE",
                   help="custom identity in the identity file format")
    _add_common(sp, method=True, budget=True, replay=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("subn", help="decide membership in the length-n "
                                     "variety")
    sp.add_argument("file")
    sp.add_argument("n", type=int)
    _add_common(sp, method=True, budget=True, replay=True)
    sp.set_defaults(func=cmd_subn)

    sp = sub.add_parser("embed-sub2", help="embed a length-two member into "
                                           "the convex sets of a tree-like "
                                           "poset")
    sp.add_argument("file")
    _add_common(sp)
    sp.set_defaults(func=cmd_embed_sub2)

    sp = sub.add_parser("canonical", help="canonical subdirect form of a "
                                          "generated length-two member")
    sp.add_argument("file")
    sp.add_argument("--gens", required=True, metavar="A;B;...",
                    help="generator labels separated by ';'")
    _add_common(sp)
    sp.set_defaults(func=cmd_canonical)

    sp = sub.add_parser("corpus-run", help="re-derive the built-in corpus "
                                           "facts")
    sp.add_argument("--filter", default=None, metavar="SUBSTR",
                    help="only entries whose name contains SUBSTR")
    _add_common(sp)
    sp.set_defaults(func=cmd_corpus_run)

    sp = sub.add_parser("experiment-nonlf3",
                        help="growth of the three-set sublattice family")
    sp.add_argument("--k-max", type=int, default=4)
    sp.add_argument("--reconstruction", metavar="FILE",
                    help="poset file with convex: A/B/C lines; default is "
                         "the shipped candidate")
    sp.add_argument("--emit-candidate", action="store_true",
                    help="print the candidate reconstruction at depth k-max "
                         "and exit")
    _add_common(sp)
    sp.set_defaults(func=cmd_experiment)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        print("hint: retry with --method structural, or raise --budget",
              file=sys.stderr)
        return ERROR
    except InvalidReconstruction as e:
        print(f"invalid reconstruction: {e}", file=sys.stderr)
        return ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR
    except ConvexicaError as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
