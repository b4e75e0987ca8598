"""Command-line entry point: reproducible runs with machine-readable output.

Exit codes: 0 = the run came out as the theory of the command predicts
(convergence, a defeated learner, agreeing verdicts), 1 = a property
violation, 2 = parse/usage error, 3 = representation violation.  All output
files are byte-stable functions of the run configuration.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import bridge as bridge_mod
from .adversaries import diagonalize, limit_adversary, text_adversary, weak_locking_search
from .learners import (
    Learner,
    learner_constant,
    learner_echo,
    learner_from_text,
    learner_min_embed,
    learner_one_shot,
    learner_separator,
    learner_split_on_negative,
    run_simulation,
)
from .presentations import (
    INFORMANT,
    REORDER_STRATEGIES,
    TEXT,
    Prefix,
    fair_informant,
    fair_text,
    read_trace,
    reordered_informant,
    write_trace,
)
from .separability import (
    Family,
    FamilyError,
    GENERATORS,
    fin_antichain,
    finitely_separable,
    generated_limit_verdict,
    limit_witness,
    separator_of,
)
from .structures import RepresentationError, iso_eq

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_PARSE = 2
EXIT_REPRESENTATION = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _dump_json(path: str, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _load_family(path: str) -> Family:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot parse family file: {exc}", EXIT_PARSE)
    try:
        return Family.from_json(data)
    except (RepresentationError, FamilyError) as exc:
        raise CliError(f"invalid family: {exc}", EXIT_REPRESENTATION)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"cannot parse family file: {exc}", EXIT_PARSE)


def _default_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("LIMITLEARN_SEED", "0"))


def _make_learner(name: str, family: Family, target: int) -> Learner:
    base_name = name
    wrap_text = False
    if name.startswith("txt-"):
        wrap_text = True
        base_name = name[4:]
    members = family.members
    try:
        if base_name == "constant":
            learner = learner_constant(members[target])
        elif base_name == "min-embed":
            learner = learner_min_embed(members, enforce=False)
        elif base_name == "separator":
            learner = learner_separator(members, enforce=False)
        elif base_name == "one-shot":
            learner = learner_one_shot(members, enforce=False)
        elif base_name == "split":
            learner = learner_split_on_negative()
        elif base_name == "echo":
            learner = learner_echo()
        else:
            raise CliError(f"unknown learner {name!r}", EXIT_PARSE)
    except IndexError:
        raise CliError(f"target index {target} outside the family", EXIT_PARSE)
    except FamilyError as exc:
        raise CliError(str(exc), EXIT_REPRESENTATION)
    return learner_from_text(learner) if wrap_text else learner


def _out_path(args, filename: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, filename)


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args) -> int:
    family = _load_family(args.family)
    report: dict = {"members": [m.to_json() for m in family.members]}
    try:
        sep = finitely_separable(family.members)
        report["finitely_separable"] = sep.separable
        report["counterexample"] = (
            None if sep.counterexample is None
            else {"limit": sep.counterexample[0].to_json(),
                  "witness": sep.counterexample[1].to_json()}
        )
        anti = fin_antichain(family.members) if len(family.members) > 1 else True
        report["fin_antichain"] = anti
        if sep.separable:
            report["separators"] = [
                {"member": m.to_json(), "separator": separator_of(m, family.members).to_json()}
                for m in family.members
            ]
        violation = anti and not sep.separable  # anti-chain families are always separable
    except FamilyError as exc:
        report["finitely_separable"] = None
        report["note"] = str(exc)
        try:
            report["fin_antichain"] = fin_antichain(family.members) if len(family.members) > 1 else True
        except FamilyError:
            report["fin_antichain"] = None
        violation = False
    if family.generator:
        spec = GENERATORS[family.generator]
        verdicts = []
        for member in family.members:
            verdict = generated_limit_verdict(member, family, args.bound)
            verdicts.append({"candidate": member.to_json(), "verdict": verdict.kind,
                             "bound": verdict.bound, "certified": verdict.certified})
        if spec.companion_limit is not None:
            verdict = generated_limit_verdict(spec.companion_limit, family, args.bound)
            verdicts.append({"candidate": spec.companion_limit.to_json(),
                             "verdict": verdict.kind, "bound": verdict.bound,
                             "certified": verdict.certified})
        report["generator_verdicts"] = verdicts
    if args.out:
        _dump_json(_out_path(args, "check.json"), report)
    else:
        json.dump(report, sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")
    return EXIT_VIOLATION if violation else EXIT_OK


def _run_one_simulation(args, seed: int):
    family = _load_family(args.family)
    learner = _make_learner(args.learner, family, args.target)
    target = family.members[args.target]
    if learner.mode == TEXT:
        stream = fair_text(target, seed)
    elif args.reorder:
        stream = reordered_informant(target, seed, args.reorder)
    else:
        stream = fair_informant(target, seed)
    items = []
    base_iter = iter(stream)

    def tee():
        while True:
            item = next(base_iter)
            items.append(item)
            yield item

    stream_tee = type(stream)(stream.kind, stream.character, tee())
    result = run_simulation(learner, stream_tee, args.horizon, target,
                            args.relation, args.window)
    summary = result.summary()
    summary["seed"] = seed
    summary["learner"] = args.learner
    summary["target_index"] = args.target
    return result, summary, Prefix(stream.kind, tuple(items))


def _simulate_cell(payload):
    args, seed = payload
    result, summary, prefix = _run_one_simulation(args, seed)
    suffix = f"-seed{seed}" if len(_seed_list(args)) > 1 else ""
    write_trace(_out_path(args, f"items{suffix}.txt"), prefix)
    with open(_out_path(args, f"trace{suffix}.txt"), "w") as fh:
        for line in result.trace.lines():
            fh.write(line + "\n")
    _dump_json(_out_path(args, f"summary{suffix}.json"), summary)
    return summary


def _seed_list(args) -> list[int]:
    if args.seeds:
        lo, _, hi = args.seeds.partition(":")
        return list(range(int(lo), int(hi)))
    return [_default_seed(args)]


def cmd_simulate(args) -> int:
    seeds = _seed_list(args)
    payloads = [(args, seed) for seed in seeds]
    if args.jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            summaries = list(pool.map(_simulate_cell, payloads))
    else:
        summaries = [_simulate_cell(p) for p in payloads]
    ok = all(s["converged"] for s in summaries)
    if len(summaries) > 1:
        _dump_json(_out_path(args, "summary-all.json"),
                   {"cells": summaries, "all_converged": ok})
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_adversary(args) -> int:
    family = _load_family(args.family)
    learner = _make_learner(args.learner, family, args.target)
    if args.kind == "text":
        report = text_adversary(learner, depth=args.depth, width=args.width,
                                horizon=args.horizon)
        _dump_json(_out_path(args, "adversary.json"), report.to_json())
        return EXIT_OK if report.verdict in ("defeated", "undecided") else EXIT_VIOLATION
    limit = family.members[args.target]
    if limit_witness(limit, family.members) is None:
        raise CliError(f"member {args.target} is not a limit of the family",
                       EXIT_REPRESENTATION)
    adv = limit_adversary(learner, limit, family.members)
    report = adv.run(args.horizon)
    write_trace(_out_path(args, "items.txt"), Prefix(INFORMANT, tuple(report.items)))
    payload = report.to_json()
    payload["min_mind_changes"] = args.min_mind_changes
    payload["defeated"] = report.defeated(args.min_mind_changes)
    _dump_json(_out_path(args, "adversary.json"), payload)
    return EXIT_OK if payload["defeated"] and report.consistent else EXIT_VIOLATION


def cmd_diagonalize(args) -> int:
    family = _load_family(args.family) if args.family else Family.of()
    learner = _make_learner(args.learner, family, args.target)
    report = diagonalize(learner, args.class_size, args.horizon)
    _dump_json(_out_path(args, "diagonalization.json"), report.to_json())
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_locking(args) -> int:
    family = _load_family(args.family)
    learner = _make_learner(args.learner, family, args.target)
    target = family.members[args.target]
    kind = TEXT if learner.mode == TEXT else INFORMANT
    start = read_trace(args.start, kind) if args.start else Prefix(kind, ())
    result = weak_locking_search(learner, target, start, args.depth, args.width)
    payload = {
        "kind": result.kind,
        "sigma_length": len(result.sigma),
        "tau_length": None if result.tau is None else len(result.tau),
        "depth": result.depth,
        "width": result.width,
        "probes": result.probes,
    }
    _dump_json(_out_path(args, "locking.json"), payload)
    return EXIT_OK


def cmd_bridge(args) -> int:
    family = _load_family(args.family)
    langs = [bridge_mod.size_sequence_of(m) for m in family.members]
    if args.action == "translate":
        payload = [
            {"member": m.to_json(),
             "sizes": [lang.eval(i).to_json() for i in range(16)]}
            for m, lang in zip(family.members, langs)
        ]
        _dump_json(_out_path(args, "translate.json"), payload)
        return EXIT_OK
    if args.action == "telltale":
        # tell-tales are sought for each member's canonical translation,
        # against the bounded permutation closure of the whole family
        closure = bridge_mod.language_closure(langs, args.positions)
        results = []
        all_found = True
        for member, lang in zip(family.members, langs):
            tell = bridge_mod.telltale_search(lang, closure, args.bound)
            results.append({"member": member.to_json(),
                            "telltale": None if tell is None else sorted(tell)})
            all_found = all_found and tell is not None
        try:
            separable = finitely_separable(family.members).separable
        except FamilyError:
            separable = None
        payload = {"bound": args.bound, "positions": args.positions,
                   "closure_size": len(closure), "all_found": all_found,
                   "finitely_separable": separable, "results": results}
        _dump_json(_out_path(args, "telltale.json"), payload)
        consistent = separable is None or separable == all_found
        return EXIT_OK if consistent else EXIT_VIOLATION
    if args.action == "roundtrip":
        target = family.members[args.target]
        composed = bridge_mod.language_to_struct_learner(family.members)
        reference = learner_separator(family.members, enforce=False)
        seed = _default_seed(args)
        res_composed = run_simulation(composed, fair_informant(target, seed),
                                      args.horizon, target, "iso", args.window)
        res_reference = run_simulation(reference, fair_informant(target, seed),
                                       args.horizon, target, "iso", args.window)
        agree = (
            res_composed.final is not None and res_reference.final is not None
            and iso_eq(res_composed.final, res_reference.final)
        )
        payload = {
            "composed": res_composed.summary(),
            "reference": res_reference.summary(),
            "agree": agree,
        }
        _dump_json(_out_path(args, "roundtrip.json"), payload)
        return EXIT_OK if agree and res_composed.converged else EXIT_VIOLATION
    raise CliError(f"unknown bridge action {args.action!r}", EXIT_PARSE)


def cmd_replay(args) -> int:
    family = _load_family(args.family)
    learner = _make_learner(args.learner, family, args.target)
    kind = TEXT if learner.mode == TEXT else INFORMANT
    prefix = read_trace(args.items, kind)
    target = family.members[args.target]
    horizon = min(args.horizon, len(prefix.items))
    result = run_simulation(learner, iter(prefix.items), horizon, target,
                            args.relation, min(args.window, horizon))
    summary = result.summary()
    try:
        with open(args.summary) as fh:
            recorded = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot parse recorded summary: {exc}", EXIT_PARSE)
    keys = ("converged", "stage", "final", "mind_changes", "mind_change_stages")
    mismatches = {k: (summary.get(k), recorded.get(k))
                  for k in keys if summary.get(k) != recorded.get(k)}
    if args.out:
        _dump_json(_out_path(args, "replay.json"),
                   {"match": not mismatches, "mismatches": mismatches})
    return EXIT_OK if not mismatches else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitlearn",
        description="learners, adversaries, and certificates for equivalence-structure identification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, family_required=True):
        p.add_argument("--family", required=family_required, help="family JSON file")
        p.add_argument("--learner", default="separator")
        p.add_argument("--target", type=int, default=0, help="member index")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--horizon", type=int, default=10000)
        p.add_argument("--window", type=int, default=200)
        p.add_argument("--depth", type=int, default=50)
        p.add_argument("--width", type=int, default=8)
        p.add_argument("--bound", type=int, default=64)
        p.add_argument("--out", default=".")
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("check", help="separability / anti-chain certificate")
    common(p)
    p.set_defaults(func=cmd_check)
    p.add_argument("--no-out", dest="out", action="store_const", const=None)

    p = sub.add_parser("simulate", help="run a learner on a fair stream")
    common(p)
    p.add_argument("--relation", choices=("iso", "biembed"), default="iso")
    p.add_argument("--reorder", choices=("",) + REORDER_STRATEGIES, default="")
    p.add_argument("--seeds", default="", help="seed range lo:hi for fan-out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("adversary", help="run the limit or text adversary")
    common(p)
    p.add_argument("--kind", choices=("limit", "text"), default="limit")
    p.add_argument("--min-mind-changes", type=int, default=5)
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("diagonalize", help="run the pairwise diagonalizer")
    common(p, family_required=False)
    p.add_argument("--class-size", type=int, default=2)
    p.set_defaults(func=cmd_diagonalize, horizon=600)

    p = sub.add_parser("locking", help="search for a weak locking sequence")
    common(p)
    p.add_argument("--start", default="", help="replay file with the start prefix")
    p.set_defaults(func=cmd_locking)

    p = sub.add_parser("bridge", help="language-learning translation tools")
    p.add_argument("action", choices=("translate", "telltale", "roundtrip"))
    common(p)
    p.add_argument("--positions", type=int, default=12)
    p.set_defaults(func=cmd_bridge)

    p = sub.add_parser("replay", help="re-run a recorded item file and compare")
    common(p)
    p.add_argument("--items", required=True)
    p.add_argument("--summary", required=True)
    p.add_argument("--relation", choices=("iso", "biembed"), default="iso")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> None:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = exc.code
    except RepresentationError as exc:
        print(f"representation error: {exc}", file=sys.stderr)
        code = EXIT_REPRESENTATION
    except FamilyError as exc:
        print(f"family error: {exc}", file=sys.stderr)
        code = EXIT_REPRESENTATION
    sys.exit(code)


if __name__ == "__main__":
    main()
