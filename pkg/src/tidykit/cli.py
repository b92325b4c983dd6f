"""Command-line interface: ``tidykit analyze|classify|cyc|corpus|validate``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import catalog, classifier as cl, core, harness, structure
from .errors import (
    BadParameter,
    NotAGroup,
    TidyKitError,
    UnknownFamily,
    UnknownSuite,
)
from .tidy import Mode, cyc_set, is_tidy_bruteforce

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse from calling sys.exit
        raise _UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="FILE", help="group file (cayley or perm format)")
    src.add_argument("--family", metavar="EXPR", action="append", help="family expression, e.g. cyclic:12 or s4")
    p.add_argument("--max-order", type=int, metavar="K", help="order ceiling (overrides TIDYKIT_MAX_ORDER)")
    p.add_argument("--threads", type=int, default=1, metavar="N")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--all-witnesses", action="store_true", help="report every failing element")
    p.add_argument("--seed", type=int, default=0, help="reserved; nothing is randomised yet")
    p.add_argument("--suites", default="all", metavar="LIST", help="comma-separated suite ids or 'all'")
    p.add_argument("--out", metavar="PATH", help="write the JSON-lines report here")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="tidykit", description="Decide tidiness of finite groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("analyze", parents=[common], help="structure and both tidiness verdicts for one group")
    sub.add_parser("classify", parents=[common], help="structural classifier output only")
    cyc = sub.add_parser("cyc", parents=[common], help="print Cyc(x) for an element index")
    cyc.add_argument("--element", type=int, required=True, metavar="X")
    corpus = sub.add_parser("corpus", parents=[common], help="run verification suites over a corpus")
    corpus.add_argument("--corpus-spec", metavar="FILE", help="corpus JSON (default: the pinned corpus)")
    corpus.add_argument("--no-timing", action="store_true", help="write ms=0 so reports are byte-identical")
    corpus.add_argument("--list-suites", action="store_true")
    sub.add_parser("validate", parents=[common], help="check the group axioms of a file")
    return parser


def _single_group(args) -> core.Group:
    if args.input:
        return core.load_group(args.input)
    if args.family:
        if len(args.family) > 1:
            raise _UsageError("this command takes a single --family")
        return catalog.build_family(args.family[0])
    raise _UsageError("one of --input or --family is required")


def _emit(args, payload: dict, table_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(table_lines))


def _classification(G: core.Group) -> dict:
    if not structure.is_solvable(G):
        return {"tidy_structural": None, "explanation": "not solvable; structural decider does not apply"}
    v = cl.is_tidy_structural(G)
    out = {"tidy_structural": v.tidy, "explanation": v.explanation}
    c = v.classification
    if isinstance(c, cl.PqClassification):
        out["case"] = c.case.value
        out["case_details"] = c.details
        if c.failed:
            out["failed"] = c.failed
    elif isinstance(c, cl.PGroupShape):
        out["shapes"] = sorted(s.value for s in c.shapes)
    if v.failing_pair:
        out["failing_pair"] = list(v.failing_pair)
    return out


def _cmd_analyze(args) -> int:
    G = _single_group(args)
    solvable = structure.is_solvable(G)
    report = is_tidy_bruteforce(G, Mode.PRIME_POWER_ONLY, all_witnesses=args.all_witnesses)
    payload = {
        "schema": harness.SCHEMA,
        "label": G.label,
        "order": G.order,
        "primes": G.primes(),
        "solvable": solvable,
        "sylow_shapes": {
            str(p): sorted(s.value for s in cl.sylow_shape(G, p).shapes) for p in G.primes()
        },
        "p_cores": {str(p): len(structure.p_core(G, p)) for p in G.primes()},
        "fitting_order": len(structure.fitting_subgroup(G)),
        "hypercenter_order": len(structure.hypercenter(G)),
        "fitting_height": structure.fitting_height(G) if solvable else None,
        "tidy_oracle": report.tidy,
        "witnesses": [w.to_json() for w in report.witnesses],
        **_classification(G),
    }
    lines = [f"{k}: {v}" for k, v in payload.items() if k not in ("schema", "witnesses")]
    for w in report.witnesses:
        g, h = w.pair
        lines.append(f"witness: x={w.element}, |Cyc(x)|={len(w.cyc)}, {g}*{h} = {int(G.mul[g, h])} not in Cyc(x)")
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_classify(args) -> int:
    G = _single_group(args)
    payload = {"label": G.label, "order": G.order, **_classification(G)}
    _emit(args, payload, [f"{k}: {v}" for k, v in payload.items()])
    return EXIT_OK


def _cmd_cyc(args) -> int:
    G = _single_group(args)
    S = cyc_set(G, args.element)
    bad = core.closure_violation(G, S)
    payload = {
        "label": G.label,
        "element": args.element,
        "cyc": S.indices().tolist(),
        "is_subgroup": bad is None,
        **({"violating_pair": list(bad)} if bad else {}),
    }
    lines = [f"Cyc({args.element}) = {S.indices().tolist()}", f"size: {len(S)}", f"subgroup: {bad is None}"]
    if bad:
        lines.append(f"violating pair: {bad[0]}*{bad[1]} = {int(G.mul[bad])}")
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_validate(args) -> int:
    if not args.input:
        raise _UsageError("validate needs --input FILE")
    try:
        G = core.load_group(args.input)
    except NotAGroup as exc:
        payload = {"valid": False, "error": str(exc), "indices": list(exc.triple) if exc.triple else None}
        _emit(args, payload, [f"not a group: {exc}"])
        return EXIT_FAIL
    _emit(args, {"valid": True, "order": G.order}, [f"ok: group of order {G.order}"])
    return EXIT_OK


def _corpus_spec(args) -> catalog.CorpusSpec:
    if args.family or args.input:
        spec = catalog.CorpusSpec(families=list(args.family or []), ingest=[args.input] if args.input else [])
    elif args.corpus_spec:
        spec = catalog.CorpusSpec.load(args.corpus_spec)
    else:
        spec = catalog.default_corpus_spec()
    if args.max_order is not None:
        spec.max_order = args.max_order
    elif args.family or args.input:
        spec.max_order = core.max_order()
    return spec


def _cmd_corpus(args) -> int:
    if args.list_suites:
        for s in harness.SUITES.values():
            print(f"{s.id:<22} {s.description}")
        return EXIT_OK
    suites = harness.resolve_suites(args.suites)
    spec = _corpus_spec(args)
    timing = not args.no_timing
    if spec.dedup:
        pairs = catalog.build_corpus_entries(spec)
        entries = [e for e, _ in pairs]
    else:
        entries = catalog.corpus_entries(spec)
    reports = harness.run_entries(
        entries, suites, threads=max(1, args.threads), all_witnesses=args.all_witnesses, timing=timing
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            harness.write_report(reports, fh, timing=timing)
    if args.format == "json" and not args.out:
        harness.write_report(reports, sys.stdout, timing=timing)
    else:
        print(harness.format_table(reports))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


COMMANDS = {
    "analyze": _cmd_analyze,
    "classify": _cmd_classify,
    "cyc": _cmd_cyc,
    "corpus": _cmd_corpus,
    "validate": _cmd_validate,
}


def cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    saved = os.environ.get("TIDYKIT_MAX_ORDER")
    try:
        args = parser.parse_args(argv)
        if args.max_order is not None:
            os.environ["TIDYKIT_MAX_ORDER"] = str(args.max_order)  # inherited by worker processes
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"tidykit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnknownFamily, UnknownSuite, BadParameter) as exc:
        print(f"tidykit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotAGroup as exc:
        print(f"tidykit: not a group: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (TidyKitError, OSError) as exc:
        print(f"tidykit: {exc}", file=sys.stderr)
        return EXIT_FAIL
    finally:
        if saved is None:
            os.environ.pop("TIDYKIT_MAX_ORDER", None)
        else:
            os.environ["TIDYKIT_MAX_ORDER"] = saved


def main() -> None:
    sys.exit(cli())
