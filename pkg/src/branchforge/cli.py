"""The branchforge command line.

Every command prints a human summary (or the full JSON document with
`--format json`) and can write the JSON document to `--out`.  Exit codes:
0 all checks passed, 1 a verification failed, 2 bad input or configuration,
3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import json
import sys

from .embeddings import (
    GroupChainSpec,
    build_level_data,
    embed_finite_group,
    verify_altalt,
)
from .errors import (
    BranchforgeError,
    ConfigurationError,
    DomainError,
    PreconditionError,
    ResourceCapError,
    VerificationError,
)
from .perms import format_cycles
from .report import format_table, write_report
from .scenarios import (
    builtin_scenario,
    certify_finite_order,
    load_scenario,
    verify_wreath_identities,
)
from .shrinking import (
    PairCoverageError,
    ShrinkCertificate,
    greedy_shrinking_prefix,
    hypothesis_ratio,
    landau_table,
    verify_certificate,
    z_set,
)
from .treeauto import portrait_json, portrait_text
from .words import evaluate, render_word

PASS, FAIL, BADINPUT, CAPPED = 0, 1, 2, 3


def _load_chain(source: str) -> GroupChainSpec:
    if source.startswith("builtin:"):
        return builtin_scenario(source.split(":", 1)[1]).chain
    with open(source) as handle:
        return GroupChainSpec.from_json(json.load(handle))


def _emit(args, doc: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(text)
    if args.out:
        with open(args.out, "w") as handle:
            json.dump(doc, handle, sort_keys=True, indent=2)


def cmd_embed(args) -> int:
    chain = _load_chain(args.group)
    data = build_level_data(chain.quotient_at(args.quotient))
    doc = data.to_json(include_tables=not args.no_tables)
    doc["embedding"] = {label: format_cycles(p) for label, p in sorted(data.embedding.items())}
    text = (f"quotient order n={data.n}: embedded into the alternating group on "
            f"{data.alt_degree} points\n"
            f"|X|={data.x_size}  |Y|={len(data.y)}  |Y'|={len(data.y_prime)}  "
            f"max element order={data.max_order}\n"
            f"Y-size closed forms: {doc['y_size_closed_forms']}")
    _emit(args, doc, text)
    return PASS


def cmd_verify_altgen(args) -> int:
    chain = _load_chain(args.group)
    quotient = chain.quotient_at(args.quotient)
    from .embeddings import FiniteGroupTable
    table = FiniteGroupTable.from_permutations(quotient.images, degree=quotient.degree)
    images = embed_finite_group(table)
    ok = verify_altalt(images, table.order)
    doc = {"order": table.order, "alt_degree": 2 * table.order + 3, "generates": ok}
    _emit(args, doc, f"conjugates of Alt(5) generate Alt({doc['alt_degree']}): {ok}")
    return PASS if ok else FAIL


def cmd_level(args) -> int:
    scenario = load_scenario(args.scenario)
    data = scenario.level(args.level)
    doc = data.to_json(include_tables=not args.no_tables)
    forms = doc["y_size_closed_forms"]
    text = (f"level {args.level}: n={data.n}, |X|={data.x_size}, |Y|={len(data.y)}, "
            f"|Y'|={len(data.y_prime)}, max order={data.max_order}\n"
            f"Y-size closed forms: enumerated={forms['enumerated']} "
            f"half-order form={forms['half_order_form']} "
            f"third-order form={forms['third_order_form']} (matches {forms['matches']})")
    _emit(args, doc, text)
    return PASS


def cmd_portrait(args) -> int:
    scenario = load_scenario(args.scenario)
    word = scenario.parse(args.word, args.level)
    node = evaluate(word, scenario.calc)
    doc = portrait_json(node, args.depth)
    _emit(args, doc, portrait_text(node, args.depth))
    return PASS


def cmd_order(args) -> int:
    scenario = load_scenario(args.scenario)
    word = scenario.parse(args.word, args.level)
    cert = certify_finite_order(word, scenario, budget=args.budget,
                                verification_depth=args.depth)
    doc = cert.to_json()
    if cert.complete:
        claim = (f"order divides {cert.claimed_multiple}" if cert.claimed_multiple
                 else f"order divides {cert.m}*{cert.e}*lcm(orders of listed G-letters)")
        exact = f", exact order {cert.exact_order}" if cert.exact_order else ""
        text = (f"word {render_word(word)!r}: shrink depth {cert.shrink_depth}, "
                f"m={cert.m}, e={cert.e}; {claim}{exact}; verified={cert.verified}")
    else:
        text = (f"word {render_word(word)!r}: no shrink depth within budget {args.budget}; "
                f"{len(cert.survivors)} long section words remain")
    _emit(args, doc, text)
    return PASS if cert.complete and cert.verified else FAIL


def cmd_zset(args) -> int:
    scenario = load_scenario(args.scenario)
    word = scenario.parse(args.word, args.level)
    level_data = scenario.level(args.level)
    next_data = scenario.level(args.level + 1)
    zs = z_set(word, level_data, next_data, scenario.ctx, exhaustive=args.exhaustive)
    doc = {
        "word": zs.word_dsl,
        "level": args.level,
        "len_b": zs.len_b,
        "size": zs.size,
        "bound": zs.bound,
        "members": [list(pair) for pair in zs.members],
        "witnesses": {f"{s},{t}": {"letter": x, "length": list(length)}
                      for (s, t), (x, length) in sorted(zs.witnesses.items())},
    }
    _emit(args, doc, (f"bad pairs for {zs.word_dsl!r} at level {args.level}: "
                      f"{zs.size} of {len(level_data.y) * len(level_data.y_prime)} "
                      f"(bound {zs.bound})"))
    return PASS


def cmd_shrink_search(args) -> int:
    scenario = load_scenario(args.scenario)
    with open(args.words) as handle:
        lines = [line.strip() for line in handle]
    words = [scenario.parse(line, args.level)
             for line in lines if line and not line.startswith("#")]
    if args.replay:
        with open(args.replay) as handle:
            cert = ShrinkCertificate.from_json(json.load(handle))
        verify_certificate(cert, scenario.shape, scenario.ctx)
        _emit(args, cert.to_json(), f"certificate replay passed for {len(words)} words")
        return PASS
    cert = greedy_shrinking_prefix(words, scenario.shape, args.budget, scenario.ctx,
                                   scenario_id=scenario.provenance())
    doc = cert.to_json()
    depths = [record["shrink_depth"] for record in cert.words]
    text = (f"prefix alpha={list(cert.alpha)} beta={list(cert.beta)}; "
            f"complete={cert.complete}; shrink depths={depths}")
    _emit(args, doc, text)
    return PASS if cert.complete else FAIL


def cmd_wreath_check(args) -> int:
    scenario = load_scenario(args.scenario)
    report = verify_wreath_identities(scenario, level=args.level, depth=args.depth)
    doc = report.to_json()
    lines = [f"wreath-recursion identities at level {args.level}, depth {args.depth}:"]
    for check in report.checks:
        lines.append(f"  {'PASS' if check['passed'] else 'FAIL'}  {check['name']}")
    _emit(args, doc, "\n".join(lines))
    return PASS if report.all_passed else FAIL


def cmd_landau(args) -> int:
    rows = landau_table(args.max)
    doc = {"rows": rows}
    text_rows = [{"n": row["n"], "g(n)": row["g"],
                  "n!/2^(n-1)": f"{row['bound_num'] / row['bound_den']:.6g}",
                  "holds": row["holds"]} for row in rows]
    text = format_table(text_rows, ["n", "g(n)", "n!/2^(n-1)", "holds"])
    failures = [row["n"] for row in rows if not row["holds"]]
    if failures:
        text += f"\nestimate fails at n={failures} (it holds at n=1 and all n>=5)"
    _emit(args, doc, text)
    return PASS if not failures else FAIL


def cmd_ratio(args) -> int:
    scenario = load_scenario(args.scenario)
    info = hypothesis_ratio(scenario.level(args.level))
    doc = {"level": args.level, "n": info["n"], "y_size": info["y_size"],
           "y_prime_size": info["y_prime_size"], "max_order": info["max_order"],
           "ratio": str(info["ratio"]), "bound": str(info["bound"]),
           "holds": info["ratio"] >= info["bound"]}
    _emit(args, doc, (f"level {args.level}: ratio = {info['ratio']} >= "
                      f"bound = {info['bound']}"))
    return PASS


def cmd_report(args) -> int:
    scenario = load_scenario(args.scenario)
    summary = write_report(scenario, args.out, landau_max=args.landau_max)
    if args.format == "json":
        print(json.dumps(summary, sort_keys=True, indent=2))
    else:
        print("\n".join(f"wrote {path}" for path in sorted(summary["files"].values())))
    return PASS


def _add_common(parser: argparse.ArgumentParser, scenario: bool = True):
    if scenario:
        parser.add_argument("--scenario", default="builtin:trivial",
                            help="scenario JSON file or builtin:<trivial|c2|mixed>")
    parser.add_argument("--out", help="write the JSON document to this path")
    parser.add_argument("--format", choices=("json", "text"), default="text",
                        help="stdout format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branchforge",
        description="Finite-depth branch-group construction and verification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a finite quotient and build its level data")
    p.add_argument("--group", required=True, help="group chain JSON file or builtin:<name>")
    p.add_argument("--quotient", type=int, default=0)
    p.add_argument("--no-tables", action="store_true")
    _add_common(p, scenario=False)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("verify-altgen",
                       help="check that conjugates of Alt(5) generate the level group")
    p.add_argument("--group", required=True)
    p.add_argument("--quotient", type=int, default=0)
    _add_common(p, scenario=False)
    p.set_defaults(func=cmd_verify_altgen)

    p = sub.add_parser("level", help="export one level of a scenario")
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--no-tables", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_level)

    p = sub.add_parser("portrait", help="materialize a word's portrait")
    p.add_argument("--word", required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--level", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_portrait)

    p = sub.add_parser("order", help="certify a finite order for a word")
    p.add_argument("--word", required=True)
    p.add_argument("--budget", type=int, default=6)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--level", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("zset", help="enumerate the bad spine pairs of a word")
    p.add_argument("--word", required=True)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_zset)

    p = sub.add_parser("shrink-search", help="greedy shrinking-prefix search")
    p.add_argument("--words", required=True, help="file with one word per line")
    p.add_argument("--budget", type=int, default=4)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--replay", help="verify an existing certificate instead")
    _add_common(p)
    p.set_defaults(func=cmd_shrink_search)

    p = sub.add_parser("wreath-check", help="verify the wreath-recursion identities")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--level", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_wreath_check)

    p = sub.add_parser("landau", help="table of maximal permutation orders")
    p.add_argument("--max", type=int, default=12)
    _add_common(p, scenario=False)
    p.set_defaults(func=cmd_landau)

    p = sub.add_parser("ratio", help="per-level counting ratio against its bound")
    p.add_argument("--level", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("report", help="write CSV tables and figures for a scenario")
    p.add_argument("--landau-max", type=int, default=12)
    p.add_argument("--scenario", default="builtin:trivial")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PairCoverageError, VerificationError) as err:
        print(f"verification failed: {err}", file=sys.stderr)
        return FAIL
    except ResourceCapError as err:
        print(f"resource cap: {err}", file=sys.stderr)
        return CAPPED
    except (DomainError, PreconditionError, ConfigurationError) as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return BADINPUT
    except FileNotFoundError as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return BADINPUT
    except BranchforgeError as err:
        print(f"error: {err}", file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
