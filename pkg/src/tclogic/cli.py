"""Command-line front end: consistency checks, ranking, entailment, concept
combination, revision, and probabilistic queries over ``.tcl`` files.

Exit codes: 0 success, 1 negative/empty logical result, 2 usage error,
3 parse or validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .concepts import And, Concept
from .kb import ConceptAssertion, DegreeError, KnowledgeBase, Probability
from .rational import INFINITE, RankEngine
from .revision import (
    DEFAULT_PRIOR, NotSelectedError, RevisedKB, build_revised_kb,
    categorization_score, query_probability,
)
from .scenarios import (
    CombinationSpec, SelectionResult, SizeLimitError, compound_concept,
    concept_aliases, select_scenarios,
)
from .text import (
    ParseError, concept_text, format_decimal, parse_concept,
    parse_concept_assertion, parse_decimal, parse_kb, parse_typicality_query,
    serialize_kb,
)

DEFAULT_MAX_INCLUSIONS = 20

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_PARSE = 3


def default_max_inclusions() -> int:
    raw = os.environ.get("TCL_MAX_INCLUSIONS")
    if raw is None:
        return DEFAULT_MAX_INCLUSIONS
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"TCL_MAX_INCLUSIONS must be an integer, got {raw!r}")


class UsageError(ValueError):
    pass


def truncated_significant(value: Fraction, digits: int = 6) -> str:
    """Exact decimal expansion truncated (not rounded) to significant digits."""
    text = format_decimal(value)
    out = []
    significant = 0
    seen_nonzero = False
    for ch in text:
        if significant >= digits:
            break
        out.append(ch)
        if ch.isdigit():
            if ch != "0":
                seen_nonzero = True
            if seen_nonzero:
                significant += 1
    result = "".join(out)
    if "." in result:
        result = result.rstrip("0").rstrip(".")
    return result or "0"


def format_percent(value: Fraction) -> str:
    return truncated_significant(value * 100) + "%"


def combine_result_json(
    spec: CombinationSpec,
    result: SelectionResult,
    include_all: bool = False,
) -> Dict:
    """The machine-readable combine payload shared by the CLI and the HTTP
    service; identical inputs always serialize to identical JSON."""
    records = result.all if include_all else result.selected
    return {
        "compound": concept_text(compound_concept(spec)),
        "head": concept_text(spec.head),
        "modifiers": [concept_text(m) for m in spec.modifiers],
        "scenarios": [
            {
                "bits": r.selection.bit_string(),
                "probability": {
                    "num": r.selection.probability.value.numerator,
                    "den": r.selection.probability.value.denominator,
                },
                "status": r.status,
                "block": r.block,
            }
            for r in records
        ],
        "selected": [r.selection.bit_string() for r in result.selected],
    }


def _combine_table(spec: CombinationSpec, result: SelectionResult, show_all: bool) -> str:
    records = result.all if show_all else result.selected
    lines = [f"compound: {concept_text(compound_concept(spec))}"]
    rows = [
        (
            r.selection.bit_string(),
            format_percent(r.selection.probability.value),
            r.status,
            str(r.block),
        )
        for r in records
    ]
    header = ("scenario", "probability", "status", "block")
    widths = [
        max(len(header[col]), *(len(row[col]) for row in rows)) if rows else len(header[col])
        for col in range(4)
    ]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    if not result.selected:
        lines.append("no admissible scenario")
    return "\n".join(lines)


def _load_kb(path: str) -> KnowledgeBase:
    try:
        source = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    return parse_kb(source)


def _spec_from_args(args) -> CombinationSpec:
    head = parse_concept(args.head)
    modifiers = tuple(parse_concept(m) for m in args.modifier)
    try:
        return CombinationSpec(
            head,
            modifiers,
            exactly_k=getattr(args, "exactly_k", None),
            max_inclusions=args.max_inclusions,
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def detect_compound(kb: KnowledgeBase) -> Optional[Concept]:
    """The unique conjunctive subject among typicality inclusions, if any.

    Revised KBs carry their compound as the subject of the added inclusions
    (directly or through an alias atom); when exactly one such conjunction
    occurs, queries need no explicit --compound flag.
    """
    aliases = concept_aliases(kb)
    seen: List[Concept] = []
    for t in kb.typical:
        subject = aliases.get(t.subject, t.subject)
        if isinstance(subject, And) and subject not in seen:
            seen.append(subject)
    return seen[0] if len(seen) == 1 else None


def _revised_from_args(kb: KnowledgeBase, args) -> RevisedKB:
    if getattr(args, "compound", None):
        return RevisedKB.adopt(kb, parse_concept(args.compound))
    compound = detect_compound(kb)
    if compound is None:
        raise UsageError(
            "cannot determine the compound concept; pass --compound explicitly"
        )
    return RevisedKB.adopt(kb, compound)


def parse_facts(source: str) -> List[Tuple[ConceptAssertion, Probability]]:
    """One ``<prior> :: <expr>(<ind>)`` per line; blanks and # comments skipped."""
    facts = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "::" not in line:
            raise ParseError(lineno, 1, "expected '<prior> :: <assertion>'", raw)
        prior_text, assertion_text = line.split("::", 1)
        try:
            prior = Probability(parse_decimal(prior_text.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(lineno, 1, f"bad prior: {exc}", raw)
        assertion = parse_concept_assertion(assertion_text.strip())
        facts.append((assertion, prior))
    return facts


def _cmd_check(args) -> int:
    engine = RankEngine(_load_kb(args.kb))
    if engine.consistent():
        print("consistent")
        return EXIT_OK
    print("inconsistent")
    return EXIT_NO


def _cmd_rank(args) -> int:
    engine = RankEngine(_load_kb(args.kb))
    rank = engine.concept_rank(parse_concept(args.concept))
    if rank == INFINITE:
        print("inf")
        return EXIT_NO
    print(rank.n)
    return EXIT_OK


def _cmd_entails(args) -> int:
    engine = RankEngine(_load_kb(args.kb))
    subject, predicate = parse_typicality_query(args.query)
    if engine.entails_typicality(subject, predicate):
        print("yes")
        return EXIT_OK
    print("no")
    return EXIT_NO


def _cmd_combine(args) -> int:
    kb = _load_kb(args.kb)
    spec = _spec_from_args(args)
    result = select_scenarios(kb, spec, parallel=args.parallel)
    if args.json:
        print(json.dumps(combine_result_json(spec, result, include_all=args.all)))
    else:
        print(_combine_table(spec, result, show_all=args.all))
    return EXIT_OK if result.selected else EXIT_NO


def _cmd_revise(args) -> int:
    kb = _load_kb(args.kb)
    spec = _spec_from_args(args)
    result = select_scenarios(kb, spec, parallel=args.parallel)
    if not result.selected:
        print("no admissible scenario to revise with", file=sys.stderr)
        return EXIT_NO
    if args.scenario == "auto":
        if len(result.selected) > 1:
            bits = ", ".join(r.selection.bit_string() for r in result.selected)
            print(
                f"surviving block has {len(result.selected)} scenarios ({bits}); "
                "pass --scenario <bits>",
                file=sys.stderr,
            )
            return EXIT_NO
        chosen = result.selected[0]
    else:
        matches = [r for r in result.selected if r.selection.bit_string() == args.scenario]
        if not matches:
            print(
                f"scenario {args.scenario} is not in the surviving block",
                file=sys.stderr,
            )
            return EXIT_NO
        chosen = matches[0]
    revised = build_revised_kb(kb, spec, chosen, alias=args.name)
    Path(args.output).write_text(serialize_kb(revised.kb))
    print(f"wrote {args.output} (scenario {chosen.selection.bit_string()})")
    return EXIT_OK


def _cmd_query(args) -> int:
    kb = _load_kb(args.kb)
    revised = _revised_from_args(kb, args)
    assertion = parse_concept_assertion(args.assertion)
    prior = Probability(parse_decimal(args.prior)) if args.prior else DEFAULT_PRIOR
    if assertion.individual not in kb.individuals():
        # The prior is the chance the individual falls under the compound at
        # all, so treat it as a compound instance for the entailment check.
        revised = RevisedKB(
            revised.kb.with_assertion(
                ConceptAssertion(revised.compound, assertion.individual)
            ),
            revised.compound,
            revised.compound_alias,
            revised.provenance,
        )
    probability = query_probability(revised, assertion, prior)
    print(format_decimal(probability.value))
    return EXIT_OK if probability.value > 0 else EXIT_NO


def _cmd_score(args) -> int:
    kb = _load_kb(args.kb)
    revised = _revised_from_args(kb, args)
    try:
        facts_source = Path(args.facts).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.facts}: {exc}")
    facts = parse_facts(facts_source)
    if args.prior:
        prior = Probability(parse_decimal(args.prior))
        facts = [(assertion, prior) for assertion, _ in facts]
    score = categorization_score(
        revised, parse_concept(args.candidate), args.individual, facts
    )
    print(format_decimal(score))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tclogic",
        description="Reasoning and concept combination over .tcl knowledge bases",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def kb_arg(p):
        p.add_argument("kb", help="knowledge base file (.tcl)")

    def combine_args(p):
        kb_arg(p)
        p.add_argument("--head", required=True, help="head concept expression")
        p.add_argument(
            "--modifier", action="append", required=True,
            help="modifier concept expression (repeatable)",
        )
        p.add_argument("--exactly-k", dest="exactly_k", type=int, default=None)
        p.add_argument(
            "--max-inclusions", type=int, default=None,
            help="scenario-count guard (default 20, or TCL_MAX_INCLUSIONS)",
        )
        p.add_argument("--parallel", type=int, default=None)

    p = sub.add_parser("check", help="typicality-aware consistency")
    kb_arg(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("rank", help="rational-closure rank of a concept")
    kb_arg(p)
    p.add_argument("--concept", required=True)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("entails", help="defeasible entailment of T(C) <= D")
    kb_arg(p)
    p.add_argument("--query", required=True, help='e.g. "T(Athlete) <= Fit"')
    p.set_defaults(func=_cmd_entails)

    p = sub.add_parser("combine", help="enumerate and select combination scenarios")
    combine_args(p)
    p.add_argument("--all", action="store_true", help="print every scenario")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("revise", help="write the compound-revised KB")
    combine_args(p)
    p.add_argument(
        "--scenario", default="auto",
        help="bit string of the chosen surviving scenario, or 'auto'",
    )
    p.add_argument("--name", default=None, help="alias atom for the compound")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_revise)

    p = sub.add_parser("query", help="probability of an instance assertion")
    kb_arg(p)
    p.add_argument("--assert", dest="assertion", required=True, help='"<expr>(<ind>)"')
    p.add_argument("--prior", default=None)
    p.add_argument("--compound", default=None, help="compound concept expression")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("score", help="categorization score of a candidate concept")
    kb_arg(p)
    p.add_argument("--individual", required=True)
    p.add_argument("--candidate", required=True)
    p.add_argument("--facts", required=True, help="file of '<prior> :: <expr>(<ind>)' lines")
    p.add_argument("--prior", default=None, help="override every fact's prior")
    p.add_argument("--compound", default=None, help="compound concept expression")
    p.set_defaults(func=_cmd_score)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if getattr(args, "max_inclusions", "absent") is None:
            args.max_inclusions = default_max_inclusions()
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, DegreeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotSelectedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO


if __name__ == "__main__":
    sys.exit(main())
