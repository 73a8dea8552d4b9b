"""Command-line interface.

Every subcommand reads one JSON document (``--input FILE`` or ``--json STRING``)
and writes a report to stdout. Exit codes: 0 on success, 2 on invalid input,
1 on internal errors and on survey disagreements.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
from collections.abc import Callable, Mapping, Sequence
from typing import Any

from pydantic import BaseModel, ValidationError

from .config import Settings, load_settings
from .core.cf import (
    as_chain,
    cf_expand,
    chain_value,
    dual_chain,
    format_rational,
    parse_rational,
    truncation_values,
)
from .errors import DomainError
from .models import (
    FeasibilityResult,
    Hole,
    ObstructionTrace,
    OpenBook,
    RewriteResult,
    SignedTwist,
    SurveyReport,
    Verdict,
)
from .services.abmap import ab_class
from .services.abmap.oracle import PositiveFactorizationOracle
from .services.factorization import daisy_rewrite, verify_certificate
from .services.fillability import FillabilityService, find_sublinks, obstruction_trace
from .services.openbook import canonical_twists, reroot, translate, translate_sublink
from .services.presentation import chains_from_payload, presentation_from_payload
from .services.survey import SurveyRunner
from .utils.logging import RunContext, configure_logging

log = logging.getLogger("seifill.cli")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2


class CommandResult:
    """A report plus the exit code it should end the process with."""

    def __init__(self, report: Any, text: str, exit_code: int = EXIT_OK):
        self.report = report
        self.text = text
        self.exit_code = exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seifill",
        description="Stein fillability of contact small Seifert fibered spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        command = sub.add_parser(name, help=help_text)
        source = command.add_mutually_exclusive_group(required=True)
        source.add_argument("--input", metavar="FILE", help="read the JSON input from FILE")
        source.add_argument("--json", metavar="STRING", help="inline JSON input")
        command.add_argument("--format", choices=("text", "json"), default="text")
        command.add_argument(
            "--max-holes",
            type=int,
            default=None,
            help="oracle size guard (default: SEIFILL_MAX_HOLES or 14)",
        )
        command.add_argument(
            "--force", action="store_true", help="run the oracle above the size guard"
        )
        return command

    add("cf", "continued fractions of {\"value\": \"p/q\"} or {\"chain\": [...]}")
    add("translate", "open book of a presentation")
    add("decide", "fillability verdict with certificates or obstruction")
    oracle = add("oracle", "positive factorization search on the full book")
    oracle.add_argument("--reroot", metavar="HOLE", help="let HOLE play the outer boundary")
    add("factorize", "daisy factorization of the first dual sublink")
    add("trace", "level walk of the non-factorization argument")
    survey = add("survey", "decide every structure on three chains")
    survey.add_argument(
        "--cross-check", action="store_true", help="compare every verdict with the oracle"
    )
    add("verify", "check a candidate positive factorization against a book")
    return parser


def _load_payload(args: argparse.Namespace) -> Any:
    if args.input is not None:
        with open(args.input, encoding="utf-8") as handle:
            return json.load(handle)
    return json.loads(args.json)


def _dump(report: Any) -> str:
    if isinstance(report, BaseModel):
        report = report.model_dump(mode="json", by_alias=True)
    return json.dumps(report, indent=2, ensure_ascii=False)


def _oracle(args: argparse.Namespace, settings: Settings, holes: int) -> PositiveFactorizationOracle:
    limit = args.max_holes or settings.max_holes
    if args.force and holes > limit:
        log.warning("Forcing the oracle on %d holes (limit %d)", holes, limit)
        limit = holes
    return PositiveFactorizationOracle(max_holes=limit)


def _twists_text(twists: Sequence[SignedTwist]) -> list[str]:
    return [
        f"  {'+' if t.sign > 0 else '-'}{{{', '.join(t.names)}}}"
        + (f"  [{t.label}]" if t.label else "")
        for t in twists
    ]


def _feasibility_text(result: FeasibilityResult) -> list[str]:
    lines = [f"status: {result.status.value} ({result.nodes} nodes)"]
    for entry in result.witness or ():
        lines.append(f"  {entry.multiplicity} x {{{', '.join(h.name for h in entry.holes)}}}")
    return lines


def _trace_text(trace: ObstructionTrace) -> list[str]:
    lines = [f"conclusion: {trace.conclusion.value}"]
    if trace.third_leg is not None:
        lines.append(
            f"legs: third={trace.third_leg} first={trace.first_leg} "
            f"second={trace.second_leg} flipped={trace.flipped}"
        )
    for level in trace.levels:
        lines.append(
            f"  level {level.level}: J={level.j} needs {level.required} x "
            f"{level.parts_needed} parts, unused {list(level.available_parts)} "
            f"-> case ({level.case.value})"
        )
    if trace.reason:
        lines.append(f"reason: {trace.reason}")
    return lines


def _verdict_text(verdict: Verdict) -> list[str]:
    lines = [f"status: {verdict.status.value}"]
    if verdict.sublink is not None:
        s = verdict.sublink
        lines.append(
            f"sublink: legs ({s.positive_leg},{s.negative_leg}) "
            f"prefixes ({s.trunc_pos},{s.trunc_neg}) "
            f"s = {format_rational(s.s_pos)} + {format_rational(s.s_neg)}"
        )
    if verdict.geometric_certificate is not None:
        lines.append(f"geometric certificate: {len(verdict.geometric_certificate)} twists")
        lines.extend(_twists_text(verdict.geometric_certificate))
    if verdict.abelian_certificate is not None:
        lines.append("abelian certificate:")
        lines.extend(_feasibility_text(verdict.abelian_certificate))
    if verdict.obstruction is not None:
        obstruction = verdict.obstruction
        lines.append(f"obstruction: {obstruction.kind.value}")
        if obstruction.q_values:
            lines.append(f"q: {[format_rational(q) for q in obstruction.q_values]}")
        if obstruction.trace is not None:
            lines.extend(_trace_text(obstruction.trace))
    return lines


def _book_text(book: OpenBook) -> list[str]:
    lines = [
        f"outer: {book.outer.name}",
        f"holes: {' '.join(h.name for h in book.boundaries)}",
        f"twists: {book.positive_count} positive, {book.negative_count} negative",
    ]
    lines.extend(_twists_text(canonical_twists(book)))
    return lines


def _named(label: str, twist: SignedTwist | None) -> str:
    if twist is None:
        return f"{label} -"
    return f"{label} {{{', '.join(twist.names)}}}"


def _rewrite_text(result: RewriteResult) -> list[str]:
    lines = [
        f"b-pattern: {list(result.pattern.runs)}",
        f"pivot: {result.pivot.name}",
    ]
    for step in result.steps:
        closing = f" closing {step.closing.name}" if step.closing else ""
        lines.append(
            f"  step {step.level} ({step.side}): +{[h.name for h in step.added]}{closing}; "
            f"{_named('D', step.d)}; {_named('N', step.n)}; {_named('N′', step.n_prime)}"
        )
    lines.append(f"positive factorization: {len(result.twists)} twists")
    lines.extend(_twists_text(result.twists))
    return lines


def _survey_text(report: SurveyReport) -> list[str]:
    lines = []
    for record in report.records:
        line = f"{record.index:4d} rot={[list(r) for r in record.rotations]} {record.verdict.status.value}"
        if record.oracle is not None:
            line += f" oracle={record.oracle.value} {'ok' if record.agrees else 'DISAGREE'}"
        lines.append(line)
    s = report.summary
    lines.append(
        f"total {s.total}: {s.fillable} fillable, {s.not_fillable} not fillable"
        + (
            f"; cross-checked {s.cross_checked}, {s.agreements} agree, "
            f"{s.disagreements} disagree"
            if s.cross_checked
            else ""
        )
    )
    return lines


def cmd_cf(payload: Any, args: argparse.Namespace, settings: Settings) -> CommandResult:
    if not isinstance(payload, Mapping):
        raise DomainError("cf input must be a JSON object")
    if "value" in payload:
        chain = cf_expand(parse_rational(payload["value"]))
    elif "chain" in payload:
        chain = as_chain(payload["chain"])
    else:
        raise DomainError("cf input needs 'value' or 'chain'")
    s = chain_value(chain)
    report = {
        "chain": list(chain),
        "s": format_rational(s),
        "truncations": [format_rational(v) for v in truncation_values(chain)],
        "dual": list(dual_chain(chain)),
    }
    text = [
        f"chain: {report['chain']}",
        f"s: {report['s']}",
        f"truncations: {report['truncations']}",
        f"dual: {report['dual']}",
    ]
    return CommandResult(report, "\n".join(text))


def cmd_translate(payload: Any, args: argparse.Namespace, settings: Settings) -> CommandResult:
    book = translate(presentation_from_payload(payload))
    report = book.model_copy(update={"twists": canonical_twists(book)})
    return CommandResult(report, "\n".join(_book_text(book)))


def cmd_decide(payload: Any, args: argparse.Namespace, settings: Settings) -> CommandResult:
    presentation = presentation_from_payload(payload)
    book = translate(presentation)
    service = FillabilityService(oracle=_oracle(args, settings, len(book.inner_holes)))
    verdict = service.decide(presentation)
    return CommandResult(verdict, "\n".join(_verdict_text(verdict)))


def cmd_oracle(payload: Any, args: argparse.Namespace, settings: Settings) -> CommandResult:
    book = translate(presentation_from_payload(payload))
    if args.reroot:
        book = reroot(book, Hole.parse(args.reroot))
    result = _oracle(args, settings, len(book.inner_holes)).solve(ab_class(book))
    lines = [f"outer: {book.outer.name}", *_feasibility_text(result)]
    return CommandResult(result, "\n".join(lines))


def cmd_factorize(payload: Any, args: argparse.Namespace, settings: Settings) -> CommandResult:
    presentation = presentation_from_payload(payload)
    sublinks = find_sublinks(presentation)
    if not sublinks:
        raise DomainError("no pair of one-sided prefixes has values adding up to 1")
    result = daisy_rewrite(translate_sublink(presentation, sublinks[0]))
    return CommandResult(result, "\n".join(_rewrite_text(result)))


def cmd_trace(payload: Any, args: argparse.Namespace, settings: Settings) -> CommandResult:
    trace = obstruction_trace(presentation_from_payload(payload))
    return CommandResult(trace, "\n".join(_trace_text(trace)))


def cmd_survey(payload: Any, args: argparse.Namespace, settings: Settings) -> CommandResult:
    if args.max_holes:
        settings = settings.model_copy(update={"max_holes": args.max_holes})
    runner = SurveyRunner(settings, cross_check=args.cross_check, force=args.force)
    report = asyncio.run(runner.run(chains_from_payload(payload)))
    code = EXIT_INTERNAL if report.summary.disagreements else EXIT_OK
    return CommandResult(report, "\n".join(_survey_text(report)), code)


def cmd_verify(payload: Any, args: argparse.Namespace, settings: Settings) -> CommandResult:
    """``{"presentation": {...}, "twists": [...], "sublink": false}``."""
    if not isinstance(payload, dict) or "presentation" not in payload:
        raise DomainError("verify input needs 'presentation' and 'twists'")
    presentation = presentation_from_payload(payload["presentation"])
    if payload.get("sublink"):
        sublinks = find_sublinks(presentation)
        if not sublinks:
            raise DomainError("presentation has no dual sublink to verify against")
        book = translate_sublink(presentation, sublinks[0])
    else:
        book = translate(presentation)
    twists = [
        SignedTwist(sign=1, holes=t) if isinstance(t, list) else SignedTwist.model_validate(t)
        for t in payload.get("twists", [])
    ]
    verified = verify_certificate(book, twists)
    report = {"verified": verified, "twists": len(twists)}
    return CommandResult(report, f"verified: {str(verified).lower()} ({len(twists)} twists)")


COMMANDS: dict[str, Callable[[Any, argparse.Namespace, Settings], CommandResult]] = {
    "cf": cmd_cf,
    "translate": cmd_translate,
    "decide": cmd_decide,
    "oracle": cmd_oracle,
    "factorize": cmd_factorize,
    "trace": cmd_trace,
    "survey": cmd_survey,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    configure_logging(settings.debug)

    with RunContext(command=args.command) as ctx:
        try:
            payload = _load_payload(args)
            result = COMMANDS[args.command](payload, args, settings)
        except (ValidationError, ValueError) as exc:
            print(f"invalid input: {exc}", file=sys.stderr)
            return EXIT_INVALID
        except OSError as exc:
            print(f"cannot read input: {exc}", file=sys.stderr)
            return EXIT_INVALID
        except Exception as exc:
            ctx.exception("Command failed", error=type(exc).__name__)
            print(f"internal error: {exc}", file=sys.stderr)
            return EXIT_INTERNAL

        output = _dump(result.report) if args.format == "json" else result.text
        print(output)
        ctx.debug("Command finished", exit_code=result.exit_code, elapsed=f"{ctx.elapsed:.3f}s")
        return result.exit_code
