"""Command line interface.

Subcommands: field, verify, campaign, tightness, search.  Exactly one
document goes to stdout (or --out); diagnostics go to stderr.  Exit
codes: 0 all claims verified, 1 a claim was violated, 2 operational
error (bad arguments, malformed input, budget exceeded).
"""

from __future__ import annotations

import argparse
import json
import sys

from maskent.dist import float15
from maskent.family import (
    BudgetExceededError,
    FunctionTable,
    square_family,
    tightness_predictions,
)
from maskent.gf import FieldSpec, build_field, field_for_order, field_to_json_dict
from maskent.verify import (
    CSV_HEADER,
    CampaignConfig,
    InstanceRow,
    exhaustive_campaign,
    hillclimb_search,
    instance_violations,
    random_campaign,
    tightness_violations,
    verify_instance,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maskent",
        description="Exact entropy accounting for the masking family g_k(x) = f(x) + k*x.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_field_args(p):
        p.add_argument("--p", type=int, default=None, help="field characteristic (prime)")
        p.add_argument("--m", type=int, default=None, help="extension degree (default 1)")
        p.add_argument("--q", type=int, default=None, help="field order p^m, instead of --p/--m")

    def add_output_args(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="write the document here instead of stdout")

    p_field = sub.add_parser("field", help="dump a field's tables as JSON")
    add_field_args(p_field)
    add_output_args(p_field)

    p_verify = sub.add_parser("verify", help="verify the claims for one function table")
    p_verify.add_argument("--input-table", required=True, help="path to a function table JSON file")
    add_output_args(p_verify)

    p_campaign = sub.add_parser("campaign", help="run an exhaustive or random campaign")
    add_field_args(p_campaign)
    p_campaign.add_argument("--n", type=int, default=1, help="dimension (default 1)")
    p_campaign.add_argument("--suite", choices=("exhaustive", "random"), required=True)
    p_campaign.add_argument("--samples", type=int, default=100, help="random suite size (default 100)")
    p_campaign.add_argument("--seed", type=int, default=0, help="random suite seed (default 0)")
    add_output_args(p_campaign)

    p_tight = sub.add_parser("tightness", help="check the square map against its closed forms")
    add_field_args(p_tight)
    p_tight.add_argument("--n", type=int, default=1, help="dimension (default 1)")
    add_output_args(p_tight)

    p_search = sub.add_parser("search", help="hill-climb for large average collision")
    add_field_args(p_search)
    p_search.add_argument("--n", type=int, default=1, help="dimension (default 1)")
    p_search.add_argument("--iters", type=int, default=300, help="proposals per restart (default 300)")
    p_search.add_argument("--restarts", type=int, default=3, help="independent restarts (default 3)")
    p_search.add_argument("--seed", type=int, default=1, help="search seed (default 1)")
    add_output_args(p_search)

    return parser


def _resolve_spec(args) -> FieldSpec:
    if args.q is not None:
        if args.p is not None or args.m is not None:
            raise ValueError("give either --q or --p/--m, not both")
        return field_for_order(args.q)
    if args.p is None:
        raise ValueError("a field is required: give --q or --p (with optional --m)")
    return build_field(args.p, args.m if args.m is not None else 1)


def _load_table(path: str) -> FunctionTable:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"cannot parse {path}: {exc}") from None
    return FunctionTable.from_json_dict(doc)


def _json_text(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _single_row_csv(row: InstanceRow) -> str:
    return CSV_HEADER + "\n" + row.to_csv_row() + "\n"


def _cmd_field(args) -> tuple[str, bool]:
    if args.format != "json":
        raise ValueError("field dumps support --format json only")
    spec = _resolve_spec(args)
    return _json_text(field_to_json_dict(spec)), False


def _cmd_verify(args) -> tuple[str, bool]:
    f = _load_table(args.input_table)
    report = verify_instance(f)
    violations = instance_violations(
        f, report, check_identities=True, check_images=(f.n == 1)
    )
    if args.format == "csv":
        return _single_row_csv(InstanceRow.from_report(report)), bool(violations)
    doc = {"report": report.to_json_dict(), "violations": violations}
    return _json_text(doc), bool(violations)


def _cmd_campaign(args) -> tuple[str, bool]:
    spec = _resolve_spec(args)
    config = CampaignConfig(
        q=spec.q,
        n=args.n,
        mode=args.suite,
        samples=args.samples if args.suite == "random" else 0,
        seed=args.seed if args.suite == "random" else 0,
    )
    if args.suite == "exhaustive":
        result = exhaustive_campaign(config)
    else:
        result = random_campaign(config)
    text = result.to_csv_text() if args.format == "csv" else _json_text(result.to_json_dict())
    return text, bool(result.violations)


def _cmd_tightness(args) -> tuple[str, bool]:
    spec = _resolve_spec(args)
    f = square_family(spec.q, args.n)
    report = verify_instance(f)
    violations = instance_violations(
        f, report, check_identities=True, check_images=(args.n == 1)
    )
    violations.extend(tightness_violations(report))
    if args.format == "csv":
        return _single_row_csv(InstanceRow.from_report(report)), bool(violations)
    pred = tightness_predictions(spec.q, args.n)
    doc = {
        "q": spec.q,
        "n": args.n,
        "prediction": {
            "avg_shannon": float15(pred.avg_shannon),
            "avg_h2": float15(pred.avg_h2),
        },
        "report": report.to_json_dict(),
        "violations": violations,
    }
    return _json_text(doc), bool(violations)


def _cmd_search(args) -> tuple[str, bool]:
    spec = _resolve_spec(args)
    config = CampaignConfig(
        q=spec.q,
        n=args.n,
        mode="hillclimb",
        iters=args.iters,
        restarts=args.restarts,
        seed=args.seed,
    )
    result = hillclimb_search(config)
    text = result.to_csv_text() if args.format == "csv" else _json_text(result.to_json_dict())
    return text, bool(result.violations)


_COMMANDS = {
    "field": _cmd_field,
    "verify": _cmd_verify,
    "campaign": _cmd_campaign,
    "tightness": _cmd_tightness,
    "search": _cmd_search,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, violated = _COMMANDS[args.command](args)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (ValueError, BudgetExceededError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if violated:
        print("claim violations detected", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
