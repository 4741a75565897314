"""Command-line surface.

Subcommands: validate, clear, certify, attack, oracle-check, compare.
Exit codes: 0 success or all checks passed; 1 a certification failed, an
attack was profitable, or an oracle disagreed; 2 unusable input; 3 the
instance cannot be settled (uncoverable requirement or a pivotal winner).

Output is human-readable text by default, canonical JSON with --json;
either way identical inputs and flags produce identical bytes.
"""

from __future__ import annotations

import argparse
import random
import sys

from . import reporting
from .attacks import run_collusion_attack, run_shill_attack
from .clearing import brute_force_clear, clear
from .coalition import audit_core_equivalence, core_check, payoff_monotonicity_check
from .errors import (
    AuctionError,
    EnumerationBudgetError,
    InfeasibleInstanceError,
    InstanceParseError,
    PivotalBidderError,
    ScenarioInfeasibleError,
)
from .generators import random_instance
from .instancefile import ParsedFile, load_file
from .mechanism import run_pay_as_bid, run_vcg
from .model import AuctionInstance
from .twostage import (
    TwoStageInstance,
    compare_mechanisms,
    two_stage_pay_as_bid,
    two_stage_vcg,
)

PASS, FAIL, INPUT_ERROR, UNSETTLEABLE = 0, 1, 2, 3


def _emit(payload: dict, text: str, as_json: bool) -> None:
    sys.stdout.write(reporting.render_json(payload) if as_json else text)


def _resolve_mode(parsed: ParsedFile, mode: str) -> str:
    if mode == "auto":
        return "twostage" if isinstance(parsed.instance, TwoStageInstance) else "single"
    if mode == "twostage" and not isinstance(parsed.instance, TwoStageInstance):
        raise InstanceParseError("the file has no scenarios, cannot run two-stage")
    return mode


def cmd_validate(args) -> int:
    parsed = load_file(args.file)
    reports = parsed.weekly.validate()
    payload = reporting.validation_payload(reports)
    _emit(payload, reporting.render_validation_text(payload), args.json)
    return PASS if payload["ok"] else FAIL


def cmd_clear(args) -> int:
    parsed = load_file(args.file)
    mode = _resolve_mode(parsed, args.mode)
    if mode == "twostage":
        runner = two_stage_vcg if args.mechanism == "vcg" else two_stage_pay_as_bid
        outcome = runner(parsed.instance)
    else:
        runner = run_vcg if args.mechanism == "vcg" else run_pay_as_bid
        outcome = runner(parsed.weekly)
    payload = reporting.outcome_payload(outcome, mode)
    _emit(payload, reporting.render_outcome_text(payload), args.json)
    return PASS


def cmd_certify(args) -> int:
    parsed = load_file(args.file)
    two_stage = isinstance(parsed.instance, TwoStageInstance)
    core = None
    if args.check in ("core", "both"):
        if two_stage:
            raise InstanceParseError(
                "core certification is defined for single-stage files; "
                "use --check monotonicity here"
            )
        core = core_check(parsed.weekly)
    monotonicity = None
    if args.check in ("monotonicity", "both"):
        monotonicity = payoff_monotonicity_check(
            parsed.instance, adjacent_only=not args.all_pairs
        )
    payload = reporting.certify_payload(core, monotonicity)
    _emit(payload, reporting.render_certify_text(payload), args.json)
    return PASS if payload["ok"] else FAIL


def cmd_attack(args) -> int:
    parsed = load_file(args.file)
    spec = parsed.attack
    if spec is None:
        raise InstanceParseError("the file has no [attack] stanza")
    if isinstance(parsed.instance, TwoStageInstance):
        raise InstanceParseError("attacks are evaluated on single-stage files")
    try:
        if spec.kind == "shill":
            verdict = run_shill_attack(parsed.weekly, spec.principal, spec.split)
        else:
            verdict = run_collusion_attack(parsed.weekly, spec.losers, spec.lowered)
    except ValueError as exc:
        raise InstanceParseError(str(exc), "attack") from None
    payload = reporting.attack_payload(verdict)
    _emit(payload, reporting.render_attack_text(payload), args.json)
    return FAIL if verdict.profitable else PASS


def _oracle_check_one(instance: AuctionInstance, audit: bool) -> dict:
    fast = clear(instance)
    slow = brute_force_clear(instance)
    entry: dict = {"solvers_agree": fast == slow}
    if audit:
        try:
            verdict = audit_core_equivalence(instance)
        except EnumerationBudgetError:
            entry["audit"] = None
        else:
            entry["audit"] = reporting.audit_payload(verdict)
    return entry


def cmd_oracle_check(args) -> int:
    checks: list[dict] = []
    if args.file is not None:
        parsed = load_file(args.file)
        checks.append(_oracle_check_one(parsed.weekly, audit=True))
    else:
        if args.seed is None:
            raise InstanceParseError("give an instance file or --seed")
        rng = random.Random(args.seed)
        for _ in range(args.count):
            instance = random_instance(
                rng, max_participants=args.size, ensure_feasible=False
            )
            small = len(instance.participants) <= 5
            checks.append(_oracle_check_one(instance, audit=small))
    mismatches = sum(1 for c in checks if not c["solvers_agree"])
    disagreements = sum(
        1
        for c in checks
        if c.get("audit") is not None and not c["audit"]["equivalent"]
    )
    payload = {
        "command": "oracle-check",
        "checked": len(checks),
        "solver_mismatches": mismatches,
        "audits_run": sum(1 for c in checks if c.get("audit") is not None),
        "audit_disagreements": disagreements,
        "ok": mismatches == 0 and disagreements == 0,
    }
    text = (
        f"checked {payload['checked']} instances: "
        f"{mismatches} solver mismatches, "
        f"{payload['audits_run']} equivalence audits, "
        f"{disagreements} disagreements\n"
        f"overall: {'ok' if payload['ok'] else 'FAIL'}\n"
    )
    _emit(payload, text, args.json)
    return PASS if payload["ok"] else FAIL


def cmd_compare(args) -> int:
    parsed = load_file(args.file)
    if not isinstance(parsed.instance, TwoStageInstance):
        raise InstanceParseError("compare needs a file with [[scenario]] tables")
    table = compare_mechanisms(parsed.instance)
    payload = reporting.comparison_payload(table)
    _emit(payload, reporting.render_comparison_text(payload), args.json)
    return PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reserveauction",
        description="Clear, settle, and certify reserve procurement auctions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="emit canonical JSON")

    p = sub.add_parser("validate", help="check ladders for grid spacing and curvature")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("clear", help="determine winners and settle payments")
    p.add_argument("file")
    p.add_argument("--mechanism", choices=("vcg", "payasbid"), default="vcg")
    p.add_argument(
        "--mode",
        choices=("auto", "single", "twostage"),
        default="auto",
        help="auto runs two-stage exactly when the file has scenarios",
    )
    common(p)
    p.set_defaults(func=cmd_clear)

    p = sub.add_parser("certify", help="core membership and payoff monotonicity")
    p.add_argument("file")
    p.add_argument("--check", choices=("core", "monotonicity", "both"), default="both")
    p.add_argument(
        "--all-pairs",
        action="store_true",
        help="compare every nested member pair, not only single-entrant steps",
    )
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("attack", help="evaluate the file's manipulation stanza")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser(
        "oracle-check",
        help="cross-check the solver against brute force and the certificates "
        "against each other",
    )
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--seed", type=int, default=None, help="corpus seed")
    p.add_argument("--count", type=int, default=50, help="instances to generate")
    p.add_argument("--size", type=int, default=6, help="max participants")
    common(p)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("compare", help="two-stage versus fixed-amount procurement")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InstanceParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (InfeasibleInstanceError, PivotalBidderError, ScenarioInfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return UNSETTLEABLE
    except AuctionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
