"""Deterministic report shapes for the command-line surface.

Every builder returns a plain dict of JSON-safe values; ``render_json``
serialises those with sorted keys so identical results give identical
bytes.  Exact rationals are written as strings ("52000/3") because JSON
numbers cannot hold them; whole amounts stay integers.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .attacks import AttackVerdict
from .coalition import CoreEquivalenceAudit, CoreReport, MonotonicityReport
from .mechanism import MechanismOutcome
from .model import ValidationReport
from .twostage import MechanismComparison


def _plain(value: Any) -> Any:
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def render_json(payload: dict) -> str:
    """Canonical serialisation: sorted keys, two-space indent, one newline."""
    return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"


def validation_payload(reports: tuple[ValidationReport, ...]) -> dict:
    return {
        "command": "validate",
        "ok": all(r.ok for r in reports),
        "participants": [
            {
                "participant": r.participant,
                "spacing_ok": r.spacing_ok,
                "increasing_margins": r.increasing_margins,
                "findings": list(r.findings),
            }
            for r in reports
        ],
    }


def outcome_payload(outcome: MechanismOutcome, mode: str) -> dict:
    alloc = outcome.clearing.allocation
    payload = {
        "command": "clear",
        "mode": mode,
        "mechanism": outcome.rule,
        "feasible": outcome.clearing.feasible,
        "optimal_cost": outcome.clearing.optimal_cost,
        "allocation": dict(alloc.accepted),
        "procured_mw": alloc.total_power,
        "payments": {pid: q for pid, q in outcome.payments},
        "total_payments": outcome.total_payments,
        "utilities": None
        if outcome.utilities is None
        else {pid: u for pid, u in outcome.utilities},
        "tso_utility": outcome.tso_utility,
    }
    if mode == "twostage":
        payload["expected_residual_cost"] = outcome.expected_residual_cost
    return payload


def core_payload(report: CoreReport) -> dict:
    return {
        "in_core": report.in_core,
        "winners": list(report.winners),
        "subsets_checked": report.subsets_checked,
        "blocking": [
            {
                "members": list(b.members),
                "claimed_utility": b.utility_total,
                "exit_cost_increase": b.exit_cost_increase,
            }
            for b in report.blocking
        ],
    }


def monotonicity_payload(report: MonotonicityReport) -> dict:
    return {
        "monotone": report.monotone,
        "universe": list(report.universe),
        "pairs_checked": report.pairs_checked,
        "pairs_skipped": report.pairs_skipped,
        "violations": [
            {
                "participant": v.participant,
                "before_members": list(v.before_members),
                "after_members": list(v.after_members),
                "utility_before": v.utility_before,
                "utility_after": v.utility_after,
            }
            for v in report.violations
        ],
    }


def certify_payload(
    core: CoreReport | None, monotonicity: MonotonicityReport | None
) -> dict:
    verdicts = []
    if core is not None:
        verdicts.append(core.in_core)
    if monotonicity is not None:
        verdicts.append(monotonicity.monotone)
    return {
        "command": "certify",
        "ok": all(verdicts),
        "core": None if core is None else core_payload(core),
        "monotonicity": None
        if monotonicity is None
        else monotonicity_payload(monotonicity),
    }


def attack_payload(verdict: AttackVerdict) -> dict:
    scenario = verdict.scenario
    return {
        "command": "attack",
        "kind": scenario.kind,
        "principal": scenario.principal,
        "identities": list(scenario.identities),
        "honest_total": verdict.honest_total,
        "attack_total": verdict.attack_total,
        "profitable": verdict.profitable,
        "members": [
            {
                "participant": m.participant,
                "accepted_power": m.accepted_power,
                "payment": m.payment,
                "utility": m.utility,
                "solo_payment": m.solo_payment,
            }
            for m in verdict.members
        ],
    }


def audit_payload(audit: CoreEquivalenceAudit) -> dict:
    return {
        "universe": list(audit.universe),
        "all_subsets_in_core": audit.all_subsets_in_core,
        "monotone": audit.monotone,
        "equivalent": audit.equivalent,
        "subsets_checked": audit.subsets_checked,
        "subsets_uncoverable": audit.subsets_uncoverable,
        "non_core_subsets": [list(s) for s in audit.non_core_subsets],
    }


def comparison_payload(table: MechanismComparison) -> dict:
    def column(col):
        return {
            "label": col.label,
            "procured_mw": col.procured_mw,
            "optimal_cost": col.optimal_cost,
            "pay_as_bid_total": col.pay_as_bid_total,
            "vcg_total": col.vcg_total,
        }

    return {
        "command": "compare",
        "flexible": column(table.flexible),
        "deterministic": column(table.deterministic),
    }


# -- text renderings ---------------------------------------------------------


def _money(value) -> str:
    if isinstance(value, Fraction) and value.denominator != 1:
        return str(value)
    return format(int(value), ",").replace(",", "'")


def render_validation_text(payload: dict) -> str:
    lines = []
    for entry in payload["participants"]:
        margins = entry["increasing_margins"]
        verdict = (
            "ok"
            if entry["spacing_ok"] and margins is True
            else "FAIL"
        )
        lines.append(f"{entry['participant']}: {verdict}")
        for finding in entry["findings"]:
            lines.append(f"  - {finding}")
    lines.append(f"overall: {'ok' if payload['ok'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render_outcome_text(payload: dict) -> str:
    lines = [
        f"mechanism: {payload['mechanism']} ({payload['mode']})",
        f"optimal cost: {_money(payload['optimal_cost'])} CHF",
        f"procured: {payload['procured_mw']} MW",
    ]
    for pid in sorted(payload["allocation"]):
        accepted = payload["allocation"][pid]
        paid = payload["payments"][pid]
        line = f"  {pid}: {accepted} MW, paid {_money(paid)} CHF"
        if payload["utilities"] is not None and pid in payload["utilities"]:
            line += f", utility {_money(payload['utilities'][pid])} CHF"
        lines.append(line)
    lines.append(f"total payments: {_money(payload['total_payments'])} CHF")
    if "expected_residual_cost" in payload:
        lines.append(
            f"expected daily top-up: {_money(payload['expected_residual_cost'])} CHF"
        )
    lines.append(f"buyer utility: {_money(payload['tso_utility'])} CHF")
    return "\n".join(lines) + "\n"


def render_certify_text(payload: dict) -> str:
    lines = []
    if payload["core"] is not None:
        core = payload["core"]
        lines.append(f"core: {'in core' if core['in_core'] else 'BLOCKED'}")
        for block in core["blocking"]:
            members = ", ".join(block["members"])
            lines.append(
                f"  blocked by {{{members}}}: claims "
                f"{_money(block['claimed_utility'])} CHF, exit frees "
                f"{_money(block['exit_cost_increase'])} CHF"
            )
    if payload["monotonicity"] is not None:
        mono = payload["monotonicity"]
        lines.append(
            f"monotonicity: {'monotone' if mono['monotone'] else 'VIOLATED'}"
        )
        for v in mono["violations"]:
            lines.append(
                f"  {v['participant']}: {_money(v['utility_before'])} -> "
                f"{_money(v['utility_after'])} CHF as "
                f"{{{', '.join(v['before_members'])}}} grows to "
                f"{{{', '.join(v['after_members'])}}}"
            )
    lines.append(f"overall: {'ok' if payload['ok'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render_attack_text(payload: dict) -> str:
    lines = [f"attack: {payload['kind']}"]
    if payload["principal"]:
        lines.append(f"principal: {payload['principal']}")
    for m in payload["members"]:
        line = (
            f"  {m['participant']}: {m['accepted_power']} MW, "
            f"paid {_money(m['payment'])} CHF"
        )
        if m["utility"] is not None:
            line += f", utility {_money(m['utility'])} CHF"
        if m["solo_payment"] is not None:
            line += f", alone would be paid {_money(m['solo_payment'])} CHF"
        lines.append(line)
    lines.append(
        f"honest total: {_money(payload['honest_total'])} CHF; "
        f"attack total: {_money(payload['attack_total'])} CHF"
    )
    lines.append(
        "verdict: PROFITABLE" if payload["profitable"] else "verdict: not profitable"
    )
    return "\n".join(lines) + "\n"


def render_comparison_text(payload: dict) -> str:
    """Two-column totals table, one row per reported quantity."""
    flex, det = payload["flexible"], payload["deterministic"]
    rows = [
        ("", flex["label"], det["label"]),
        ("Procured MWs", str(flex["procured_mw"]), str(det["procured_mw"])),
        (
            "Optimal cost",
            _money(flex["optimal_cost"]),
            _money(det["optimal_cost"]),
        ),
        (
            "Sum of pay-as-bid payments",
            _money(flex["pay_as_bid_total"]),
            _money(det["pay_as_bid_total"]),
        ),
        (
            "Sum of VCG payments",
            _money(flex["vcg_total"]),
            _money(det["vcg_total"]),
        ),
    ]
    widths = [max(len(row[k]) for row in rows) for k in range(3)]
    lines = [
        "  ".join(cell.ljust(widths[k]) for k, cell in enumerate(row)).rstrip()
        for row in rows
    ]
    return "\n".join(lines) + "\n"
