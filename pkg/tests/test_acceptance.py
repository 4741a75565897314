"""Acceptance gate: ten end-to-end criteria, one verdict line each.

Every test prints exactly one "criterion N: PASS/FAIL" line (visible under
pytest -rA or on failure) and asserts the same verdict, so the suite's
-v listing doubles as the acceptance checklist.
"""

import random
import time
from fractions import Fraction

from reserveauction.attacks import run_collusion_attack, run_shill_attack
from reserveauction.clearing import brute_force_clear, clear
from reserveauction.coalition import (
    audit_core_equivalence,
    core_check,
    payoff_monotonicity_check,
)
from reserveauction.errors import PivotalBidderError
from reserveauction.generators import (
    lowered_costs,
    random_convex_instance,
    random_deviation,
    random_instance,
    random_shill_split,
)
from reserveauction.mechanism import dominant_strategy_probe, run_vcg
from reserveauction.model import AuctionInstance
from reserveauction.twostage import (
    TwoStageInstance,
    compare_mechanisms,
    price_scenarios,
)


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def entrants(count=4, price=0):
    return {f"PP{k}": [(200, price)] for k in range(3, 3 + count)}


BLOCK_PAIR = {"PP1": [(800, 40000)], "PP2": [(800, 50000)]}
SAGGING_LADDERS = {
    "PP1": [(200, 12000), (400, 25000), (600, 33000), (800, 40000)],
    "PP2": [(200, 12000), (400, 24000), (600, 36000), (800, 50000)],
}
CONVEX_LADDERS = {
    "PP1": [(200, 8000), (400, 19000), (600, 30000), (800, 40000)],
    "PP2": [(200, 12000), (400, 24000), (600, 36000), (800, 50000)],
}


def test_criterion_01_block_auction_payments():
    started = time.monotonic()
    pair = run_vcg(AuctionInstance.build(800, 200, BLOCK_PAIR))
    crowded = run_vcg(
        AuctionInstance.build(800, 200, {**BLOCK_PAIR, **entrants()})
    )
    elapsed = time.monotonic() - started
    entrant_payments = [crowded.payment(f"PP{k}") for k in range(3, 7)]
    ok = (
        pair.payment("PP1") == 50000
        and pair.payment("PP2") == 0
        and entrant_payments == [40000] * 4
        and elapsed < 1.0
    )
    verdict(
        1,
        ok,
        f"block winner paid {pair.payment('PP1')}, entrants paid "
        f"{sorted(set(entrant_payments))} each, in {elapsed:.3f}s",
    )


def test_criterion_02_entry_raises_a_rivals_payment():
    three = AuctionInstance.build(
        800, 200, {**SAGGING_LADDERS, **entrants(count=1)}
    )
    six = AuctionInstance.build(800, 200, {**SAGGING_LADDERS, **entrants()})
    alone = run_vcg(three).payment("PP3")
    crowded = run_vcg(six).payment("PP3")
    report = payoff_monotonicity_check(six, adjacent_only=False)
    jump = any(
        v.participant == "PP3"
        and v.before_members == ("PP1", "PP2", "PP3")
        and v.after_members == six.participants
        and (v.utility_before, v.utility_after) == (7000, 12000)
        for v in report.violations
    )
    ok = alone == 7000 and crowded == 12000 and not report.monotone and jump
    verdict(
        2,
        ok,
        f"PP3 paid {alone} alone and {crowded} after three more entrants; "
        f"checker flags the 7000->12000 pair: {jump}",
    )


def test_criterion_03_requoted_ladders_yield_a_core_outcome():
    instance = AuctionInstance.build(
        800, 200, {**CONVEX_LADDERS, **entrants()}
    )
    outcome = run_vcg(instance)
    payments = [outcome.payment(f"PP{k}") for k in range(3, 7)]
    report = core_check(instance)
    ok = payments == [8000] * 4 and report.in_core
    verdict(
        3,
        ok,
        f"each winner paid {sorted(set(payments))}, in_core={report.in_core}",
    )


def test_criterion_04_solver_matches_brute_force():
    rng = random.Random(40_001)
    started = time.monotonic()
    mismatches = 0
    infeasible = 0
    count = 1000
    for _ in range(count):
        instance = random_instance(rng, max_participants=8, max_levels=4)
        fast = clear(instance)
        slow = brute_force_clear(instance)
        if fast != slow:
            mismatches += 1
        if not fast.feasible:
            infeasible += 1
    elapsed = time.monotonic() - started
    ok = mismatches == 0 and elapsed < 60.0 and 0 < infeasible < count
    verdict(
        4,
        ok,
        f"{count} instances, {mismatches} mismatches "
        f"({infeasible} infeasible), in {elapsed:.1f}s",
    )


def test_criterion_05_truthful_bidding_dominates():
    rng = random.Random(50_001)
    identity_failures = 0
    beaten = 0
    deviations = 0
    for _ in range(300):
        instance = random_instance(
            rng,
            max_participants=8,
            max_levels=4,
            ensure_nonpivotal=True,
            truthful=True,
        )
        outcome = run_vcg(instance)
        utilities = dict(outcome.utilities)
        total = sum(utilities.values()) + outcome.tso_utility
        if (
            any(outcome.payment(p) < 0 for p in instance.participants)
            or any(u < 0 for u in utilities.values())
            or total != -outcome.clearing.optimal_cost
        ):
            identity_failures += 1
        for _ in range(4):
            pid = rng.choice(instance.participants)
            probe = dominant_strategy_probe(
                instance, pid, [random_deviation(rng, instance, pid)]
            )
            deviations += 1
            if probe.deviation_utilities[0] > probe.truthful_utility:
                beaten += 1
    ok = identity_failures == 0 and beaten == 0 and deviations >= 1000
    verdict(
        5,
        ok,
        f"300 truthful settlements, {identity_failures} identity failures; "
        f"{deviations} deviations sampled, {beaten} beat truth",
    )


def test_criterion_06_certificates_agree_everywhere():
    rng = random.Random(60_001)
    disagreements = 0
    universes = 200
    for k in range(universes):
        if k % 2 == 0:
            instance = random_convex_instance(
                rng, max_participants=7, ensure_nonpivotal=False
            )
        else:
            instance = random_instance(
                rng, max_participants=7, ensure_feasible=True
            )
        audit = audit_core_equivalence(instance)
        if not audit.equivalent:
            disagreements += 1
    ok = disagreements == 0
    verdict(6, ok, f"{universes} universes audited, {disagreements} disagreements")


def test_criterion_07_convex_quoting_is_monotone_and_regular():
    rng = random.Random(70_001)
    non_monotone = 0
    regularity_breaks = 0
    insertions = 0
    instances = 500
    for _ in range(instances):
        instance = random_convex_instance(rng, max_participants=6)
        if not payoff_monotonicity_check(instance).monotone:
            non_monotone += 1
        pids = list(instance.participants)
        for _ in range(2):
            if len(pids) < 2:
                break
            entrant = rng.choice(pids)
            others = [p for p in pids if p != entrant]
            subset = others[: rng.randint(1, len(others))]
            before = clear(instance, subset)
            if not before.feasible:
                continue
            after = clear(instance, subset + [entrant])
            insertions += 1
            if any(
                after.allocation.power(p) > before.allocation.power(p)
                for p in subset
            ):
                regularity_breaks += 1
    ok = non_monotone == 0 and regularity_breaks == 0 and insertions >= 500
    verdict(
        7,
        ok,
        f"{instances} universes monotone except {non_monotone}; "
        f"{insertions} entrant insertions, {regularity_breaks} raised an incumbent",
    )


def test_criterion_08_manipulation_resistance_on_convex_quotes():
    rng = random.Random(80_001)
    profitable_splits = 0
    splits = 0
    while splits < 500:
        instance = random_convex_instance(rng, max_participants=5)
        principal = rng.choice(instance.participants)
        split = (
            None if rng.random() < 0.5
            else random_shill_split(rng, instance, principal)
        )
        try:
            if run_shill_attack(instance, principal, split=split).profitable:
                profitable_splits += 1
        except PivotalBidderError:
            continue
        splits += 1

    bound_breaks = 0
    rings = 0
    while rings < 120:
        instance = random_convex_instance(rng, max_participants=5)
        losers = [
            p for p in instance.participants
            if clear(instance).allocation.power(p) == 0
        ]
        rng.shuffle(losers)
        ring = {}
        for pid in losers[: rng.randint(1, 3)]:
            cut = lowered_costs(rng, instance, pid)
            if cut is not None:
                ring[pid] = cut
        if not ring:
            continue
        outcome = run_collusion_attack(instance, ring, ring)
        if any(m.payment > m.solo_payment for m in outcome.members):
            bound_breaks += 1
        rings += 1
    ok = profitable_splits == 0 and bound_breaks == 0
    verdict(
        8,
        ok,
        f"{splits} shill splits, {profitable_splits} profitable; "
        f"{rings} rings, {bound_breaks} beat the lower-alone bound",
    )


def test_criterion_09_results_scale_with_the_costs():
    rng = random.Random(90_001)
    bad = 0
    cases = 0
    fixtures = [
        AuctionInstance.build(800, 200, {**CONVEX_LADDERS, **entrants()}),
        AuctionInstance.build(800, 200, {**SAGGING_LADDERS, **entrants()}),
    ]
    for _ in range(30):
        fixtures.append(
            random_convex_instance(rng, max_participants=5).scale_costs(20)
        )
    for instance in fixtures:
        base_clear = clear(instance)
        base_vcg = run_vcg(instance)
        base_core = core_check(instance)
        base_mono = payoff_monotonicity_check(instance)
        for numer, denom in ((1, 2), (9, 10), (3, 1)):
            alpha = Fraction(numer, denom)
            scaled = instance.scale_costs(numer, denom)
            s_clear = clear(scaled)
            s_vcg = run_vcg(scaled)
            s_core = core_check(scaled)
            s_mono = payoff_monotonicity_check(scaled)
            cases += 1
            if not (
                s_clear.allocation == base_clear.allocation
                and s_clear.optimal_cost == alpha * base_clear.optimal_cost
                and all(
                    s_vcg.payment(p) == alpha * base_vcg.payment(p)
                    for p in instance.participants
                )
                and (
                    base_vcg.utilities is None
                    or all(
                        su == alpha * bu
                        for (_, su), (_, bu) in zip(
                            s_vcg.utilities, base_vcg.utilities
                        )
                    )
                )
                and s_core.in_core == base_core.in_core
                and [b.members for b in s_core.blocking]
                == [b.members for b in base_core.blocking]
                and s_mono.monotone == base_mono.monotone
            ):
                bad += 1
    weekly = AuctionInstance.build(
        400,
        200,
        {"A": [(200, 8000), (400, 19000)], "B": [(200, 18000), (400, 38000)]},
    )
    base_table = compare_mechanisms(
        TwoStageInstance(weekly, price_scenarios(50, 20))
    )
    for numer, denom in ((1, 2), (9, 10), (3, 1)):
        alpha = Fraction(numer, denom)
        scaled_price = 50 * numer // denom
        table = compare_mechanisms(
            TwoStageInstance(
                weekly.scale_costs(numer, denom),
                price_scenarios(scaled_price, 20),
            )
        )
        cases += 1
        for side, base_side in (
            (table.flexible, base_table.flexible),
            (table.deterministic, base_table.deterministic),
        ):
            if not (
                side.procured_mw == base_side.procured_mw
                and side.optimal_cost == alpha * base_side.optimal_cost
                and side.pay_as_bid_total == alpha * base_side.pay_as_bid_total
                and side.vcg_total == alpha * base_side.vcg_total
            ):
                bad += 1
    ok = bad == 0 and cases == (len(fixtures) + 1) * 3
    verdict(9, ok, f"{cases} scalings checked, {bad} broke proportionality")


def test_criterion_10_flexible_procurement_pays_less():
    weekly = AuctionInstance.build(
        400,
        200,
        {"A": [(200, 8000), (400, 19000)], "B": [(200, 18000), (400, 38000)]},
        true_costs={"A": [8000, 19000], "B": [18000, 38000]},
    )
    week = TwoStageInstance(weekly, price_scenarios(50, 20))
    table = compare_mechanisms(week)
    flex, det = table.flexible, table.deterministic
    ok = (
        flex.vcg_total < det.vcg_total
        and det.vcg_total >= det.pay_as_bid_total
        and flex.vcg_total == 10000
        and det.vcg_total == 18000
    )
    verdict(
        10,
        ok,
        f"two-stage VCG total {flex.vcg_total} vs fixed-amount {det.vcg_total}; "
        f"fixed-amount VCG >= pay-as-bid ({det.vcg_total} >= {det.pay_as_bid_total})",
    )
