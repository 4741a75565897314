"""Coalitional certification of auction outcomes.

The buyer together with any subset of sellers forms a coalition whose value
is the negated optimal cost of trading among themselves (sellers alone can
produce nothing of value).  An outcome is in the core when no coalition
could do better by walking away.  Checking that directly means touching
every coalition; for exclusion-cost settlement it reduces to one family of
constraints over subsets of the *winners*:

    sum over K of (cost-without-j - cost) <= cost-without-K - cost

for every subset K of winners.  Both routes are implemented; the direct one
doubles as an audit oracle for the reduction.

A second certificate is payoff monotonicity: a participant's utility must
never rise when more sellers show up.  The two certificates stand or fall
together, which ``audit_core_equivalence`` verifies subset by subset.

Cost queries hitting an uncoverable subset return the infinite marker
(None).  A constraint whose right-hand side is infinite holds vacuously; an
infinite left-hand side cannot occur on its own, because removing a single
member of K never makes coverage harder than removing all of K.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .clearing import CoalitionCosts
from .errors import (
    EnumerationBudgetError,
    InfeasibleInstanceError,
    PivotalBidderError,
)
from .model import AuctionInstance, Money


def coalition_value(
    instance: AuctionInstance,
    members: Iterable[str],
    with_buyer: bool = True,
    cache: CoalitionCosts | None = None,
) -> Money | None:
    """Transferable value of a coalition.

    Sellers alone are worth 0.  With the buyer included, the value is the
    negated optimal cost of covering the demand from the members' offers;
    None (minus infinity) when they cannot cover it.
    """
    if not with_buyer:
        return 0
    cost = (cache or CoalitionCosts(instance)).cost(frozenset(members))
    return None if cost is None else -cost


def _require_truthful(instance: AuctionInstance):
    # certification reads bids as values, which is only sound when they agree
    if instance.true_costs is None:
        return
    for pid, vec in instance.true_costs:
        if instance.ladder(pid).costs != vec:
            raise ValueError(
                f"certification assumes truthful bids, but {pid} bids "
                f"differently from its true costs"
            )


@dataclass(frozen=True)
class BlockingCoalition:
    """A winner subset whose joint utility exceeds what its exit would free up."""

    members: tuple[str, ...]
    utility_total: Money
    exit_cost_increase: Money


@dataclass(frozen=True)
class CoreReport:
    in_core: bool
    winners: tuple[str, ...]
    blocking: tuple[BlockingCoalition, ...]
    subsets_checked: int


def _core_verdict(
    costs: CoalitionCosts, members: frozenset[str], max_winners: int
) -> CoreReport:
    result = costs.clearing(members)
    if not result.feasible:
        raise InfeasibleInstanceError(
            "cannot certify an auction whose demand is uncoverable"
        )
    winners = result.allocation.winners
    if len(winners) > max_winners:
        raise EnumerationBudgetError(
            f"{len(winners)} winners means 2^{len(winners)} subsets, "
            f"over the limit of 2^{max_winners}"
        )
    base = result.optimal_cost
    removal_gain = {}
    blocking = []
    checked = 0
    for size in range(1, len(winners) + 1):
        for combo in combinations(winners, size):
            checked += 1
            without = costs.cost(members - set(combo))
            if without is None:
                # exit is vacuously unattractive: leaving would strand the buyer
                continue
            total = 0
            for pid in combo:
                if pid not in removal_gain:
                    solo = costs.cost(members - {pid})
                    if solo is None:
                        raise PivotalBidderError(pid)
                    removal_gain[pid] = solo - base
                total += removal_gain[pid]
            if total > without - base:
                blocking.append(BlockingCoalition(combo, total, without - base))
    return CoreReport(
        in_core=not blocking,
        winners=winners,
        blocking=tuple(blocking),
        subsets_checked=checked,
    )


def core_check(
    instance: AuctionInstance,
    costs: CoalitionCosts | None = None,
    max_winners: int = 20,
) -> CoreReport:
    """Certify the exclusion-cost outcome against every winner-subset exit.

    Uses the reduced constraint family, so only subsets of winners are
    enumerated.  Bids are read as true values; instances carrying true costs
    different from the bids are refused.
    """
    _require_truthful(instance)
    if costs is None:
        costs = CoalitionCosts(instance)
    return _core_verdict(costs, frozenset(instance.participants), max_winners)


@dataclass(frozen=True)
class DirectCoreCheck:
    """Definition-based core verdict; exists to audit the reduced check."""

    in_core: bool
    violations: tuple[tuple[str, ...], ...]
    coalitions_checked: int


def core_check_direct(
    instance: AuctionInstance,
    costs: CoalitionCosts | None = None,
    max_participants: int = 16,
) -> DirectCoreCheck:
    """Check the core by enumerating every coalition.

    Walks all seller subsets, with and without the buyer, comparing coalition
    value against the members' settled utilities.  Exponential in the number
    of participants, hence the budget, and undefined when some winner's
    exclusion payment is unbounded.
    """
    _require_truthful(instance)
    if costs is None:
        costs = CoalitionCosts(instance)
    everyone = instance.participants
    if len(everyone) > max_participants:
        raise EnumerationBudgetError(
            f"{len(everyone)} participants means 2^{len(everyone) + 1} coalitions, "
            f"over the limit of 2^{max_participants + 1}"
        )
    result = costs.clearing()
    if not result.feasible:
        raise InfeasibleInstanceError(
            "cannot certify an auction whose demand is uncoverable"
        )
    base = result.optimal_cost
    utility = {}
    for pid in everyone:
        without = costs.cost(frozenset(everyone) - {pid})
        if without is None:
            raise PivotalBidderError(pid)
        utility[pid] = without - base
    buyer_utility = -base - sum(utility.values())

    violations = []
    checked = 0
    for size in range(0, len(everyone) + 1):
        for combo in combinations(everyone, size):
            members_total = sum(utility[pid] for pid in combo)
            # sellers-only coalitions are worth nothing and utilities are
            # nonnegative, but check them anyway: this is the oracle
            checked += 1
            if 0 > members_total:
                violations.append(combo)
            checked += 1
            value = coalition_value(instance, combo, cache=costs)
            if value is not None and value > buyer_utility + members_total:
                violations.append(combo)
    return DirectCoreCheck(
        in_core=not violations,
        violations=tuple(violations),
        coalitions_checked=checked,
    )


@dataclass(frozen=True)
class MonotonicityViolation:
    """One pair of participant sets where an extra entrant raised a payoff.

    The four costs are the optima behind the two utilities:
    utility_before = cost_without_before - cost_before, and likewise after.
    """

    participant: str
    before_members: tuple[str, ...]
    after_members: tuple[str, ...]
    utility_before: Money
    utility_after: Money
    cost_without_before: Money
    cost_before: Money
    cost_without_after: Money
    cost_after: Money


@dataclass(frozen=True)
class MonotonicityReport:
    monotone: bool
    universe: tuple[str, ...]
    violations: tuple[MonotonicityViolation, ...]
    pairs_checked: int
    pairs_skipped: int


def _cost_oracle(instance, costs):
    if costs is not None:
        return costs
    if isinstance(instance, AuctionInstance):
        return CoalitionCosts(instance)
    from .twostage import TwoStageCosts, TwoStageInstance

    if isinstance(instance, TwoStageInstance):
        return TwoStageCosts(instance)
    raise TypeError(f"cannot build a cost oracle for {type(instance).__name__}")


def payoff_monotonicity_check(
    instance,
    members: Iterable[str] | None = None,
    adjacent_only: bool = True,
    max_members: int = 12,
    costs=None,
) -> MonotonicityReport:
    """Check that nobody's utility rises as further sellers are admitted.

    For each participant j and each admitted set S containing it, compare
    j's utility under S with its utility after entrants join.  By default
    only single-entrant steps are compared; chaining them covers any nested
    pair, since utilities fall step by step along an admission chain.  Set
    ``adjacent_only=False`` to compare every nested pair outright.

    Pairs whose reference utility is undefined, because S or S minus j
    cannot cover the demand, hold vacuously and are counted as skipped.

    Works on single-stage and two-stage instances alike (utilities read off
    the respective optima); nothing is asserted here about which model makes
    the certificate meaningful.
    """
    costs = _cost_oracle(instance, costs)
    universe = tuple(instance.participants) if members is None else tuple(sorted(members))
    for pid in universe:
        instance.ladder(pid)
    if len(universe) > max_members:
        raise EnumerationBudgetError(
            f"{len(universe)} members is over the monotonicity limit of {max_members}"
        )
    violations = []
    checked = 0
    skipped = 0
    rest_pool = set(universe)
    for j in universe:
        others = sorted(rest_pool - {j})
        for size in range(0, len(others) + 1):
            for combo in combinations(others, size):
                before = frozenset(combo) | {j}
                cost_before = costs.cost(before)
                cost_without_before = costs.cost(before - {j})
                entrants = [i for i in others if i not in combo]
                if adjacent_only:
                    afters = [before | {i} for i in entrants]
                else:
                    afters = [
                        before | set(extra)
                        for k in range(1, len(entrants) + 1)
                        for extra in combinations(entrants, k)
                    ]
                for after in afters:
                    if cost_before is None or cost_without_before is None:
                        skipped += 1
                        continue
                    checked += 1
                    cost_after = costs.cost(after)
                    cost_without_after = costs.cost(after - {j})
                    assert cost_after is not None and cost_without_after is not None, (
                        "a superset cannot be harder to cover than its subset"
                    )
                    u_before = cost_without_before - cost_before
                    u_after = cost_without_after - cost_after
                    if u_after > u_before:
                        violations.append(
                            MonotonicityViolation(
                                participant=j,
                                before_members=tuple(sorted(before)),
                                after_members=tuple(sorted(after)),
                                utility_before=u_before,
                                utility_after=u_after,
                                cost_without_before=cost_without_before,
                                cost_before=cost_before,
                                cost_without_after=cost_without_after,
                                cost_after=cost_after,
                            )
                        )
    return MonotonicityReport(
        monotone=not violations,
        universe=universe,
        violations=tuple(violations),
        pairs_checked=checked,
        pairs_skipped=skipped,
    )


@dataclass(frozen=True)
class CoreEquivalenceAudit:
    """Joint verdict: core over every subset auction vs. monotonicity."""

    universe: tuple[str, ...]
    all_subsets_in_core: bool
    monotone: bool
    equivalent: bool
    non_core_subsets: tuple[tuple[str, ...], ...]
    monotonicity: MonotonicityReport
    subsets_checked: int
    subsets_uncoverable: int


def audit_core_equivalence(
    instance: AuctionInstance,
    members: Iterable[str] | None = None,
    max_members: int = 10,
    adjacent_only: bool = True,
) -> CoreEquivalenceAudit:
    """Verify that the two certificates agree on one instance.

    Core membership of every coverable subset auction must coincide with
    payoff monotonicity over the same universe.  Subsets that cannot cover
    the demand have no outcome to certify and are skipped (counted).  The
    audit reports both verdicts and whether they agree; disagreement on any
    instance means an engine defect, not a property of the instance.
    """
    _require_truthful(instance)
    costs = CoalitionCosts(instance)
    universe = tuple(instance.participants) if members is None else tuple(sorted(members))
    if len(universe) > max_members:
        raise EnumerationBudgetError(
            f"{len(universe)} members is over the audit limit of {max_members}"
        )
    non_core = []
    checked = 0
    uncoverable = 0
    for size in range(0, len(universe) + 1):
        for combo in combinations(universe, size):
            subset = frozenset(combo)
            if costs.cost(subset) is None:
                uncoverable += 1
                continue
            checked += 1
            verdict = _core_verdict(costs, subset, max_winners=len(universe))
            if not verdict.in_core:
                non_core.append(tuple(sorted(subset)))
    mono = payoff_monotonicity_check(
        instance,
        members=universe,
        adjacent_only=adjacent_only,
        max_members=max_members,
        costs=costs,
    )
    all_in_core = not non_core
    return CoreEquivalenceAudit(
        universe=universe,
        all_subsets_in_core=all_in_core,
        monotone=mono.monotone,
        equivalent=(all_in_core == mono.monotone),
        non_core_subsets=tuple(non_core),
        monotonicity=mono,
        subsets_checked=checked,
        subsets_uncoverable=uncoverable,
    )
