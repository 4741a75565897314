"""Settlement rules on top of exact winner determination.

Two payment rules are implemented.  Pay-as-bid hands every winner its own
offered price.  The exclusion-cost rule (VCG with the Clarke pivot) pays a
winner its offered price plus the harm its absence would cause, i.e. the
difference between the optimal cost without it and with it; under it,
bidding true costs is a dominant strategy and no winner envies its own
truthfulness.

The buyer's side is accounted for too: its utility is the negated total of
payments (minus any expected recourse cost a variant folds in), so that all
utilities together sum to the negated optimal cost when bids are truthful.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .clearing import ClearingResult, CoalitionCosts, clear
from .errors import InfeasibleInstanceError, PivotalBidderError
from .model import AuctionInstance, Money


@dataclass(frozen=True)
class MechanismOutcome:
    """Cleared allocation plus payments under one settlement rule.

    ``utilities`` carries entries only for participants whose true costs are
    known; with no true costs at all it is None rather than zero-filled.
    ``tso_utility`` is the buyer's utility.  ``expected_residual_cost`` stays
    zero in the single-stage model; the two-stage variant records the
    expected recourse spend there.
    """

    rule: str
    clearing: ClearingResult
    payments: tuple[tuple[str, Money], ...]
    utilities: tuple[tuple[str, Money], ...] | None
    tso_utility: Money
    expected_residual_cost: Money = 0

    def payment(self, pid: str) -> Money:
        for owner, q in self.payments:
            if owner == pid:
                return q
        raise KeyError(f"participant {pid!r} has no payment entry")

    def utility(self, pid: str) -> Money:
        if self.utilities is None:
            raise KeyError("no true costs were known, utilities were not computed")
        for owner, u in self.utilities:
            if owner == pid:
                return u
        raise KeyError(f"no true costs were known for participant {pid!r}")

    @property
    def total_payments(self) -> Money:
        return sum(q for _, q in self.payments)


def tso_utility(outcome: MechanismOutcome) -> Money:
    """The buyer's utility: negated payments, minus expected recourse spend."""
    return outcome.tso_utility


def _utilities(
    instance: AuctionInstance, result: ClearingResult, payments: dict[str, Money]
) -> tuple[tuple[str, Money], ...] | None:
    if instance.true_costs is None:
        return None
    out = []
    for pid in instance.participants:
        vec = instance.true_cost_vector(pid)
        if vec is None:
            continue
        delivered = instance.true_cost(pid, result.allocation.power(pid))
        out.append((pid, payments[pid] - delivered))
    return tuple(out)


def run_pay_as_bid(instance: AuctionInstance) -> MechanismOutcome:
    """Clear, then pay every winner its own offered price.

    Raises InfeasibleInstanceError when the offers cannot cover the demand.
    """
    result = clear_or_raise(instance)
    payments = {
        pid: result.accepted_bid_cost(instance, pid) for pid in instance.participants
    }
    return MechanismOutcome(
        rule="pay-as-bid",
        clearing=result,
        payments=tuple(sorted(payments.items())),
        utilities=_utilities(instance, result, payments),
        tso_utility=-sum(payments.values()),
    )


def run_vcg(
    instance: AuctionInstance, costs: CoalitionCosts | None = None
) -> MechanismOutcome:
    """Clear, then settle at exclusion cost (Clarke pivot).

    Each participant is paid its accepted offer plus the increase in optimal
    cost its absence would force on everyone else.  Losers end up at zero:
    dropping a loser changes nothing, so its pivot term vanishes.

    Raises InfeasibleInstanceError when the offers cannot cover the demand,
    and PivotalBidderError when some winner's absence would make the demand
    uncoverable (its exclusion payment would be unbounded).
    """
    if costs is None:
        costs = CoalitionCosts(instance)
    elif costs.instance != instance:
        raise ValueError("cost cache belongs to a different instance")
    result = costs.clearing()
    if not result.feasible:
        raise InfeasibleInstanceError("offered supply cannot cover the demand")
    everyone = set(instance.participants)
    payments: dict[str, Money] = {}
    for pid in instance.participants:
        without = costs.cost(everyone - {pid})
        if without is None:
            raise PivotalBidderError(pid)
        own_bid = result.accepted_bid_cost(instance, pid)
        payments[pid] = own_bid + (without - result.optimal_cost)
    return MechanismOutcome(
        rule="vcg",
        clearing=result,
        payments=tuple(sorted(payments.items())),
        utilities=_utilities(instance, result, payments),
        tso_utility=-sum(payments.values()),
    )


def clear_or_raise(instance: AuctionInstance) -> ClearingResult:
    result = clear(instance)
    if not result.feasible:
        raise InfeasibleInstanceError("offered supply cannot cover the demand")
    return result


@dataclass(frozen=True)
class DeviationProbe:
    """Comparison of truthful bidding against supplied cost deviations."""

    participant: str
    truthful_utility: Money
    deviation_utilities: tuple[Money, ...]
    best_deviation_utility: Money | None
    truthful_is_best: bool


def dominant_strategy_probe(
    instance: AuctionInstance,
    participant: str,
    deviations: Iterable[Sequence[Money]],
) -> DeviationProbe:
    """Probe whether misreporting costs could ever help one participant.

    Holds everyone else's bids fixed, replaces the probed participant's cost
    vector (powers stay put) by each deviation in turn, settles at exclusion
    cost, and values the result against the participant's *true* costs.
    Requires those true costs to be known.
    """

    def utility_under(inst: AuctionInstance) -> Money:
        outcome = run_vcg(inst)
        power = outcome.clearing.allocation.power(participant)
        return outcome.payment(participant) - instance.true_cost(participant, power)

    truthful = utility_under(instance.truthful_for(participant))
    tried = tuple(
        utility_under(instance.with_bid_costs(participant, vec)) for vec in deviations
    )
    best = max(tried) if tried else None
    return DeviationProbe(
        participant=participant,
        truthful_utility=truthful,
        deviation_utilities=tried,
        best_deviation_utility=best,
        truthful_is_best=(best is None or truthful >= best),
    )
