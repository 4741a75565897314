"""Weekly procurement with a daily recourse market.

The buyer needs a weekly amount of reserve but may cover part of it later on
a daily market whose unit price is uncertain.  A weekly selection x costs
its offered prices plus the expected daily top-up:

    total(x) = offered(x) + sum over scenarios of prob * price * shortfall

where the shortfall is whatever the weekly selection leaves uncovered, the
same in every scenario, and each scenario may cap how much the daily market
can deliver.  Probabilities are exact rationals, so all money amounts here
are ``Fraction`` values; nothing is ever rounded.

Clearing relaxes the hard coverage constraint of the single-stage model into
that terminal recourse cost; settlement mirrors the single-stage rules with
the two-stage optimum in place of the covering optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .clearing import Allocation, ClearingResult, _active_ladders, _optimize
from .errors import (
    InfeasibleInstanceError,
    PivotalBidderError,
    ScenarioInfeasibleError,
)
from .mechanism import MechanismOutcome, run_pay_as_bid, run_vcg
from .model import AuctionInstance, Money, Power


@dataclass(frozen=True)
class Scenario:
    """One daily-market outcome: its odds, unit price, and delivery cap.

    ``daily_capacity`` of None means the daily market can absorb any
    shortfall.
    """

    probability: Fraction
    daily_unit_price: Money
    daily_capacity: Power | None = None
    name: str = ""

    def __post_init__(self):
        p = Fraction(self.probability)
        object.__setattr__(self, "probability", p)
        if not 0 <= p <= 1:
            raise ValueError(f"probability {p} outside [0, 1]")
        if self.daily_unit_price < 0:
            raise ValueError("daily unit price must be nonnegative")
        if self.daily_capacity is not None and self.daily_capacity < 0:
            raise ValueError("daily capacity must be nonnegative")


@dataclass(frozen=True)
class TwoStageInstance:
    """A weekly auction whose requirement may be partly met on a daily market.

    The requirement equals the weekly instance's demand; there is only one
    number, so the two stages cannot disagree about it.
    """

    weekly: AuctionInstance
    scenarios: tuple[Scenario, ...]

    def __post_init__(self):
        if not self.scenarios:
            raise ValueError("at least one scenario is required")
        total = sum((s.probability for s in self.scenarios), Fraction(0))
        if total != 1:
            raise ValueError(f"scenario probabilities sum to {total}, not 1")

    @property
    def requirement(self) -> Power:
        return self.weekly.demand

    @property
    def increment(self) -> Power:
        return self.weekly.increment

    @property
    def participants(self) -> tuple[str, ...]:
        return self.weekly.participants

    def ladder(self, pid: str):
        return self.weekly.ladder(pid)


def expected_daily_price(instance: TwoStageInstance) -> Fraction:
    """Probability-weighted daily unit price."""
    return sum(
        (s.probability * s.daily_unit_price for s in instance.scenarios), Fraction(0)
    )


def _residual_cost(instance: TwoStageInstance, shortfall: Power) -> Fraction | None:
    """Expected cost of buying ``shortfall`` MW daily; None past any cap."""
    if shortfall == 0:
        return Fraction(0)
    for s in instance.scenarios:
        if s.daily_capacity is not None and shortfall > s.daily_capacity:
            return None
    return expected_daily_price(instance) * shortfall


def two_stage_cost(
    instance: TwoStageInstance, weekly_accepted: Mapping[str, Power] | Allocation
) -> Fraction:
    """Total expected cost of a given weekly selection.

    Raises ScenarioInfeasibleError when the selection's shortfall exceeds
    some scenario's daily capacity.
    """
    if isinstance(weekly_accepted, Allocation):
        weekly_accepted = weekly_accepted.as_dict()
    offered = 0
    total = 0
    for pid, power in weekly_accepted.items():
        offered += instance.weekly.bid_cost(pid, power)
        total += power
    shortfall = max(0, instance.requirement - total)
    residual = _residual_cost(instance, shortfall)
    if residual is None:
        raise ScenarioInfeasibleError(
            f"a shortfall of {shortfall} MW exceeds some scenario's daily capacity"
        )
    return offered + residual


def two_stage_clear(
    instance: TwoStageInstance, active: Iterable[str] | None = None
) -> ClearingResult:
    """Choose the weekly selection minimising total expected cost.

    Identical to single-stage clearing except that ending short is allowed
    at the expected daily price of the shortfall (subject to every
    scenario's capacity).  Ties break by the same canonical acceptance
    vector.  The optimal cost is a Fraction.
    """
    ladders = _active_ladders(instance.weekly, active)
    demand = instance.requirement
    cost, vector = _optimize(
        ladders,
        demand,
        lambda w: _residual_cost(instance, demand - w),
    )
    if cost is None:
        return ClearingResult(Allocation(()), None, False)
    accepted = tuple((lad.participant, p) for lad, p in zip(ladders, vector))
    return ClearingResult(Allocation(accepted), Fraction(cost), True)


class TwoStageCosts:
    """Memoised two-stage clearing over participant subsets."""

    def __init__(self, instance: TwoStageInstance):
        self.instance = instance
        self._results: dict[frozenset[str], ClearingResult] = {}

    def clearing(self, members: Iterable[str] | None = None) -> ClearingResult:
        key = (
            frozenset(self.instance.participants)
            if members is None
            else frozenset(members)
        )
        try:
            return self._results[key]
        except KeyError:
            result = two_stage_clear(self.instance, key)
            self._results[key] = result
            return result

    def cost(self, members: Iterable[str] | None = None) -> Fraction | None:
        return self.clearing(members).optimal_cost


def _settle(
    instance: TwoStageInstance,
    rule: str,
    result: ClearingResult,
    payments: dict[str, Money],
) -> MechanismOutcome:
    shortfall = max(0, instance.requirement - result.allocation.total_power)
    residual = _residual_cost(instance, shortfall)
    assert residual is not None, "an optimal selection cannot breach a capacity"
    utilities = None
    if instance.weekly.true_costs is not None:
        utilities = []
        for pid in instance.participants:
            if instance.weekly.true_cost_vector(pid) is None:
                continue
            delivered = instance.weekly.true_cost(
                pid, result.allocation.power(pid)
            )
            utilities.append((pid, payments[pid] - delivered))
        utilities = tuple(utilities)
    return MechanismOutcome(
        rule=rule,
        clearing=result,
        payments=tuple(sorted(payments.items())),
        utilities=utilities,
        tso_utility=-sum(payments.values()) - residual,
        expected_residual_cost=residual,
    )


def two_stage_pay_as_bid(instance: TwoStageInstance) -> MechanismOutcome:
    """Two-stage clearing with winners paid their offered weekly prices."""
    result = two_stage_clear(instance)
    if not result.feasible:
        raise InfeasibleInstanceError(
            "no weekly selection satisfies every scenario's daily capacity"
        )
    payments = {
        pid: result.accepted_bid_cost(instance.weekly, pid)
        for pid in instance.participants
    }
    return _settle(instance, "pay-as-bid", result, payments)


def two_stage_vcg(
    instance: TwoStageInstance, costs: TwoStageCosts | None = None
) -> MechanismOutcome:
    """Two-stage clearing settled at exclusion cost.

    A participant's pivot term is the increase in total *expected* cost its
    absence would force; with unbounded daily capacity that is at most the
    expected daily price of its accepted power, so nobody can be pivotal.
    With caps, pivotal bidders are possible and refused as in the
    single-stage model.
    """
    if costs is None:
        costs = TwoStageCosts(instance)
    elif costs.instance != instance:
        raise ValueError("cost cache belongs to a different instance")
    result = costs.clearing()
    if not result.feasible:
        raise InfeasibleInstanceError(
            "no weekly selection satisfies every scenario's daily capacity"
        )
    everyone = set(instance.participants)
    payments: dict[str, Money] = {}
    for pid in instance.participants:
        without = costs.cost(everyone - {pid})
        if without is None:
            raise PivotalBidderError(pid)
        own_bid = result.accepted_bid_cost(instance.weekly, pid)
        payments[pid] = own_bid + (without - result.optimal_cost)
    return _settle(instance, "vcg", result, payments)


@dataclass(frozen=True)
class ComparisonColumn:
    """One procurement style's totals, shaped like the usual results table."""

    label: str
    procured_mw: Power
    optimal_cost: Money
    pay_as_bid_total: Money
    vcg_total: Money


@dataclass(frozen=True)
class MechanismComparison:
    flexible: ComparisonColumn
    deterministic: ComparisonColumn


def compare_mechanisms(instance: TwoStageInstance) -> MechanismComparison:
    """Settle the same week flexibly and with the weekly amount fixed.

    The flexible column clears the two-stage model.  The deterministic
    column freezes the weekly amount at what the flexible optimum procured
    weekly, then runs the single-stage auction for exactly that amount over
    the same ladders.  Columns report procured weekly MW and the payment
    totals under both rules.
    """
    flex_clear = two_stage_clear(instance)
    if not flex_clear.feasible:
        raise InfeasibleInstanceError(
            "no weekly selection satisfies every scenario's daily capacity"
        )
    flex_pab = two_stage_pay_as_bid(instance)
    flex_vcg = two_stage_vcg(instance)
    procured = flex_clear.allocation.total_power

    det_increment = gcd(instance.increment, procured) or instance.increment
    det_instance = AuctionInstance(
        demand=procured,
        increment=det_increment,
        ladders=instance.weekly.ladders,
        true_costs=instance.weekly.true_costs,
    )
    det_pab = run_pay_as_bid(det_instance)
    det_vcg = run_vcg(det_instance)
    return MechanismComparison(
        flexible=ComparisonColumn(
            label="two-stage",
            procured_mw=procured,
            optimal_cost=flex_clear.optimal_cost,
            pay_as_bid_total=flex_pab.total_payments,
            vcg_total=flex_vcg.total_payments,
        ),
        deterministic=ComparisonColumn(
            label="deterministic",
            procured_mw=det_vcg.clearing.allocation.total_power,
            optimal_cost=det_vcg.clearing.optimal_cost,
            pay_as_bid_total=det_pab.total_payments,
            vcg_total=det_vcg.total_payments,
        ),
    )


def price_scenarios(
    base_price: Money,
    spread_percent: int = 20,
    weights: tuple[Fraction, Fraction, Fraction] | None = None,
    daily_capacity: Power | None = None,
) -> tuple[Scenario, Scenario, Scenario]:
    """Three price scenarios around a reference: low, nominal, high.

    The low and high prices sit ``spread_percent`` below and above the
    reference and must land on whole CHF; equal weights by default.
    """
    if weights is None:
        weights = (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
    if len(weights) != 3:
        raise ValueError("exactly three weights are required")
    out = []
    for name, percent, w in zip(
        ("low", "nominal", "high"),
        (100 - spread_percent, 100, 100 + spread_percent),
        weights,
    ):
        price = Fraction(base_price * percent, 100)
        if price.denominator != 1:
            raise ValueError(
                f"{name} price {price} CHF is not whole; pick a reference "
                f"price divisible by {100 // gcd(100, spread_percent)}"
            )
        out.append(Scenario(Fraction(w), int(price), daily_capacity, name))
    return tuple(out)
