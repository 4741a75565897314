"""Manipulation harnesses: multi-identity bidding and loser collusion.

Both harnesses transform a base auction, settle the transformed one at
exclusion cost, and compare the manipulators' aggregate profit (valued at
their *true* costs) against what honesty would have earned them.
"Profitable" always means strictly better than honesty.

The base instance is never mutated; every transformation builds new values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .mechanism import run_vcg
from .model import AuctionInstance, BidLadder, Money, Power


@dataclass(frozen=True)
class AttackScenario:
    """A base auction plus its manipulated counterpart."""

    kind: str
    base: AuctionInstance
    manipulated: AuctionInstance
    principal: str | None
    identities: tuple[str, ...]


@dataclass(frozen=True)
class MemberOutcome:
    """What one manipulating identity obtained in the transformed auction.

    ``utility`` and ``solo_payment`` are filled for colluders only: shill
    identities have no costs of their own (the principal carries them), and
    the lower-alone payment bound is specific to collusion.
    """

    participant: str
    accepted_power: Power
    payment: Money
    utility: Money | None = None
    solo_payment: Money | None = None


@dataclass(frozen=True)
class AttackVerdict:
    scenario: AttackScenario
    honest_total: Money
    attack_total: Money
    profitable: bool
    members: tuple[MemberOutcome, ...]


def default_shill_split(instance: AuctionInstance, principal: str) -> tuple[BidLadder, ...]:
    """Split a ladder into single-increment identities at price zero.

    One fresh identity per auction increment up to the principal's maximum
    offer, each bidding (increment, 0).  This is the canonical aggressive
    split: zero prices make every identity as acceptable as possible.
    """
    ladder = instance.ladder(principal)
    if not ladder.levels:
        raise ValueError(f"{principal} offers nothing, there is nothing to split")
    count = ladder.powers[-1] // instance.increment
    if count == 0:
        raise ValueError(
            f"{principal}'s maximum offer is below one increment, cannot split"
        )
    taken = set(instance.participants)
    out = []
    for k in range(1, count + 1):
        name = f"{principal}_shill{k}"
        if name in taken:
            raise ValueError(f"identity name {name!r} collides with a participant")
        out.append(BidLadder(name, ((instance.increment, 0),)))
    return tuple(out)


def run_shill_attack(
    instance: AuctionInstance,
    principal: str,
    split: Iterable[BidLadder] | None = None,
) -> AttackVerdict:
    """Evaluate bidding through multiple identities.

    The principal is removed and the split identities bid in its place.
    Its gain is everything the identities are paid, minus its true cost of
    delivering their total accepted power; the comparison point is the
    utility of bidding its true ladder under a single identity.

    Requires the principal's true costs, including one at whatever total the
    identities end up delivering (delivery is the principal's problem, and
    an amount it never priced has no defined cost).
    """
    if instance.true_cost_vector(principal) is None:
        raise ValueError(f"true costs for {principal!r} are required")
    identities = tuple(split) if split is not None else default_shill_split(instance, principal)
    if not identities:
        raise ValueError("a split needs at least one identity")
    taken = set(instance.participants)
    for lad in identities:
        if lad.participant in taken:
            raise ValueError(
                f"identity {lad.participant!r} collides with an existing participant"
            )

    honest_outcome = run_vcg(instance.truthful_for(principal))
    honest_power = honest_outcome.clearing.allocation.power(principal)
    honest_total = honest_outcome.payment(principal) - instance.true_cost(
        principal, honest_power
    )

    manipulated = instance.without([principal]).with_added(identities)
    outcome = run_vcg(manipulated)
    members = []
    total_power = 0
    total_paid = 0
    for lad in identities:
        power = outcome.clearing.allocation.power(lad.participant)
        paid = outcome.payment(lad.participant)
        members.append(MemberOutcome(lad.participant, power, paid))
        total_power += power
        total_paid += paid
    try:
        delivery_cost = instance.true_cost(principal, total_power)
    except KeyError:
        raise ValueError(
            f"{principal} has no true cost at {total_power} MW, the total its "
            f"identities won; the attack's profit is undefined"
        ) from None
    attack_total = total_paid - delivery_cost
    scenario = AttackScenario(
        kind="shill",
        base=instance,
        manipulated=manipulated,
        principal=principal,
        identities=tuple(lad.participant for lad in identities),
    )
    return AttackVerdict(
        scenario=scenario,
        honest_total=honest_total,
        attack_total=attack_total,
        profitable=attack_total > honest_total,
        members=tuple(members),
    )


def run_collusion_attack(
    instance: AuctionInstance,
    colluders: Iterable[str],
    lowered: Mapping[str, Sequence[Money]],
) -> AttackVerdict:
    """Evaluate losers jointly understating their costs.

    Every colluder must have known true costs (an understatement cannot be
    valued otherwise; bids standing in for values are refused), must bid no
    more than those costs after lowering, and must win nothing when everyone
    is truthful.  The verdict also records, per member, what that member
    would have been paid lowering its bid alone: collusion is supposed to
    never beat that.
    """
    group = tuple(sorted(set(colluders)))
    if not group:
        raise ValueError("no colluders given")
    for pid in group:
        if instance.true_cost_vector(pid) is None:
            raise ValueError(
                f"true costs for {pid!r} are required; refusing to read bids as values"
            )
    if set(lowered) != set(group):
        raise ValueError("lowered cost vectors must cover exactly the colluders")

    truthful = instance
    for pid in group:
        truthful = truthful.truthful_for(pid)
    honest_outcome = run_vcg(truthful)
    honest_total = 0
    for pid in group:
        if honest_outcome.clearing.allocation.power(pid) > 0:
            raise ValueError(
                f"{pid} wins under truthful bidding; collusion of losers requires losers"
            )
        honest_total += honest_outcome.payment(pid) - 0

    for pid in group:
        vec = tuple(lowered[pid])
        true_vec = instance.true_cost_vector(pid)
        if any(b > t for b, t in zip(vec, true_vec)):
            raise ValueError(f"{pid}: lowered bids must not exceed true costs")

    manipulated = truthful
    for pid in group:
        manipulated = manipulated.with_bid_costs(pid, lowered[pid])
    outcome = run_vcg(manipulated)

    members = []
    attack_total = 0
    for pid in group:
        power = outcome.clearing.allocation.power(pid)
        paid = outcome.payment(pid)
        utility = paid - instance.true_cost(pid, power)
        solo = run_vcg(truthful.with_bid_costs(pid, lowered[pid]))
        members.append(
            MemberOutcome(
                participant=pid,
                accepted_power=power,
                payment=paid,
                utility=utility,
                solo_payment=solo.payment(pid),
            )
        )
        attack_total += utility
    scenario = AttackScenario(
        kind="collusion",
        base=instance,
        manipulated=manipulated,
        principal=None,
        identities=group,
    )
    return AttackVerdict(
        scenario=scenario,
        honest_total=honest_total,
        attack_total=attack_total,
        profitable=attack_total > honest_total,
        members=tuple(members),
    )
