"""Seeded random instance builders for audits and property campaigns.

Everything takes an explicit ``random.Random`` so that corpora are
reproducible from a seed alone.  Two families matter:

* ``random_instance`` draws unrestricted auctions (gappy ladders, off-grid
  levels, uncoverable demands included) for solver-versus-oracle audits;
* ``random_convex_instance`` draws auctions whose every ladder passes the
  grid and increasing-margins checks, the regime the certification
  guarantees speak about.
"""

from __future__ import annotations

from random import Random

from .model import AuctionInstance, BidLadder, Money

INCREMENTS = (50, 100, 200, 250)


def _grid_powers(increment: int, count: int) -> tuple[int, ...]:
    return tuple(increment * k for k in range(1, count + 1))


def _random_costs(rng: Random, count: int, cost_cap: int) -> list[Money]:
    """Nondecreasing cost vector bounded by the cap."""
    step_cap = max(1, cost_cap // max(count, 1))
    costs = []
    total = 0
    for _ in range(count):
        total += rng.randint(0, step_cap)
        costs.append(total)
    return costs


def random_instance(
    rng: Random,
    max_participants: int = 8,
    max_levels: int = 4,
    cost_cap: int = 100_000,
    ensure_feasible: bool = False,
    ensure_nonpivotal: bool = False,
    truthful: bool = False,
) -> AuctionInstance:
    """Draw an auction with arbitrary ladder shapes.

    Ladders may sit on the grid, skip multiples, or use off-grid levels.
    Demands may be uncoverable unless ``ensure_feasible``;
    ``ensure_nonpivotal`` additionally keeps the demand coverable without
    any single participant, so exclusion settlement is always defined.
    With ``truthful`` the bids double as the true cost vectors.
    """
    for _ in range(1000):
        increment = rng.choice(INCREMENTS)
        n = rng.randint(1, max_participants)
        ladders = {}
        for i in range(1, n + 1):
            count = rng.randint(1, max_levels)
            shape = rng.random()
            if shape < 0.6:
                powers = _grid_powers(increment, count)
            elif shape < 0.9:
                # on-grid multiples with gaps, like a lone maximum-power offer
                pool = [increment * k for k in range(1, max_levels + 3)]
                powers = tuple(sorted(rng.sample(pool, count)))
            else:
                # off-grid levels; the solver falls back to a finer grid
                half = max(increment // 2, 25)
                pool = [half * k for k in range(1, 2 * max_levels + 3)]
                powers = tuple(sorted(rng.sample(pool, count)))
            costs = _random_costs(rng, count, cost_cap)
            ladders[f"P{i}"] = list(zip(powers, costs))

        supply = sum(max(p for p, _ in lvls) for lvls in ladders.values())
        biggest = max(max(p for p, _ in lvls) for lvls in ladders.values())
        if ensure_nonpivotal:
            available = supply - biggest
        elif ensure_feasible:
            available = supply
        else:
            available = supply + 2 * increment
        if available < increment:
            if ensure_feasible or ensure_nonpivotal:
                continue  # cannot host a positive demand; redraw
            available = increment
        demand = increment * rng.randint(1, available // increment)
        true_costs = {pid: [c for _, c in lvls] for pid, lvls in ladders.items()} if truthful else None
        return AuctionInstance.build(demand, increment, ladders, true_costs)
    raise RuntimeError("could not draw a conforming instance in 1000 attempts")


def random_convex_ladder(
    rng: Random,
    pid: str,
    increment: int,
    levels: int,
    first_margin_cap: int = 2000,
    gap_cap: int = 500,
) -> BidLadder:
    """Full-grid ladder with strictly increasing margins."""
    margin = rng.randint(1, first_margin_cap)
    costs = []
    total = 0
    for _ in range(levels):
        total += margin
        costs.append(total)
        margin += rng.randint(1, gap_cap)
    return BidLadder(pid, tuple(zip(_grid_powers(increment, levels), costs)))


def random_convex_instance(
    rng: Random,
    max_participants: int = 6,
    max_levels: int = 4,
    ensure_nonpivotal: bool = True,
    truthful: bool = True,
) -> AuctionInstance:
    """Draw an auction whose every ladder passes both bid-format checks."""
    for _ in range(1000):
        increment = rng.choice(INCREMENTS)
        n = rng.randint(2, max_participants)
        ladders = [
            random_convex_ladder(rng, f"P{i}", increment, rng.randint(1, max_levels))
            for i in range(1, n + 1)
        ]
        supply = sum(lad.powers[-1] for lad in ladders)
        biggest = max(lad.powers[-1] for lad in ladders)
        available = supply - biggest if ensure_nonpivotal else supply
        if available < increment:
            continue
        demand = increment * rng.randint(1, available // increment)
        true_costs = {lad.participant: list(lad.costs) for lad in ladders} if truthful else None
        return AuctionInstance.build(demand, increment, ladders, true_costs)
    raise RuntimeError("could not draw a conforming instance in 1000 attempts")


def random_deviation(rng: Random, instance: AuctionInstance, pid: str) -> list[Money]:
    """An arbitrary nonnegative cost vector over one ladder's powers."""
    ladder = instance.ladder(pid)
    cap = max((c for c in ladder.costs), default=0) * 2 + 1000
    return [rng.randint(0, cap) for _ in ladder.levels]


def lowered_costs(rng: Random, instance: AuctionInstance, pid: str) -> list[Money] | None:
    """A convexity-preserving understatement of one ladder's costs.

    Returns None when the ladder cannot be lowered at all (its first level
    is already free).  Two shapes are drawn from: shifting every cost down
    uniformly, which keeps all margins but the first, and tapering margins
    down linearly, which keeps their strict increase when the taper stays
    below the smallest margin gap.
    """
    ladder = instance.ladder(pid)
    costs = list(ladder.costs)
    if not costs or costs[0] == 0:
        return None
    if len(costs) >= 2 and rng.random() < 0.5:
        gaps = [
            (costs[k] - costs[k - 1]) - (costs[k - 1] - (costs[k - 2] if k >= 2 else 0))
            for k in range(1, len(costs))
        ]
        margin_budget = min(gaps) - 1
        floor_budget = min(2 * costs[k - 1] // (k * (k + 1)) for k in range(1, len(costs) + 1))
        cap = min(margin_budget, floor_budget)
        if cap >= 1:
            t = rng.randint(1, cap)
            return [c - t * (k + 1) * (k + 2) // 2 for k, c in enumerate(costs)]
    t = rng.randint(1, costs[0])
    return [c - t for c in costs]


def random_shill_split(
    rng: Random, instance: AuctionInstance, principal: str
) -> tuple[BidLadder, ...]:
    """A randomised multi-identity split of one participant's offer.

    Identities are fresh single-level offers of one increment each, at small
    random prices (price zero included); each trivially passes both
    bid-format checks.  The identity count varies up to the principal's
    maximum offer.
    """
    ladder = instance.ladder(principal)
    biggest = ladder.powers[-1] // instance.increment
    count = rng.randint(1, max(1, biggest))
    price_cap = max(ladder.costs) // max(1, 2 * count) if ladder.costs else 0
    return tuple(
        BidLadder(
            f"{principal}_shill{k}",
            ((instance.increment, rng.randint(0, max(0, price_cap))),),
        )
        for k in range(1, count + 1)
    )
