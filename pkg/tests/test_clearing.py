"""Winner determination: goldens, oracle equivalence, and invariants."""

import random

import pytest

from reserveauction.clearing import (
    CoalitionCosts,
    brute_force_clear,
    clear,
    coalition_cost,
)
from reserveauction.errors import EnumerationBudgetError
from reserveauction.generators import random_convex_instance, random_instance
from reserveauction.model import AuctionInstance


def pair_auction():
    # two sellers, each offering only the full amount
    return AuctionInstance.build(
        800, 200, {"PP1": [(800, 40000)], "PP2": [(800, 50000)]}
    )


def ladder_auction(extra_entrants=0):
    # two four-level ladders plus optional tiny zero-priced entrants
    ladders = {
        "PP1": [(200, 12000), (400, 25000), (600, 33000), (800, 40000)],
        "PP2": [(200, 12000), (400, 24000), (600, 36000), (800, 50000)],
    }
    for k in range(extra_entrants):
        ladders[f"PP{3 + k}"] = [(200, 0)]
    return AuctionInstance.build(800, 200, ladders)


# -- golden instances --------------------------------------------------------


def test_pair_auction_picks_the_cheaper_full_offer():
    result = clear(pair_auction())
    assert result.feasible
    assert result.optimal_cost == 40000
    assert result.allocation.as_dict() == {"PP1": 800, "PP2": 0}


def test_pair_auction_brute_force_agrees():
    inst = pair_auction()
    assert brute_force_clear(inst) == clear(inst)


def test_zero_priced_entrants_displace_the_block_offer():
    inst = pair_auction().with_added(
        AuctionInstance.build(800, 200, {f"PP{k}": [(200, 0)] for k in range(3, 7)}).ladders
    )
    result = clear(inst)
    assert result.optimal_cost == 0
    assert result.allocation.winners == ("PP3", "PP4", "PP5", "PP6")
    assert result.allocation.power("PP1") == 0


def test_ladder_auction_mixes_levels():
    result = clear(ladder_auction(extra_entrants=1))
    assert result.optimal_cost == 33000
    assert result.allocation.as_dict() == {"PP1": 600, "PP2": 0, "PP3": 200}


def test_ladder_auction_without_entrant():
    result = clear(ladder_auction())
    assert result.optimal_cost == 40000
    assert result.allocation.as_dict() == {"PP1": 800, "PP2": 0}


def test_near_convex_closing_ladders():
    inst = AuctionInstance.build(
        800,
        200,
        {
            "PP1": [(200, 8000), (400, 19000), (600, 30000), (800, 40000)],
            "PP2": [(200, 12000), (400, 24000), (600, 36000), (800, 50000)],
            "PP3": [(200, 0)],
            "PP4": [(200, 0)],
            "PP5": [(200, 0)],
            "PP6": [(200, 0)],
        },
    )
    full = clear(inst)
    assert full.optimal_cost == 0
    assert full.allocation.winners == ("PP3", "PP4", "PP5", "PP6")
    # with one entrant gone the cheapest completion is PP1's first level
    partial = clear(inst, set(inst.participants) - {"PP6"})
    assert partial.optimal_cost == 8000
    assert partial.allocation.as_dict() == {
        "PP1": 200, "PP2": 0, "PP3": 200, "PP4": 200, "PP5": 200,
    }


# -- contract edges ----------------------------------------------------------


def test_infeasible_demand_reports_no_allocation():
    inst = AuctionInstance.build(800, 200, {"A": [(400, 10)]})
    result = clear(inst)
    assert not result.feasible
    assert result.optimal_cost is None
    assert result.allocation.accepted == ()
    assert brute_force_clear(inst) == result


def test_zero_demand_clears_empty_at_zero_cost():
    inst = AuctionInstance.build(0, 200, {"A": [(200, 5)], "B": [(400, 0)]})
    result = clear(inst)
    assert result.feasible
    assert result.optimal_cost == 0
    assert result.allocation.as_dict() == {"A": 0, "B": 0}
    assert brute_force_clear(inst) == result


def test_overshoot_is_allowed_when_cheapest():
    inst = AuctionInstance.build(200, 200, {"A": [(800, 5000)], "B": [(200, 9000)]})
    result = clear(inst)
    assert result.optimal_cost == 5000
    assert result.allocation.as_dict() == {"A": 800, "B": 0}


def test_off_grid_levels_fall_back_to_a_finer_grid():
    inst = AuctionInstance.build(600, 200, {"A": [(300, 5)], "B": [(300, 7)]})
    result = clear(inst)
    assert result.optimal_cost == 12
    assert result.allocation.as_dict() == {"A": 300, "B": 300}
    assert brute_force_clear(inst) == result


def test_cost_ties_break_by_smallest_vector():
    inst = AuctionInstance.build(200, 200, {"A": [(200, 10)], "B": [(200, 10)]})
    result = clear(inst)
    assert result.allocation.as_dict() == {"A": 0, "B": 200}
    assert brute_force_clear(inst) == result


def test_active_subset_restricts_the_auction():
    inst = pair_auction()
    only_pp2 = clear(inst, {"PP2"})
    assert only_pp2.optimal_cost == 50000
    with pytest.raises(KeyError):
        clear(inst, {"PP9"})


def test_brute_force_budget_is_enforced():
    inst = ladder_auction()
    with pytest.raises(EnumerationBudgetError):
        brute_force_clear(inst, budget=10)


# -- solver vs oracle --------------------------------------------------------


def test_solver_matches_oracle_on_random_instances():
    """Same cost, same canonical allocation, same infeasibility verdicts."""
    rng = random.Random(4801)
    infeasible_seen = 0
    for _ in range(300):
        inst = random_instance(rng)
        fast = clear(inst)
        slow = brute_force_clear(inst)
        assert fast == slow, f"solver and oracle disagree on {inst}"
        if not fast.feasible:
            infeasible_seen += 1
    assert infeasible_seen > 0, "corpus never exercised the infeasible path"


# -- structural invariants ---------------------------------------------------


def test_more_participants_never_cost_more():
    rng = random.Random(1302)
    for _ in range(60):
        inst = random_instance(rng, max_participants=5, ensure_feasible=True)
        full = clear(inst).optimal_cost
        members = list(inst.participants)
        rng.shuffle(members)
        sub_cost = clear(inst, members[: rng.randint(0, len(members))]).optimal_cost
        if sub_cost is not None:
            assert sub_cost >= full


def test_convex_grid_auctions_cover_exactly():
    # with every ladder on the grid and margins increasing, overshoot never pays
    rng = random.Random(977)
    for _ in range(80):
        inst = random_convex_instance(rng)
        result = clear(inst)
        assert result.feasible
        assert result.allocation.total_power == inst.demand


def test_uniform_cost_scaling_preserves_allocations():
    rng = random.Random(55)
    for _ in range(40):
        inst = random_instance(rng, ensure_feasible=True)
        inst = inst.scale_costs(10)  # make every cost divisible by 10
        base = clear(inst)
        for numer, denom in ((1, 2), (9, 10), (3, 1)):
            scaled = clear(inst.scale_costs(numer, denom))
            assert scaled.allocation == base.allocation
            assert scaled.optimal_cost * denom == base.optimal_cost * numer


def test_entrant_insertion_never_raises_an_incumbent():
    """On fully convex instances an entrant can only push incumbents down."""
    rng = random.Random(31416)
    for _ in range(60):
        inst = random_convex_instance(rng, max_participants=5)
        cache = CoalitionCosts(inst)
        everyone = inst.participants
        for incumbent_count in range(1, len(everyone)):
            for _ in range(4):
                members = tuple(rng.sample(everyone, incumbent_count))
                entrant = rng.choice([p for p in everyone if p not in members])
                before = cache.clearing(members)
                after = cache.clearing(members + (entrant,))
                if not before.feasible:
                    continue
                for pid in members:
                    assert after.allocation.power(pid) <= before.allocation.power(pid)


def test_coalition_cost_caches_results():
    inst = pair_auction()
    cache = CoalitionCosts(inst)
    first = cache.clearing({"PP1"})
    again = cache.clearing({"PP1"})
    assert first is again
    assert coalition_cost(inst, {"PP1"}, cache) == 40000
    assert coalition_cost(inst, {"PP2"}) == 50000
    with pytest.raises(ValueError):
        coalition_cost(ladder_auction(), {"PP1"}, cache)
