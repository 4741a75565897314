"""Winner determination: cover the demand at minimal offered cost.

The buyer must procure at least the full demand; each participant contributes
either nothing or exactly one of its ladder levels.  Two solvers implement
the same contract:

* ``brute_force_clear`` enumerates every selection of levels.  It exists as
  an independent oracle and for small audits.
* ``clear`` runs a dynamic program over procured power and is the production
  path.

Both break cost ties identically, by the lexicographically smallest
acceptance vector in ascending participant-id order, so their results are
comparable field for field.  Everything here is pure and exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Mapping

from .errors import EnumerationBudgetError
from .model import AuctionInstance, Money, Power

#: Default cap on the number of selections brute force may visit.
DEFAULT_ENUMERATION_BUDGET = 10_000_000


@dataclass(frozen=True)
class Allocation:
    """Accepted power per active participant, zeros included.

    Keeping the zero entries makes two allocations over the same active set
    directly comparable as vectors, which is how ties are defined.
    """

    accepted: tuple[tuple[str, Power], ...]

    def power(self, pid: str) -> Power:
        for owner, p in self.accepted:
            if owner == pid:
                return p
        raise KeyError(f"participant {pid!r} not in allocation")

    @property
    def winners(self) -> tuple[str, ...]:
        return tuple(pid for pid, p in self.accepted if p > 0)

    @property
    def total_power(self) -> Power:
        return sum(p for _, p in self.accepted)

    @property
    def vector(self) -> tuple[Power, ...]:
        """Accepted powers in ascending participant-id order (the tie-break key)."""
        return tuple(p for _, p in self.accepted)

    def as_dict(self) -> dict[str, Power]:
        return dict(self.accepted)


@dataclass(frozen=True)
class ClearingResult:
    """Outcome of winner determination.

    ``optimal_cost`` is None exactly when ``feasible`` is False, in which
    case the allocation is empty.
    """

    allocation: Allocation
    optimal_cost: Money | None
    feasible: bool

    def accepted_bid_cost(self, instance: AuctionInstance, pid: str) -> Money:
        """Offered cost of what this result accepts from ``pid``."""
        return instance.bid_cost(pid, self.allocation.power(pid))


def _active_ladders(instance: AuctionInstance, active: Iterable[str] | None):
    """Ladders of the active participants, ascending by id."""
    if active is None:
        return instance.ladders
    wanted = set(active)
    for pid in wanted:
        instance.ladder(pid)
    return tuple(lad for lad in instance.ladders if lad.participant in wanted)


_INFEASIBLE = ClearingResult(Allocation(()), None, False)


def brute_force_clear(
    instance: AuctionInstance,
    active: Iterable[str] | None = None,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> ClearingResult:
    """Clear by exhaustive enumeration of level selections.

    Visits every way of accepting at most one level per participant, keeping
    the best (cost, acceptance vector) pair.  Branches whose partial cost
    already exceeds the incumbent's cost are skipped; that prunes nothing a
    winner could come from, since costs only grow along a branch.

    Raises EnumerationBudgetError when the selection count
    prod(levels + 1) exceeds ``budget``.
    """
    ladders = _active_ladders(instance, active)
    demand = instance.demand

    space = 1
    for lad in ladders:
        space *= len(lad.levels) + 1
        if space > budget:
            raise EnumerationBudgetError(
                f"{space}+ selections exceed the enumeration budget of {budget}"
            )

    options = [((0, 0),) + lad.levels for lad in ladders]
    n = len(ladders)
    best: tuple[Money, tuple[Power, ...]] | None = None
    chosen: list[Power] = [0] * n

    def walk(j: int, cost: Money, covered: Power):
        nonlocal best
        if best is not None and cost > best[0]:
            return
        if j == n:
            if covered >= demand:
                key = (cost, tuple(chosen))
                if best is None or key < best:
                    best = key
            return
        for power, level_cost in options[j]:
            chosen[j] = power
            walk(j + 1, cost + level_cost, covered + power)
        chosen[j] = 0

    walk(0, 0, 0)
    if best is None:
        return _INFEASIBLE
    cost, vector = best
    accepted = tuple((lad.participant, p) for lad, p in zip(ladders, vector))
    return ClearingResult(Allocation(accepted), cost, True)


def _optimize(
    ladders,
    demand: Power,
    terminal: Callable[[Power], Money | None],
):
    """Shared dynamic program: accept levels, then pay ``terminal`` once.

    ``terminal(w)`` prices ending with ``w`` MW procured (``w`` is capped at
    the demand, surplus beyond it changes nothing) or returns None when that
    ending is not allowed.  Hard coverage is the special case pricing only
    ``w == demand`` at zero; a recourse stage prices shortfalls instead.

    Returns (cost, acceptance vector) with the canonical tie-break, or
    (None, None) when every ending is disallowed.
    """
    grid = demand
    for lad in ladders:
        for p in lad.powers:
            grid = gcd(grid, p)
    if grid == 0:
        grid = 1
    units = demand // grid
    n = len(ladders)

    # cost-to-go[j][u]: best achievable from participant j onward, holding
    # u grid units already procured (capped at the full requirement)
    after = [terminal(u * grid) for u in range(units + 1)]
    tables = [after]
    for j in range(n - 1, -1, -1):
        lad = ladders[j]
        row = []
        for u in range(units + 1):
            best = after[u]  # accept nothing from j
            for p, c in lad.levels:
                nxt = after[min(u + p // grid, units)]
                if nxt is None:
                    continue
                cand = c + nxt
                if best is None or cand < best:
                    best = cand
            row.append(best)
        after = row
        tables.append(row)
    tables.reverse()  # tables[j] is the cost-to-go before participant j

    if tables[0][0] is None:
        return None, None

    # walk forward, always taking the least power that stays optimal: this
    # realises the lexicographically smallest acceptance vector
    vector: list[Power] = []
    u = 0
    for j in range(n):
        target = tables[j][u]
        lad = ladders[j]
        pick = None
        if tables[j + 1][u] == target:
            pick = (0, u)
        else:
            for p, c in lad.levels:
                nu = min(u + p // grid, units)
                nxt = tables[j + 1][nu]
                if nxt is not None and c + nxt == target:
                    pick = (p, nu)
                    break
        assert pick is not None, "reconstruction lost the optimum"
        vector.append(pick[0])
        u = pick[1]
    return tables[0][0], tuple(vector)


def clear(
    instance: AuctionInstance, active: Iterable[str] | None = None
) -> ClearingResult:
    """Clear the auction exactly.

    Minimises total offered cost subject to covering the full demand, with at
    most one accepted level per active participant.  Overshoot is allowed
    when it is cheapest (an indivisible level may exceed what is missing).
    The acceptance vector returned is the canonical one: lexicographically
    smallest, ascending by participant id, among all cost-optimal vectors.
    """
    ladders = _active_ladders(instance, active)
    demand = instance.demand
    cost, vector = _optimize(
        ladders, demand, lambda w: 0 if w == demand else None
    )
    if cost is None:
        return _INFEASIBLE
    accepted = tuple((lad.participant, p) for lad, p in zip(ladders, vector))
    return ClearingResult(Allocation(accepted), cost, True)


class CoalitionCosts:
    """Memoised clearing over subsets of one auction's participants.

    Settlement and certification query the optimum of many overlapping
    subsets; this keeps one result per subset.  Instances are cheap value
    holders, not thread-safe, and should stay confined to one computation.
    """

    def __init__(self, instance: AuctionInstance):
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
            result = clear(self.instance, key)
            self._results[key] = result
            return result

    def cost(self, members: Iterable[str] | None = None) -> Money | None:
        """Optimal cost over a member subset; None when it cannot cover."""
        return self.clearing(members).optimal_cost


def coalition_cost(
    instance: AuctionInstance,
    members: Iterable[str],
    cache: CoalitionCosts | None = None,
) -> Money | None:
    """Optimal procurement cost using only ``members``'s offers.

    Pass a ``CoalitionCosts`` cache when querying many subsets of the same
    instance; without one this is a plain solve.
    """
    if cache is not None:
        if cache.instance != instance:
            raise ValueError("cache belongs to a different instance")
        return cache.cost(members)
    return clear(instance, members).optimal_cost
