"""Value types for a reverse procurement auction with conditional offers.

A buyer must procure an exact amount of a divisible good (power, in MW) and
collects sealed offers from sellers.  Each seller submits a ladder of
(power, cost) levels; at most one level per seller can be accepted, i.e. the
levels are mutually exclusive all-or-nothing offers, not increments.

Conventions used throughout the engine:

* money is whole CHF held in plain ``int`` (arbitrary precision, no floats),
* power is whole MW held in plain ``int``,
* every ladder implicitly starts at the zero level: 0 MW at 0 CHF,
* infeasible optima are represented by ``None``, never by a large number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import SpacingError

Money = int
Power = int


@dataclass(frozen=True)
class BidLadder:
    """One seller's conditional offer ladder.

    ``levels`` holds (power, cost) pairs with strictly increasing power.
    Powers must be positive and costs nonnegative; costs are otherwise
    unconstrained (a ladder does not have to be convex, or even monotone).
    An empty ladder is legal and means the seller offers nothing.
    """

    participant: str
    levels: tuple[tuple[Power, Money], ...]

    def __post_init__(self):
        if not self.participant:
            raise ValueError("participant id must be a non-empty string")
        prev = 0
        for power, cost in self.levels:
            if power <= 0:
                raise ValueError(f"{self.participant}: level power {power} must be positive")
            if power <= prev:
                raise ValueError(
                    f"{self.participant}: level powers must be strictly increasing "
                    f"({power} after {prev})"
                )
            if cost < 0:
                raise ValueError(f"{self.participant}: level cost {cost} must be nonnegative")
            prev = power

    @property
    def powers(self) -> tuple[Power, ...]:
        return tuple(p for p, _ in self.levels)

    @property
    def costs(self) -> tuple[Money, ...]:
        return tuple(c for _, c in self.levels)

    def cost_at(self, power: Power) -> Money:
        """Offered cost at an exact level; the implicit zero level costs 0."""
        if power == 0:
            return 0
        for p, c in self.levels:
            if p == power:
                return c
        raise KeyError(f"{self.participant}: no offer level at {power} MW")

    def with_costs(self, costs: Sequence[Money]) -> "BidLadder":
        """Same powers, different costs."""
        if len(costs) != len(self.levels):
            raise ValueError(
                f"{self.participant}: expected {len(self.levels)} costs, got {len(costs)}"
            )
        return BidLadder(self.participant, tuple(zip(self.powers, tuple(costs))))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking one ladder against the bid-format rules.

    ``increasing_margins`` is None when curvature was not evaluated, which
    happens when the grid check already failed.
    """

    participant: str
    spacing_ok: bool
    increasing_margins: bool | None
    findings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.spacing_ok and self.increasing_margins is True


def check_spacing(ladder: BidLadder, increment: Power) -> ValidationReport:
    """Check that a ladder offers exactly the levels m, 2m, ..., Km.

    The clearing rule quantises offers to a common increment m; a conforming
    ladder covers every multiple of m from m up to its maximum, with no gaps
    and no off-grid levels.  Ladders that fail here are still *accepted* by
    the engine (the solver falls back to a finer grid), they just do not
    enjoy the certification guarantees.
    """
    if increment <= 0:
        raise ValueError(f"increment must be positive, got {increment}")
    findings: list[str] = []
    if not ladder.levels:
        return ValidationReport(ladder.participant, False, None, ("ladder offers no levels",))
    for k, power in enumerate(ladder.powers):
        expected = (k + 1) * increment
        if power != expected:
            findings.append(
                f"level {k}: offers {power} MW where the grid expects {expected} MW"
            )
    return ValidationReport(ladder.participant, not findings, None, tuple(findings))


def margins(ladder: BidLadder) -> tuple[Money, ...]:
    """Successive cost differences, counting the implicit zero level.

    Only meaningful on an equal-width ladder, so an uneven grid is refused:
    comparing cost differences taken over unequal power steps says nothing
    about curvature.
    """
    if not ladder.levels:
        return ()
    step = ladder.powers[0]
    for k, power in enumerate(ladder.powers):
        if power != (k + 1) * step:
            raise SpacingError(
                f"{ladder.participant}: levels are not equally spaced "
                f"(level {k} at {power} MW, expected {(k + 1) * step} MW); "
                f"margins are undefined"
            )
    out = []
    prev_cost = 0
    for _, cost in ladder.levels:
        out.append(cost - prev_cost)
        prev_cost = cost
    return tuple(out)


def check_increasing_margins(ladder: BidLadder) -> ValidationReport:
    """Check that marginal costs strictly increase along the ladder.

    The first margin is taken against the implicit zero level.  Strictness is
    deliberate: equal successive margins fail.  Checking single steps is
    enough, because sums of consecutive margins inherit the strict ordering
    for every pair of equal-width spans.

    Raises SpacingError when the ladder is not equally spaced.
    """
    mg = margins(ladder)
    findings = []
    for k in range(1, len(mg)):
        if mg[k] <= mg[k - 1]:
            findings.append(
                f"margin for level {k} ({mg[k]} CHF) does not exceed the previous "
                f"margin ({mg[k - 1]} CHF)"
            )
    if not ladder.levels:
        findings.append("ladder offers no levels")
        return ValidationReport(ladder.participant, False, None, tuple(findings))
    return ValidationReport(ladder.participant, True, not findings, tuple(findings))


def validate_ladder(ladder: BidLadder, increment: Power) -> ValidationReport:
    """Full bid-format check: grid spacing first, then curvature.

    Curvature is only evaluated when the ladder sits on the auction grid;
    otherwise ``increasing_margins`` stays None and the findings say why.
    """
    spacing = check_spacing(ladder, increment)
    if not spacing.spacing_ok:
        return ValidationReport(
            ladder.participant,
            False,
            None,
            spacing.findings + ("margins not evaluated: ladder is off the auction grid",),
        )
    curvature = check_increasing_margins(ladder)
    return ValidationReport(
        ladder.participant, True, curvature.increasing_margins, curvature.findings
    )


def participant_utility(payment: Money, accepted_true_cost: Money) -> Money:
    """Net profit of a seller: what it is paid minus what delivery truly costs."""
    return payment - accepted_true_cost


@dataclass(frozen=True)
class AuctionInstance:
    """A complete sealed-bid procurement auction.

    ``demand`` is the exact amount the buyer must cover; ``increment`` is the
    grid step the auction announced (it must divide the demand).  ``ladders``
    are stored sorted by participant id so that equality, hashing and every
    iteration order are canonical.  ``true_costs`` optionally carries each
    seller's private cost vector, aligned with its ladder levels; settlement
    reports utilities only when they are present.
    """

    demand: Power
    increment: Power
    ladders: tuple[BidLadder, ...]
    true_costs: tuple[tuple[str, tuple[Money, ...]], ...] | None = None
    _by_id: Mapping[str, BidLadder] = field(
        default=None, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        if self.demand < 0:
            raise ValueError(f"demand must be nonnegative, got {self.demand}")
        if self.increment <= 0:
            raise ValueError(f"increment must be positive, got {self.increment}")
        if self.demand % self.increment != 0:
            raise ValueError(
                f"increment {self.increment} does not divide demand {self.demand}"
            )
        ids = [lad.participant for lad in self.ladders]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate participant ids")
        if list(ids) != sorted(ids):
            raise ValueError("ladders must be sorted by participant id; use build()")
        object.__setattr__(self, "_by_id", {lad.participant: lad for lad in self.ladders})
        if self.true_costs is not None:
            known = set(ids)
            for pid, vec in self.true_costs:
                if pid not in known:
                    raise ValueError(f"true costs given for unknown participant {pid!r}")
                if len(vec) != len(self.ladder(pid).levels):
                    raise ValueError(
                        f"{pid}: true cost vector has {len(vec)} entries for "
                        f"{len(self.ladder(pid).levels)} ladder levels"
                    )
                if any(c < 0 for c in vec):
                    raise ValueError(f"{pid}: true costs must be nonnegative")

    @classmethod
    def build(
        cls,
        demand: Power,
        increment: Power,
        ladders: Mapping[str, Sequence[tuple[Power, Money]]] | Iterable[BidLadder],
        true_costs: Mapping[str, Sequence[Money]] | None = None,
    ) -> "AuctionInstance":
        """Convenience constructor taking plain mappings and sequences."""
        if isinstance(ladders, Mapping):
            built = [BidLadder(pid, tuple((p, c) for p, c in lvls)) for pid, lvls in ladders.items()]
        else:
            built = list(ladders)
        built.sort(key=lambda lad: lad.participant)
        tc = None
        if true_costs is not None:
            tc = tuple(sorted((pid, tuple(vec)) for pid, vec in true_costs.items()))
        return cls(demand, increment, tuple(built), tc)

    @property
    def participants(self) -> tuple[str, ...]:
        return tuple(lad.participant for lad in self.ladders)

    def ladder(self, pid: str) -> BidLadder:
        try:
            return self._by_id[pid]
        except KeyError:
            raise KeyError(f"unknown participant {pid!r}") from None

    def bid_cost(self, pid: str, power: Power) -> Money:
        """Offered cost of ``pid`` at an exact accepted power (0 for 0 MW)."""
        return self.ladder(pid).cost_at(power)

    def true_cost_vector(self, pid: str) -> tuple[Money, ...] | None:
        self.ladder(pid)
        if self.true_costs is None:
            return None
        for owner, vec in self.true_costs:
            if owner == pid:
                return vec
        return None

    def true_cost(self, pid: str, power: Power) -> Money:
        """Private cost of ``pid`` delivering an exact accepted power.

        Raises KeyError when no true cost is known at that power.
        """
        if power == 0:
            return 0
        vec = self.true_cost_vector(pid)
        if vec is None:
            raise KeyError(f"no true costs known for participant {pid!r}")
        for (p, _), c in zip(self.ladder(pid).levels, vec):
            if p == power:
                return c
        raise KeyError(f"{pid}: no true cost known at {power} MW")

    def validate(self) -> tuple[ValidationReport, ...]:
        """Bid-format reports for every ladder, in id order."""
        return tuple(validate_ladder(lad, self.increment) for lad in self.ladders)

    # -- transformations (all pure: they return new instances) ---------------

    def with_bid_costs(self, pid: str, costs: Sequence[Money]) -> "AuctionInstance":
        """Replace one participant's offered costs, powers unchanged."""
        new = tuple(
            lad.with_costs(costs) if lad.participant == pid else lad for lad in self.ladders
        )
        self.ladder(pid)
        return AuctionInstance(self.demand, self.increment, new, self.true_costs)

    def without(self, pids: Iterable[str]) -> "AuctionInstance":
        """Drop participants (and their true costs)."""
        gone = set(pids)
        for pid in gone:
            self.ladder(pid)
        keep = tuple(lad for lad in self.ladders if lad.participant not in gone)
        tc = None
        if self.true_costs is not None:
            tc = tuple((pid, vec) for pid, vec in self.true_costs if pid not in gone)
        return AuctionInstance(self.demand, self.increment, keep, tc)

    def with_added(self, ladders: Iterable[BidLadder]) -> "AuctionInstance":
        """Add fresh participants bidding the given ladders (no true costs)."""
        extra = list(ladders)
        merged = sorted(self.ladders + tuple(extra), key=lambda lad: lad.participant)
        return AuctionInstance(self.demand, self.increment, tuple(merged), self.true_costs)

    def truthful_for(self, pid: str) -> "AuctionInstance":
        """Variant where one participant bids exactly its true costs."""
        vec = self.true_cost_vector(pid)
        if vec is None:
            raise KeyError(f"no true costs known for participant {pid!r}")
        return self.with_bid_costs(pid, vec)

    def scale_costs(self, numer: int, denom: int = 1) -> "AuctionInstance":
        """Multiply every offered and true cost by an exact positive rational.

        Raises ValueError when any scaled cost fails to land on a whole CHF;
        money stays integral, always.
        """
        alpha = Fraction(numer, denom)
        if alpha <= 0:
            raise ValueError(f"scale factor must be positive, got {alpha}")

        def scaled(c: Money) -> Money:
            v = c * alpha
            if v.denominator != 1:
                raise ValueError(f"cost {c} * {alpha} is not a whole CHF amount")
            return int(v)

        new = tuple(
            BidLadder(lad.participant, tuple((p, scaled(c)) for p, c in lad.levels))
            for lad in self.ladders
        )
        tc = None
        if self.true_costs is not None:
            tc = tuple((pid, tuple(scaled(c) for c in vec)) for pid, vec in self.true_costs)
        return AuctionInstance(self.demand, self.increment, new, tc)
