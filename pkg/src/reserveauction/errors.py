"""Exception types shared across the engine.

Everything raised on purpose derives from AuctionError so callers (and the
CLI exit-code mapping) can distinguish engine conditions from plain bugs.
"""

from __future__ import annotations


class AuctionError(Exception):
    """Base class for all engine-level errors."""


class InfeasibleInstanceError(AuctionError):
    """The offered supply cannot cover the requirement, so no outcome exists."""


class PivotalBidderError(AuctionError):
    """A winner's removal leaves the requirement uncoverable.

    The exclusion-cost payment for such a bidder is unbounded, so settlement
    refuses to produce a number for it.
    """

    def __init__(self, participant: str):
        self.participant = participant
        super().__init__(
            f"participant {participant!r} is pivotal: without it the "
            f"requirement cannot be covered, so its exclusion payment is unbounded"
        )


class SpacingError(AuctionError):
    """Ladder levels are not on an equal-width grid, so curvature is undefined."""


class EnumerationBudgetError(AuctionError):
    """An exhaustive search would exceed the configured budget."""


class ScenarioInfeasibleError(AuctionError):
    """A residual daily purchase exceeds some scenario's capacity."""


class InstanceParseError(AuctionError):
    """An instance file failed to parse or validate.

    ``location`` carries whatever positional context is available: a line/column
    pair for syntax errors, a key path for semantic ones.
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
