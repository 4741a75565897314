"""Procurement auction engine for indivisible reserve offers.

Exact winner determination over conditional bid ladders, pay-as-bid and
exclusion-cost settlement, coalitional and monotonicity certification,
manipulation harnesses, and a two-stage variant with a daily recourse
market.  All arithmetic is exact: whole-CHF integers, exact rationals where
probabilities enter, and an explicit marker (None) for uncoverable optima.
"""

from .attacks import (
    AttackScenario,
    AttackVerdict,
    MemberOutcome,
    default_shill_split,
    run_collusion_attack,
    run_shill_attack,
)
from .clearing import (
    Allocation,
    ClearingResult,
    CoalitionCosts,
    brute_force_clear,
    clear,
    coalition_cost,
)
from .coalition import (
    BlockingCoalition,
    CoreEquivalenceAudit,
    CoreReport,
    DirectCoreCheck,
    MonotonicityReport,
    MonotonicityViolation,
    audit_core_equivalence,
    coalition_value,
    core_check,
    core_check_direct,
    payoff_monotonicity_check,
)
from .errors import (
    AuctionError,
    EnumerationBudgetError,
    InfeasibleInstanceError,
    InstanceParseError,
    PivotalBidderError,
    ScenarioInfeasibleError,
    SpacingError,
)
from .instancefile import AttackSpec, ParsedFile, load_file, parse_document
from .mechanism import (
    DeviationProbe,
    MechanismOutcome,
    dominant_strategy_probe,
    run_pay_as_bid,
    run_vcg,
    tso_utility,
)
from .model import (
    AuctionInstance,
    BidLadder,
    ValidationReport,
    check_increasing_margins,
    check_spacing,
    margins,
    participant_utility,
    validate_ladder,
)
from .twostage import (
    ComparisonColumn,
    MechanismComparison,
    Scenario,
    TwoStageCosts,
    TwoStageInstance,
    compare_mechanisms,
    expected_daily_price,
    price_scenarios,
    two_stage_clear,
    two_stage_cost,
    two_stage_pay_as_bid,
    two_stage_vcg,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AttackScenario",
    "AttackSpec",
    "AttackVerdict",
    "AuctionError",
    "AuctionInstance",
    "BidLadder",
    "BlockingCoalition",
    "ClearingResult",
    "CoalitionCosts",
    "ComparisonColumn",
    "CoreEquivalenceAudit",
    "CoreReport",
    "DeviationProbe",
    "DirectCoreCheck",
    "EnumerationBudgetError",
    "InfeasibleInstanceError",
    "InstanceParseError",
    "MechanismComparison",
    "MechanismOutcome",
    "MemberOutcome",
    "MonotonicityReport",
    "MonotonicityViolation",
    "ParsedFile",
    "PivotalBidderError",
    "Scenario",
    "ScenarioInfeasibleError",
    "SpacingError",
    "TwoStageCosts",
    "TwoStageInstance",
    "ValidationReport",
    "audit_core_equivalence",
    "brute_force_clear",
    "check_increasing_margins",
    "check_spacing",
    "clear",
    "coalition_cost",
    "coalition_value",
    "compare_mechanisms",
    "core_check",
    "core_check_direct",
    "default_shill_split",
    "dominant_strategy_probe",
    "expected_daily_price",
    "load_file",
    "margins",
    "parse_document",
    "participant_utility",
    "payoff_monotonicity_check",
    "price_scenarios",
    "run_collusion_attack",
    "run_pay_as_bid",
    "run_shill_attack",
    "run_vcg",
    "tso_utility",
    "two_stage_clear",
    "two_stage_cost",
    "two_stage_pay_as_bid",
    "two_stage_vcg",
    "validate_ladder",
]
