"""Reading auction instances from TOML files.

One file describes one auction: the requirement, the increment, the
participants' ladders, and optionally true costs, daily-market scenarios
(which make the instance two-stage), and a manipulation stanza for the
attack harnesses.  The grammar is documented in the README next to the
shipped example files.

Money must be whole integers and probabilities exact rationals written as
strings ("1/3"); floats are rejected outright rather than rounded.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, NoReturn

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import InstanceParseError
from .model import AuctionInstance, BidLadder
from .twostage import Scenario, TwoStageInstance


@dataclass(frozen=True)
class AttackSpec:
    """The manipulation a file asks the harness to evaluate."""

    kind: str
    principal: str | None = None
    split: tuple[BidLadder, ...] | None = None
    losers: tuple[str, ...] = ()
    lowered: Mapping[str, tuple[int, ...]] | None = None


@dataclass(frozen=True)
class ParsedFile:
    instance: AuctionInstance | TwoStageInstance
    attack: AttackSpec | None

    @property
    def weekly(self) -> AuctionInstance:
        inst = self.instance
        return inst.weekly if isinstance(inst, TwoStageInstance) else inst


def _fail(message: str, location: str = "") -> NoReturn:
    raise InstanceParseError(message, location)


def _integer(value: Any, location: str) -> int:
    # bool is an int subclass; a bare "true" in a money field is a mistake
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float):
            _fail("expected a whole number, not a float; money is whole CHF", location)
        _fail(f"expected an integer, got {type(value).__name__}", location)
    return value


def _string(value: Any, location: str) -> str:
    if not isinstance(value, str):
        _fail(f"expected a string, got {type(value).__name__}", location)
    return value


def _table(value: Any, location: str) -> dict:
    if not isinstance(value, dict):
        _fail(f"expected a table, got {type(value).__name__}", location)
    return value


def _levels(raw: Any, location: str) -> tuple[tuple[int, int], ...]:
    if not isinstance(raw, list) or not raw:
        _fail("expected a non-empty array of [power, cost] pairs", location)
    out = []
    for idx, pair in enumerate(raw):
        where = f"{location}[{idx}]"
        if not isinstance(pair, list) or len(pair) != 2:
            _fail("each level is a [power, cost] pair", where)
        out.append((_integer(pair[0], where), _integer(pair[1], where)))
    return tuple(out)


def _ladder(entry: Any, location: str, seen: set[str]) -> tuple[BidLadder, Any]:
    table = _table(entry, location)
    unknown = set(table) - {"id", "levels", "true_costs"}
    if unknown:
        _fail(f"unknown keys {sorted(unknown)}", location)
    if "id" not in table:
        _fail("missing 'id'", location)
    pid = _string(table["id"], f"{location}.id")
    if pid in seen:
        _fail(f"duplicate participant {pid!r}", f"{location}.id")
    seen.add(pid)
    levels = _levels(table.get("levels"), f"{location}.levels")
    try:
        ladder = BidLadder(pid, levels)
    except ValueError as exc:
        _fail(str(exc), f"{location}.levels")
    true_costs = None
    if "true_costs" in table:
        raw = table["true_costs"]
        where = f"{location}.true_costs"
        if not isinstance(raw, list):
            _fail("expected an array of costs", where)
        true_costs = [_integer(c, f"{where}[{k}]") for k, c in enumerate(raw)]
        if len(true_costs) != len(levels):
            _fail(
                f"{len(true_costs)} true costs for {len(levels)} levels", where
            )
    return ladder, true_costs


def _probability(raw: Any, location: str) -> Fraction:
    if isinstance(raw, bool):
        _fail("expected a probability", location)
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            _fail(f"cannot read {raw!r} as an exact rational", location)
    if isinstance(raw, float):
        _fail(
            'floats are inexact; write probabilities as strings like "1/3"',
            location,
        )
    _fail(f"expected a probability, got {type(raw).__name__}", location)


def _scenario(entry: Any, index: int) -> Scenario:
    location = f"scenario[{index}]"
    table = _table(entry, location)
    unknown = set(table) - {"probability", "daily_price", "capacity", "name"}
    if unknown:
        _fail(f"unknown keys {sorted(unknown)}", location)
    for key in ("probability", "daily_price"):
        if key not in table:
            _fail(f"missing '{key}'", location)
    probability = _probability(table["probability"], f"{location}.probability")
    price = _integer(table["daily_price"], f"{location}.daily_price")
    capacity = None
    if "capacity" in table:
        raw = table["capacity"]
        if raw != "unbounded":
            capacity = _integer(raw, f"{location}.capacity")
    name = _string(table.get("name", ""), f"{location}.name")
    try:
        return Scenario(probability, price, capacity, name)
    except ValueError as exc:
        _fail(str(exc), location)


def _attack(raw: Any, participants: tuple[str, ...]) -> AttackSpec:
    table = _table(raw, "attack")
    if "kind" not in table:
        _fail("missing 'kind'", "attack")
    kind = _string(table["kind"], "attack.kind")
    if kind == "shill":
        unknown = set(table) - {"kind", "principal", "split"}
        if unknown:
            _fail(f"unknown keys {sorted(unknown)}", "attack")
        if "principal" not in table:
            _fail("a shill attack names its 'principal'", "attack")
        principal = _string(table["principal"], "attack.principal")
        if principal not in participants:
            _fail(f"unknown participant {principal!r}", "attack.principal")
        split = None
        if "split" in table:
            if not isinstance(table["split"], list) or not table["split"]:
                _fail("expected a non-empty array of identity tables", "attack.split")
            seen: set[str] = set()
            ladders = []
            for idx, entry in enumerate(table["split"]):
                ladder, extra = _ladder(entry, f"attack.split[{idx}]", seen)
                if extra is not None:
                    _fail(
                        "split identities carry no true costs; the principal does",
                        f"attack.split[{idx}]",
                    )
                ladders.append(ladder)
            split = tuple(ladders)
        return AttackSpec(kind="shill", principal=principal, split=split)
    if kind == "collusion":
        unknown = set(table) - {"kind", "losers", "lowered"}
        if unknown:
            _fail(f"unknown keys {sorted(unknown)}", "attack")
        raw_losers = table.get("losers")
        if not isinstance(raw_losers, list) or not raw_losers:
            _fail("a collusion attack lists its 'losers'", "attack.losers")
        losers = tuple(
            _string(pid, f"attack.losers[{k}]") for k, pid in enumerate(raw_losers)
        )
        for pid in losers:
            if pid not in participants:
                _fail(f"unknown participant {pid!r}", "attack.losers")
        lowered_table = _table(table.get("lowered"), "attack.lowered")
        lowered = {}
        for pid, vec in lowered_table.items():
            where = f"attack.lowered.{pid}"
            if not isinstance(vec, list):
                _fail("expected an array of costs", where)
            lowered[pid] = tuple(
                _integer(c, f"{where}[{k}]") for k, c in enumerate(vec)
            )
        if set(lowered) != set(losers):
            _fail("'lowered' must cover exactly the losers", "attack.lowered")
        return AttackSpec(kind="collusion", losers=losers, lowered=lowered)
    _fail(f"unknown attack kind {kind!r}; use 'shill' or 'collusion'", "attack.kind")


def parse_document(data: bytes) -> ParsedFile:
    """Parse one instance document from raw TOML bytes."""
    try:
        doc = tomllib.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise InstanceParseError(f"not UTF-8: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise InstanceParseError(str(exc)) from None

    unknown = set(doc) - {"demand", "increment", "participant", "scenario", "attack"}
    if unknown:
        _fail(f"unknown top-level keys {sorted(unknown)}")
    for key in ("demand", "increment"):
        if key not in doc:
            _fail(f"missing '{key}'")
    demand = _integer(doc["demand"], "demand")
    increment = _integer(doc["increment"], "increment")

    raw_participants = doc.get("participant")
    if not isinstance(raw_participants, list) or not raw_participants:
        _fail("at least one [[participant]] is required", "participant")
    seen: set[str] = set()
    ladders = []
    true_costs = {}
    for idx, entry in enumerate(raw_participants):
        ladder, costs = _ladder(entry, f"participant[{idx}]", seen)
        ladders.append(ladder)
        if costs is not None:
            true_costs[ladder.participant] = costs
    try:
        weekly = AuctionInstance.build(
            demand, increment, ladders, true_costs or None
        )
    except ValueError as exc:
        _fail(str(exc))

    instance: AuctionInstance | TwoStageInstance = weekly
    if "scenario" in doc:
        raw_scenarios = doc["scenario"]
        if not isinstance(raw_scenarios, list) or not raw_scenarios:
            _fail("expected a non-empty array of [[scenario]] tables", "scenario")
        scenarios = tuple(_scenario(s, i) for i, s in enumerate(raw_scenarios))
        try:
            instance = TwoStageInstance(weekly, scenarios)
        except ValueError as exc:
            _fail(str(exc), "scenario")

    attack = _attack(doc["attack"], weekly.participants) if "attack" in doc else None
    return ParsedFile(instance=instance, attack=attack)


def load_file(path: str | Path) -> ParsedFile:
    """Parse the instance file at ``path``."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InstanceParseError(str(exc)) from None
    return parse_document(data)
