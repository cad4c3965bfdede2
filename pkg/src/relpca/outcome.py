"""Check outcomes shared by every module.

A :class:`Verdict` is the four-valued result of a check. An :class:`AppOutcome`
is the three-valued result of a single application in a backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

PROVEN = "Proven"
EVIDENCE = "Evidence"
REFUTED = "Refuted"
UNKNOWN = "Unknown"

# Lower rank wins when verdicts are conjoined.
_RANK = {REFUTED: 0, UNKNOWN: 1, EVIDENCE: 2, PROVEN: 3}


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check.

    ``checked`` counts the instances that were examined. ``exhaustive`` is true
    only when those instances cover the whole (finite) domain, and only then
    may the kind be Proven.
    """

    kind: str
    checked: int = 0
    exhaustive: bool = True
    counterexample: Any = None
    budget: Any = None
    note: str = ""

    def __post_init__(self) -> None:
        if self.kind not in _RANK:
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        if self.kind == PROVEN and not self.exhaustive:
            raise ValueError("Proven requires an exhaustive check")
        if self.kind == REFUTED and self.counterexample is None:
            raise ValueError("Refuted requires a counterexample")

    @property
    def ok(self) -> bool:
        return self.kind in (PROVEN, EVIDENCE)

    @property
    def proven(self) -> bool:
        return self.kind == PROVEN

    @property
    def refuted(self) -> bool:
        return self.kind == REFUTED

    @classmethod
    def proven_(cls, checked: int = 1, note: str = "") -> "Verdict":
        return cls(PROVEN, checked=checked, note=note)

    @classmethod
    def evidence(cls, checked: int, note: str = "") -> "Verdict":
        return cls(EVIDENCE, checked=checked, exhaustive=False, note=note)

    @classmethod
    def refute(cls, counterexample: Any, checked: int = 1, note: str = "") -> "Verdict":
        return cls(REFUTED, checked=checked, counterexample=counterexample, note=note)

    @classmethod
    def unknown(cls, budget: Any, checked: int = 0, note: str = "") -> "Verdict":
        return cls(UNKNOWN, checked=checked, exhaustive=False, budget=budget, note=note)

    def with_note(self, note: str) -> "Verdict":
        return Verdict(self.kind, self.checked, self.exhaustive, self.counterexample, self.budget, note)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "checked": self.checked, "exhaustive": self.exhaustive}
        if self.counterexample is not None:
            out["counterexample"] = _jsonable(self.counterexample)
        if self.budget is not None:
            out["budget"] = _jsonable(self.budget)
        if self.note:
            out["note"] = self.note
        return out

    def __str__(self) -> str:
        extra = ""
        if self.kind == EVIDENCE:
            extra = f"({self.checked} sampled)"
        elif self.kind == PROVEN:
            extra = f"({self.checked} checked)"
        elif self.kind == REFUTED:
            extra = f"({_jsonable(self.counterexample)})"
        elif self.kind == UNKNOWN:
            extra = f"(budget {_jsonable(self.budget)})"
        return f"{self.kind}{extra}"


def _jsonable(x: Any) -> Any:
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_jsonable(v) for v in x), key=repr)
    return str(x)


def conjoin(verdicts: Iterable[Verdict]) -> Verdict:
    """Combine verdicts of independent sub-checks into one.

    Any refutation wins, then any unknown; the result is Proven only if every
    part is.
    """
    items = list(verdicts)
    if not items:
        return Verdict.proven_(0)
    worst = min(items, key=lambda v: _RANK[v.kind])
    total = sum(v.checked for v in items)
    if worst.kind == PROVEN:
        return Verdict.proven_(total)
    if worst.kind == EVIDENCE:
        return Verdict.evidence(total, worst.note)
    if worst.kind == REFUTED:
        return Verdict.refute(worst.counterexample, total, worst.note)
    return Verdict.unknown(worst.budget, total, worst.note)


@dataclass
class Tally:
    """Accumulates per-instance results of a quantified check.

    The final verdict is Proven only when ``exhaustive`` was declared and no
    instance failed or ran out of budget.
    """

    exhaustive: bool = True
    checked: int = 0
    counterexample: Any = None
    unknown_budget: Any = None
    unknown_count: int = 0
    note: str = ""
    log: list = field(default_factory=list)

    def ok(self, entry: Any = None) -> None:
        self.checked += 1
        if entry is not None:
            self.log.append(entry)

    def fail(self, counterexample: Any) -> None:
        self.checked += 1
        if self.counterexample is None:
            self.counterexample = counterexample

    def unknown(self, budget: Any) -> None:
        self.checked += 1
        self.unknown_count += 1
        if self.unknown_budget is None:
            self.unknown_budget = budget

    def sampled(self) -> None:
        self.exhaustive = False

    def verdict(self) -> Verdict:
        if self.counterexample is not None:
            return Verdict.refute(self.counterexample, self.checked, self.note)
        if self.unknown_budget is not None:
            return Verdict.unknown(self.unknown_budget, self.checked, self.note)
        if self.exhaustive:
            return Verdict.proven_(self.checked, self.note)
        return Verdict.evidence(self.checked, self.note)


VALUE = "value"
UNDEFINED = "undefined"
OUT_OF_FUEL = "unknown"


@dataclass(frozen=True)
class AppOutcome:
    """Result of one application: a value, certified undefinedness, or unknown."""

    status: str
    value: Any = None
    spent: int = 0

    @classmethod
    def of(cls, value: Any, spent: int = 0) -> "AppOutcome":
        return cls(VALUE, value, spent)

    @classmethod
    def undefined(cls) -> "AppOutcome":
        return cls(UNDEFINED)

    @classmethod
    def out_of_fuel(cls, spent: int) -> "AppOutcome":
        return cls(OUT_OF_FUEL, None, spent)

    @property
    def defined(self) -> bool:
        return self.status == VALUE

    @property
    def is_unknown(self) -> bool:
        return self.status == OUT_OF_FUEL
