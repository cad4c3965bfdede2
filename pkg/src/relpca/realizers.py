"""Inhabited subobjects of a carrier ("realizer sets") and indexed families of them."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

FINITE = "finite"
PREDICATE = "predicate"
FULL = "full"
PARTIAL = "partial"  # finitely many observed members of an infinite set


class EmptyRealizerSet(ValueError):
    pass


def _key(x: Any) -> str:
    return repr(x)


@dataclass(frozen=True, eq=False)
class RealizerSet:
    """An inhabited set of carrier elements.

    Finite sets are stored deduplicated and sorted by ``repr``, so two finite
    sets compare equal exactly when they have the same members. Predicate sets
    carry a decidable ``test`` and a restartable ``enum``. A full set is the
    whole carrier.
    """

    kind: str
    elements: tuple = ()
    inhabitant: Any = None
    test: Callable[[Any], bool] | None = None
    enum: Callable[[], Iterable] | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind in (FINITE, PARTIAL) and not self.elements:
            raise EmptyRealizerSet("realizer sets must be inhabited")
        if self.kind == PREDICATE and self.test is not None and not self.test(self.inhabitant):
            raise EmptyRealizerSet("inhabitant fails the membership test")

    @classmethod
    def of(cls, elements: Iterable[Any], label: str = "") -> "RealizerSet":
        uniq = {}
        for e in elements:
            uniq.setdefault(_key(e), e)
        items = tuple(uniq[k] for k in sorted(uniq))
        if not items:
            raise EmptyRealizerSet("realizer sets must be inhabited")
        return cls(FINITE, items, items[0], label=label)

    @classmethod
    def full(cls, inhabitant: Any, label: str = "A") -> "RealizerSet":
        return cls(FULL, (), inhabitant, label=label)

    @classmethod
    def predicate(
        cls, test: Callable[[Any], bool], enum: Callable[[], Iterable], inhabitant: Any, label: str
    ) -> "RealizerSet":
        return cls(PREDICATE, (), inhabitant, test, enum, label)

    @classmethod
    def partial(cls, observed: Iterable[Any], label: str = "") -> "RealizerSet":
        base = cls.of(observed)
        return cls(PARTIAL, base.elements, base.inhabitant, label=label)

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def is_full(self) -> bool:
        return self.kind == FULL

    def contains(self, a: Any) -> bool | None:
        """Membership; None when it cannot be decided (partial images)."""
        if self.kind == FULL:
            return True
        if self.kind == FINITE:
            return a in self._index
        if self.kind == PREDICATE:
            r = self.test(a)
            return None if r is None else bool(r)
        if a in self._index:
            return True
        return None

    @property
    def _index(self) -> frozenset:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = frozenset(self.elements)
            object.__setattr__(self, "_idx", idx)
        return idx

    def sample(self, pool: Sequence[Any], draw: Callable[[random.Random], Any], n: int, seed: int) -> list:
        """Deterministic sample of members (all of them when finite)."""
        if self.kind in (FINITE, PARTIAL):
            return list(self.elements)
        out = {_key(self.inhabitant): self.inhabitant}
        if self.kind == PREDICATE and self.enum is not None:
            for e in itertools.islice(self.enum(), n):
                out.setdefault(_key(e), e)
        for e in pool:
            if len(out) >= n:
                break
            if self.contains(e):
                out.setdefault(_key(e), e)
        rng = random.Random(seed)
        tries = 0
        while len(out) < n and tries < 20 * n:
            tries += 1
            e = draw(rng)
            if self.contains(e):
                out.setdefault(_key(e), e)
        return [out[k] for k in sorted(out)]

    def subset_of(self, other: "RealizerSet") -> bool | None:
        """Decide ``self ⊆ other`` for finite self; None if undecidable here."""
        if other.kind == FULL:
            return True
        if self.kind != FINITE:
            if self.kind == other.kind == PREDICATE and self.test is other.test:
                return True
            return None
        answers = [other.contains(e) for e in self.elements]
        if any(a is False for a in answers):
            return False
        if any(a is None for a in answers):
            return None
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RealizerSet):
            return NotImplemented
        if self.kind == FINITE and other.kind == FINITE:
            return self.elements == other.elements
        return self is other or (self.kind == other.kind == FULL and self.label == other.label)

    def __hash__(self) -> int:
        if self.kind == FINITE:
            return hash(self.elements)
        return hash((self.kind, self.label))

    def show(self, show_elem: Callable[[Any], str] = str) -> str:
        if self.kind == FULL:
            return self.label or "A"
        if self.kind == PREDICATE:
            return self.label or "{...}"
        body = ", ".join(show_elem(e) for e in self.elements)
        return "{" + body + ("}" if self.kind == FINITE else ", ...}")


@dataclass(frozen=True)
class Family:
    """A realizer set in an indexed world: one inhabited part per index."""

    parts: tuple

    def __post_init__(self) -> None:
        if not self.parts:
            raise EmptyRealizerSet("a family needs at least one part")

    def part(self, i: int) -> RealizerSet:
        return self.parts[i]

    @property
    def is_finite(self) -> bool:
        return all(p.is_finite for p in self.parts)

    def subset_of(self, other: "Family") -> bool | None:
        answers = [a.subset_of(b) for a, b in zip(self.parts, other.parts)]
        if any(a is False for a in answers):
            return False
        if any(a is None for a in answers):
            return None
        return True

    def show(self, show_elem: Callable[[Any], str] = str) -> str:
        return "(" + "; ".join(p.show(show_elem) for p in self.parts) + ")"


def parts_of(x: Any) -> tuple:
    if isinstance(x, Family):
        return x.parts
    return (x,)


def subsets_upto(pool: Sequence[Any], max_size: int) -> list:
    """All nonempty subsets of ``pool`` with at most ``max_size`` members, as realizer sets."""
    out = []
    for r in range(1, max_size + 1):
        for combo in itertools.combinations(pool, r):
            out.append(RealizerSet.of(combo))
    return out
