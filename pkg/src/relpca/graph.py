"""Scott's graph model, observed through finite levels.

Elements are finite sets of naturals, the combinators ``k`` and ``s`` (given by
decidable membership), and lazy applications of elements. Membership in an
application at level ``L`` follows the graph rule with the argument cut down
to its members below ``L``:

    m ∈ U·V  iff  ∃ finite e ⊆ V_L with ⟨code(e), m⟩ ∈ U

where ``V_L = {j < L | j ∈ V}``, ``code(e) = Σ 2^i`` and
``⟨x, y⟩ = (x+y)(x+y+1)/2 + y``. Two elements are equal at level ``L`` when
they have the same members below ``L``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Union


def pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


def unpair(z: int) -> tuple:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    t = w * (w + 1) // 2
    y = z - t
    return w - y, y


def code(e: Iterable[int]) -> int:
    return sum(1 << i for i in set(e))


def decode(c: int) -> frozenset:
    out = []
    i = 0
    while c:
        if c & 1:
            out.append(i)
        c >>= 1
        i += 1
    return frozenset(out)


def finite_apply(u: Iterable[int], v: frozenset) -> frozenset:
    """Exact graph application of two finite sets."""
    out = set()
    for n in u:
        c, m = unpair(n)
        if decode(c) <= v:
            out.add(m)
    return frozenset(out)


@dataclass(frozen=True)
class Fin:
    items: frozenset

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in sorted(self.items)) + "}"


@dataclass(frozen=True)
class Comb:
    name: str  # "k" or "s"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class GApp:
    fun: "Element"
    arg: "Element"

    def __str__(self) -> str:
        a = str(self.arg)
        if isinstance(self.arg, GApp):
            a = f"({a})"
        return f"{self.fun} {a}"


Element = Union[Fin, Comb, GApp]

GK = Comb("k")
GS = Comb("s")


class GraphLevel:
    """Membership oracle for elements at a fixed level, with memoisation."""

    def __init__(self, level: int):
        self.level = level
        self._memo: dict = {}
        self._obs: dict = {}

    def contains(self, x: Element, n: int) -> bool:
        key = (x, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        res = self._contains(x, n)
        self._memo[key] = res
        return res

    def _contains(self, x: Element, n: int) -> bool:
        if isinstance(x, Fin):
            return n in x.items
        if isinstance(x, Comb):
            c1, rest = unpair(n)
            if x.name == "k":
                _c2, m = unpair(rest)
                return m in decode(c1)
            c2, rest2 = unpair(rest)
            c3, m = unpair(rest2)
            e1, e2, e3 = decode(c1), decode(c2), decode(c3)
            return m in finite_apply(finite_apply(e1, e3), finite_apply(e2, e3))
        arg = self.observe(x.arg)
        if isinstance(x.fun, Fin):
            for z in x.fun.items:
                c, m = unpair(z)
                if m == n and decode(c) <= arg:
                    return True
            return False
        members = sorted(arg)
        for r in range(len(members) + 1):
            for e in itertools.combinations(members, r):
                if self.contains(x.fun, pair(code(e), n)):
                    return True
        return False

    def exact(self, x: Element) -> bool:
        """True when observations of ``x`` below the level are exact.

        Arguments are cut down to their members below the level, which loses
        nothing unless an argument mentions ``k`` or ``s`` (whose members are
        mostly huge codes).
        """
        if isinstance(x, GApp):
            return self.exact(x.fun) and _comb_free(x.arg)
        return True

    def equal(self, x: Element, y: Element) -> bool | None:
        """Equality below the level; None when a difference may be an artefact."""
        if self.observe(x) == self.observe(y):
            return True
        if self.exact(x) and self.exact(y):
            return False
        return None

    def observe(self, x: Element) -> frozenset:
        """Members of ``x`` below the level."""
        hit = self._obs.get(x)
        if hit is None:
            hit = frozenset(j for j in range(self.level) if self.contains(x, j))
            self._obs[x] = hit
        return hit


def _comb_free(x: Element) -> bool:
    if isinstance(x, Comb):
        return False
    if isinstance(x, GApp):
        return _comb_free(x.fun) and _comb_free(x.arg)
    return True
