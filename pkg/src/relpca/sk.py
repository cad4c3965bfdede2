"""SK combinatory logic with inert atoms, reduced by a fuel-bounded machine.

A term is ``"k"``, ``"s"``, an atom name, or a pair ``(left, right)`` meaning
application. Normal forms are the terms with no redex anywhere. ``normalize``
uses leftmost-outermost order, which finds the normal form whenever one exists.
Fuel is charged for every contraction and every node visited, so the work
done (and the size of any result) is bounded by it.
"""

from __future__ import annotations

import random
from typing import Any, Sequence

from . import terms as T

SKTerm = Any

MAX_DEPTH = 400


class OutOfFuel(Exception):
    pass


def spine(t: SKTerm) -> tuple:
    args = []
    while isinstance(t, tuple):
        args.append(t[1])
        t = t[0]
    args.reverse()
    return t, args


def rebuild(head: SKTerm, args: Sequence[SKTerm]) -> SKTerm:
    for a in args:
        head = (head, a)
    return head


class _Machine:
    __slots__ = ("fuel", "spent")

    def __init__(self, fuel: int):
        self.fuel = fuel
        self.spent = 0

    def tick(self, n: int = 1) -> None:
        self.spent += n
        if self.spent > self.fuel:
            raise OutOfFuel

    def nf(self, t: SKTerm, depth: int = 0) -> SKTerm:
        if depth > MAX_DEPTH:
            raise OutOfFuel
        while True:
            head, args = spine(t)
            self.tick()
            if head == "k" and len(args) >= 2:
                t = rebuild(args[0], args[2:])
            elif head == "s" and len(args) >= 3:
                x, y, z = args[:3]
                t = rebuild(((x, z), (y, z)), args[3:])
            else:
                break
        return rebuild(head, [self.nf(a, depth + 1) for a in args])


def normalize(t: SKTerm, fuel: int) -> tuple:
    """Return ``(normal_form, spent)``; the normal form is None when fuel ran out."""
    m = _Machine(fuel)
    try:
        return m.nf(t), m.spent
    except (OutOfFuel, RecursionError):
        return None, m.spent


def is_normal(t: SKTerm) -> bool:
    head, args = spine(t)
    if head == "k" and len(args) >= 2:
        return False
    if head == "s" and len(args) >= 3:
        return False
    return all(is_normal(a) for a in args)


def atoms_of(t: SKTerm) -> frozenset:
    """Atom names occurring in a term (its support)."""
    if isinstance(t, tuple):
        return atoms_of(t[0]) | atoms_of(t[1])
    if t in ("k", "s"):
        return frozenset()
    return frozenset([t])


def show(t: SKTerm) -> str:
    head, args = spine(t)
    parts = [str(head)]
    for a in args:
        s = show(a)
        parts.append(f"({s})" if isinstance(a, tuple) else s)
    return " ".join(parts)


def read(text: str) -> SKTerm:
    """Inverse of :func:`show`."""
    return from_term(T.parse(text))


def from_term(t: T.Term) -> SKTerm:
    if isinstance(t, T.App):
        return (from_term(t.left), from_term(t.right))
    if isinstance(t, T.Const) and t.value is not None:
        return t.value
    return t.name


def term_size(t: SKTerm) -> int:
    if isinstance(t, tuple):
        return 1 + term_size(t[0]) + term_size(t[1])
    return 1


def random_normal_form(rng: random.Random, budget: int = 6, atoms: Sequence[str] = ()) -> SKTerm:
    """Draw a normal form directly from the normal-form grammar.

    ``budget`` caps the number of leaves. Atoms, when given, may appear as
    inert heads or arguments.
    """
    leaves = ["k", "s", *atoms]
    if budget <= 1:
        return rng.choice(leaves)
    shape = rng.random()
    if shape < 0.3:
        return rng.choice(leaves)
    if shape < 0.55:
        return ("k", random_normal_form(rng, budget - 1, atoms))
    if shape < 0.75:
        return ("s", random_normal_form(rng, budget - 1, atoms))
    if atoms and shape < 0.82:
        return (rng.choice(list(atoms)), random_normal_form(rng, budget - 1, atoms))
    split = rng.randint(1, max(1, budget - 2))
    return (("s", random_normal_form(rng, split, atoms)), random_normal_form(rng, budget - 1 - split, atoms))


def enumerate_normal_forms(max_size: int, atoms: Sequence[str] = ()) -> list:
    """All normal forms with node count at most ``max_size``, smallest first."""
    by_size: dict = {1: ["k", "s", *atoms]}
    for n in range(3, max_size + 1, 2):
        out = []
        for ls in range(1, n - 1, 2):
            rs = n - 1 - ls
            for l in by_size.get(ls, []):
                head, args = spine(l)
                limit = 1 if head == "k" else 2 if head == "s" else None
                if limit is not None and len(args) >= limit:
                    continue
                for r in by_size.get(rs, []):
                    out.append((l, r))
        by_size[n] = out
    result = []
    for n in sorted(by_size):
        result.extend(sorted(by_size[n], key=show))
    return result
