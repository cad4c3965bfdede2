"""Terms over a partial applicative structure and the bracket-abstraction compiler.

Terms are variables, constants and binary applications. Application associates
to the left when printed: ``x y z`` means ``(x y) z``. ``size`` is the number of
nodes, so ``x y z`` has size 5.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence, Union

from .outcome import AppOutcome


class UnboundVariable(KeyError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    """A named combinator slot (``k``, ``s``, ...) or a carrier element.

    When ``value`` is None the name refers to a kit slot of the backend.
    """

    name: str
    value: Any = None

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return show(self)


Term = Union[Var, Const, App]

K = Const("k")
S = Const("s")


def app(*parts: Term) -> Term:
    """Left-nested application of one or more terms."""
    if not parts:
        raise ValueError("app needs at least one term")
    out = parts[0]
    for p in parts[1:]:
        out = App(out, p)
    return out


def v(name: str) -> Var:
    return Var(name)


def show(t: Term) -> str:
    if isinstance(t, App):
        r = show(t.right)
        if isinstance(t.right, App):
            r = f"({r})"
        return f"{show(t.left)} {r}"
    return str(t)


def size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + size(t.left) + size(t.right)
    return 1


def app_count(t: Term) -> int:
    if isinstance(t, App):
        return 1 + app_count(t.left) + app_count(t.right)
    return 0


def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, App):
        return free_vars(t.left) | free_vars(t.right)
    return frozenset()


def var_order(t: Term) -> tuple:
    """Variables in order of first occurrence (left to right)."""
    seen: list = []

    def walk(u: Term) -> None:
        if isinstance(u, Var):
            if u.name not in seen:
                seen.append(u.name)
        elif isinstance(u, App):
            walk(u.left)
            walk(u.right)

    walk(t)
    return tuple(seen)


def substitute(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, App):
        return App(substitute(t.left, mapping), substitute(t.right, mapping))
    return t


def replace_consts(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Replace kit-slot constants by terms (used when citing filter generators)."""
    if isinstance(t, Const) and t.value is None and t.name in mapping:
        return mapping[t.name]
    if isinstance(t, App):
        return App(replace_consts(t.left, mapping), replace_consts(t.right, mapping))
    return t


def consts(t: Term) -> frozenset:
    if isinstance(t, Const):
        return frozenset([t.name])
    if isinstance(t, App):
        return consts(t.left) | consts(t.right)
    return frozenset()


# --- bracket abstraction ---------------------------------------------------


def bracket_abstract(x: str, t: Term) -> Term:
    """Compile ``λ*x.t`` with three unoptimised clauses.

    The constant clause ``k·t`` is used for atoms only; compound terms always
    go through ``s``, so no subterm is evaluated before the last argument
    arrives and every proper prefix of an application is defined.
    """
    if isinstance(t, Var) and t.name == x:
        return app(S, K, K)
    if not isinstance(t, App):
        return App(K, t)
    return app(S, bracket_abstract(x, t.left), bracket_abstract(x, t.right))


def abstract(variables: Sequence[str], t: Term) -> Term:
    """Compile ``λ*x1...xn.t``, innermost variable first."""
    out = t
    for x in reversed(list(variables)):
        out = bracket_abstract(x, out)
    return out


def lam(spec: str, constants: Iterable[str] = ()) -> Term:
    r"""Parse and compile a lambda request such as ``\x y. y x``."""
    return parse(spec, constants)


# --- definedness formulas --------------------------------------------------


@dataclass(frozen=True)
class Step:
    """One conjunct ``D(left, right)`` whose result is bound to ``out``."""

    out: str
    left: Any
    right: Any


@dataclass(frozen=True)
class Ref:
    """Reference to an intermediate variable inside a definedness formula."""

    name: str


@dataclass(frozen=True)
class DefinednessFormula:
    steps: tuple
    result: Any

    def __len__(self) -> int:
        return len(self.steps)

    def evaluate(self, apply: Callable[[Any, Any], AppOutcome]) -> AppOutcome:
        env: dict = {}
        spent = 0

        def look(x: Any) -> Any:
            return env[x.name] if isinstance(x, Ref) else x

        for st in self.steps:
            out = apply(look(st.left), look(st.right))
            spent += out.spent
            if not out.defined:
                return AppOutcome(out.status, None, spent)
            env[st.out] = out.value
        return AppOutcome.of(look(self.result), spent)

    def render(self, show_value: Callable[[Any], str] = str) -> str:
        def r(x: Any) -> str:
            return x.name if isinstance(x, Ref) else show_value(x)

        return " ∧ ".join(f"D({r(s.left)},{r(s.right)})" for s in self.steps)


def unfold_definedness(
    t: Term,
    valuation: Mapping[str, Any],
    resolve_const: Callable[[Const], Any] | None = None,
) -> DefinednessFormula:
    """Unfold ``t(a)↓`` into application steps, left to right.

    Every application node contributes exactly one conjunct with a fresh
    intermediate name ``_1``, ``_2``, ...
    """
    steps: list = []
    counter = itertools.count(1)

    def go(u: Term) -> Any:
        if isinstance(u, Var):
            if u.name not in valuation:
                raise UnboundVariable(u.name)
            return valuation[u.name]
        if isinstance(u, Const):
            if u.value is not None:
                return u.value
            if resolve_const is None:
                raise UnboundVariable(u.name)
            return resolve_const(u)
        left = go(u.left)
        right = go(u.right)
        name = f"_{next(counter)}"
        steps.append(Step(name, left, right))
        return Ref(name)

    result = go(t)
    return DefinednessFormula(tuple(steps), result)


def eval_term(pas: Any, t: Term, valuation: Mapping[str, Any] | Sequence[Any] = (), fuel: int | None = None) -> AppOutcome:
    """Evaluate a term in a backend that offers ``apply`` and ``const``.

    A sequence valuation binds variables in order of first occurrence.
    """
    if not isinstance(valuation, Mapping):
        valuation = dict(zip(var_order(t), valuation))
    formula = unfold_definedness(t, valuation, pas.const)
    return formula.evaluate(lambda a, b: pas.apply(a, b, fuel))


# --- enumeration -----------------------------------------------------------


@lru_cache(maxsize=None)
def _shapes(leaves: int) -> tuple:
    """All binary trees with the given number of leaves; leaves are None."""
    if leaves == 1:
        return (None,)
    out = []
    for k in range(1, leaves):
        for l in _shapes(k):
            for r in _shapes(leaves - k):
                out.append((l, r))
    return tuple(out)


def _fill(shape: Any, labels: Iterator[Term]) -> Term:
    if shape is None:
        return next(labels)
    return App(_fill(shape[0], labels), _fill(shape[1], labels))


def enumerate_terms(max_size: int, atoms: Sequence[Term], require_all: bool = False) -> Iterator[Term]:
    """Terms over ``atoms`` with node count at most ``max_size``.

    Order is by size, then lexicographically by printed form. With
    ``require_all`` every atom must occur.
    """
    atoms = list(atoms)
    for n in range(1, max_size + 1, 2):
        leaves = (n + 1) // 2
        if require_all and leaves < len(atoms):
            continue
        batch = []
        for shape in _shapes(leaves):
            for labels in itertools.product(atoms, repeat=leaves):
                if require_all and len(set(labels)) < len(atoms):
                    continue
                batch.append(_fill(shape, iter(labels)))
        batch.sort(key=show)
        yield from batch


# --- parser ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>[()\\.λ]))")


def _tokens(text: str) -> list:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            pos += len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group("id") or m.group("sym")
        out.append((tok, m.start(m.lastindex or 0)))
        pos = m.end()
    return out


def parse(text: str, constants: Iterable[str] = ()) -> Term:
    r"""Parse a term. Juxtaposition is application; ``\x y. t`` is compiled."""
    consts_ = frozenset(constants)
    toks = _tokens(text)
    pos = 0

    def peek() -> str | None:
        return toks[pos][0] if pos < len(toks) else None

    def where() -> int:
        return toks[pos][1] if pos < len(toks) else len(text)

    def expr(bound: frozenset) -> Term:
        nonlocal pos
        if peek() in ("\\", "λ"):
            pos += 1
            names = []
            while peek() not in (".", None):
                tok = peek()
                if not tok[0].isalpha() and tok[0] != "_":
                    raise ParseError("expected variable", where())
                names.append(tok)
                pos += 1
            if peek() != "." or not names:
                raise ParseError("malformed abstraction", where())
            pos += 1
            body = expr(bound | frozenset(names))
            return abstract(names, body)
        items = []
        while peek() not in (None, ")"):
            if peek() in ("\\", "λ"):
                items.append(expr(bound))
                break
            items.append(atom(bound))
        if not items:
            raise ParseError("expected a term", where())
        return app(*items)

    def atom(bound: frozenset) -> Term:
        nonlocal pos
        tok = peek()
        if tok == "(":
            pos += 1
            t = expr(bound)
            if peek() != ")":
                raise ParseError("expected ')'", where())
            pos += 1
            return t
        if tok is None or tok in (")", "."):
            raise ParseError("expected a term", where())
        pos += 1
        if tok in consts_ and tok not in bound:
            return Const(tok)
        return Var(tok)

    t = expr(frozenset())
    if pos != len(toks):
        raise ParseError("trailing input", where())
    return t
