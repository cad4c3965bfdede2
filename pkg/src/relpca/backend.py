"""Base worlds: Set, finite powers Set^I and finite slices Set/X.

Objects are finite (or lazily enumerated) carriers. Relations are finite
graphs or decidable predicates with a per-element enumerator. Regular
formulas over relations are checked by enumeration, and the few regular
functors needed for transport act on objects, relations and realizer sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .outcome import Tally, Verdict
from .realizers import Family, RealizerSet, parts_of


class SourceTargetMismatch(ValueError):
    pass


class WorldMismatch(ValueError):
    pass


class UnboundSymbol(KeyError):
    pass


class BudgetRequired(ValueError):
    pass


# --- worlds and objects ----------------------------------------------------


@dataclass(frozen=True)
class World:
    """``Set``, ``Pow`` (finite power Set^I) or ``Slice`` (Set/X for finite X)."""

    kind: str
    index: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in ("Set", "Pow", "Slice"):
            raise ValueError(f"unknown world kind {self.kind}")
        if self.kind != "Set" and not self.index:
            raise ValueError("indexed worlds need a nonempty finite index")

    @classmethod
    def set(cls) -> "World":
        return cls("Set")

    @classmethod
    def pow(cls, index: Iterable[Any]) -> "World":
        return cls("Pow", tuple(index))

    @classmethod
    def slice(cls, base: Iterable[Any]) -> "World":
        return cls("Slice", tuple(base))

    @property
    def width(self) -> int:
        return 1 if self.kind == "Set" else len(self.index)

    def __str__(self) -> str:
        if self.kind == "Set":
            return "Set"
        return f"{self.kind}({','.join(map(str, self.index))})"


SET = World.set()


@dataclass(frozen=True)
class Obj:
    """An object of a world.

    Finite objects list ``elements``. In ``Pow`` worlds an element is a pair
    ``(i, x)`` tagged with its index; in ``Slice`` worlds ``over`` gives the
    base point of each element. Infinite Set objects provide ``enum`` and
    ``test`` instead of a list.
    """

    name: str
    world: World = SET
    elements: tuple | None = ()
    over: tuple = ()  # pairs (element, base point) for slice objects
    enum: Callable[[], Iterable] | None = None
    test: Callable[[Any], bool] | None = None

    @property
    def finite(self) -> bool:
        return self.elements is not None

    def fiber_of(self, x: Any) -> Any:
        if self.world.kind == "Slice":
            return dict(self.over)[x]
        if self.world.kind == "Pow":
            return x[0]
        return None

    def contains(self, x: Any) -> bool:
        if self.elements is not None:
            return x in self.elements
        return bool(self.test(x)) if self.test else True

    def iterate(self, budget: int | None = None) -> tuple:
        """Elements and whether the listing is exhaustive."""
        if self.elements is not None:
            return self.elements, True
        if budget is None:
            raise BudgetRequired(f"object {self.name} is infinite; give a sample budget")
        return tuple(itertools.islice(self.enum(), budget)), False


def finite_obj(name: str, elements: Iterable[Any]) -> Obj:
    return Obj(name, SET, tuple(elements))


def pow_obj(name: str, world: World, parts: Sequence[Iterable[Any]]) -> Obj:
    if world.kind != "Pow" or len(parts) != len(world.index):
        raise WorldMismatch("need one part per index")
    elems = tuple((i, x) for i, p in zip(world.index, parts) for x in p)
    return Obj(name, world, elems)


def slice_obj(name: str, world: World, over: Mapping[Any, Any]) -> Obj:
    if world.kind != "Slice":
        raise WorldMismatch("slice objects live in a slice world")
    for x, i in over.items():
        if i not in world.index:
            raise ValueError(f"fibering map sends {x!r} outside the base")
    return Obj(name, world, tuple(over), tuple(over.items()))


def product_obj(a: Obj, b: Obj) -> Obj:
    """Binary product in the shared world of ``a`` and ``b``."""
    if a.world != b.world:
        raise WorldMismatch("product across worlds")
    w = a.world
    if w.kind == "Set":
        return Obj(f"{a.name}×{b.name}", w, tuple(itertools.product(a.elements, b.elements)))
    if w.kind == "Pow":
        elems = tuple((x[0], (x, y)) for x in a.elements for y in b.elements if x[0] == y[0])
        return Obj(f"{a.name}×{b.name}", w, elems)
    over = {(x, y): a.fiber_of(x) for x in a.elements for y in b.elements if a.fiber_of(x) == b.fiber_of(y)}
    return slice_obj(f"{a.name}×{b.name}", w, over)


def terminal_obj(world: World = SET) -> Obj:
    if world.kind == "Set":
        return finite_obj("1", ["*"])
    if world.kind == "Pow":
        return pow_obj("1", world, [["*"] for _ in world.index])
    return slice_obj("1", world, {i: i for i in world.index})


# --- relations -------------------------------------------------------------


@dataclass(frozen=True)
class Rel:
    """A relation ``source ⇸ target``: a finite graph or a predicate.

    ``forward(a)`` enumerates the related targets of ``a`` when the graph is
    not listed.
    """

    source: Obj
    target: Obj
    pairs: frozenset | None = None
    holds_fn: Callable[[Any, Any], bool] | None = None
    forward_fn: Callable[[Any], Iterable] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.pairs is None and self.holds_fn is None:
            raise ValueError("relation needs pairs or a predicate")
        if self.pairs is not None:
            for a, b in self.pairs:
                if self.source.finite and not self.source.contains(a):
                    raise ValueError(f"{a!r} not in source {self.source.name}")
                if self.target.finite and not self.target.contains(b):
                    raise ValueError(f"{b!r} not in target {self.target.name}")
            w = self.source.world
            if w.kind != "Set":
                for a, b in self.pairs:
                    if self.source.fiber_of(a) != self.target.fiber_of(b):
                        raise ValueError("relation does not respect the indexing")

    @property
    def finite(self) -> bool:
        return self.pairs is not None

    def holds(self, a: Any, b: Any) -> bool:
        if self.pairs is not None:
            return (a, b) in self.pairs
        return bool(self.holds_fn(a, b))

    def forward(self, a: Any) -> tuple:
        if self.pairs is not None:
            return tuple(sorted((b for x, b in self.pairs if x == a), key=repr))
        if self.forward_fn is None:
            raise BudgetRequired("relation has no enumerator")
        return tuple(self.forward_fn(a))

    def is_function(self) -> bool:
        if not (self.finite and self.source.finite):
            return False
        return all(len(self.forward(a)) == 1 for a in self.source.elements)

    def __call__(self, a: Any) -> Any:
        (b,) = self.forward(a)
        return b


def rel(source: Obj, target: Obj, pairs: Iterable[tuple], name: str = "") -> Rel:
    return Rel(source, target, frozenset(pairs), name=name)


def arrow(source: Obj, target: Obj, mapping: Mapping[Any, Any] | Callable[[Any], Any], name: str = "") -> Rel:
    """The graph of a function between finite objects."""
    fn = mapping if callable(mapping) else mapping.__getitem__
    return rel(source, target, ((a, fn(a)) for a in source.elements), name)


def diagonal(obj: Obj) -> Rel:
    if obj.finite:
        return rel(obj, obj, ((a, a) for a in obj.elements), f"δ_{obj.name}")
    return Rel(obj, obj, None, lambda a, b: a == b, lambda a: (a,), f"δ_{obj.name}")


def compose_rel(f: Rel, g: Rel) -> Rel:
    """The relational composite ``g∘f``: ``∃b (f(a,b) ∧ g(b,c))``."""
    if f.target != g.source:
        raise SourceTargetMismatch(f"{f.target.name} ≠ {g.source.name}")
    if f.finite and g.finite:
        by_src: dict = {}
        for b, c in g.pairs:
            by_src.setdefault(b, []).append(c)
        out = {(a, c) for a, b in f.pairs for c in by_src.get(b, ())}
        return Rel(f.source, g.target, frozenset(out), name=f"{g.name}∘{f.name}")

    def forward(a: Any) -> Iterable:
        seen = []
        for b in f.forward(a):
            for c in g.forward(b):
                if c not in seen:
                    seen.append(c)
        return seen

    def holds(a: Any, c: Any) -> bool:
        return any(g.holds(b, c) for b in f.forward(a))

    return Rel(f.source, g.target, None, holds, forward, f"{g.name}∘{f.name}")


def same_graph(f: Rel, g: Rel) -> bool:
    if f.finite and g.finite:
        return f.pairs == g.pairs
    if f.source.finite and f.target.finite:
        return all(
            f.holds(a, b) == g.holds(a, b) for a in f.source.elements for b in f.target.elements
        )
    raise BudgetRequired("cannot compare infinite relations exactly")


@dataclass(frozen=True)
class Factorization:
    image: Obj
    epi: Rel
    mono: Rel


def image_factorization(f: Rel) -> Factorization:
    """Factor a finite function as a surjection followed by an injection."""
    if not f.is_function():
        raise ValueError("image factorisation needs a total function")
    w = f.target.world
    hit = [b for b in f.target.elements if any(f(a) == b for a in f.source.elements)]
    if w.kind == "Slice":
        img = slice_obj(f"im({f.name})", w, {b: f.target.fiber_of(b) for b in hit})
    else:
        img = Obj(f"im({f.name})", w, tuple(hit))
    epi = arrow(f.source, img, lambda a: f(a), f"e_{f.name}")
    mono = arrow(img, f.target, lambda b: b, f"m_{f.name}")
    return Factorization(img, epi, mono)


# --- regular formulas ------------------------------------------------------


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Fn:
    """A function symbol applied to a term: ``f(x)``."""

    name: str
    arg: Any


@dataclass(frozen=True)
class Eq:
    left: Any
    right: Any


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Exists:
    var: str
    sort: str
    body: Any


def conj(*parts: Any) -> And:
    return And(tuple(parts))


@dataclass
class Structure:
    """Interpretation of sorts, relation symbols and function symbols."""

    sorts: Mapping[str, Obj]
    relations: Mapping[str, Any] = field(default_factory=dict)  # Rel, or predicate callable
    functions: Mapping[str, Rel] = field(default_factory=dict)


def _term_value(t: Any, env: Mapping[str, Any], st: Structure) -> Any:
    if isinstance(t, Fn):
        if t.name not in st.functions:
            raise UnboundSymbol(t.name)
        return st.functions[t.name](_term_value(t.arg, env, st))
    if isinstance(t, str):
        if t not in env:
            raise UnboundSymbol(t)
        return env[t]
    return t


def evaluate(phi: Any, env: Mapping[str, Any], st: Structure, budget: int | None) -> bool | None:
    """Truth of a regular formula; None when an existential search ran out."""
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Eq):
        return _term_value(phi.left, env, st) == _term_value(phi.right, env, st)
    if isinstance(phi, Atom):
        if phi.name not in st.relations:
            raise UnboundSymbol(phi.name)
        r = st.relations[phi.name]
        vals = [_term_value(a, env, st) for a in phi.args]
        if isinstance(r, Rel):
            return r.holds(*vals)
        return bool(r(*vals))
    if isinstance(phi, And):
        unknown = False
        for p in phi.parts:
            val = evaluate(p, env, st, budget)
            if val is False:
                return False
            if val is None:
                unknown = True
        return None if unknown else True
    if isinstance(phi, Exists):
        if phi.sort not in st.sorts:
            raise UnboundSymbol(phi.sort)
        elems, exhaustive = st.sorts[phi.sort].iterate(budget)
        unknown = False
        for x in elems:
            val = evaluate(phi.body, {**env, phi.var: x}, st, budget)
            if val:
                return True
            if val is None:
                unknown = True
        return None if (unknown or not exhaustive) else False
    raise TypeError(f"not a regular formula: {phi!r}")


def check_sequent(
    st: Structure,
    hypotheses: Any,
    conclusion: Any,
    context: Mapping[str, str],
    samples: int | None = None,
) -> Verdict:
    """Check ``hypotheses ⊢ conclusion`` over all assignments of the context.

    Finite contexts are enumerated exhaustively. Infinite sorts need a sample
    budget and can only yield Evidence.
    """
    names = list(context)
    domains = []
    exhaustive = True
    for n in names:
        sort = context[n]
        if sort not in st.sorts:
            raise UnboundSymbol(sort)
        elems, full = st.sorts[sort].iterate(samples)
        exhaustive = exhaustive and full
        domains.append(elems)
    tally = Tally(exhaustive=exhaustive)
    for combo in itertools.product(*domains):
        env = dict(zip(names, combo))
        h = evaluate(hypotheses, env, st, samples)
        if h is False:
            tally.ok()
            continue
        c = evaluate(conclusion, env, st, samples)
        if c is True and h is True:
            tally.ok()
        elif c is False and h is True:
            tally.fail({k: repr(v) for k, v in env.items()})
        else:
            tally.unknown({"samples": samples})
    return tally.verdict()


# --- regular functors ------------------------------------------------------


@dataclass(frozen=True)
class RegFunctor:
    """One of the regular functors used for transport.

    ``Identity`` on any world; ``Projection(i)``: Pow(I) → Set;
    ``Pullback``: Set → Slice(I), sending A to I×A; ``Product``: Pow(2) → Set;
    ``Terminal``: Set → Set, constant at the one-point set; ``Swap``:
    Pow(2) → Pow(2), exchanging the two indices; ``Reindex(f)``:
    Slice(J) → Slice(I), pulling back along ``f: I → J`` (the component lists
    f(i) for each i in I). A slice over a finite discrete base is treated as
    the matching power world.
    """

    kind: str
    source: World
    target: World
    component: Any = None

    @classmethod
    def identity(cls, world: World = SET) -> "RegFunctor":
        return cls("Identity", world, world)

    @classmethod
    def projection(cls, world: World, i: Any) -> "RegFunctor":
        if world.kind not in ("Pow", "Slice") or i not in world.index:
            raise WorldMismatch("projection needs a power world and one of its indices")
        return cls("Projection", world, SET, i)

    @classmethod
    def pullback(cls, base: Iterable[Any]) -> "RegFunctor":
        return cls("Pullback", SET, World.slice(base))

    @classmethod
    def product(cls, world: World) -> "RegFunctor":
        if world.kind not in ("Pow", "Slice") or len(world.index) != 2:
            raise WorldMismatch("the product functor acts on Pow(2)")
        return cls("Product", world, SET)

    @classmethod
    def swap(cls, world: World) -> "RegFunctor":
        if world.kind not in ("Pow", "Slice") or len(world.index) != 2:
            raise WorldMismatch("swap acts on Pow(2)")
        return cls("Swap", world, world)

    @classmethod
    def reindex(cls, source: World, target: World, images: Iterable[Any]) -> "RegFunctor":
        images = tuple(images)
        if len(images) != len(target.index) or any(j not in source.index for j in images):
            raise WorldMismatch("reindexing needs one base point of the source per target index")
        return cls("Reindex", source, target, images)

    @classmethod
    def terminal(cls) -> "RegFunctor":
        return cls("Terminal", SET, SET)

    @property
    def position(self) -> int:
        return self.source.index.index(self.component)

    @property
    def positions(self) -> tuple:
        """For Reindex: the source position of each target index."""
        return tuple(self.source.index.index(j) for j in self.component)

    def __str__(self) -> str:
        if self.kind == "Projection":
            return f"Projection({self.component})"
        if self.kind == "Pullback":
            return f"Pullback({','.join(map(str, self.target.index))})"
        if self.kind == "Reindex":
            return f"Reindex({','.join(map(str, self.component))})"
        return self.kind

    # objects and relations

    def on_obj(self, x: Obj) -> Obj:
        if x.world != self.source:
            raise WorldMismatch(f"{x.name} lives in {x.world}, functor expects {self.source}")
        if self.kind == "Identity":
            return x
        if self.kind == "Terminal":
            return finite_obj("1", ["*"])
        if self.kind == "Projection":
            return finite_obj(f"{x.name}_{self.component}", [e for i, e in _tagged(x) if i == self.component])
        if self.kind == "Product":
            i0, i1 = self.source.index
            left = [e for i, e in _tagged(x) if i == i0]
            right = [e for i, e in _tagged(x) if i == i1]
            return finite_obj(f"Π{x.name}", itertools.product(left, right))
        if self.kind == "Swap":
            i0, i1 = self.source.index
            flip = {i0: i1, i1: i0}
            return pow_obj(x.name, World.pow(self.source.index), [[e for i, e in _tagged(x) if i == flip[j]] for j in self.source.index])
        if self.kind == "Reindex":
            tagged = _tagged(x)
            over = {(i, e): i for i, j in zip(self.target.index, self.component) for k, e in tagged if k == j}
            return slice_obj(f"f*{x.name}", self.target, over)
        over = {(i, a): i for i in self.target.index for a in x.elements}
        return slice_obj(f"I*{x.name}", self.target, over)

    def on_rel(self, f: Rel) -> Rel:
        src, tgt = self.on_obj(f.source), self.on_obj(f.target)
        if self.kind == "Identity":
            return f
        if self.kind == "Terminal":
            return rel(src, tgt, [("*", "*")], f"!{f.name}")
        if self.kind == "Projection":
            c = self.component
            return rel(src, tgt, ((a[1], b[1]) for a, b in _tagged_pairs(f) if a[0] == c), f"{f.name}_{c}")
        if self.kind == "Swap":
            i0, i1 = self.source.index
            flip = {i0: i1, i1: i0}
            return rel(src, tgt, (((flip[a[0]], a[1]), (flip[b[0]], b[1])) for a, b in _tagged_pairs(f)), f.name)
        if self.kind == "Product":
            i0, i1 = self.source.index
            g0 = [(a[1], b[1]) for a, b in _tagged_pairs(f) if a[0] == i0]
            g1 = [(a[1], b[1]) for a, b in _tagged_pairs(f) if a[0] == i1]
            return rel(src, tgt, (((a0, a1), (b0, b1)) for a0, b0 in g0 for a1, b1 in g1), f"Π{f.name}")
        if self.kind == "Reindex":
            pairs = _tagged_pairs(f)
            return rel(src, tgt, (((i, a[1]), (i, b[1])) for i, j in zip(self.target.index, self.component) for a, b in pairs if a[0] == j), f"f*{f.name}")
        return rel(src, tgt, (((i, a), (i, b)) for i in self.target.index for a, b in f.pairs), f"I*{f.name}")

    def apply(self, x: Obj | Rel) -> Obj | Rel:
        """Action on an object or a relation."""
        return self.on_obj(x) if isinstance(x, Obj) else self.on_rel(x)

    # realizer sets

    def on_set(self, u: RealizerSet | Family) -> RealizerSet | Family:
        """Action on an inhabited subobject of a carrier."""
        if self.kind == "Identity":
            return u
        if self.kind == "Terminal":
            return RealizerSet.of(["•"])
        if self.kind == "Projection":
            return parts_of(u)[self.position]
        if self.kind == "Swap":
            return Family(tuple(reversed(parts_of(u))))
        if self.kind == "Reindex":
            parts = parts_of(u)
            return Family(tuple(parts[k] for k in self.positions))
        if self.kind == "Pullback":
            if isinstance(u, Family):
                raise WorldMismatch("pullback acts on Set-level realizer sets")
            return Family(tuple(u for _ in self.target.index))
        a, b = parts_of(u)
        if a.is_finite and b.is_finite:
            return RealizerSet.of(itertools.product(a.elements, b.elements))
        return RealizerSet.predicate(
            lambda p: isinstance(p, tuple) and len(p) == 2 and bool(a.contains(p[0])) and bool(b.contains(p[1])),
            lambda: ((x, y) for x in _stream(a) for y in _stream(b)),
            (a.inhabitant, b.inhabitant),
            f"{a.label or 'U'}×{b.label or 'V'}",
        )

    def on_element(self, a: Any) -> Any:
        """Action on a global element: a point of a Set carrier or a family of points."""
        if self.kind == "Identity":
            return a
        if self.kind == "Terminal":
            return "•"
        if self.kind == "Projection":
            return a[self.position]
        if self.kind == "Pullback":
            return tuple(a for _ in self.target.index)
        if self.kind == "Swap":
            return tuple(reversed(a))
        if self.kind == "Reindex":
            return tuple(a[k] for k in self.positions)
        return tuple(a)

    def compose(self, other: "RegFunctor") -> "ComposedFunctor":
        """``other ∘ self``."""
        return ComposedFunctor((self, other))


def _tag(x: Obj, e: Any) -> tuple:
    """``(index, value)`` for an element of a power or slice object."""
    if x.world.kind == "Pow":
        return e
    i = x.fiber_of(e)
    if isinstance(e, tuple) and len(e) == 2 and e[0] == i:
        return e
    return (i, e)


def _tagged(x: Obj) -> list:
    return [_tag(x, e) for e in x.elements]


def _tagged_pairs(f: Rel) -> list:
    return [(_tag(f.source, a), _tag(f.target, b)) for a, b in f.pairs]


def _stream(u: RealizerSet) -> Iterable:
    if u.is_finite:
        return u.elements
    if u.enum is not None:
        return u.enum()
    return [u.inhabitant]


@dataclass(frozen=True)
class ComposedFunctor:
    """A composite of regular functors, applied left to right."""

    steps: tuple

    @property
    def source(self) -> World:
        return self.steps[0].source

    @property
    def target(self) -> World:
        return self.steps[-1].target

    def apply(self, x: Any) -> Any:
        for s in self.steps:
            x = s.apply(x)
        return x

    def on_set(self, u: Any) -> Any:
        for s in self.steps:
            u = s.on_set(u)
        return u

    def on_element(self, a: Any) -> Any:
        for s in self.steps:
            a = s.on_element(a)
        return a

    @property
    def kind(self) -> str:
        return "Composed"

    def __str__(self) -> str:
        return "∘".join(str(s) for s in reversed(self.steps))


def functor_apply(F: RegFunctor | ComposedFunctor, x: Obj | Rel) -> Obj | Rel:
    return F.apply(x)


def pow_diagonal(index: Iterable[Any]) -> ComposedFunctor:
    """Set → Pow(I) obtained as Pullback followed by the slice-to-power identification.

    Slice(I) over a finite discrete I is equivalent to Pow(I); realizer sets are
    families in both, so the composite acts on sets as the pullback does.
    """
    return ComposedFunctor((RegFunctor.pullback(index),))
