"""Partial combinatory algebras with filters of realizing sets.

A :class:`Pca` pairs one or more carrier backends (one per index of its world)
with a filter presentation. Realizer sets are :class:`RealizerSet` values in
``Set`` and :class:`Family` values in indexed worlds. Filter membership is
answered by replayable :class:`FilterCertificate` values: a term over cited
generators whose evaluation lands inside the candidate set.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

from . import graph as G
from . import sk
from . import terms as T
from .backend import SET, RegFunctor, World
from .outcome import UNDEFINED, AppOutcome, Tally, Verdict, conjoin
from .realizers import FULL, Family, RealizerSet, parts_of


class CarrierMismatch(ValueError):
    pass


class MalformedCertificate(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    """Resource limits shared by checks and searches."""

    fuel: int = 4000
    term_size: int = 5
    arity: int = 3
    samples: int = 24
    seed: int = 0
    max_assignments: int = 4096

    def but(self, **kw: Any) -> "Budget":
        return Budget(**{**self.__dict__, **kw})

    def to_json(self) -> dict:
        return dict(self.__dict__)


DEFAULT_BUDGET = Budget()

# Derivations of the combinator kit over k and s.
_x, _y, _z = T.Var("x"), T.Var("y"), T.Var("z")
I_TERM = T.abstract(["x"], _x)
KBAR_TERM = T.abstract(["x", "y"], _y)
P_TERM = T.abstract(["x", "y", "z"], T.app(_z, _x, _y))
P0_TERM = T.abstract(["x"], T.App(_x, T.K))
P1_TERM = T.abstract(["x"], T.App(_x, KBAR_TERM))

DERIVATIONS = {"i": I_TERM, "kbar": KBAR_TERM, "p": P_TERM, "p0": P0_TERM, "p1": P1_TERM}
KIT_NAMES = ("k", "s", "i", "kbar", "p", "p0", "p1")
KIT_SPECS = {
    "k": (("x", "y"), _x),
    "s": (("x", "y", "z"), T.app(_x, _z, T.App(_y, _z))),
    "i": (("x",), _x),
    "kbar": (("x", "y"), _y),
    "p": (("x", "y", "z"), T.app(_z, _x, _y)),
}


def expand_kit(t: T.Term) -> T.Term:
    """Replace derived kit constants by their derivations over k and s."""
    return T.replace_consts(t, DERIVATIONS)


# --- carrier backends ------------------------------------------------------


class Pas:
    """A partial applicative structure in Set, with k and s built in."""

    name = "pas"
    exact = False
    finite_elements: tuple | None = None

    def __init__(self) -> None:
        self._kit: dict = {}

    def apply(self, a: Any, b: Any, fuel: int | None = None) -> AppOutcome:
        raise NotImplementedError

    def base(self, name: str) -> Any:
        raise NotImplementedError

    def show(self, a: Any) -> str:
        return str(a)

    def read(self, text: str) -> Any:
        raise NotImplementedError

    def draw(self, rng: random.Random) -> Any:
        raise NotImplementedError

    def pool(self) -> tuple:
        return tuple(self.const(T.Const(n)) for n in KIT_NAMES)

    def eq(self, a: Any, b: Any) -> bool | None:
        """Carrier equality; None when it cannot be decided."""
        return a == b

    def const(self, c: T.Const) -> Any:
        if c.value is not None:
            return c.value
        if c.name in ("k", "s"):
            return self.base(c.name)
        if c.name not in DERIVATIONS:
            raise T.UnboundVariable(c.name)
        if c.name not in self._kit:
            out = T.eval_term(self, DERIVATIONS[c.name], {}, 10**6)
            if not out.defined:
                raise RuntimeError(f"kit element {c.name} did not evaluate")
            self._kit[c.name] = out.value
        return self._kit[c.name]

    def describe(self) -> dict:
        return {"backend": self.name}


class TrivialPas(Pas):
    name = "trivial"
    exact = True
    finite_elements = ("•",)

    def apply(self, a: Any, b: Any, fuel: int | None = None) -> AppOutcome:
        return AppOutcome.of("•")

    def base(self, name: str) -> Any:
        return "•"

    def read(self, text: str) -> Any:
        if text.strip() != "•":
            raise ValueError(f"not an element of the trivial carrier: {text!r}")
        return "•"

    def draw(self, rng: random.Random) -> Any:
        return "•"

    def pool(self) -> tuple:
        return ("•",)


class SkPas(Pas):
    """Closed SK normal forms (optionally with inert atoms), fuel-bounded."""

    name = "sk"

    def __init__(self, fuel: int = 4000, atoms: Sequence[str] = ()):
        super().__init__()
        self.fuel = fuel
        self.atoms = tuple(atoms)
        self._cache: dict = {}

    def apply(self, a: Any, b: Any, fuel: int | None = None) -> AppOutcome:
        fuel = self.fuel if fuel is None else fuel
        key = (a, b)
        hit = self._cache.get(key)
        if hit is not None:
            value, spent = hit
            if value is not None and spent <= fuel:
                return AppOutcome.of(value, spent)
            if value is None and fuel <= spent:
                return AppOutcome.out_of_fuel(fuel)
        nf, spent = sk.normalize((a, b), fuel)
        if len(self._cache) > 200_000:
            self._cache.clear()
        if nf is None:
            self._cache[key] = (None, fuel)
            return AppOutcome.out_of_fuel(spent)
        self._cache[key] = (nf, spent)
        return AppOutcome.of(nf, spent)

    def base(self, name: str) -> Any:
        return name

    def show(self, a: Any) -> str:
        return sk.show(a)

    def read(self, text: str) -> Any:
        t = sk.read(text)
        bad = sk.atoms_of(t) - set(self.atoms)
        if bad or not sk.is_normal(t):
            raise ValueError(f"not a normal form of this carrier: {text!r}")
        return t

    def draw(self, rng: random.Random) -> Any:
        return sk.random_normal_form(rng, rng.randint(1, 6), self.atoms)

    def pool(self) -> tuple:
        return super().pool() + tuple(self.atoms)

    def describe(self) -> dict:
        return {"backend": self.name, "fuel": self.fuel, "atoms": list(self.atoms)}


class GraphPas(Pas):
    """Scott's graph model observed at a fixed level."""

    name = "graph"

    def __init__(self, level: int = 8):
        super().__init__()
        self.level = level
        self.oracle = G.GraphLevel(level)

    def apply(self, a: Any, b: Any, fuel: int | None = None) -> AppOutcome:
        return AppOutcome.of(G.GApp(a, b))

    def base(self, name: str) -> Any:
        return G.GK if name == "k" else G.GS

    def eq(self, a: Any, b: Any) -> bool | None:
        return self.oracle.equal(a, b)

    def read(self, text: str) -> Any:
        text = text.strip()
        if text in ("k", "s"):
            return self.base(text)
        if text.startswith("{") and text.endswith("}"):
            body = text[1:-1].strip()
            return G.Fin(frozenset(int(p) for p in body.split(",") if p.strip()))
        raise ValueError(f"cannot read graph-model element {text!r}")

    def draw(self, rng: random.Random) -> Any:
        # only finite sets below the level: those are observed exactly
        n = rng.randint(0, 3)
        return G.Fin(frozenset(rng.sample(range(self.level), n)))

    def pool(self) -> tuple:
        return (G.Fin(frozenset()), G.Fin(frozenset({0})), G.Fin(frozenset({1, 2})))

    def describe(self) -> dict:
        return {"backend": self.name, "level": self.level}


class ProductPas(Pas):
    """Coordinatewise application on pairs."""

    name = "product"

    def __init__(self, left: Pas, right: Pas):
        super().__init__()
        self.left = left
        self.right = right
        self.exact = left.exact and right.exact
        if left.finite_elements and right.finite_elements:
            self.finite_elements = tuple(itertools.product(left.finite_elements, right.finite_elements))

    def apply(self, a: Any, b: Any, fuel: int | None = None) -> AppOutcome:
        l = self.left.apply(a[0], b[0], fuel)
        r = self.right.apply(a[1], b[1], fuel)
        if l.defined and r.defined:
            return AppOutcome.of((l.value, r.value), l.spent + r.spent)
        if l.status == UNDEFINED or r.status == UNDEFINED:
            return AppOutcome.undefined()
        return AppOutcome.out_of_fuel(l.spent + r.spent)

    def base(self, name: str) -> Any:
        return (self.left.base(name), self.right.base(name))

    def const(self, c: T.Const) -> Any:
        if c.value is not None:
            return c.value
        return (self.left.const(c), self.right.const(c))

    def show(self, a: Any) -> str:
        return f"<{self.left.show(a[0])} | {self.right.show(a[1])}>"

    def read(self, text: str) -> Any:
        text = text.strip()
        if not (text.startswith("<") and text.endswith(">")) or " | " not in text:
            raise ValueError(f"cannot read pair {text!r}")
        l, r = text[1:-1].split(" | ", 1)
        return (self.left.read(l), self.right.read(r))

    def draw(self, rng: random.Random) -> Any:
        return (self.left.draw(rng), self.right.draw(rng))

    def pool(self) -> tuple:
        return tuple(itertools.product(self.left.pool()[:5], self.right.pool()[:5]))

    def eq(self, a: Any, b: Any) -> bool | None:
        l, r = self.left.eq(a[0], b[0]), self.right.eq(a[1], b[1])
        if l is False or r is False:
            return False
        return None if l is None or r is None else True

    def describe(self) -> dict:
        return {"backend": self.name, "left": self.left.describe(), "right": self.right.describe()}


# --- generator references and certificates ---------------------------------


@dataclass(frozen=True)
class GenRef:
    """A reference to one generator of a filter presentation.

    Kinds: ``point`` (a singleton), ``gen`` (an index into a generator list),
    ``pullback``/``image`` (a transported generator), ``extra`` (the extra
    generator of a slice filter), ``rect`` (a rectangle of two references) and
    ``derived`` (the value of a certificate, i.e. a filter member).
    """

    kind: str
    data: Any = None


@dataclass(frozen=True)
class FilterCertificate:
    """A term over variables ``x0..xn`` and the generators they stand for.

    For componentwise filters, ``parts`` holds one certificate per component.
    """

    term: T.Term | None
    gens: tuple = ()
    parts: tuple | None = None
    log: tuple = ()

    def show(self) -> str:
        if self.parts is not None:
            return "(" + "; ".join(p.show() for p in self.parts) + ")"
        return f"{T.show(self.term)} @ {len(self.gens)} generators"


def shift_cert_term(cert: FilterCertificate, offset: int) -> T.Term:
    mapping = {f"x{j}": T.Var(f"x{j + offset}") for j in range(len(cert.gens))}
    return T.substitute(cert.term, mapping)


# --- filters ---------------------------------------------------------------


class Filter:
    """Base class of filter presentations.

    A filter may carry a ``core`` predicate C on carrier elements, closed under
    defined application, with ``mode`` saying how every generator meets it:
    ``parts`` (each part has an element of C) or ``diagonal`` (one element of C
    lies in every part). Both properties survive application and enlargement,
    so a finite set failing them is exactly refuted.
    """

    label = "filter"
    core: Callable[[Any], bool] | None = None
    mode: str | None = None
    # support(r·a) ⊆ support(a) for core elements r, when given
    support: Callable[[Any], frozenset] | None = None

    def obstruction(self, pca: "Pca", target: Any) -> dict | None:
        if self.core is None or self.mode is None:
            return None
        parts = parts_of(target)
        if not all(p.is_finite for p in parts):
            return None
        hits = [frozenset(e for e in p.elements if self.core(e)) for p in parts]
        if self.mode == "parts":
            for i, h in enumerate(hits):
                if not h:
                    return {"set": pca.show(target), "part": i, "reason": "part misses the core"}
            return None
        common = frozenset.intersection(*hits)
        if not common:
            return {"set": pca.show(target), "reason": "no core element common to all parts"}
        return None

    def invariant_holds(self, pca: "Pca", u: Any) -> bool:
        """Whether ``u`` has the core property (used to vet generators)."""
        if self.core is None or self.mode is None:
            return True
        parts = parts_of(u)
        pools = [p.sample(pca.fibers[i].pool(), pca.fibers[i].draw, 16, 0) for i, p in enumerate(parts)]
        hits = [frozenset(e for e in pool if self.core(e)) for pool in pools]
        if self.mode == "parts":
            return all(hits)
        return bool(frozenset.intersection(*hits))

    def resolve(self, pca: "Pca", ref: GenRef) -> Any:
        if ref.kind == "derived":
            term, refs = ref.data
            cert = FilterCertificate(term, tuple(refs))
            ev = pca.eval_cert(cert)
            if not ev.verdict.ok:
                raise MalformedCertificate("derived generator is not defined")
            return ev.image(pca)
        raise MalformedCertificate(f"{self.label} has no generator of kind {ref.kind}")

    def candidates(self, pca: "Pca", target: Any) -> list:
        return []

    def kit_ref(self, pca: "Pca", name: str) -> GenRef | None:
        return None

    def shortcut(self, pca: "Pca", target: Any, budget: Budget) -> tuple | None:
        return None

    def describe(self) -> dict:
        return {"mode": self.label}


def _points(target: Any, pca: "Pca", limit: int = 6) -> list:
    """Carrier elements of a candidate set, across all of its parts."""
    seen: dict = {}
    if target is None:
        return []
    for i, part in enumerate(parts_of(target)):
        elems = part.elements if part.kind != FULL and part.elements else [part.inhabitant]
        for e in elems[:limit]:
            seen.setdefault(repr(e), e)
    return [seen[k] for k in sorted(seen)]


class MaximalFilter(Filter):
    """Every inhabited set is a member."""

    label = "maximal"

    def resolve(self, pca: "Pca", ref: GenRef) -> Any:
        if ref.kind == "point":
            return pca.singleton(ref.data)
        return super().resolve(pca, ref)

    def candidates(self, pca: "Pca", target: Any) -> list:
        out = [GenRef("point", e) for e in _points(target, pca, 2)]
        out += [self.kit_ref(pca, n) for n in ("k", "s")]
        return _dedupe(out)

    def kit_ref(self, pca: "Pca", name: str) -> GenRef:
        return GenRef("point", pca.fibers[0].const(T.Const(name)))

    def shortcut(self, pca: "Pca", target: Any, budget: Budget) -> tuple | None:
        if pca.world.kind != "Set":
            return None
        cert = FilterCertificate(T.Var("x0"), (GenRef("point", target.inhabitant),))
        return pca.replay(target, cert, budget), cert


class SingletonFilter(Filter):
    """The filter of sets meeting a set C of elements closed under application."""

    label = "singletons"

    mode = "parts"

    def __init__(self, test: Callable[[Any], bool], enum: Callable[[], Iterable], name: str = "C"):
        self.test = test
        self.core = test
        self.enum = enum
        self.name = name

    def resolve(self, pca: "Pca", ref: GenRef) -> Any:
        if ref.kind == "point":
            if not self.test(ref.data):
                raise MalformedCertificate(f"{ref.data!r} is not in {self.name}")
            return pca.singleton(ref.data)
        return super().resolve(pca, ref)

    def candidates(self, pca: "Pca", target: Any) -> list:
        out = [GenRef("point", e) for e in _points(target, pca) if self.test(e)]
        out += [self.kit_ref(pca, n) for n in ("k", "s")]
        return _dedupe(out)

    def kit_ref(self, pca: "Pca", name: str) -> GenRef:
        return GenRef("point", pca.fibers[0].const(T.Const(name)))

    def shortcut(self, pca: "Pca", target: Any, budget: Budget) -> tuple | None:
        if pca.world.kind != "Set" or not target.is_finite:
            return None
        for e in target.elements:
            if self.test(e):
                cert = FilterCertificate(T.Var("x0"), (GenRef("point", e),))
                return pca.replay(target, cert, budget), cert
        # C is closed under application, so the filter is {U | U meets C}
        return Verdict.refute({"set": pca.show(target), "reason": f"no member in {self.name}"}, len(target.elements)), None

    def describe(self) -> dict:
        return {"mode": self.label, "C": self.name}


class GeneratedFilter(Filter):
    """The least filter containing an explicit finite list of sets."""

    label = "generated"

    def __init__(self, generators: Sequence[Any], core: Callable[[Any], bool] | None = None, mode: str = "parts"):
        self.generators = tuple(generators)
        self.core = core
        self.mode = mode if core is not None else None

    def resolve(self, pca: "Pca", ref: GenRef) -> Any:
        if ref.kind == "gen":
            if not isinstance(ref.data, int) or not 0 <= ref.data < len(self.generators):
                raise MalformedCertificate(f"no generator {ref.data!r}")
            return self.generators[ref.data]
        return super().resolve(pca, ref)

    def candidates(self, pca: "Pca", target: Any) -> list:
        return [GenRef("gen", i) for i in range(len(self.generators))]

    def kit_ref(self, pca: "Pca", name: str) -> GenRef | None:
        want = pca.kit_set(name)
        for i, g in enumerate(self.generators):
            if g == want:
                return GenRef("gen", i)
        return None

    def describe(self) -> dict:
        return {"mode": self.label, "generators": len(self.generators)}


class SliceFilter(Filter):
    """``⟨|I|*(φ) ∪ {E_I}⟩`` on the fiberwise carrier over a finite index."""

    label = "slice"

    def __init__(self, base: "Pca", extra: Family):
        self.base = base
        self.extra = extra
        self.core = base.filter.core
        self.support = base.filter.support
        if self.core is not None:
            probe = ImageFilterProbe(self.core)
            self.mode = "diagonal" if probe.meets(extra, "diagonal") else "parts" if probe.meets(extra, "parts") else None

    def shortcut(self, pca: "Pca", target: Any, budget: Budget) -> tuple | None:
        # a core element shared by all parts is a pulled-back point
        if self.core is None:
            return None
        parts = parts_of(target)
        if not all(p.is_finite for p in parts):
            return None
        common = frozenset.intersection(*[frozenset(e for e in p.elements if self.core(e)) for p in parts])
        for e in sorted(common, key=repr):
            ref = GenRef("pullback", GenRef("point", e))
            try:
                pca.resolve(ref)
            except MalformedCertificate:
                continue
            cert = FilterCertificate(T.Var("x0"), (ref,))
            return pca.replay(target, cert, budget), cert
        return None

    def resolve(self, pca: "Pca", ref: GenRef) -> Any:
        if ref.kind == "pullback":
            u = self.base.filter.resolve(self.base, ref.data)
            return Family(tuple(u for _ in pca.fibers))
        if ref.kind == "extra":
            return self.extra
        return super().resolve(pca, ref)

    def candidates(self, pca: "Pca", target: Any) -> list:
        merged = None
        pts = _points(target, pca)
        if pts:
            merged = RealizerSet.of(pts)
        out = [GenRef("pullback", r) for r in self.base.filter.candidates(self.base, merged)]
        out.append(GenRef("extra"))
        return _dedupe(out)

    def kit_ref(self, pca: "Pca", name: str) -> GenRef | None:
        inner = self.base.filter.kit_ref(self.base, name)
        return None if inner is None else GenRef("pullback", inner)

    def describe(self) -> dict:
        return {"mode": self.label, "base": self.base.filter.describe()}


class ImageFilterProbe:
    """Decides the core property for explicitly given (possibly full) families."""

    def __init__(self, core: Callable[[Any], bool]):
        self.core = core

    def meets(self, u: Any, mode: str) -> bool:
        parts = parts_of(u)
        if mode == "parts":
            return all(p.is_full or any(self.core(e) for e in p.elements) for p in parts)
        finite = [frozenset(e for e in p.elements if self.core(e)) for p in parts if not p.is_full]
        if not finite:
            return True
        return bool(frozenset.intersection(*finite))


class RectFilter(Filter):
    """``⟨φ×ψ⟩`` on a product carrier, generated by rectangles.

    With ``closed`` the rectangles may use small derived members of φ and ψ,
    which presents ``⟨⟨φ⟩×⟨ψ⟩⟩``.
    """

    label = "rectangles"

    mode = "parts"

    def __init__(self, left: "Pca", right: "Pca", closed: bool = False):
        self.left = left
        self.right = right
        self.closed = closed
        lc, rc = left.filter.core, right.filter.core
        self.core = None if lc is None or rc is None else (lambda e: lc(e[0]) and rc(e[1]))

    def shortcut(self, pca: "Pca", target: Any, budget: Budget) -> tuple | None:
        # closed presentations: certify a pair point by certifying each side
        if not self.closed or not target.is_finite:
            return None
        for c, d in target.elements:
            _, lc = filter_member(self.left, RealizerSet.of([c]), None, budget)
            if lc is None:
                continue
            _, rc = filter_member(self.right, RealizerSet.of([d]), None, budget)
            if rc is None:
                continue
            ref = GenRef("rect", (as_derived(lc), as_derived(rc)))
            cert = FilterCertificate(T.Var("x0"), (ref,))
            return pca.replay(target, cert, budget), cert
        return None

    def resolve(self, pca: "Pca", ref: GenRef) -> Any:
        if ref.kind == "rect":
            a = self.left.filter.resolve(self.left, ref.data[0])
            b = self.right.filter.resolve(self.right, ref.data[1])
            return RegFunctor.product(World.pow((0, 1))).on_set(Family((a, b)))
        return super().resolve(pca, ref)

    def candidates(self, pca: "Pca", target: Any) -> list:
        pts = _points(target, pca)
        lt = RealizerSet.of(p[0] for p in pts) if pts else None
        rt = RealizerSet.of(p[1] for p in pts) if pts else None
        ls = self.left.filter.candidates(self.left, lt)
        rs = self.right.filter.candidates(self.right, rt)
        if self.closed:
            ls = ls + derived_refs(self.left)
            rs = rs + derived_refs(self.right)
        return _dedupe([GenRef("rect", (a, b)) for a in ls for b in rs])

    def kit_ref(self, pca: "Pca", name: str) -> GenRef | None:
        a = self.left.filter.kit_ref(self.left, name)
        b = self.right.filter.kit_ref(self.right, name)
        return None if a is None or b is None else GenRef("rect", (a, b))


class ImageFilter(Filter):
    """``⟨p(φ)⟩``: generators are images of generators along a regular functor.

    With ``closed`` the images of small derived members are added, which
    presents ``⟨p⟨φ⟩⟩``.
    """

    label = "image"

    def __init__(self, functor: Any, base: "Pca", closed: bool = False):
        self.functor = functor
        self.base = base
        self.closed = closed
        self.core = base.filter.core
        self.mode = "diagonal" if self.core is not None and getattr(functor, "kind", "") == "Pullback" else None
        self.support = base.filter.support if self.mode else None

    def shortcut(self, pca: "Pca", target: Any, budget: Budget) -> tuple | None:
        # closed presentations: a shared point certified in the base
        if not self.closed or self.mode != "diagonal":
            return None
        parts = parts_of(target)
        if not all(p.is_finite for p in parts):
            return None
        common = frozenset.intersection(*[frozenset(p.elements) for p in parts])
        for e in sorted(common, key=repr):
            _, c = filter_member(self.base, RealizerSet.of([e]), None, budget)
            if c is not None:
                cert = FilterCertificate(T.Var("x0"), (GenRef("image", as_derived(c)),))
                return pca.replay(target, cert, budget), cert
        return None

    def resolve(self, pca: "Pca", ref: GenRef) -> Any:
        if ref.kind == "image":
            return self.functor.on_set(self.base.filter.resolve(self.base, ref.data))
        return super().resolve(pca, ref)

    def candidates(self, pca: "Pca", target: Any) -> list:
        refs = self.base.filter.candidates(self.base, None)
        if self.closed:
            refs = refs + derived_refs(self.base)
        return _dedupe([GenRef("image", r) for r in refs])

    def kit_ref(self, pca: "Pca", name: str) -> GenRef | None:
        inner = self.base.filter.kit_ref(self.base, name)
        return None if inner is None else GenRef("image", inner)

    def describe(self) -> dict:
        return {"mode": self.label, "functor": str(self.functor), "base": self.base.filter.describe()}


class ComponentwiseFilter(Filter):
    """Families whose every component lies in the component filter."""

    label = "componentwise"


def as_derived(cert: FilterCertificate) -> GenRef:
    """A certificate as a generator reference (a single generator stays itself)."""
    if isinstance(cert.term, T.Var) and len(cert.gens) == 1:
        return cert.gens[0]
    return GenRef("derived", (cert.term, tuple(cert.gens)))


def _dedupe(refs: Iterable[GenRef | None]) -> list:
    out: list = []
    for r in refs:
        if r is not None and r not in out:
            out.append(r)
    return out


def derived_refs(pca: "Pca", max_size: int = 3) -> list:
    """Small derived members of a generated filter, in search order."""
    base = pca.filter.candidates(pca, None)
    out = []
    for t in T.enumerate_terms(max_size, [T.Var("x0"), T.Var("x1")], require_all=False):
        if T.size(t) == 1:
            continue
        names = T.var_order(t)
        for combo in itertools.permutations(range(len(base)), len(names)):
            refs = tuple(base[c] for c in combo)
            renamed = T.substitute(t, {n: T.Var(f"x{j}") for j, n in enumerate(names)})
            cert = FilterCertificate(renamed, refs)
            try:
                ok = pca.eval_cert(cert).verdict.ok
            except MalformedCertificate:
                ok = False
            if ok:
                out.append(GenRef("derived", (renamed, refs)))
    return out


# --- set-level evaluation --------------------------------------------------


@dataclass
class SetEval:
    """Outcome of evaluating a term over realizer sets."""

    verdict: Verdict
    values: list  # one list of values per fiber
    exhaustive: bool
    log: list = field(default_factory=list)

    def image(self, pca: "Pca") -> Any:
        parts = []
        for vals in self.values:
            if not vals:
                raise MalformedCertificate("empty image")
            parts.append(RealizerSet.of(vals) if self.exhaustive else RealizerSet.partial(vals))
        return pca.wrap(parts)


# --- the PCA ---------------------------------------------------------------


@dataclass(frozen=True)
class CombinatorKit:
    members: tuple  # (name, realizer set, derivation or None)

    def get(self, name: str) -> Any:
        for n, u, _d in self.members:
            if n == name:
                return u
        raise KeyError(name)

    def derivation(self, name: str) -> T.Term | None:
        for n, _u, d in self.members:
            if n == name:
                return d
        raise KeyError(name)


@dataclass(frozen=True, eq=False)
class Pca:
    """A PCA over a world: carriers per index, a filter, and resource limits."""

    name: str
    world: World
    fibers: tuple
    filter: Filter
    components: tuple = ()
    budget: Budget = DEFAULT_BUDGET

    @property
    def pas(self) -> Pas:
        return self.fibers[0]

    @property
    def indexed(self) -> bool:
        return self.world.kind != "Set"

    def wrap(self, parts: Sequence[RealizerSet]) -> Any:
        parts = tuple(parts)
        if len(parts) != len(self.fibers):
            raise CarrierMismatch(f"{self.name} expects {len(self.fibers)} parts")
        return Family(parts) if self.indexed else parts[0]

    def singleton(self, a: Any) -> Any:
        """A one-element set; in indexed worlds ``a`` is one point per index or one shared point."""
        if not self.indexed:
            return RealizerSet.of([a])
        if isinstance(a, tuple) and len(a) == len(self.fibers) and getattr(self, "_tuple_points", True):
            return self.wrap([RealizerSet.of([x]) for x in a])
        return self.wrap([RealizerSet.of([a]) for _ in self.fibers])

    def kit_set(self, name: str) -> Any:
        return self.wrap([RealizerSet.of([p.const(T.Const(name))]) for p in self.fibers])

    def kit_element(self, name: str) -> Any:
        return self.pas.const(T.Const(name))

    @property
    def kit(self) -> CombinatorKit:
        return CombinatorKit(tuple((n, self.kit_set(n), DERIVATIONS.get(n)) for n in KIT_NAMES))

    def full(self) -> Any:
        return self.wrap([RealizerSet.full(p.const(T.K)) for p in self.fibers])

    def check_compatible(self, u: Any) -> None:
        if len(parts_of(u)) != len(self.fibers) or (isinstance(u, Family) != self.indexed):
            raise CarrierMismatch(f"set does not live over {self.name}")

    def show(self, u: Any) -> str:
        if isinstance(u, Family):
            return "(" + "; ".join(part.show(p.show) for part, p in zip(u.parts, self.fibers)) + ")"
        if isinstance(u, RealizerSet):
            return u.show(self.pas.show)
        return self.pas.show(u)

    def sample_part(self, part: RealizerSet, i: int, budget: Budget) -> list:
        pas = self.fibers[i]
        if pas.finite_elements is not None and not part.is_finite:
            return [e for e in pas.finite_elements if part.contains(e)]
        return part.sample(pas.pool(), pas.draw, budget.samples, budget.seed + 7919 * i)

    def part_exhaustive(self, part: RealizerSet, i: int) -> bool:
        return part.is_finite or self.fibers[i].finite_elements is not None

    def eval_sets(
        self,
        term: T.Term,
        assignment: Mapping[str, Any],
        target: Any = None,
        budget: Budget | None = None,
        stop_on_failure: bool = True,
    ) -> SetEval:
        """Evaluate ``term`` for every choice of elements from the assigned sets.

        Variables repeated in the term share one element. Evaluation is
        exhaustive over finite sets and sampled otherwise. With a ``target``
        each value must also lie in it.
        """
        budget = budget or self.budget
        names = T.var_order(term)
        for n in names:
            if n not in assignment:
                raise T.UnboundVariable(n)
            self.check_compatible(assignment[n])
        if target is not None:
            self.check_compatible(target)
        tally = Tally()
        values: list = []
        for i, pas in enumerate(self.fibers):
            domains = []
            for n in names:
                part = parts_of(assignment[n])[i]
                if not self.part_exhaustive(part, i):
                    tally.sampled()
                domains.append(self.sample_part(part, i, budget))
            total = 1
            for d in domains:
                total *= len(d)
            combos: Iterable = itertools.product(*domains)
            if total > budget.max_assignments:
                tally.sampled()
                combos = itertools.islice(combos, budget.max_assignments)
            tgt = parts_of(target)[i] if target is not None else None
            seen: dict = {}
            for combo in combos:
                out = T.eval_term(pas, term, dict(zip(names, combo)), budget.fuel)
                where = {"fiber": i, "valuation": [pas.show(c) for c in combo]}
                if out.defined:
                    seen.setdefault(repr(out.value), out.value)
                    if tgt is None:
                        tally.ok()
                        continue
                    member = tgt.contains(out.value)
                    if member:
                        tally.ok()
                    elif member is None:
                        tally.unknown({"membership": pas.show(out.value)})
                    else:
                        tally.fail({**where, "value": pas.show(out.value), "reason": "outside target"})
                elif out.status == UNDEFINED:
                    tally.fail({**where, "reason": "undefined"})
                else:
                    tally.unknown({"fuel": budget.fuel, **where})
                if stop_on_failure and tally.counterexample is not None:
                    break
            values.append([seen[k] for k in sorted(seen)])
            if stop_on_failure and tally.counterexample is not None:
                break
        return SetEval(tally.verdict(), values, tally.exhaustive)

    def set_apply(self, u: Any, v: Any, budget: Budget | None = None) -> tuple:
        """Set application: defined when every pair is, with the image as value."""
        ev = self.eval_sets(T.App(T.Var("u"), T.Var("v")), {"u": u, "v": v}, None, budget)
        if not ev.verdict.ok:
            return ev.verdict, None
        return ev.verdict, ev.image(self)

    def subset(self, u: Any, v: Any, budget: Budget | None = None) -> Verdict:
        """Check ``u ⊆ v``."""
        return self.eval_sets(T.Var("u"), {"u": u}, v, budget).verdict

    # filters

    def resolve(self, ref: GenRef) -> Any:
        return self.filter.resolve(self, ref)

    def eval_cert(self, cert: FilterCertificate, target: Any = None, budget: Budget | None = None) -> SetEval:
        if cert.term is None:
            raise MalformedCertificate("certificate has no term")
        names = T.var_order(cert.term)
        expected = {f"x{j}" for j in range(len(cert.gens))}
        if not set(names) <= expected:
            raise MalformedCertificate(f"term uses variables outside x0..x{len(cert.gens) - 1}")
        assignment = {f"x{j}": self.resolve(r) for j, r in enumerate(cert.gens)}
        return self.eval_sets(cert.term, assignment, target, budget)

    def replay(self, target: Any, cert: FilterCertificate, budget: Budget | None = None) -> Verdict:
        """Re-evaluate a certificate and check it lands inside ``target``."""
        if isinstance(self.filter, ComponentwiseFilter):
            if cert.parts is None or len(cert.parts) != len(self.components):
                raise MalformedCertificate("componentwise certificate needs one part per component")
            return conjoin(
                c.replay(part, pc, budget) for c, part, pc in zip(self.components, parts_of(target), cert.parts)
            )
        return self.eval_cert(cert, target, budget).verdict

    def member(self, target: Any, cert: FilterCertificate | None = None, budget: Budget | None = None) -> tuple:
        return filter_member(self, target, cert, budget)

    def kit_ref(self, name: str) -> GenRef | None:
        return self.filter.kit_ref(self, name)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "world": str(self.world),
            "carriers": [p.describe() for p in self.fibers],
            "filter": self.filter.describe(),
        }


# --- operations ------------------------------------------------------------


@lru_cache(maxsize=None)
def _terms_of_size(n: int, arity: int) -> tuple:
    atoms = [T.Var(f"x{j}") for j in range(arity)]
    return tuple(t for t in T.enumerate_terms(n, atoms, require_all=True) if T.size(t) == n)


def search_certificate(pca: Pca, target: Any, budget: Budget | None = None) -> tuple:
    """Bounded search for a filter certificate.

    Terms are tried by size, then by the index order of the generator tuple,
    then lexicographically.
    """
    budget = budget or pca.budget
    refs = pca.filter.candidates(pca, target)
    resolved: dict = {}

    def get(j: int) -> Any:
        if j not in resolved:
            try:
                resolved[j] = pca.resolve(refs[j])
            except MalformedCertificate:
                resolved[j] = None
        return resolved[j]

    for n in range(1, budget.term_size + 1, 2):
        leaves = (n + 1) // 2
        for arity in range(1, min(budget.arity, leaves) + 1):
            terms = _terms_of_size(n, arity)
            for combo in itertools.combinations(range(len(refs)), arity):
                sets = [get(j) for j in combo]
                if any(s is None for s in sets):
                    continue
                assignment = {f"x{j}": s for j, s in enumerate(sets)}
                for t in terms:
                    ev = pca.eval_sets(t, assignment, target, budget)
                    if ev.verdict.ok:
                        cert = FilterCertificate(t, tuple(refs[j] for j in combo))
                        return ev.verdict, cert
    return Verdict.unknown({"term_size": budget.term_size, "arity": budget.arity, "generators": len(refs)}), None


def filter_member(pca: Pca, target: Any, cert: FilterCertificate | None = None, budget: Budget | None = None) -> tuple:
    """Membership of ``target`` in the filter, as ``(verdict, certificate)``.

    With a certificate it is replayed; otherwise a shortcut or a bounded
    search is tried and exhaustion yields Unknown.
    """
    budget = budget or pca.budget
    pca.check_compatible(target)
    if cert is not None:
        return pca.replay(target, cert, budget), cert
    if isinstance(pca.filter, ComponentwiseFilter):
        found = [filter_member(c, part, None, budget) for c, part in zip(pca.components, parts_of(target))]
        verdict = conjoin(v for v, _ in found)
        if any(c is None for _, c in found):
            return verdict, None
        return verdict, FilterCertificate(None, (), tuple(c for _, c in found))
    blocked = pca.filter.obstruction(pca, target)
    if blocked is not None:
        return Verdict.refute(blocked, len(parts_of(target))), None
    quick = pca.filter.shortcut(pca, target, budget)
    if quick is not None and (quick[0].ok or quick[0].refuted):
        return quick
    return search_certificate(pca, target, budget)


def set_apply(pca: Pca, u: Any, v: Any, budget: Budget | None = None) -> tuple:
    return pca.set_apply(u, v, budget)


@dataclass
class Synthesized:
    """A realizer computed from a term with parameters, with a filter certificate."""

    realizer: Any
    certificate: FilterCertificate | None
    verdict: Verdict
    term: T.Term


def synthesize(
    pca: Pca,
    term: T.Term,
    params: Mapping[str, Any],
    certs: Mapping[str, FilterCertificate] | None = None,
    budget: Budget | None = None,
) -> Synthesized:
    """Evaluate a compiled term at parameter sets and certify the result.

    The certificate substitutes each parameter's own certificate into the
    term and cites the filter's k and s generators for the combinators.
    """
    budget = budget or pca.budget
    term = expand_kit(term)
    certs = dict(certs or {})
    if isinstance(pca.filter, ComponentwiseFilter):
        subs = []
        for i, comp in enumerate(pca.components):
            sub_params = {n: parts_of(u)[i] for n, u in params.items()}
            sub_certs = {n: c.parts[i] for n, c in certs.items() if c is not None and c.parts is not None}
            subs.append(synthesize(comp, term, sub_params, sub_certs, budget))
        realizer = pca.wrap([s.realizer for s in subs]) if all(s.realizer is not None for s in subs) else None
        cert = None
        if all(s.certificate is not None for s in subs):
            cert = FilterCertificate(None, (), tuple(s.certificate for s in subs))
        return Synthesized(realizer, cert, conjoin(s.verdict for s in subs), term)
    ev = pca.eval_sets(term, params, None, budget)
    if not ev.verdict.ok:
        return Synthesized(None, None, ev.verdict, term)
    realizer = ev.image(pca)
    mapping: dict = {}
    gens: list = []
    for name in T.var_order(term):
        c = certs.get(name)
        if c is None:
            verdict, c = filter_member(pca, params[name], None, budget)
            if c is None:
                return Synthesized(realizer, None, verdict.with_note(f"parameter {name} not certified"), term)
        mapping[name] = shift_cert_term(c, len(gens))
        gens.extend(c.gens)
    for kname in sorted(T.consts(term)):
        ref = pca.kit_ref(kname)
        if ref is None:
            return Synthesized(realizer, None, Verdict.unknown({"kit": kname}), term)
        mapping[f"@{kname}"] = T.Var(f"x{len(gens)}")
        gens.append(ref)
    body = T.replace_consts(term, {k[1:]: v for k, v in mapping.items() if k.startswith("@")})
    body = T.substitute(body, {k: v for k, v in mapping.items() if not k.startswith("@")})
    cert = FilterCertificate(body, tuple(gens))
    verdict = pca.replay(realizer, cert, budget)
    return Synthesized(realizer, cert, verdict, term)


def compile_lambda(variables: Sequence[str], body: T.Term) -> T.Term:
    return T.abstract(variables, expand_kit(body))


def realizes(
    u: RealizerSet,
    variables: Sequence[str],
    body: T.Term,
    pca: Pca,
    budget: Budget | None = None,
    fiber: int = 0,
) -> Verdict:
    """Check that every element of ``u`` realizes ``λ variables. body``.

    Both clauses are checked: the first n-1 arguments give a defined value,
    and the full application agrees with the body wherever the body is
    defined. Valuations are sampled unless the carrier is finite.
    """
    budget = budget or pca.budget
    pas = pca.fibers[fiber]
    variables = list(variables)
    n = len(variables)
    rng = random.Random(budget.seed)
    if pas.finite_elements is not None:
        vals = list(itertools.product(pas.finite_elements, repeat=n))
        exhaustive = u.is_finite
    else:
        pool = list(pas.pool())
        vals = []
        for j in range(budget.samples):
            vals.append(tuple(pool[(j + k) % len(pool)] if j < len(pool) else pas.draw(rng) for k in range(n)))
        exhaustive = False
    rs = u.elements if u.kind != FULL and u.elements else pca.sample_part(u, fiber, budget)
    tally = Tally(exhaustive=exhaustive)
    skipped = 0
    body = expand_kit(body)
    for r in rs:
        for val in vals:
            cur = r
            prefix_ok = True
            for j, a in enumerate(val[:-1] if n else ()):
                out = pas.apply(cur, a, budget.fuel)
                if not out.defined:
                    if out.is_unknown:
                        tally.unknown({"fuel": budget.fuel})
                    else:
                        tally.fail({"realizer": pas.show(r), "prefix": [pas.show(x) for x in val[: j + 1]]})
                    prefix_ok = False
                    break
                cur = out.value
            if not prefix_ok:
                continue
            expected = T.eval_term(pas, body, dict(zip(variables, val)), budget.fuel)
            if not expected.defined:
                skipped += 1
                tally.ok()
                continue
            got = pas.apply(cur, val[-1], budget.fuel) if n else AppOutcome.of(cur)
            where = {"realizer": pas.show(r), "valuation": [pas.show(x) for x in val]}
            if not got.defined:
                if got.is_unknown:
                    tally.unknown({"fuel": budget.fuel, **where})
                else:
                    tally.fail({**where, "reason": "undefined"})
            elif (same := pas.eq(got.value, expected.value)) is None:
                tally.unknown({"equality": "undecided", **where})
            elif same:
                tally.ok()
            else:
                tally.fail({**where, "got": pas.show(got.value), "expected": pas.show(expected.value)})
    if skipped:
        tally.note = f"{skipped} valuations left the body undefined or unknown"
    return tally.verdict()


def verify_kit(pca: Pca, budget: Budget | None = None) -> dict:
    """Replay every kit element's defining equation and the pairing laws."""
    budget = budget or pca.budget
    out = {}
    for i, pas in enumerate(pca.fibers):
        sub = Pca(pca.name, SET, (pas,), MaximalFilter(), budget=pca.budget)
        for name, (vars_, body) in KIT_SPECS.items():
            u = RealizerSet.of([pas.const(T.Const(name))])
            out[f"{name}@{i}"] = realizes(u, vars_, body, sub, budget)
        out[f"pairing@{i}"] = conjoin(
            [
                realizes(RealizerSet.of([pas.const(T.Const("p0"))]), ("x",), T.App(T.Var("x"), T.K), sub, budget),
                _pairing_laws(pas, budget),
            ]
        )
    return out


def _pairing_laws(pas: Pas, budget: Budget) -> Verdict:
    rng = random.Random(budget.seed + 1)
    finite = pas.finite_elements is not None
    pairs = (
        list(itertools.product(pas.finite_elements, repeat=2))
        if finite
        else [(pas.draw(rng), pas.draw(rng)) for _ in range(budget.samples)]
    )
    tally = Tally(exhaustive=finite)
    p, p0, p1 = (pas.const(T.Const(n)) for n in ("p", "p0", "p1"))
    for a, b in pairs:
        pab = T.eval_term(pas, T.app(T.Const("p", p), T.Const("a", a), T.Const("b", b)), {}, budget.fuel)
        if not pab.defined:
            tally.unknown({"fuel": budget.fuel}) if pab.is_unknown else tally.fail({"a": pas.show(a), "b": pas.show(b)})
            continue
        for proj, want in ((p0, a), (p1, b)):
            got = pas.apply(proj, pab.value, budget.fuel)
            same = pas.eq(got.value, want) if got.defined else False
            if same:
                tally.ok()
            elif got.is_unknown or same is None:
                tally.unknown({"fuel": budget.fuel})
            else:
                tally.fail({"a": pas.show(a), "b": pas.show(b), "projection": pas.show(proj)})
    return tally.verdict()


@dataclass
class AxiomReport:
    verdicts: dict
    unknown_rate: float
    triples: int

    def to_json(self) -> dict:
        return {
            "triples": self.triples,
            "unknown_rate": round(self.unknown_rate, 6),
            "axioms": {k: v.to_json() for k, v in self.verdicts.items()},
        }


def axiom_suite(pas: Pas, triples: int = 200, seed: int = 0, fuel: int | None = None) -> AxiomReport:
    """The three weak PCA axioms on seeded triples.

    ``(ka)b = a``; ``(sa)b`` defined; ``sabc = ac(bc)`` whenever the right side
    is defined. On a finite carrier all triples are enumerated.
    """
    rng = random.Random(seed)
    finite = pas.finite_elements is not None
    if finite:
        sample = list(itertools.product(pas.finite_elements, repeat=3))
    else:
        sample = [(pas.draw(rng), pas.draw(rng), pas.draw(rng)) for _ in range(triples)]
    k, s = pas.base("k"), pas.base("s")
    ax = {name: Tally(exhaustive=finite) for name in ("k", "s_defined", "s")}
    unknown_triples = 0

    def ev(*parts: Any) -> AppOutcome:
        return T.eval_term(pas, T.app(*[T.Const(f"c{j}", p) for j, p in enumerate(parts)]), {}, fuel)

    for a, b, c in sample:
        where = {"a": pas.show(a), "b": pas.show(b), "c": pas.show(c)}
        had_unknown = False
        kab = ev(k, a, b)
        same = pas.eq(kab.value, a) if kab.defined else False
        if same:
            ax["k"].ok()
        elif kab.is_unknown or same is None:
            ax["k"].unknown({"fuel": fuel})
            had_unknown = True
        else:
            ax["k"].fail(where)
        sab = ev(s, a, b)
        if sab.defined:
            ax["s_defined"].ok()
        elif sab.is_unknown:
            ax["s_defined"].unknown({"fuel": fuel})
            had_unknown = True
        else:
            ax["s_defined"].fail(where)
        ac = pas.apply(a, c, fuel)
        bc = pas.apply(b, c, fuel)
        rhs = pas.apply(ac.value, bc.value, fuel) if ac.defined and bc.defined else None
        if rhs is None:
            if ac.is_unknown or bc.is_unknown:
                had_unknown = True
            ax["s"].ok()
        elif rhs.is_unknown:
            had_unknown = True
            ax["s"].ok()
        elif not rhs.defined:
            ax["s"].ok()
        else:
            lhs = ev(s, a, b, c)
            same = pas.eq(lhs.value, rhs.value) if lhs.defined else False
            if same:
                ax["s"].ok()
            elif lhs.is_unknown or same is None:
                ax["s"].unknown({"fuel": fuel})
                had_unknown = True
            else:
                ax["s"].fail(where)
        unknown_triples += had_unknown
    for t in ax.values():
        if not finite:
            t.sampled()
    verdicts = {name: t.verdict() for name, t in ax.items()}
    return AxiomReport(verdicts, unknown_triples / max(1, len(sample)), len(sample))


# --- construction ----------------------------------------------------------


def pure_sk_filter() -> SingletonFilter:
    """Singletons on atom-free normal forms."""

    def enum() -> Iterable:
        return iter(sk.enumerate_normal_forms(9))

    flt = SingletonFilter(lambda a: not sk.atoms_of(a), enum, "pure SK normal forms")
    flt.support = sk.atoms_of
    return flt


def make_backend(kind: str, **opts: Any) -> Pca:
    """Build one of the standard PCAs.

    ``trivial``; ``sk`` (options ``fuel``, ``atoms``, ``filter`` = ``maximal``
    or ``pure``); ``graph`` (option ``level``).
    """
    budget = opts.pop("budget", DEFAULT_BUDGET)
    if kind == "trivial":
        return Pca("1", SET, (TrivialPas(),), MaximalFilter(), budget=budget)
    if kind == "sk":
        fuel = opts.get("fuel", budget.fuel)
        atoms = tuple(opts.get("atoms", ()))
        mode = opts.get("filter", "pure" if atoms else "maximal")
        flt = pure_sk_filter() if mode == "pure" else MaximalFilter()
        name = "SK" if not atoms else f"SK[{','.join(atoms)}]"
        return Pca(name, SET, (SkPas(fuel, atoms),), flt, budget=budget.but(fuel=fuel))
    if kind == "graph":
        level = opts.get("level", 8)
        return Pca(f"Pω@{level}", SET, (GraphPas(level),), MaximalFilter(), budget=budget)
    raise ValueError(f"unknown backend {kind!r}")


def generated_pca(pca: Pca, generators: Sequence[Any], name: str | None = None) -> Pca:
    """The same carrier with the filter generated by an explicit list."""
    return Pca(name or f"{pca.name}⟨G⟩", pca.world, pca.fibers, GeneratedFilter(generators), budget=pca.budget)


# --- certificate serialisation ---------------------------------------------


def ref_to_json(ref: GenRef, pca: Pca) -> Any:
    if ref.kind == "point":
        return {"kind": "point", "element": pca.pas.show(ref.data)}
    if ref.kind == "gen":
        return {"kind": "gen", "index": ref.data}
    if ref.kind == "extra":
        return {"kind": "extra"}
    if ref.kind in ("pullback", "image"):
        base = pca.filter.base
        return {"kind": ref.kind, "of": ref_to_json(ref.data, base)}
    if ref.kind == "rect":
        f = pca.filter
        return {"kind": "rect", "left": ref_to_json(ref.data[0], f.left), "right": ref_to_json(ref.data[1], f.right)}
    if ref.kind == "derived":
        term, refs = ref.data
        return {"kind": "derived", "term": T.show(term), "refs": [ref_to_json(r, pca) for r in refs]}
    raise MalformedCertificate(f"unknown reference kind {ref.kind}")


def ref_from_json(data: Any, pca: Pca) -> GenRef:
    try:
        kind = data["kind"]
        if kind == "point":
            return GenRef("point", pca.pas.read(data["element"]))
        if kind == "gen":
            return GenRef("gen", int(data["index"]))
        if kind == "extra":
            return GenRef("extra")
        if kind in ("pullback", "image"):
            return GenRef(kind, ref_from_json(data["of"], pca.filter.base))
        if kind == "rect":
            f = pca.filter
            return GenRef("rect", (ref_from_json(data["left"], f.left), ref_from_json(data["right"], f.right)))
        if kind == "derived":
            return GenRef("derived", (T.parse(data["term"]), tuple(ref_from_json(r, pca) for r in data["refs"])))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedCertificate(str(exc)) from exc
    raise MalformedCertificate(f"unknown reference kind {data!r}")


def cert_to_json(cert: FilterCertificate, pca: Pca) -> dict:
    if cert.parts is not None:
        return {"parts": [cert_to_json(c, comp) for c, comp in zip(cert.parts, pca.components)]}
    return {"term": T.show(cert.term), "generators": [ref_to_json(r, pca) for r in cert.gens]}


def cert_from_json(data: Mapping[str, Any], pca: Pca) -> FilterCertificate:
    try:
        if "parts" in data:
            return FilterCertificate(
                None, (), tuple(cert_from_json(c, comp) for c, comp in zip(data["parts"], pca.components))
            )
        return FilterCertificate(T.parse(data["term"]), tuple(ref_from_json(r, pca) for r in data["generators"]))
    except T.ParseError as exc:
        raise MalformedCertificate(str(exc)) from exc
    except KeyError as exc:
        raise MalformedCertificate(f"missing field {exc}") from exc
