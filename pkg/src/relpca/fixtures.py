"""Standard small constructions shared by the CLI and the test suites."""

from __future__ import annotations

from typing import Any, Sequence

from . import sk as SK
from . import terms as T
from .backend import RegFunctor
from .morphisms import ApplicativeMorphism, applicative, delta, mapping, transport
from .pca import (
    SET,
    Budget,
    FilterCertificate,
    GeneratedFilter,
    ImageFilter,
    Pca,
    ProductPas,
    RectFilter,
    compile_lambda,
    make_backend,
)
from .realizers import RealizerSet
from .slicing import SlicePca


def relative_sk(atoms: Sequence[str] = ("o1", "o2"), budget: Budget | None = None) -> Pca:
    """SK with inert atoms, filtered by the pure (atom-free) sets."""
    return make_backend("sk", atoms=tuple(atoms), filter="pure", **({"budget": budget} if budget else {}))


def closed_set(pca: Pca, variables: Sequence[str], body: T.Term) -> RealizerSet:
    """The singleton of a compiled closed lambda term."""
    out = T.eval_term(pca.pas, compile_lambda(variables, body), {}, pca.budget.fuel)
    if not out.defined:
        raise ValueError(f"closed term {T.show(body)} has no value")
    return RealizerSet.of([out.value])


def along(name: str, base: Pca, functor: Any, target: Pca, budget: Budget | None = None) -> ApplicativeMorphism:
    """``(functor, δ)`` into ``target``, tracked by i with its certificate."""
    ref = target.kit_ref("i")
    cert = FilterCertificate(T.Var("x0"), (ref,)) if ref is not None else None
    return applicative(name, base, target, delta(), target.kit_set("i"), functor, cert, budget)


def cocartesian(base: Pca, index: Sequence[Any] = (0, 1), budget: Budget | None = None) -> ApplicativeMorphism:
    """``(p, δ)``: the pullback along ``index → 1`` into the transported PCA."""
    p = RegFunctor.pullback(tuple(index))
    return along("(p,δ)", base, p, transport(p, base), budget)


def slice_inclusion(sp: SlicePca, budget: Budget | None = None) -> ApplicativeMorphism:
    """``(|I|*, δ)`` from the base into its slice."""
    return along("(|I|*,δ)", sp.base, RegFunctor.pullback(sp.points), sp.pca, budget)


def kwrap(pca: Pca) -> ApplicativeMorphism:
    """The endomorphism ``a ↦ {k·a}`` of a Set-level SK algebra."""
    x, y = T.Var("x"), T.Var("y")
    tracker = closed_set(pca, ["x", "y"], T.app(T.K, T.app(T.App(x, T.K), T.App(y, T.K))))

    def image(u: RealizerSet) -> RealizerSet | None:
        if not u.is_full:
            return None
        seeds = ("k", "s", ("s", "k"))
        return RealizerSet.predicate(
            lambda t: isinstance(t, tuple) and t[0] == "k", lambda: (("k", e) for e in seeds), ("k", "k"), "K·A"
        )

    return applicative("kwrap", pca, pca, mapping(lambda a: ("k", a), "kwrap", image), tracker)


def pure(a: Any) -> bool:
    return not SK.atoms_of(a)


def generated(rel: Pca, names: Sequence[str] = ("k", "s", "i", "kbar"), label: str = "⟨G⟩") -> Pca:
    """The filter generated by kit singletons, with purity as its core."""
    gens = [rel.kit_set(n) for n in names]
    return Pca(label, rel.world, rel.fibers, GeneratedFilter(gens, pure, "parts"), budget=rel.budget)


def rect_pair(rel: Pca) -> tuple:
    """``⟨⟨G⟩×⟨H⟩⟩`` (closed) and ``⟨G×H⟩`` (open) on the pair algebra."""
    G, H = generated(rel), generated(rel, label="⟨H⟩")
    pas = (ProductPas(rel.pas, rel.pas),)
    closed = Pca("⟨⟨G⟩×⟨H⟩⟩", SET, pas, RectFilter(G, H, closed=True), budget=rel.budget)
    opened = Pca("⟨G×H⟩", SET, pas, RectFilter(G, H), budget=rel.budget)
    return G, H, closed, opened


def image_pair(rel: Pca, index: Sequence[Any] = (0, 1)) -> tuple:
    """``⟨p⟨G⟩⟩`` (closed) and ``⟨pG⟩`` (open) along a pullback."""
    G = generated(rel)
    p = RegFunctor.pullback(tuple(index))
    fibers = rel.fibers * len(tuple(index))
    closed = Pca("⟨p⟨G⟩⟩", p.target, fibers, ImageFilter(p, G, closed=True), budget=rel.budget)
    opened = Pca("⟨pG⟩", p.target, fibers, ImageFilter(p, G), budget=rel.budget)
    return G, closed, opened
