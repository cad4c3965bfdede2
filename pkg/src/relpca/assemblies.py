"""Assemblies over a PCA and their tracked morphisms.

An assembly has a finite carrier and, for each point, an inhabited set of
realizers (its existence predicate). Over an indexed PCA each point also lives
over an index, and its realizers come from that index's carrier. Every
structural morphism built here carries a tracker synthesized from an explicit
λ-term together with a filter certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from . import terms as T
from .backend import SET, Obj, finite_obj, slice_obj
from .outcome import Verdict, conjoin
from .pca import (
    Budget,
    FilterCertificate,
    MaximalFilter,
    Pca,
    filter_member,
    synthesize,
)
from .realizers import FULL, RealizerSet, parts_of


class NotAnArrow(ValueError):
    pass


class CompositionMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Assembly:
    """A finite carrier with an inhabited realizer set per point."""

    name: str
    carrier: tuple
    E: Mapping[Any, RealizerSet]
    index: Mapping[Any, int] | None = None

    def __post_init__(self) -> None:
        missing = [x for x in self.carrier if x not in self.E]
        if missing:
            raise ValueError(f"{self.name}: no realizers for {missing}")

    def fiber(self, x: Any) -> RealizerSet:
        return self.E[x]

    def idx(self, x: Any) -> int:
        return 0 if self.index is None else self.index[x]

    @property
    def finite_fibers(self) -> bool:
        return all(self.E[x].is_finite for x in self.carrier)

    @property
    def obj(self) -> Obj:
        if self.index is None:
            return finite_obj(self.name, self.carrier)
        from .backend import World

        width = max(self.index.values(), default=0) + 1
        return slice_obj(self.name, World.slice(range(width)), {x: self.index[x] for x in self.carrier})

    def show(self, pca: Pca) -> str:
        body = ", ".join(f"{x}: {self.E[x].show(pca.fibers[self.idx(x)].show)}" for x in self.carrier)
        return f"{self.name}({body})"


@dataclass
class AsmMorphism:
    """A map of carriers with a tracker, its filter certificate and the verdict."""

    source: Assembly
    target: Assembly
    mapping: dict
    tracker: Any
    certificate: FilterCertificate | None
    verdict: Verdict
    name: str = ""

    def __call__(self, x: Any) -> Any:
        return self.mapping[x]


@dataclass
class EpiWitness:
    """A realizer set choosing preimage realizers, as for regular epis."""

    witness: Any
    certificate: FilterCertificate | None
    verdict: Verdict


# --- fiber-level helpers ---------------------------------------------------

_FIBERS: dict = {}


def fiber_pca(pca: Pca, i: int) -> Pca:
    """The ``i``-th carrier as a Set-level PCA (filter irrelevant here)."""
    key = (id(pca), i)
    hit = _FIBERS.get(key)
    if hit is None or hit[0] is not pca:
        hit = (pca, Pca(f"{pca.name}[{i}]", SET, (pca.fibers[i],), MaximalFilter(), budget=pca.budget))
        _FIBERS[key] = hit
    return hit[1]


def part(u: Any, i: int) -> RealizerSet:
    return parts_of(u)[i]


def _union(sets: Sequence[RealizerSet]) -> RealizerSet:
    if all(s.is_finite for s in sets):
        return RealizerSet.of(e for s in sets for e in s.elements)
    if any(s.kind == FULL for s in sets):
        return next(s for s in sets if s.kind == FULL)

    def test(a: Any) -> bool | None:
        answers = [s.contains(a) for s in sets]
        if any(answers):
            return True
        return None if any(x is None for x in answers) else False

    def enum() -> Iterable:
        for s in sets:
            if s.elements:
                yield from s.elements
            elif s.enum is not None:
                yield from itertools.islice(s.enum(), 8)
            else:
                yield s.inhabitant

    return RealizerSet.predicate(test, enum, sets[0].inhabitant, "∪")


def check_arrow(X: Assembly, Y: Assembly, mapping: Mapping[Any, Any]) -> None:
    for x in X.carrier:
        if x not in mapping or mapping[x] not in Y.carrier:
            raise NotAnArrow(f"{x!r} has no image in {Y.name}")
        if X.idx(x) != Y.idx(mapping[x]):
            raise NotAnArrow(f"{x!r} changes index")


def tracking(pca: Pca, X: Assembly, Y: Assembly, mapping: Mapping[Any, Any], u: Any, budget: Budget | None = None) -> Verdict:
    """Check ``r·a`` is defined and realizes ``f(x)`` for every checked x, a ∈ E_X(x), r ∈ u."""
    budget = budget or pca.budget
    out = []
    for x in X.carrier:
        i = X.idx(x)
        fp = fiber_pca(pca, i)
        ev = fp.eval_sets(
            T.App(T.Var("u"), T.Var("a")), {"u": part(u, i), "a": X.fiber(x)}, Y.fiber(mapping[x]), budget
        )
        v = ev.verdict
        if v.refuted:
            v = Verdict.refute({"point": repr(x), **v.counterexample}, v.checked)
        out.append(v)
        if v.refuted:
            break
    return conjoin(out)


def certify(pca: Pca, u: Any, budget: Budget | None = None, cert: FilterCertificate | None = None) -> tuple:
    return filter_member(pca, u, cert, budget)


def kit_cert(pca: Pca, name: str, budget: Budget | None = None) -> tuple:
    """Kit set and its filter certificate."""
    u = pca.kit_set(name)
    ref = pca.kit_ref(name)
    if ref is not None:
        cert = FilterCertificate(T.Var("x0"), (ref,))
        return u, cert, pca.replay(u, cert, budget)
    v, cert = filter_member(pca, u, None, budget)
    return u, cert, v


def make_morphism(
    pca: Pca,
    X: Assembly,
    Y: Assembly,
    mapping: Mapping[Any, Any],
    tracker: Any,
    cert: FilterCertificate | None = None,
    budget: Budget | None = None,
    name: str = "",
) -> AsmMorphism:
    """Verify a given tracker (and its filter membership) for an arrow."""
    check_arrow(X, Y, mapping)
    tv = tracking(pca, X, Y, mapping, tracker, budget)
    fv, cert = certify(pca, tracker, budget, cert)
    return AsmMorphism(X, Y, dict(mapping), tracker, cert, conjoin([tv, fv]), name)


def _exact_obstruction(X: Assembly, Y: Assembly, mapping: Mapping[Any, Any]) -> dict | None:
    """Two points sharing a realizer but sent to points with disjoint fibers."""
    for x, x2 in itertools.combinations(X.carrier, 2):
        if X.idx(x) != X.idx(x2):
            continue
        a, b = X.fiber(x), X.fiber(x2)
        fa, fb = Y.fiber(mapping[x]), Y.fiber(mapping[x2])
        if not (a.is_finite and b.is_finite and fa.is_finite and fb.is_finite):
            continue
        shared = set(a.elements) & set(b.elements)
        if shared and not set(fa.elements) & set(fb.elements):
            return {"points": [repr(x), repr(x2)], "shared_realizer": repr(sorted(shared, key=repr)[0])}
    return None


def _support_obstruction(pca: Pca, X: Assembly, Y: Assembly, mapping: Mapping[Any, Any]) -> dict | None:
    """Every filter member contains a core element r, and r·a cannot gain support."""
    support = pca.filter.support
    if support is None or pca.filter.mode is None:
        return None
    for x in X.carrier:
        src, tgt = X.fiber(x), Y.fiber(mapping[x])
        if not (src.is_finite and tgt.is_finite):
            continue
        for a in src.elements:
            if not any(support(b) <= support(a) for b in tgt.elements):
                return {"point": repr(x), "realizer": pca.fibers[X.idx(x)].show(a), "reason": "targets need new atoms"}
    return None


def tracker_candidates(pca: Pca, X: Assembly, Y: Assembly, mapping: Mapping[Any, Any], budget: Budget) -> list:
    """Kit sets, then constant trackers ``k·e`` for realizers e of the images."""
    out = [pca.kit_set(n) for n in ("i", "p0", "p1", "k", "kbar", "s", "p")]
    per_index: dict = {}
    for x in X.carrier:
        per_index.setdefault(X.idx(x), []).append(mapping[x])
    consts = []
    for i in range(len(pca.fibers)):
        ys = per_index.get(i)
        pas = pca.fibers[i]
        if not ys:
            consts.append([RealizerSet.of([pas.const(T.K)])])
            continue
        fibers = [Y.fiber(y) for y in ys]
        choices = []
        for e in fibers[0].sample(pas.pool(), pas.draw, 3, budget.seed):
            ke = pas.apply(pas.const(T.K), e, budget.fuel)
            if ke.defined and all(f.contains(e) for f in fibers):
                choices.append(RealizerSet.of([ke.value]))
        consts.append(choices)
    for combo in itertools.product(*consts):
        out.append(pca.wrap(combo))
    # small closed combinations of k and s, shared by every index
    if all(hasattr(p, "atoms") for p in pca.fibers):
        from . import sk

        for t in sk.enumerate_normal_forms(5)[:40]:
            out.append(pca.wrap([RealizerSet.of([t]) for _ in pca.fibers]))
    return out


def check_morphism(
    pca: Pca,
    X: Assembly,
    Y: Assembly,
    mapping: Mapping[Any, Any],
    hint: Any = None,
    budget: Budget | None = None,
    cert: FilterCertificate | None = None,
) -> AsmMorphism:
    """Verify a hinted tracker, or search a deterministic candidate list.

    The result's verdict is Refuted only for an exact obstruction or when the
    carrier and fibers are finite so the candidate space is exhaustive.
    """
    budget = budget or pca.budget
    check_arrow(X, Y, mapping)
    if hint is not None:
        return make_morphism(pca, X, Y, mapping, hint, cert, budget)
    blocked = _exact_obstruction(X, Y, mapping) or _support_obstruction(pca, X, Y, mapping)
    if blocked is not None:
        return AsmMorphism(X, Y, dict(mapping), None, None, Verdict.refute(blocked), "")
    tried = 0
    for u in tracker_candidates(pca, X, Y, mapping, budget):
        tried += 1
        m = make_morphism(pca, X, Y, mapping, u, None, budget)
        if m.verdict.ok:
            return m
    if all(p.finite_elements is not None for p in pca.fibers):
        return AsmMorphism(X, Y, dict(mapping), None, None, Verdict.refute({"candidates": tried}, tried))
    return AsmMorphism(X, Y, dict(mapping), None, None, Verdict.unknown({"candidates": tried}))


def identity(pca: Pca, X: Assembly, budget: Budget | None = None) -> AsmMorphism:
    u, cert, v = kit_cert(pca, "i", budget)
    m = make_morphism(pca, X, X, {x: x for x in X.carrier}, u, cert, budget, f"id_{X.name}")
    return m


COMPOSE_TERM = T.abstract(["x"], T.App(T.Var("V"), T.App(T.Var("U"), T.Var("x"))))


def compose_morphisms(pca: Pca, f: AsmMorphism, g: AsmMorphism, budget: Budget | None = None) -> AsmMorphism:
    """``g∘f`` with tracker synthesized from λx.V(Ux)."""
    budget = budget or pca.budget
    if f.target is not g.source and f.target.carrier != g.source.carrier:
        raise CompositionMismatch(f"{f.target.name} is not {g.source.name}")
    if f.tracker is None or g.tracker is None:
        raise CompositionMismatch("both morphisms need trackers")
    syn = synthesize(
        pca, COMPOSE_TERM, {"U": f.tracker, "V": g.tracker}, _certs(U=f.certificate, V=g.certificate), budget
    )
    mapping = {x: g.mapping[f.mapping[x]] for x in f.source.carrier}
    if syn.realizer is None:
        return AsmMorphism(f.source, g.target, mapping, None, None, syn.verdict)
    tv = tracking(pca, f.source, g.target, mapping, syn.realizer, budget)
    return AsmMorphism(f.source, g.target, mapping, syn.realizer, syn.certificate, conjoin([syn.verdict, tv]))


def _certs(**kw: Any) -> dict:
    return {k: v for k, v in kw.items() if v is not None}


def same_morphism(f: AsmMorphism, g: AsmMorphism) -> bool:
    """Equality of morphisms of assemblies: same underlying arrow."""
    return f.mapping == g.mapping


# --- Γ and ∇ ---------------------------------------------------------------


def gamma(X: Assembly) -> Obj:
    return X.obj


def gamma_arrow(f: AsmMorphism) -> dict:
    return dict(f.mapping)


def nabla(pca: Pca, points: Iterable[Any], name: str = "∇Y", index: Mapping[Any, int] | None = None) -> Assembly:
    """The constant assembly: every point realized by the whole carrier."""
    pts = tuple(points)
    idx = index or {}
    E = {y: RealizerSet.full(pca.fibers[idx.get(y, 0)].const(T.K)) for y in pts}
    return Assembly(name, pts, E, dict(index) if index else None)


def unit(pca: Pca, X: Assembly, budget: Budget | None = None) -> AsmMorphism:
    """``η_X: X → ∇ΓX`` (identity on points, tracked by i)."""
    N = nabla(pca, X.carrier, f"∇Γ{X.name}", X.index)
    u, cert, _ = kit_cert(pca, "i", budget)
    return make_morphism(pca, X, N, {x: x for x in X.carrier}, u, cert, budget, f"η_{X.name}")


def all_functions(xs: Sequence[Any], ys: Sequence[Any]) -> list:
    return [dict(zip(xs, img)) for img in itertools.product(ys, repeat=len(xs))]


def adjunction_bijection(pca: Pca, X: Assembly, Y: Sequence[Any], budget: Budget | None = None) -> Verdict:
    """``Set(ΓX, Y) ≅ Asm(X, ∇Y)`` by full enumeration.

    Every function is checked as a morphism into ∇Y with tracker i, and the
    transposes are identities on underlying arrows.
    """
    budget = budget or pca.budget
    N = nabla(pca, Y)
    i_set, cert, _ = kit_cert(pca, "i", budget)
    funcs = all_functions(X.carrier, tuple(Y))
    verdicts = []
    for f in funcs:
        m = make_morphism(pca, X, N, f, i_set, cert, budget)
        verdicts.append(m.verdict)
        if gamma_arrow(m) != f:
            verdicts.append(Verdict.refute({"arrow": repr(f), "reason": "transpose changed the arrow"}))
    v = conjoin(verdicts)
    return v.with_note(f"{len(funcs)} arrows on both sides")


# --- regular structure -----------------------------------------------------


def terminal(pca: Pca) -> Assembly:
    return nabla(pca, ["*"], "1")


def _pairs_set(pca: Pca, i: int, a: RealizerSet, b: RealizerSet, budget: Budget) -> RealizerSet:
    """``{P c d | c ∈ a, d ∈ b}``: finite when both are, otherwise by decoding."""
    pas = pca.fibers[i]
    P, P0, P1 = (pas.const(T.Const(n)) for n in ("p", "p0", "p1"))
    if a.is_finite and b.is_finite:
        out = []
        for c, d in itertools.product(a.elements, b.elements):
            r = T.eval_term(pas, T.app(T.Const("p", P), T.Const("c", c), T.Const("d", d)), {}, budget.fuel)
            if not r.defined:
                raise ValueError("pairing did not evaluate")
            out.append(r.value)
        return RealizerSet.of(out)

    def test(x: Any) -> bool | None:
        l, r = pas.apply(P0, x, budget.fuel), pas.apply(P1, x, budget.fuel)
        if l.is_unknown or r.is_unknown:
            return None
        if not (l.defined and r.defined):
            return False
        ca, cb = a.contains(l.value), b.contains(r.value)
        if ca is False or cb is False:
            return False
        back = T.eval_term(pas, T.app(T.Const("p", P), T.Const("c", l.value), T.Const("d", r.value)), {}, budget.fuel)
        if not back.defined:
            return None
        same = pas.eq(back.value, x)
        if same is False:
            return False
        return None if ca is None or cb is None or same is None else True

    def enum() -> Iterable:
        for c in a.sample(pas.pool(), pas.draw, 6, 0):
            for d in b.sample(pas.pool(), pas.draw, 6, 1):
                r = T.eval_term(pas, T.app(T.Const("p", P), T.Const("c", c), T.Const("d", d)), {}, budget.fuel)
                if r.defined:
                    yield r.value

    first = next(iter(enum()))
    return RealizerSet.predicate(test, enum, first, f"P·{a.label or 'U'}·{b.label or 'V'}")


@dataclass
class ProductData:
    obj: Assembly
    proj0: AsmMorphism
    proj1: AsmMorphism


def product(pca: Pca, X: Assembly, Y: Assembly, budget: Budget | None = None) -> ProductData:
    """Binary product; realizers of (x, y) are pairs P c d."""
    budget = budget or pca.budget
    carrier = tuple((x, y) for x in X.carrier for y in Y.carrier if X.idx(x) == Y.idx(y))
    E = {(x, y): _pairs_set(pca, X.idx(x), X.fiber(x), Y.fiber(y), budget) for x, y in carrier}
    idx = None if X.index is None else {(x, y): X.idx(x) for x, y in carrier}
    Z = Assembly(f"{X.name}×{Y.name}", carrier, E, idx)
    p0, c0, _ = kit_cert(pca, "p0", budget)
    p1, c1, _ = kit_cert(pca, "p1", budget)
    pr0 = make_morphism(pca, Z, X, {z: z[0] for z in carrier}, p0, c0, budget, "π0")
    pr1 = make_morphism(pca, Z, Y, {z: z[1] for z in carrier}, p1, c1, budget, "π1")
    return ProductData(Z, pr0, pr1)


PAIR_TERM = T.abstract(["x"], T.app(T.Const("p"), T.App(T.Var("U"), T.Var("x")), T.App(T.Var("V"), T.Var("x"))))


def mediating(pca: Pca, prod: ProductData, f: AsmMorphism, g: AsmMorphism, budget: Budget | None = None) -> AsmMorphism:
    """``⟨f, g⟩`` tracked by λx.P(Ux)(Vx)."""
    budget = budget or pca.budget
    syn = synthesize(pca, PAIR_TERM, {"U": f.tracker, "V": g.tracker}, _certs(U=f.certificate, V=g.certificate), budget)
    mapping = {z: (f.mapping[z], g.mapping[z]) for z in f.source.carrier}
    if syn.realizer is None:
        return AsmMorphism(f.source, prod.obj, mapping, None, None, syn.verdict)
    tv = tracking(pca, f.source, prod.obj, mapping, syn.realizer, budget)
    return AsmMorphism(f.source, prod.obj, mapping, syn.realizer, syn.certificate, conjoin([syn.verdict, tv]), "⟨f,g⟩")


def product_universal(pca: Pca, prod: ProductData, competitors: Sequence[tuple], budget: Budget | None = None) -> Verdict:
    """For each competitor pair (f, g): the mediating morphism exists, commutes and is unique.

    Uniqueness is checked in the base by enumerating every arrow into the
    product carrier.
    """
    out = []
    for f, g in competitors:
        m = mediating(pca, prod, f, g, budget)
        out.append(m.verdict)
        ok = all(prod.proj0.mapping[m.mapping[z]] == f.mapping[z] and prod.proj1.mapping[m.mapping[z]] == g.mapping[z] for z in f.source.carrier)
        if not ok:
            out.append(Verdict.refute({"reason": "projections do not recover the pair"}))
        count = sum(
            1
            for h in all_functions(f.source.carrier, prod.obj.carrier)
            if all(h[z][0] == f.mapping[z] and h[z][1] == g.mapping[z] for z in f.source.carrier)
        )
        out.append(Verdict.proven_() if count == 1 else Verdict.refute({"mediating_arrows": count}))
    return conjoin(out)


@dataclass
class EqualizerData:
    obj: Assembly
    inclusion: AsmMorphism


def equalizer(pca: Pca, f: AsmMorphism, g: AsmMorphism, budget: Budget | None = None) -> EqualizerData:
    """Points where f and g agree, with the restricted realizers; inclusion tracked by i."""
    X = f.source
    carrier = tuple(x for x in X.carrier if f.mapping[x] == g.mapping[x])
    if not carrier:
        raise ValueError("empty equalizers are not assemblies of this workbench")
    Z = Assembly(f"Eq({f.name},{g.name})", carrier, {x: X.fiber(x) for x in carrier}, _sub_index(X, carrier))
    i_set, cert, _ = kit_cert(pca, "i", budget)
    return EqualizerData(Z, make_morphism(pca, Z, X, {x: x for x in carrier}, i_set, cert, budget, "m"))


def _sub_index(X: Assembly, carrier: Iterable[Any]) -> dict | None:
    return None if X.index is None else {x: X.index[x] for x in carrier}


def equalizer_universal(pca: Pca, eq: EqualizerData, f: AsmMorphism, g: AsmMorphism, competitors: Sequence[AsmMorphism], budget: Budget | None = None) -> Verdict:
    """Each h with fh = gh factors uniquely through the inclusion, by the same tracker."""
    out = []
    for h in competitors:
        if any(f.mapping[h.mapping[w]] != g.mapping[h.mapping[w]] for w in h.source.carrier):
            continue
        fac = make_morphism(pca, h.source, eq.obj, dict(h.mapping), h.tracker, h.certificate, budget)
        out.append(fac.verdict)
    return conjoin(out) if out else Verdict.proven_(0, "no competitors equalize")


@dataclass
class PullbackData:
    obj: Assembly
    proj0: AsmMorphism
    proj1: AsmMorphism


def pullback(pca: Pca, f: AsmMorphism, g: AsmMorphism, budget: Budget | None = None) -> PullbackData:
    """``X ×_Z Y`` as the equalizer inside the product, projections P0 and P1."""
    budget = budget or pca.budget
    X, Y = f.source, g.source
    carrier = tuple((x, y) for x in X.carrier for y in Y.carrier if f.mapping[x] == g.mapping[y] and X.idx(x) == Y.idx(y))
    if not carrier:
        raise ValueError("empty pullback")
    E = {(x, y): _pairs_set(pca, X.idx(x), X.fiber(x), Y.fiber(y), budget) for x, y in carrier}
    idx = None if X.index is None else {(x, y): X.idx(x) for x, y in carrier}
    P = Assembly(f"{X.name}×_{f.target.name}{Y.name}", carrier, E, idx)
    p0, c0, _ = kit_cert(pca, "p0", budget)
    p1, c1, _ = kit_cert(pca, "p1", budget)
    return PullbackData(
        P,
        make_morphism(pca, P, X, {w: w[0] for w in carrier}, p0, c0, budget, "q0"),
        make_morphism(pca, P, Y, {w: w[1] for w in carrier}, p1, c1, budget, "q1"),
    )


@dataclass
class ImageData:
    obj: Assembly
    epi: AsmMorphism
    mono: AsmMorphism
    witness: EpiWitness


def image(pca: Pca, f: AsmMorphism, budget: Budget | None = None) -> ImageData:
    """Image factorization: realizers of z are those of its preimages.

    The epi is tracked and witnessed by i; the mono reuses f's tracker.
    """
    budget = budget or pca.budget
    X, Y = f.source, f.target
    carrier = tuple(y for y in Y.carrier if any(f.mapping[x] == y for x in X.carrier))
    E = {y: _union([X.fiber(x) for x in X.carrier if f.mapping[x] == y]) for y in carrier}
    Im = Assembly(f"im({f.name or 'f'})", carrier, E, _sub_index(Y, carrier))
    i_set, cert, _ = kit_cert(pca, "i", budget)
    e = make_morphism(pca, X, Im, dict(f.mapping), i_set, cert, budget, "e")
    m = make_morphism(pca, Im, Y, {y: y for y in carrier}, f.tracker, f.certificate, budget, "m")
    w = check_epi(pca, e, i_set, budget, cert)
    return ImageData(Im, e, m, w)


def check_epi(pca: Pca, e: AsmMorphism, witness: Any = None, budget: Budget | None = None, cert: FilterCertificate | None = None) -> EpiWitness:
    """Witness that e is a regular epi: r·a realizes some preimage of y.

    Without a witness, the tracker candidates are tried in order.
    """
    budget = budget or pca.budget
    X, Y = e.source, e.target
    missing = [y for y in Y.carrier if not any(e.mapping[x] == y for x in X.carrier)]
    if missing:
        return EpiWitness(None, None, Verdict.refute({"not_surjective_at": repr(missing[0])}))
    pre = Assembly(
        f"pre({X.name})",
        Y.carrier,
        {y: _union([X.fiber(x) for x in X.carrier if e.mapping[x] == y]) for y in Y.carrier},
        Y.index,
    )
    ident = {y: y for y in Y.carrier}
    cands = [witness] if witness is not None else tracker_candidates(pca, Y, pre, ident, budget)
    for u in cands:
        tv = tracking(pca, Y, pre, ident, u, budget)
        if not tv.ok and witness is None:
            continue
        fv, c = certify(pca, u, budget, cert if witness is not None else None)
        return EpiWitness(u, c, conjoin([tv, fv]))
    return EpiWitness(None, None, Verdict.unknown({"candidates": len(cands)}))


STABLE_EPI_TERM = T.abstract(["x"], T.app(T.Const("p"), T.App(T.Var("U"), T.App(T.Var("V"), T.Var("x"))), T.Var("x")))


def pullback_epi(pca: Pca, e: AsmMorphism, w: EpiWitness, g: AsmMorphism, budget: Budget | None = None) -> tuple:
    """Pull the regular epi e back along g; the new witness realizes λx.P(U(Vx))x."""
    budget = budget or pca.budget
    pb = pullback(pca, e, g, budget)
    syn = synthesize(pca, STABLE_EPI_TERM, {"U": w.witness, "V": g.tracker}, _certs(U=w.certificate, V=g.certificate), budget)
    if syn.realizer is None:
        return pb, EpiWitness(None, None, syn.verdict)
    ew = check_epi(pca, pb.proj1, syn.realizer, budget, syn.certificate)
    return pb, EpiWitness(syn.realizer, syn.certificate, conjoin([syn.verdict, ew.verdict]))


# --- prone morphisms, constant objects, realizers --------------------------


def restrict_along(X: Assembly, Y: Assembly, mapping: Mapping[Any, Any]) -> Assembly:
    """``|X|`` with the realizers of the images: the prone lift of a base arrow."""
    return Assembly(f"{Y.name}|{X.name}", X.carrier, {x: Y.fiber(mapping[x]) for x in X.carrier}, X.index)


def is_prone(pca: Pca, f: AsmMorphism, budget: Budget | None = None, hint: Any = None) -> AsmMorphism:
    """f is prone when realizers of f(x) can be turned into realizers of x uniformly.

    Returns the tracked comparison morphism (identity on points) from the
    restricted assembly back to the source.
    """
    R = restrict_along(f.source, f.target, f.mapping)
    return check_morphism(pca, R, f.source, {x: x for x in f.source.carrier}, hint, budget)


def prone_restriction(pca: Pca, Y: Assembly, sub: Iterable[Any], budget: Budget | None = None) -> AsmMorphism:
    """The prone subobject of Y over a subset of its carrier, with inclusion tracked by i."""
    pts = tuple(y for y in Y.carrier if y in set(sub))
    S = Assembly(f"{Y.name}|sub", pts, {y: Y.fiber(y) for y in pts}, _sub_index(Y, pts))
    i_set, cert, _ = kit_cert(pca, "i", budget)
    return make_morphism(pca, S, Y, {y: y for y in pts}, i_set, cert, budget, "incl")


def is_constant(pca: Pca, X: Assembly, budget: Budget | None = None) -> tuple:
    """Search a filter member U with ``|X|×U ⊆ E_X``; returns (verdict, U, certificate).

    With finite fibers the candidate U must sit inside their intersection,
    so an empty intersection is an exact refutation.
    """
    budget = budget or pca.budget
    by_index: dict = {}
    for x in X.carrier:
        by_index.setdefault(X.idx(x), []).append(X.fiber(x))
    parts = []
    for i in range(len(pca.fibers)):
        fs = by_index.get(i)
        if not fs:
            parts.append(RealizerSet.full(pca.fibers[i].const(T.K)))
            continue
        if all(f.kind == FULL for f in fs):
            parts.append(fs[0])
            continue
        finite = [f for f in fs if f.is_finite]
        if not finite:
            return Verdict.unknown({"reason": "infinite fibers"}), None, None
        common = [e for e in finite[0].elements if all(f.contains(e) for f in fs)]
        if not common:
            return Verdict.refute({"index": i, "reason": "fibers have no common realizer"}, len(fs)), None, None
        parts.append(RealizerSet.of(common))
    u = pca.wrap(parts)
    v, cert = filter_member(pca, u, None, budget)
    return v, (u if cert is not None else None), cert


def object_of_realizers(pca: Pca, pool: Sequence[Any], i: int = 0) -> Assembly:
    """``R`` restricted to a finite pool: each element realizes only itself."""
    pts = tuple(pool)
    return Assembly("R", pts, {a: RealizerSet.of([a]) for a in pts}, None if not pca.indexed else {a: i for a in pts})


def prone_sub(pca: Pca, R: Assembly, u: RealizerSet, budget: Budget | None = None) -> AsmMorphism:
    """``R_U ↪ R`` for a finite U."""
    return prone_restriction(pca, R, u.elements, budget)


# --- projectivity ----------------------------------------------------------


@dataclass
class ProjectivityReport:
    direction: str
    verdict: Verdict
    sections: list = field(default_factory=list)
    note: str = ""


def one_prime(pca: Pca) -> Assembly:
    """The point realized only by k."""
    return Assembly("1'", ("*",), {"*": RealizerSet.of([pca.pas.const(T.K)])})


def projectivity_report(pca: Pca, epis: Sequence[tuple], budget: Budget | None = None) -> ProjectivityReport:
    """Split fixture epis ``X → 1'`` using a filter point c, as in the singleton case.

    Each entry of ``epis`` is ``(X, witness-or-None)``. A section sends the
    point to some x with ``c·c0 ∈ E_X(x)`` and is tracked by {c}. When the
    filter has no singleton presentation, only the search outcome is reported.
    """
    budget = budget or pca.budget
    if pca.indexed:
        return ProjectivityReport("no-singletons", Verdict.unknown({"reason": "indexed presentation"}))
    c0 = pca.pas.const(T.K)
    P1 = one_prime(pca)
    one = terminal(pca)
    kc0 = RealizerSet.of([pca.pas.apply(c0, c0, budget.fuel).value])
    base = make_morphism(pca, one, P1, {"*": "*"}, kc0, None, budget, "1→1'")
    out = [base.verdict]
    sections = []
    for X, w in epis:
        e = check_morphism(pca, X, P1, {x: "*" for x in X.carrier}, None, budget)
        ew = check_epi(pca, e, w, budget) if e.verdict.ok else EpiWitness(None, None, e.verdict)
        if not ew.verdict.ok or ew.witness is None:
            out.append(ew.verdict)
            continue
        chosen = _singleton_in(pca, ew.witness, ew.certificate)
        if chosen is None:
            out.append(Verdict.unknown({"reason": "witness has no certified point"}))
            continue
        c = chosen
        cc0 = pca.pas.apply(c, c0, budget.fuel)
        x = next((x for x in X.carrier if cc0.defined and X.fiber(x).contains(cc0.value)), None)
        if x is None:
            out.append(Verdict.refute({"reason": "c·c0 realizes no point", "c": pca.pas.show(c)}))
            continue
        s = make_morphism(pca, P1, X, {"*": x}, RealizerSet.of([c]), None, budget, "section")
        sections.append(s)
        out.append(s.verdict)
    return ProjectivityReport("singletons", conjoin(out), sections)


def _singleton_in(pca: Pca, w: RealizerSet, cert: FilterCertificate | None) -> Any:
    for e in w.sample(pca.pas.pool(), pca.pas.draw, 8, 0):
        v, _ = filter_member(pca, RealizerSet.of([e]))
        if v.ok:
            return e
    return None


# --- serialisation ---------------------------------------------------------


def assembly_to_json(X: Assembly, pca: Pca) -> dict:
    pts = []
    for x in X.carrier:
        pas = pca.fibers[X.idx(x)]
        f = X.fiber(x)
        entry = {"point": x, "realizers": "A" if f.kind == FULL else [pas.show(e) for e in f.elements]}
        if X.index is not None:
            entry["index"] = X.idx(x)
        pts.append(entry)
    return {"name": X.name, "points": pts}


def assembly_from_json(data: Mapping[str, Any], pca: Pca) -> Assembly:
    carrier, E, idx = [], {}, {}
    for entry in data["points"]:
        x = entry["point"]
        x = tuple(x) if isinstance(x, list) else x
        i = int(entry.get("index", 0))
        pas = pca.fibers[i]
        carrier.append(x)
        r = entry["realizers"]
        E[x] = RealizerSet.full(pas.const(T.K)) if r == "A" else RealizerSet.of(pas.read(t) for t in r)
        idx[x] = i
    return Assembly(data["name"], tuple(carrier), E, idx if any("index" in e for e in data["points"]) else None)
