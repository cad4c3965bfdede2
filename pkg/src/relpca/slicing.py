"""Slice PCAs ``(A,φ)/I`` and the equivalence ``Asm(A,φ)/I ≃ Asm((A,φ)/I)``.

The slice carrier lives over the finite carrier of I, one copy of A per
point, and its filter is generated by the pulled-back members of φ together
with the family ``E_I``. Membership has two certificate shapes: a term over
those generators, or a single ``V ∈ φ`` with ``|I|*(V)·E_I ⊆ U`` (the lemma
form). Both are accepted and converted into each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from . import sk
from . import terms as T
from .assemblies import (
    Assembly,
    AsmMorphism,
    _pairs_set,
    fiber_pca,
    is_constant,
    is_prone,
    kit_cert,
    make_morphism,
)
from .backend import RegFunctor, World
from .morphisms import (
    ApplicativeMorphism,
    _splice,
    applicative,
    delta,
)
from .outcome import Verdict, conjoin
from .pca import (
    Budget,
    Filter,
    FilterCertificate,
    GenRef,
    ImageFilterProbe,
    MalformedCertificate,
    MaximalFilter,
    Pca,
    SingletonFilter,
    SliceFilter,
    as_derived,
    expand_kit,
    filter_member,
    synthesize,
)
from .realizers import Family, RealizerSet, parts_of, subsets_upto


class NotPartitioned(ValueError):
    """``E_I`` has two realizers for one point."""

    def __init__(self, witness: dict):
        super().__init__(f"assembly is not partitioned: {witness}")
        self.witness = witness


class NotOverI(ValueError):
    pass


# --- the slice PCA -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SlicePca:
    """``(A,φ)/I``: the base PCA, the index assembly and the fiberwise PCA."""

    base: Pca
    I: Assembly
    pca: Pca

    @property
    def points(self) -> tuple:
        return self.I.carrier

    def position(self, x: Any) -> int:
        return self.I.carrier.index(x)

    @property
    def E_I(self) -> Family:
        return Family(tuple(self.I.fiber(x) for x in self.I.carrier))


def slice_pca(pca: Pca, I: Assembly, name: str | None = None) -> SlicePca:
    """The slice of a Set-level PCA over an assembly with finite carrier."""
    if pca.indexed or I.index is not None:
        raise NotOverI("slices are taken of Set-level PCAs over Set-level assemblies")
    if not I.carrier:
        raise NotOverI("the index assembly must be inhabited")
    world = World.slice(I.carrier)
    fibers = tuple(pca.pas for _ in I.carrier)
    extra = Family(tuple(I.fiber(x) for x in I.carrier))
    flt = SliceFilter(pca, extra)
    sp = Pca(name or f"{pca.name}/{I.name}", world, fibers, flt, budget=pca.budget)
    return SlicePca(pca, I, sp)


def pulled_back(sp: SlicePca, u: RealizerSet) -> Family:
    """``|I|*(U)``."""
    return Family(tuple(u for _ in sp.points))


# --- certificate shapes --------------------------------------------------------

_S, _K = T.Const("s"), T.Const("k")
_I_SK = T.app(_S, _K, _K)


def _inline(cert: FilterCertificate) -> FilterCertificate:
    """Expand derived references so every generator is a pullback or E_I."""
    pieces = []
    for ref in cert.gens:
        if ref.kind == "derived":
            inner = _inline(FilterCertificate(*ref.data))
            pieces.append((inner.term, inner.gens))
        else:
            pieces.append((T.Var("x0"), (ref,)))
    return _splice(cert.term, pieces)


def _bind_kit(base: Pca, term: T.Term, gens: list) -> FilterCertificate:
    """Turn the k and s constants of a base term into generator variables."""
    mapping = {}
    for name in sorted(T.consts(term)):
        ref = base.kit_ref(name)
        if ref is None:
            raise MalformedCertificate(f"{base.name} has no generator for {name}")
        mapping[name] = T.Var(f"x{len(gens)}")
        gens.append(ref)
    return FilterCertificate(T.replace_consts(term, mapping), tuple(gens))


def to_lemma(sp: SlicePca, cert: FilterCertificate) -> FilterCertificate:
    """A slice certificate as a base certificate of some V with ``|I|*(V)·E_I ⊆ U``.

    A pulled-back generator U becomes K·U, the generator E_I becomes I, and an
    application t₁t₂ becomes S·t₁·t₂, so that ``V·e`` evaluates the original
    term at the realizer e of the index.
    """
    flat = _inline(cert)
    gens: list = []
    slots: dict = {}
    for j, ref in enumerate(flat.gens):
        if ref.kind == "pullback":
            slots[f"x{j}"] = T.App(_K, T.Var(f"x{len(gens)}"))
            gens.append(ref.data)
        elif ref.kind == "extra":
            slots[f"x{j}"] = _I_SK
        else:
            raise MalformedCertificate(f"slice generator of kind {ref.kind} has no lemma form")

    def tr(t: T.Term) -> T.Term:
        if isinstance(t, T.Var):
            return slots[t.name]
        if isinstance(t, T.App):
            return T.app(_S, tr(t.left), tr(t.right))
        raise MalformedCertificate("slice certificate terms use generator variables only")

    return _bind_kit(sp.base, tr(flat.term), gens)


def from_lemma(sp: SlicePca, vcert: FilterCertificate) -> FilterCertificate:
    """``V ∈ φ`` as the slice certificate ``|I|*(V)·E_I``."""
    return FilterCertificate(T.App(T.Var("x0"), T.Var("x1")), (GenRef("pullback", as_derived(vcert)), GenRef("extra")))


def check_lemma(sp: SlicePca, target: Family, vcert: FilterCertificate, budget: Budget | None = None) -> Verdict:
    """Replay ``V ∈ φ`` and check ``V·E_I ⊆ U_x`` on every fiber."""
    budget = budget or sp.base.budget
    ev = sp.base.eval_cert(vcert, None, budget)
    if not ev.verdict.ok:
        return ev.verdict
    V = ev.image(sp.base)
    out = [ev.verdict]
    for i, x in enumerate(sp.points):
        fp = fiber_pca(sp.pca, i)
        app = fp.eval_sets(T.App(T.Var("v"), T.Var("e")), {"v": V, "e": sp.I.fiber(x)}, parts_of(target)[i], budget)
        v = app.verdict
        if v.refuted:
            v = Verdict.refute({"index": repr(x), **v.counterexample}, v.checked)
        out.append(v)
    return conjoin(out)


def lemma_member(sp: SlicePca, target: Family, budget: Budget | None = None) -> tuple:
    """Membership in φ_I answered in lemma form: ``(verdict, V-certificate)``."""
    v, cert = filter_member(sp.pca, target, None, budget)
    if cert is None:
        return v, None
    vcert = to_lemma(sp, cert)
    return conjoin([v, check_lemma(sp, target, vcert, budget)]), vcert


def point_candidates(base: Pca, limit: int = 256) -> list:
    """A bounded prefix of the base's computable points (for singleton-generated filters)."""
    flt = base.filter
    if isinstance(flt, SingletonFilter):
        return list(itertools.islice(flt.enum(), limit))
    if isinstance(flt, MaximalFilter):
        pas = base.pas
        if hasattr(pas, "atoms"):
            return sk.enumerate_normal_forms(9, pas.atoms)[:limit]
        return list(pas.pool())[:limit]
    return []


def lemma_search(sp: SlicePca, target: Family, budget: Budget | None = None, limit: int = 256) -> tuple:
    """Look for a single point r with ``r·e ∈ U_x`` for every e ∈ E_I(x).

    Exhaustion of the bounded prefix is Unknown, never a refutation.
    """
    budget = budget or sp.base.budget
    cands = point_candidates(sp.base, limit)
    for r in cands:
        cert = FilterCertificate(T.Var("x0"), (GenRef("point", r),))
        v = check_lemma(sp, target, cert, budget)
        if v.ok:
            return v, cert
    return Verdict.unknown({"points": len(cands)}), None


# --- batteries ---------------------------------------------------------------


def battery(pools: Sequence[Sequence[Any]], max_size: int = 3) -> list:
    """All families of nonempty subsets of per-fiber pools, up to ``max_size`` each."""
    per = [subsets_upto(pool, max_size) for pool in pools]
    return [Family(tuple(combo)) for combo in itertools.product(*per)]


@dataclass
class BatteryReport:
    """Agreement between a filter and a reference predicate on a finite battery."""

    verdict: Verdict
    accepted: int
    rejected: int
    mismatches: list = field(default_factory=list)
    undecided: list = field(default_factory=list)


def filter_battery(
    pca: Pca,
    candidates: Sequence[Any],
    predicate: Callable[[Any], bool],
    budget: Budget | None = None,
    member: Callable[[Any], tuple] | None = None,
) -> BatteryReport:
    """Decide every candidate and compare with ``predicate``.

    Proven means every candidate was decided exactly (a replayed certificate
    or an exact refutation) and agreed with the predicate.
    """
    budget = budget or pca.budget
    member = member or (lambda u: filter_member(pca, u, None, budget))
    acc = rej = 0
    mismatches, undecided = [], []
    for u in candidates:
        v, _ = member(u)
        want = predicate(u)
        if not (v.ok or v.refuted):
            undecided.append(pca.show(u))
            continue
        acc += v.ok
        rej += v.refuted
        if v.ok != want:
            mismatches.append({"set": pca.show(u), "filter": v.kind, "expected": want})
    n = len(candidates)
    if mismatches:
        verdict = Verdict.refute(mismatches[0], n)
    elif undecided:
        verdict = Verdict.unknown({"undecided": len(undecided)}, n - len(undecided))
    else:
        verdict = Verdict.proven_(n, "battery agreement")
    return BatteryReport(verdict, acc, rej, mismatches, undecided)


# --- fixtures ----------------------------------------------------------------


def _closed(pca: Pca, name: str) -> Any:
    return pca.pas.const(T.Const(name))


def one_point(pca: Pca) -> Assembly:
    """The terminal assembly, realized by the whole carrier."""
    return Assembly("1", ("*",), {"*": RealizerSet.full(pca.pas.const(T.K))})


def one_plus_one(pca: Pca) -> Assembly:
    """``1+1``: point 0 realized by k, point 1 by k̄."""
    return Assembly("1+1", (0, 1), {0: RealizerSet.of([_closed(pca, "k")]), 1: RealizerSet.of([_closed(pca, "kbar")])})


def nabla_points(pca: Pca, n: int = 2, r0: Any = None) -> Assembly:
    """``∇n`` as the partitioned assembly with the constant realizer r₀."""
    r0 = _closed(pca, "k") if r0 is None else r0
    return Assembly(f"∇{n}", tuple(range(n)), {i: RealizerSet.of([r0]) for i in range(n)})


# --- the equivalence -----------------------------------------------------------


@dataclass
class SliceObject:
    """An object ``l_X: X → I`` of ``Asm(A,φ)/I``."""

    X: Assembly
    over: AsmMorphism


@dataclass
class IsoPair:
    """Identity-carried morphisms both ways."""

    to: AsmMorphism
    back: AsmMorphism

    @property
    def verdict(self) -> Verdict:
        return conjoin([self.to.verdict, self.back.verdict])


G_ARROW_TERM = T.abstract(
    ["x"],
    T.app(
        T.Const("p"),
        T.App(T.Const("p0"), T.Var("x")),
        T.app(T.Var("V"), T.App(T.Const("p0"), T.Var("x")), T.App(T.Const("p1"), T.Var("x"))),
    ),
)
UNIT_TERM = T.abstract(["x"], T.app(T.Const("p"), T.App(T.Var("U"), T.Var("x")), T.Var("x")))


@dataclass
class SliceEquivData:
    """The functors F and G between ``Asm(A,φ)/I`` and ``Asm((A,φ)/I)``."""

    slice: SlicePca
    budget: Budget

    # F -----------------------------------------------------------------

    def F_obj(self, obj: SliceObject) -> Assembly:
        """Same carrier and realizers, fibered by ``l_X``."""
        sp = self.slice
        if obj.over.target.carrier != sp.points:
            raise NotOverI(f"{obj.X.name} is not over {sp.I.name}")
        idx = {x: sp.position(obj.over(x)) for x in obj.X.carrier}
        return Assembly(f"F{obj.X.name}", obj.X.carrier, dict(obj.X.E), idx)

    def F_arrow(self, src: SliceObject, tgt: SliceObject, h: AsmMorphism) -> AsmMorphism:
        """``F h = h``, tracked by ``|I|*(U)``."""
        sp = self.slice
        for x in src.X.carrier:
            if tgt.over(h(x)) != src.over(x):
                raise NotOverI(f"{h.name} does not commute with the maps to {sp.I.name}")
        if h.tracker is None:
            why = Verdict.unknown({"arrow": h.name, "reason": "no tracker"})
            return AsmMorphism(self.F_obj(src), self.F_obj(tgt), dict(h.mapping), None, None, why, f"F{h.name}")
        tracker = pulled_back(sp, h.tracker)
        cert = None
        if h.certificate is not None:
            cert = FilterCertificate(T.Var("x0"), (GenRef("pullback", as_derived(h.certificate)),))
        return make_morphism(sp.pca, self.F_obj(src), self.F_obj(tgt), h.mapping, tracker, cert, self.budget, f"F{h.name}")

    # G -----------------------------------------------------------------

    def G_realizers(self, X: Assembly, x: Any) -> RealizerSet:
        """``E_GX(x) = {P c d | c ∈ E_I(k_X x), d ∈ E_X(x)}``."""
        sp = self.slice
        return _pairs_set(sp.base, 0, sp.I.fiber(sp.points[X.idx(x)]), X.fiber(x), self.budget)

    def G_obj(self, X: Assembly) -> SliceObject:
        """Pair the index realizers with the realizers of X; ``l_GX = k_X`` tracked by P0."""
        sp = self.slice
        if X.index is None:
            raise NotOverI("G acts on assemblies over the slice PCA")
        E = {x: self.G_realizers(X, x) for x in X.carrier}
        GX = Assembly(f"G{X.name}", X.carrier, E)
        p0, c0, _ = kit_cert(sp.base, "p0", self.budget)
        l = make_morphism(sp.base, GX, sp.I, {x: sp.points[X.idx(x)] for x in X.carrier}, p0, c0, self.budget, f"l_G{X.name}")
        return SliceObject(GX, l)

    def G_arrow(self, h: AsmMorphism) -> AsmMorphism:
        """``G h = h``, tracked by λx.P(P0x)(V(P0x)(P1x)) for the lemma-form V of h's tracker."""
        sp = self.slice
        if h.certificate is None:
            return AsmMorphism(self.G_obj(h.source).X, self.G_obj(h.target).X, dict(h.mapping), None, None, Verdict.unknown({"reason": "tracker not certified"}), f"G{h.name}")
        vcert = to_lemma(sp, h.certificate)
        lv = check_lemma(sp, h.tracker, vcert, self.budget)
        V = sp.base.eval_cert(vcert, None, self.budget).image(sp.base)
        syn = synthesize(sp.base, G_ARROW_TERM, {"V": V}, {"V": vcert}, self.budget)
        GX, GY = self.G_obj(h.source).X, self.G_obj(h.target).X
        if syn.realizer is None:
            return AsmMorphism(GX, GY, dict(h.mapping), None, None, syn.verdict, f"G{h.name}")
        out = make_morphism(sp.base, GX, GY, h.mapping, syn.realizer, syn.certificate, self.budget, f"G{h.name}")
        out.verdict = conjoin([out.verdict, syn.verdict, lv])
        return out

    # round trips ---------------------------------------------------------

    def unit_iso(self, obj: SliceObject) -> IsoPair:
        """``X ≅ GFX``: λx.P(Ux)x one way (U tracks l_X), P1 back."""
        base = self.slice.base
        GFX = self.G_obj(self.F_obj(obj)).X
        ident = {x: x for x in obj.X.carrier}
        syn = synthesize(base, UNIT_TERM, {"U": obj.over.tracker}, {"U": obj.over.certificate} if obj.over.certificate else {}, self.budget)
        to = make_morphism(base, obj.X, GFX, ident, syn.realizer, syn.certificate, self.budget, "X→GFX")
        to.verdict = conjoin([to.verdict, syn.verdict])
        p1, c1, _ = kit_cert(base, "p1", self.budget)
        back = make_morphism(base, GFX, obj.X, ident, p1, c1, self.budget, "GFX→X")
        return IsoPair(to, back)

    def counit_iso(self, X: Assembly) -> IsoPair:
        """``X ≅ FGX``: ``|I|*(P)·E_I`` one way, ``|I|*(P1)`` back."""
        sp = self.slice
        G = self.G_obj(X)
        FGX = self.F_obj(G)
        ident = {x: x for x in X.carrier}
        pref = sp.pca.kit_ref("p")
        cert = FilterCertificate(T.App(T.Var("x0"), T.Var("x1")), (pref, GenRef("extra")))
        ev = sp.pca.eval_cert(cert, None, self.budget)
        tracker = ev.image(sp.pca)
        to = make_morphism(sp.pca, X, FGX, ident, tracker, cert, self.budget, "X→FGX")
        p1, c1, _ = kit_cert(sp.pca, "p1", self.budget)
        back = make_morphism(sp.pca, FGX, X, ident, p1, c1, self.budget, "FGX→X")
        return IsoPair(to, back)

    def round_trip(self, objects: Sequence[SliceObject] = (), slice_objects: Sequence[Assembly] = ()) -> Verdict:
        """Both isos certify on every fixture object, and GF/FG keep carrier and fibering."""
        out = []
        for obj in objects:
            out.append(self.unit_iso(obj).verdict)
            g = self.G_obj(self.F_obj(obj))
            same = g.X.carrier == obj.X.carrier and g.over.mapping == obj.over.mapping
            out.append(Verdict.proven_(1) if same else Verdict.refute({"object": obj.X.name, "reason": "GF changes the fibering"}))
        for X in slice_objects:
            out.append(self.counit_iso(X).verdict)
            FG = self.F_obj(self.G_obj(X))
            same = FG.carrier == X.carrier and all(FG.idx(x) == X.idx(x) for x in X.carrier)
            out.append(Verdict.proven_(1) if same else Verdict.refute({"object": X.name, "reason": "FG changes the fibering"}))
        return conjoin(out)


def slice_equivalence(pca: Pca | SlicePca, I: Assembly | None = None, budget: Budget | None = None) -> SliceEquivData:
    sp = pca if isinstance(pca, SlicePca) else slice_pca(pca, I)
    return SliceEquivData(sp, budget or sp.base.budget)


def over(pca: Pca, X: Assembly, I: Assembly, mapping: Mapping[Any, Any], hint: Any = None, budget: Budget | None = None) -> SliceObject:
    """A slice object from a tracked map ``X → I``."""
    from .assemblies import check_morphism

    return SliceObject(X, check_morphism(pca, X, I, mapping, hint, budget))


@dataclass
class Correspondence:
    name: str
    constant: Verdict
    prone: Verdict

    @property
    def agree(self) -> bool | None:
        decided = lambda v: v.ok or v.refuted  # noqa: E731
        if not (decided(self.constant) and decided(self.prone)):
            return None
        return self.constant.ok == self.prone.ok


def constant_prone(eq: SliceEquivData, objects: Sequence[SliceObject]) -> list:
    """For each object: is F X constant over the slice, and is ``l_X`` prone in the base?"""
    out = []
    for obj in objects:
        cv, _, _ = is_constant(eq.slice.pca, eq.F_obj(obj), eq.budget)
        pv = is_prone(eq.slice.base, obj.over, eq.budget).verdict
        out.append(Correspondence(obj.X.name, cv, pv))
    return out


# --- pullback of slices along a morphism of assemblies -------------------------


def slice_pullback_morphism(
    f: AsmMorphism,
    source: SlicePca | None = None,
    target: SlicePca | None = None,
    budget: Budget | None = None,
) -> ApplicativeMorphism:
    """``(f*, δ): (A,φ)/J → (A,φ)/I`` for a tracked ``f: I → J``.

    Condition (c′) is certified from f's tracker: ``|I|*(U)·E_I ⊆ f*(E_J)``,
    and a pulled-back generator stays pulled back.
    """
    I, J = f.source, f.target
    base = (source or target).base if (source or target) else None
    if base is None:
        raise NotOverI("give the slice PCA over I or over J")
    sJ = source or slice_pca(base, J)
    sI = target or slice_pca(base, I)
    budget = budget or base.budget
    functor = RegFunctor.reindex(sJ.pca.world, sI.pca.world, [f(x) for x in I.carrier])
    iref = sI.pca.kit_ref("i")
    icert = FilterCertificate(T.Var("x0"), (iref,))
    m = applicative(f"{functor}", sJ.pca, sI.pca, delta(), sI.pca.kit_set("i"), functor, icert, budget, generators=[])
    gens = []
    for ref in sJ.pca.filter.candidates(sJ.pca, None):
        if ref.kind == "pullback":
            u = sI.pca.resolve(ref)
            gens.append((f"|J|*({sJ.base.show(sJ.base.resolve(ref.data))})", u, FilterCertificate(T.Var("x0"), (ref,))))
    img = functor.on_set(sJ.E_I)
    if f.certificate is not None:
        gens.append(("E_J", img, from_lemma(sI, f.certificate)))
    else:
        v, c = filter_member(sI.pca, img, None, budget)
        gens.append(("E_J", img, c))
    out, records = [], []
    for label, u, cert in gens:
        v = sI.pca.replay(u, cert, budget) if cert is not None else Verdict.unknown({"generator": label})
        out.append(v)
        records.append((label, u, cert, v))
    m.conditions["c"] = conjoin(out)
    m.images = records
    return m


# --- partitioned assemblies ------------------------------------------------------


def check_partitioned(I: Assembly) -> tuple:
    """The code ``f(x)`` of each point, or NotPartitioned with two realizers of one point."""
    codes = []
    for x in I.carrier:
        e = I.fiber(x)
        if not e.is_finite:
            raise NotPartitioned({"point": repr(x), "reason": "infinitely many realizers"})
        if len(e.elements) != 1:
            raise NotPartitioned({"point": repr(x), "realizers": [repr(a) for a in e.elements[:2]]})
        codes.append(e.elements[0])
    return tuple(codes)


class PartitionedSliceFilter(Filter):
    """Generated by sections ``x ↦ r·f(x)`` for computable points r.

    Candidates for r are a bounded prefix of the base's points, constants
    ``k·c`` and selectors ``λx.x c₀ … c_{n-1}`` built from core points of the
    target; each is replayed, and running out is Unknown.
    """

    label = "partitioned"

    def __init__(self, base: Pca, codes: tuple, limit: int = 256):
        self.base = base
        self.codes = codes
        self.limit = limit
        self.core = base.filter.core
        self.support = base.filter.support
        self.mode = None
        if self.core is not None:
            probe = ImageFilterProbe(self.core)
            extra = Family(tuple(RealizerSet.of([c]) for c in codes))
            self.mode = "diagonal" if probe.meets(extra, "diagonal") else "parts" if probe.meets(extra, "parts") else None

    def _computable(self, r: Any) -> bool:
        return self.core(r) if self.core is not None else True

    def section(self, pca: Pca, r: Any) -> tuple | None:
        vals = []
        for c in self.codes:
            out = pca.pas.apply(r, c, pca.budget.fuel)
            if not out.defined:
                return None
            vals.append(out.value)
        return tuple(vals)

    def resolve(self, pca: Pca, ref: GenRef) -> Any:
        if ref.kind == "section":
            if not self._computable(ref.data):
                raise MalformedCertificate(f"{pca.pas.show(ref.data)} is not computable")
            vals = self.section(pca, ref.data)
            if vals is None:
                raise MalformedCertificate("section undefined")
            return Family(tuple(RealizerSet.of([v]) for v in vals))
        return super().resolve(pca, ref)

    def _selectors(self, pca: Pca, target: Any) -> list:
        parts = parts_of(target)
        if not all(p.is_finite for p in parts):
            return []
        cores = [[e for e in p.elements if self.core is None or self.core(e)] for p in parts]
        out = []
        common = set(cores[0]).intersection(*cores[1:]) if cores else set()
        for c in sorted(common, key=repr):
            kc = pca.pas.apply(pca.pas.const(T.K), c, pca.budget.fuel)
            if kc.defined:
                out.append(kc.value)
        xs = T.Var("x")
        for combo in itertools.islice(itertools.product(*cores), 64):
            body = T.app(xs, *[T.Const("c", c) for c in combo])
            t = T.abstract(["x"], expand_kit(body))
            r = T.eval_term(pca.pas, t, {}, pca.budget.fuel)
            if r.defined:
                out.append(r.value)
        return out

    def sections(self, pca: Pca) -> list:
        """Sections from the bounded prefix of computable points, with their r."""
        out = []
        for r in point_candidates(self.base, self.limit):
            vals = self.section(pca, r)
            if vals is not None:
                out.append((r, vals))
        return out

    def shortcut(self, pca: Pca, target: Any, budget: Budget) -> tuple | None:
        parts = parts_of(target)
        cands = self._selectors(pca, target) + point_candidates(self.base, self.limit)
        for r in cands:
            if not self._computable(r):
                continue
            vals = self.section(pca, r)
            if vals is None:
                continue
            if all(p.contains(v) for p, v in zip(parts, vals)):
                cert = FilterCertificate(T.Var("x0"), (GenRef("section", r),))
                return pca.replay(target, cert, budget), cert
        return Verdict.unknown({"points": len(cands)}), None

    def kit_ref(self, pca: Pca, name: str) -> GenRef | None:
        # the constant section of a combinator c is computed by k·c
        c = pca.pas.const(T.Const(name))
        kc = pca.pas.apply(pca.pas.const(T.K), c, pca.budget.fuel)
        return GenRef("section", kc.value) if kc.defined else None

    def describe(self) -> dict:
        return {"mode": self.label, "base": self.base.filter.describe(), "codes": len(self.codes)}


def partitioned_slice_filter(pca: Pca, I: Assembly, limit: int = 256) -> Pca:
    """The slice over a partitioned assembly, presented by computable sections."""
    if not isinstance(pca.filter, (SingletonFilter, MaximalFilter)):
        raise ValueError("partitioned slices need a singleton-generated base filter")
    codes = check_partitioned(I)
    flt = PartitionedSliceFilter(pca, codes, limit)
    return Pca(f"{pca.name}/{I.name}ₚ", World.slice(I.carrier), tuple(pca.pas for _ in I.carrier), flt, budget=pca.budget)


def brute_sections(pca: Pca, I: Assembly, limit: int = 256) -> set:
    """All sections ``x ↦ r·f(x)`` for r in the prefix, computed directly."""
    codes = check_partitioned(I)
    out = set()
    core = pca.filter.core
    for r in point_candidates(pca, limit):
        if core is not None and not core(r):
            continue
        vals = []
        for c in codes:
            o = pca.pas.apply(r, c, pca.budget.fuel)
            if not o.defined:
                break
            vals.append(o.value)
        else:
            out.add(tuple(vals))
    return out
