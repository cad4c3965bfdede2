"""Applicative morphisms, their preorder, transport along regular functors,
applicative transformations, pseudo-structure and the induced functors on
assemblies.

An applicative morphism ``(p, f)`` is stored as a fiberwise relation from the
transported carrier ``p(A)`` into the target carrier. Its three conditions are
kept as separate verdicts: totality (a), tracking (b) and the filter-image
condition checked on a finite list of generators (c′).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from . import terms as T
from .assemblies import Assembly, AsmMorphism, _union, make_morphism
from .backend import SET, ComposedFunctor, RegFunctor, Rel, World, WorldMismatch, arrow, compose_rel, same_graph
from .outcome import Tally, Verdict, conjoin
from .pca import (
    Budget,
    ComponentwiseFilter,
    FilterCertificate,
    GenRef,
    ImageFilter,
    MalformedCertificate,
    Pca,
    ProductPas,
    RectFilter,
    TrivialPas,
    MaximalFilter,
    as_derived,
    filter_member,
    shift_cert_term,
    synthesize,
)
from .realizers import Family, RealizerSet, parts_of


class Mismatch(ValueError):
    pass


class IndexNotFinite(ValueError):
    pass


class NotNatural(ValueError):
    def __init__(self, square: dict):
        super().__init__(f"naturality square fails: {square}")
        self.square = square


# --- relations between carriers ---------------------------------------------


@dataclass(frozen=True, eq=False)
class Relation:
    """``f ⊆ p(A) × B`` given fiberwise by ``forward(i, a) = f(a)``.

    ``image_fn`` computes ``f(U)`` exactly for sets the default (a union over a
    finite U) cannot handle.
    """

    name: str
    forward_fn: Callable[[int, Any], RealizerSet]
    image_fn: Callable[[Any], Any] | None = None
    # known to be the diagonal, so f(a) = {a} everywhere
    diagonal: bool = False

    def forward(self, i: int, a: Any) -> RealizerSet:
        return self.forward_fn(i, a)

    def image(self, u: Any, target: Pca, budget: Budget | None = None) -> Any:
        if self.image_fn is not None:
            hit = self.image_fn(u)
            if hit is not None:
                return hit
        budget = budget or target.budget
        parts = []
        for i, p in enumerate(parts_of(u)):
            if p.is_finite:
                parts.append(_union([self.forward(i, a) for a in p.elements]))
                continue
            seen = p.sample((), lambda rng: p.inhabitant, budget.samples, budget.seed)
            merged = _union([self.forward(i, a) for a in seen])
            parts.append(RealizerSet.partial(merged.elements) if merged.is_finite else merged)
        return target.wrap(parts)


def delta(name: str = "δ") -> Relation:
    """The diagonal (identity) relation."""
    return Relation(name, lambda i, a: RealizerSet.of([a]), lambda u: u, True)


def mapping(fn: Callable[[Any], Any], name: str, image_fn: Callable[[Any], Any] | None = None) -> Relation:
    """The graph of an element-level function, the same on every fiber."""
    return Relation(name, lambda i, a: RealizerSet.of([fn(a)]), image_fn)


def zero_relation(target: Pca) -> Relation:
    """``A × B``: every element is related to everything."""
    full = target.full()
    return Relation("0", lambda i, a: parts_of(full)[i], lambda u: full)


def compose_relations(f: Relation, g: Relation, name: str = "") -> Relation:
    """``g∘f``; f-images must be finite or have a sample."""

    def forward(i: int, a: Any) -> RealizerSet:
        mid = f.forward(i, a)
        if mid.is_finite:
            return _union([g.forward(i, b) for b in mid.elements])
        probes = [g.forward(i, b) for b in mid.sample((), lambda rng: mid.inhabitant, 6, 0)]
        merged = _union(probes)
        return RealizerSet.partial(merged.elements) if merged.is_finite else merged

    if f.diagonal and g.diagonal:
        return Relation(name or f"{g.name}∘{f.name}", forward, lambda u: u, True)
    return Relation(name or f"{g.name}∘{f.name}", forward)


def transport_relation(p: Any, f: Relation) -> Relation:
    """``p(f)``: the relation transported along a regular functor."""
    if isinstance(p, ComposedFunctor):
        for step in p.steps:
            f = transport_relation(step, f)
        return f
    kind = p.kind
    if kind == "Identity":
        return f
    if kind == "Pullback":
        return Relation(f"{p}({f.name})", lambda i, a: f.forward(0, a), None, f.diagonal)
    if kind == "Projection":
        pos = p.position
        return Relation(f"{f.name}_{p.component}", lambda i, a: f.forward(pos, a))
    if kind == "Swap":
        return Relation(f.name, lambda i, a: f.forward(1 - i, a))
    if kind == "Reindex":
        pos = p.positions
        return Relation(f"f*{f.name}", lambda i, a: f.forward(pos[i], a), None, f.diagonal)
    if kind == "Product":

        def forward(i: int, a: Any) -> RealizerSet:
            return RegFunctor.product(p.source).on_set(Family((f.forward(0, a[0]), f.forward(1, a[1]))))

        return Relation(f"Π{f.name}", forward)
    if kind == "Terminal":
        return Relation("!", lambda i, a: RealizerSet.of(["•"]))
    raise WorldMismatch(f"cannot transport along {p}")


# --- transport of PCAs and certificates -------------------------------------

_TRANSPORTS: dict = {}


def _steps(p: Any) -> tuple:
    return p.steps if isinstance(p, ComposedFunctor) else (p,)


def _world_ok(p: RegFunctor, world: World) -> bool:
    if p.source == world:
        return True
    return p.source.kind in ("Pow", "Slice") and world.kind in ("Pow", "Slice") and p.source.index == world.index


def product_pca(pcas: Sequence[Pca], name: str | None = None) -> Pca:
    """The 2-product over a finite power world, with the componentwise filter."""
    pcas = tuple(pcas)
    if not pcas:
        raise IndexNotFinite("the index must be a nonempty finite set")
    fibers = tuple(c.pas for c in pcas)
    world = World.pow(range(len(pcas)))
    return Pca(name or "∏(" + ",".join(c.name for c in pcas) + ")", world, fibers, ComponentwiseFilter(), pcas, pcas[0].budget)


def transport(p: Any, x: Any) -> Any:
    """Transport a PCA, an applicative morphism or a certificate along ``p``.

    PCAs get the filter presented by the images of the generators; a 2-product
    transported along a projection is its component on the nose.
    """
    if isinstance(x, Pca):
        return _transport_pca(p, x)
    if isinstance(x, ApplicativeMorphism):
        return transport_morphism(p, x)
    raise TypeError(f"cannot transport {type(x).__name__}")


def _transport_pca(p: Any, pca: Pca) -> Pca:
    for step in _steps(p):
        pca = _transport_step(step, pca)
    return pca


def _transport_step(p: RegFunctor, pca: Pca) -> Pca:
    if not _world_ok(p, pca.world):
        raise WorldMismatch(f"{pca.name} lives in {pca.world}, {p} expects {p.source}")
    key = (p, id(pca))
    hit = _TRANSPORTS.get(key)
    if hit is not None and hit[0] is pca:
        return hit[1]
    comp = isinstance(pca.filter, ComponentwiseFilter)
    kind = p.kind
    if kind == "Identity":
        out = pca
    elif kind == "Projection":
        out = pca.components[p.position] if comp else Pca(f"{pca.name}_{p.component}", SET, (pca.fibers[p.position],), ImageFilter(p, pca), budget=pca.budget)
    elif kind == "Swap":
        out = product_pca(tuple(reversed(pca.components))) if comp else Pca(f"{pca.name}ˢ", pca.world, tuple(reversed(pca.fibers)), ImageFilter(p, pca), budget=pca.budget)
    elif kind == "Product":
        if comp:
            l, r = pca.components
            out = Pca(f"{l.name}×{r.name}", SET, (ProductPas(l.pas, r.pas),), RectFilter(l, r), budget=pca.budget)
        else:
            out = Pca(f"Π{pca.name}", SET, (ProductPas(*pca.fibers),), ImageFilter(p, pca), budget=pca.budget)
    elif kind == "Pullback":
        n = len(p.target.index)
        out = Pca(f"{p}*{pca.name}", p.target, tuple(pca.pas for _ in range(n)), ImageFilter(p, pca), budget=pca.budget)
    elif kind == "Reindex":
        out = Pca(f"{p}*{pca.name}", p.target, tuple(pca.fibers[k] for k in p.positions), ImageFilter(p, pca), budget=pca.budget)
    elif kind == "Terminal":
        out = Pca("1", SET, (TrivialPas(),), MaximalFilter(), budget=pca.budget)
    else:
        raise WorldMismatch(f"unsupported functor {p}")
    _TRANSPORTS[key] = (pca, out)
    return out


def transport_cert(p: Any, cert: FilterCertificate, pca: Pca) -> FilterCertificate:
    """Carry a certificate over ``pca`` to one over ``p*(pca)``, term for term."""
    for step in _steps(p):
        cert = _transport_cert_step(step, cert, pca)
        pca = _transport_step(step, pca)
    return cert


def _transport_cert_step(p: RegFunctor, cert: FilterCertificate, pca: Pca) -> FilterCertificate:
    comp = isinstance(pca.filter, ComponentwiseFilter)
    if p.kind == "Identity":
        return cert
    if p.kind == "Terminal":
        return FilterCertificate(T.Var("x0"), (GenRef("point", "•"),))
    if comp:
        if cert.parts is None:
            raise MalformedCertificate("componentwise certificate expected")
        if p.kind == "Projection":
            return cert.parts[p.position]
        if p.kind == "Swap":
            return FilterCertificate(None, (), tuple(reversed(cert.parts)))
        if p.kind == "Product":
            ref = GenRef("rect", (as_derived(cert.parts[0]), as_derived(cert.parts[1])))
            return FilterCertificate(T.Var("x0"), (ref,))
    return FilterCertificate(cert.term, tuple(GenRef("image", r) for r in cert.gens))


# --- applicative morphisms ---------------------------------------------------


@dataclass(frozen=True)
class Generator:
    label: str
    set: Any
    certificate: FilterCertificate


def filter_generators(pca: Pca, limit: int = 4) -> list:
    """A finite list of filter generators to check condition (c′) on."""
    if isinstance(pca.filter, ComponentwiseFilter):
        per = [filter_generators(c, limit) for c in pca.components]
        out = []
        for combo in itertools.islice(itertools.product(*per), limit):
            label = "(" + ", ".join(g.label for g in combo) + ")"
            out.append(Generator(label, pca.wrap([g.set for g in combo]), FilterCertificate(None, (), tuple(g.certificate for g in combo))))
        return out
    refs = list(pca.filter.candidates(pca, None))
    for name in ("k", "s"):
        r = pca.kit_ref(name)
        if r is not None and r not in refs:
            refs.append(r)
    out = []
    for ref in refs:
        try:
            u = pca.resolve(ref)
        except MalformedCertificate:
            continue
        out.append(Generator(pca.show(u), u, FilterCertificate(T.Var("x0"), (ref,))))
        if len(out) >= limit:
            break
    return out


def domain_sample(pca: Pca, i: int, budget: Budget) -> tuple:
    """Carrier elements of fiber ``i`` to quantify over, and whether that is all of them."""
    pas = pca.fibers[i]
    if pas.finite_elements is not None:
        return list(pas.finite_elements), True
    rng = random.Random(budget.seed + 31 * i)
    seen: dict = {}
    for e in pas.pool():
        seen.setdefault(repr(e), e)
    while len(seen) < budget.samples:
        e = pas.draw(rng)
        seen.setdefault(repr(e), e)
    return [seen[k] for k in sorted(seen)][: max(budget.samples, len(pas.pool()))], False


def _members(u: RealizerSet, pca: Pca, i: int, n: int, seed: int) -> tuple:
    """Up to n members of u and whether they are all of them."""
    if u.is_finite:
        return list(u.elements[:n]), len(u.elements) <= n
    pas = pca.fibers[i]
    if pas.finite_elements is not None:
        return [e for e in pas.finite_elements if u.contains(e)][:n], False
    return u.sample(pas.pool(), pas.draw, n, seed), False


@dataclass(eq=False)
class ApplicativeMorphism:
    """``(p, f): (A,φ) → (B,ψ)`` with its tracker and condition verdicts."""

    name: str
    source: Pca
    target: Pca
    functor: Any
    domain: Pca
    relation: Relation
    tracker: Any
    certificate: FilterCertificate | None
    conditions: dict
    images: list = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        return conjoin(self.conditions.values())

    def forward(self, i: int, a: Any) -> RealizerSet:
        return self.relation.forward(i, a)

    def image(self, u: Any, budget: Budget | None = None) -> Any:
        return self.relation.image(u, self.target, budget)

    def report(self) -> dict:
        return {
            "name": self.name,
            "functor": str(self.functor),
            "source": self.source.name,
            "target": self.target.name,
            "conditions": {k: v.to_json() for k, v in sorted(self.conditions.items())},
        }


def check_totality(domain: Pca, rel: Relation, budget: Budget) -> Verdict:
    tally = Tally()
    for i in range(len(domain.fibers)):
        xs, full = domain_sample(domain, i, budget)
        if not full:
            tally.sampled()
        for a in xs:
            try:
                rel.forward(i, a)
                tally.ok()
            except (ValueError, KeyError, TypeError) as exc:
                tally.fail({"fiber": i, "element": domain.fibers[i].show(a), "error": str(exc)})
    return tally.verdict()


def check_tracking(domain: Pca, target: Pca, rel: Relation, u: Any, budget: Budget) -> Verdict:
    """Condition (b): ``rbb′↓ ∧ f(aa′, rbb′)`` for aa′↓, f(a,b), f(a′,b′), r ∈ u."""
    tally = Tally()
    skipped = 0
    rng = random.Random(budget.seed + 5)
    for i in range(len(domain.fibers)):
        dpas, tpas = domain.fibers[i], target.fibers[i]
        xs, full = domain_sample(domain, i, budget)
        pairs = list(itertools.product(xs, xs))
        if not full or len(pairs) > 4 * budget.samples:
            tally.sampled()
            rng.shuffle(pairs)
            pairs = pairs[: 4 * budget.samples]
        rs, rs_all = _members(parts_of(u)[i], target, i, 3, budget.seed)
        if not rs_all:
            tally.sampled()
        for a, a2 in pairs:
            aa = dpas.apply(a, a2, budget.fuel)
            if not aa.defined:
                # the premise aa'↓ fails or is undecided within fuel
                skipped += aa.is_unknown
                continue
            bs, b_all = _members(rel.forward(i, a), target, i, 2, budget.seed)
            b2s, b2_all = _members(rel.forward(i, a2), target, i, 2, budget.seed + 1)
            if not (b_all and b2_all):
                tally.sampled()
            goal = rel.forward(i, aa.value)
            for r, b, b2 in itertools.product(rs, bs, b2s):
                out = T.eval_term(tpas, T.app(T.Const("r", r), T.Const("b", b), T.Const("c", b2)), {}, budget.fuel)
                where = {"fiber": i, "a": dpas.show(a), "a'": dpas.show(a2), "r": tpas.show(r), "b": tpas.show(b), "b'": tpas.show(b2)}
                if not out.defined:
                    if out.is_unknown:
                        tally.unknown({"fuel": budget.fuel, **where})
                    else:
                        tally.fail({**where, "reason": "rbb' undefined"})
                    continue
                hit = goal.contains(out.value)
                if hit:
                    tally.ok()
                elif hit is None:
                    tally.unknown({"membership": tpas.show(out.value)})
                else:
                    tally.fail({**where, "value": tpas.show(out.value), "reason": "not related to aa'"})
    if skipped:
        tally.note = f"{skipped} pairs with aa' undecided within fuel were skipped"
    return tally.verdict()


def check_images(domain: Pca, target: Pca, rel: Relation, gens: Sequence[Generator], budget: Budget) -> tuple:
    """Condition (c′): ``f(U) ∈ ψ`` for each listed generator U."""
    out, records = [], []
    for g in gens:
        img = rel.image(g.set, target, budget)
        v, cert = filter_member(target, img, None, budget)
        if v.refuted:
            v = Verdict.refute({"generator": g.label, **(v.counterexample or {})}, v.checked)
        out.append(v)
        records.append((g.label, img, cert, v))
    return conjoin(out), records


def applicative(
    name: str,
    source: Pca,
    target: Pca,
    relation: Relation,
    tracker: Any,
    functor: Any = None,
    certificate: FilterCertificate | None = None,
    budget: Budget | None = None,
    generators: Sequence[Generator] | None = None,
) -> ApplicativeMorphism:
    """Check an applicative morphism given its relation and a tracker."""
    budget = budget or target.budget
    functor = functor or RegFunctor.identity(source.world)
    domain = transport(functor, source)
    if len(domain.fibers) != len(target.fibers):
        raise WorldMismatch(f"{domain.name} and {target.name} have different index sets")
    ca = check_totality(domain, relation, budget)
    fv, certificate = filter_member(target, tracker, certificate, budget)
    cb = conjoin([check_tracking(domain, target, relation, tracker, budget), fv])
    gens = list(generators) if generators is not None else filter_generators(domain)
    cc, records = check_images(domain, target, relation, gens, budget)
    return ApplicativeMorphism(name, source, target, functor, domain, relation, tracker, certificate, {"a": ca, "b": cb, "c": cc}, records)


def identity(pca: Pca, budget: Budget | None = None) -> ApplicativeMorphism:
    """``δ_A``, tracked by i."""
    ref = pca.kit_ref("i")
    cert = FilterCertificate(T.Var("x0"), (ref,)) if ref is not None else None
    return applicative(f"δ_{pca.name}", pca, pca, delta(), pca.kit_set("i"), None, cert, budget)


def _then(p: Any, q: Any) -> Any:
    """``q∘p`` with identities dropped."""
    steps = [s for s in _steps(p) + _steps(q) if s.kind != "Identity"]
    if not steps:
        return _steps(p)[0]
    return steps[0] if len(steps) == 1 else ComposedFunctor(tuple(steps))


COMPOSE_APP_TERM = T.abstract(["x", "y"], T.app(T.Var("V"), T.app(T.Var("V"), T.Var("G"), T.Var("x")), T.Var("y")))


def compose_applicative(f: ApplicativeMorphism, g: ApplicativeMorphism, budget: Budget | None = None) -> ApplicativeMorphism:
    """``(qp, g∘q(f))`` tracked by λxy.V(V·g(q(U))·x)y."""
    budget = budget or g.target.budget
    if f.target is not g.source:
        raise Mismatch(f"{f.target.name} is not {g.source.name}")
    q = g.functor
    qf = transport_relation(q, f.relation)
    qU = q.on_set(f.tracker)
    gU = g.image(qU, budget)
    gv, gcert = filter_member(g.target, gU, None, budget)
    rel = compose_relations(qf, g.relation, f"{g.name}∘{f.name}")
    certs = {k: c for k, c in (("V", g.certificate), ("G", gcert)) if c is not None}
    syn = synthesize(g.target, COMPOSE_APP_TERM, {"V": g.tracker, "G": gU}, certs, budget)
    if syn.realizer is None:
        bad = conjoin([syn.verdict, gv])
        return ApplicativeMorphism(rel.name, f.source, g.target, _then(f.functor, q), transport(q, f.domain), rel, None, None, {"b": bad})
    m = applicative(rel.name, f.source, g.target, rel, syn.realizer, _then(f.functor, q), syn.certificate, budget)
    m.conditions["synthesis"] = syn.verdict
    return m


def same_relation(f: ApplicativeMorphism, g: ApplicativeMorphism, budget: Budget | None = None) -> Verdict:
    """Equality of the relation parts on the checked elements of the domain."""
    budget = budget or f.target.budget
    tally = Tally()
    for i in range(len(f.domain.fibers)):
        xs, full = domain_sample(f.domain, i, budget)
        if not full:
            tally.sampled()
        for a in xs:
            u, v = f.forward(i, a), g.forward(i, a)
            same = u == v if u.is_finite and v.is_finite else (u.is_full and v.is_full) or None
            if same:
                tally.ok()
            elif same is None:
                tally.unknown({"element": f.domain.fibers[i].show(a)})
            else:
                tally.fail({"fiber": i, "element": f.domain.fibers[i].show(a)})
    return tally.verdict()


# --- the preorder ------------------------------------------------------------


@dataclass
class InequalityCertificate:
    """A realizer of ``f ≤ f′`` with its filter certificate and the checked log."""

    realizer: Any
    certificate: FilterCertificate | None
    verdict: Verdict
    log: list = field(default_factory=list)
    term: T.Term | None = None


def check_leq(domain: Pca, target: Pca, f: Callable[[int, Any], RealizerSet], g: Callable[[int, Any], RealizerSet], u: Any, budget: Budget) -> tuple:
    """``f(a,b) ∧ r ∈ u → rb↓ ∧ g(a, rb)`` on the checked a, b, r."""
    tally = Tally()
    log = []
    for i in range(len(domain.fibers)):
        xs, full = domain_sample(domain, i, budget)
        if not full:
            tally.sampled()
        tpas = target.fibers[i]
        rs, rs_all = _members(parts_of(u)[i], target, i, 3, budget.seed)
        if not rs_all:
            tally.sampled()
        for a in xs:
            bs, b_all = _members(f(i, a), target, i, 3, budget.seed)
            if not b_all:
                tally.sampled()
            goal = g(i, a)
            for r, b in itertools.product(rs, bs):
                out = tpas.apply(r, b, budget.fuel)
                where = {"fiber": i, "a": domain.fibers[i].show(a), "r": tpas.show(r), "b": tpas.show(b)}
                if not out.defined:
                    if out.is_unknown:
                        tally.unknown({"fuel": budget.fuel, **where})
                    else:
                        tally.fail({**where, "reason": "rb undefined"})
                    continue
                hit = goal.contains(out.value)
                if hit:
                    tally.ok()
                    if len(log) < 8:
                        log.append({**where, "rb": tpas.show(out.value)})
                elif hit is None:
                    tally.unknown({"membership": tpas.show(out.value)})
                else:
                    tally.fail({**where, "rb": tpas.show(out.value), "reason": "outside f′(a)"})
    return tally.verdict(), log


def _leq_candidates(target: Pca, budget: Budget) -> list:
    out = [target.kit_set(n) for n in ("i", "p0", "p1", "k", "kbar")]
    parts = []
    for pas in target.fibers:
        k = pas.const(T.K)
        ke = pas.apply(k, k, budget.fuel)
        parts.append(RealizerSet.of([ke.value]) if ke.defined else RealizerSet.of([k]))
    out.append(target.wrap(parts))
    return out


def preorder_check(
    f: ApplicativeMorphism,
    f2: ApplicativeMorphism,
    hint: Any = None,
    budget: Budget | None = None,
    cert: FilterCertificate | None = None,
) -> InequalityCertificate:
    """Certify ``f ≤ f′``; verify a hint or try a short candidate list."""
    budget = budget or f.target.budget
    if f.target is not f2.target or len(f.domain.fibers) != len(f2.domain.fibers):
        raise Mismatch("f and f′ must be parallel")
    cands = [hint] if hint is not None else _leq_candidates(f.target, budget)
    last = None
    for u in cands:
        v, log = check_leq(f.domain, f.target, f.forward, f2.forward, u, budget)
        fv, c = filter_member(f.target, u, cert if hint is not None else None, budget)
        total = conjoin([v, fv])
        if total.ok or hint is not None:
            return InequalityCertificate(u, c, total, log)
        last = total
    return InequalityCertificate(None, None, Verdict.unknown({"candidates": len(cands)}, note=str(last)))


TRANS_TERM = T.abstract(["x"], T.App(T.Var("V"), T.App(T.Var("U"), T.Var("x"))))


def compose_inequalities(
    f: ApplicativeMorphism,
    f3: ApplicativeMorphism,
    c12: InequalityCertificate,
    c23: InequalityCertificate,
    budget: Budget | None = None,
) -> InequalityCertificate:
    """``f ≤ f′ ≤ f″`` gives ``f ≤ f″`` realized by λx.V(Ux)."""
    budget = budget or f.target.budget
    certs = {k: c for k, c in (("U", c12.certificate), ("V", c23.certificate)) if c is not None}
    syn = synthesize(f.target, TRANS_TERM, {"U": c12.realizer, "V": c23.realizer}, certs, budget)
    if syn.realizer is None:
        return InequalityCertificate(None, None, syn.verdict, term=TRANS_TERM)
    v, log = check_leq(f.domain, f.target, f.forward, f3.forward, syn.realizer, budget)
    return InequalityCertificate(syn.realizer, syn.certificate, conjoin([syn.verdict, v]), log, TRANS_TERM)


# --- pseudozero ----------------------------------------------------------------


def zero(source: Pca, target: Pca, budget: Budget | None = None) -> ApplicativeMorphism:
    """The zero morphism ``A × B``, tracked by k."""
    return applicative("0", source, target, zero_relation(target), target.kit_set("k"), None, None, budget)


def top_realizer(target: Pca, budget: Budget | None = None) -> Any:
    """``k·b₀`` for the inhabitant b₀ = k: realizes f ≤ 0 for every f."""
    budget = budget or target.budget
    parts = []
    for pas in target.fibers:
        k = pas.const(T.K)
        out = pas.apply(k, k, budget.fuel)
        parts.append(RealizerSet.of([out.value]))
    return target.wrap(parts)


def is_zero(f: ApplicativeMorphism, u: Any, budget: Budget | None = None) -> Verdict:
    """``A × U ⊆ f`` for a given U ∈ ψ, on the checked elements."""
    budget = budget or f.target.budget
    tally = Tally()
    for i in range(len(f.domain.fibers)):
        xs, full = domain_sample(f.domain, i, budget)
        if not full:
            tally.sampled()
        us, all_u = _members(parts_of(u)[i], f.target, i, 4, budget.seed)
        if not all_u:
            tally.sampled()
        for a in xs:
            fa = f.forward(i, a)
            for b in us:
                hit = fa.contains(b)
                if hit:
                    tally.ok()
                elif hit is None:
                    tally.unknown({"membership": f.target.fibers[i].show(b)})
                else:
                    tally.fail({"a": f.domain.fibers[i].show(a), "b": f.target.fibers[i].show(b)})
    return conjoin([tally.verdict(), filter_member(f.target, u, None, budget)[0]])


# --- pseudocoproducts ----------------------------------------------------------


@dataclass
class CoproductData:
    pca: Pca
    kappa0: ApplicativeMorphism
    kappa1: ApplicativeMorphism


def _rect_set(pca: Pca, a: RealizerSet, b: RealizerSet) -> RealizerSet:
    return RegFunctor.product(World.pow((0, 1))).on_set(Family((a, b)))


def _rect_tracker(ab: Pca, left: Pca, right: Pca, lname: str, rname: str, budget: Budget) -> tuple:
    u = _rect_set(ab, left.kit_set(lname), right.kit_set(rname))
    lr, rr = left.kit_ref(lname), right.kit_ref(rname)
    cert = FilterCertificate(T.Var("x0"), (GenRef("rect", (lr, rr)),)) if lr is not None and rr is not None else None
    return u, cert


def coproduct(a: Pca, b: Pca, budget: Budget | None = None) -> CoproductData:
    """``(A×B, ⟨φ×ψ⟩)`` with κ₀ tracked by I×K and κ₁ by K×I."""
    budget = budget or a.budget
    if a.world.kind != "Set" or b.world.kind != "Set":
        raise WorldMismatch("coproducts are formed over Set")
    ab = transport(RegFunctor.product(World.pow((0, 1))), product_pca((a, b)))
    full_a, full_b = a.full(), b.full()

    def k0(i: int, x: Any) -> RealizerSet:
        return _rect_set(ab, RealizerSet.of([x]), full_b)

    def k1(i: int, y: Any) -> RealizerSet:
        return _rect_set(ab, full_a, RealizerSet.of([y]))

    rel0 = Relation("κ0", k0, lambda u: _rect_set(ab, u, full_b))
    rel1 = Relation("κ1", k1, lambda u: _rect_set(ab, full_a, u))
    u0, c0 = _rect_tracker(ab, a, b, "i", "k", budget)
    u1, c1 = _rect_tracker(ab, a, b, "k", "i", budget)
    kappa0 = applicative("κ0", a, ab, rel0, u0, None, c0, budget)
    kappa1 = applicative("κ1", b, ab, rel1, u1, None, c1, budget)
    return CoproductData(ab, kappa0, kappa1)


_x, _y = T.Var("x"), T.Var("y")
COPAIR_TERM = T.abstract(
    ["x", "y"],
    T.app(
        T.Const("p"),
        T.app(T.Var("U"), T.App(T.Const("p0"), _x), T.App(T.Const("p0"), _y)),
        T.app(T.Var("V"), T.App(T.Const("p1"), _x), T.App(T.Const("p1"), _y)),
    ),
)
PAIR_WITH_TERM = T.abstract(["x"], T.app(T.Const("p"), _x, T.Var("G")))


def _pair_values(pas: Any, cs: Iterable[Any], ds: Iterable[Any], fuel: int) -> list:
    P = pas.const(T.Const("p"))
    out = []
    for c, d in itertools.product(cs, ds):
        r = T.eval_term(pas, T.app(T.Const("p", P), T.Const("c", c), T.Const("d", d)), {}, fuel)
        if r.defined:
            out.append(r.value)
    return out


def pair_set(pca: Pca, i: int, u: RealizerSet, v: RealizerSet, budget: Budget) -> RealizerSet:
    """``P·u·v``; finite when both are."""
    from .assemblies import _pairs_set

    return _pairs_set(pca, i, u, v, budget)


def copair(cop: CoproductData, f: ApplicativeMorphism, g: ApplicativeMorphism, budget: Budget | None = None) -> ApplicativeMorphism:
    """``[f,g]((a,b), P c′ c″)``, tracked by λxy.P(U(P₀x)(P₀y))(V(P₁x)(P₁y))."""
    c = f.target
    budget = budget or c.budget
    if g.target is not c or f.source is not cop.kappa0.source or g.source is not cop.kappa1.source:
        raise Mismatch("copair needs f: A → C and g: B → C")

    def forward(i: int, ab: Any) -> RealizerSet:
        return pair_set(c, 0, f.forward(0, ab[0]), g.forward(0, ab[1]), budget)

    rel = Relation("[f,g]", forward)
    certs = {k: x for k, x in (("U", f.certificate), ("V", g.certificate)) if x is not None}
    syn = synthesize(c, COPAIR_TERM, {"U": f.tracker, "V": g.tracker}, certs, budget)
    gens = []
    for gf in filter_generators(f.source, 2):
        for gg in filter_generators(g.source, 2):
            ref = GenRef("rect", (gf.certificate.gens[0], gg.certificate.gens[0]))
            gens.append(Generator(f"{gf.label}×{gg.label}", _rect_set(cop.pca, gf.set, gg.set), FilterCertificate(T.Var("x0"), (ref,))))
    m = applicative("[f,g]", cop.pca, c, rel, syn.realizer, None, syn.certificate, budget, gens)
    m.conditions["synthesis"] = syn.verdict
    return m


@dataclass
class CoproductLaws:
    left_to_f: InequalityCertificate  # [f,g]κ₀ ≤ f by P₀
    f_to_left: InequalityCertificate  # f ≤ [f,g]κ₀ by λx.P·x·g(B)
    right_to_g: InequalityCertificate
    g_to_right: InequalityCertificate

    @property
    def verdict(self) -> Verdict:
        return conjoin([self.left_to_f.verdict, self.f_to_left.verdict, self.right_to_g.verdict, self.g_to_right.verdict])


def coproduct_laws(cop: CoproductData, f: ApplicativeMorphism, g: ApplicativeMorphism, budget: Budget | None = None) -> CoproductLaws:
    """``[f,g]∘κ₀ ≃ f`` and ``[f,g]∘κ₁ ≃ g`` in the preorder."""
    c = f.target
    budget = budget or c.budget
    gB = g.image(g.source.full(), budget)
    fA = f.image(f.source.full(), budget)

    def via0(i: int, a: Any) -> RealizerSet:
        return pair_set(c, 0, f.forward(0, a), gB, budget)

    def via1(i: int, b: Any) -> RealizerSet:
        return pair_set(c, 0, fA, g.forward(0, b), budget)

    p0, c0 = c.kit_set("p0"), _kit_cert(c, "p0")
    p1, c1 = c.kit_set("p1"), _kit_cert(c, "p1")
    out = []
    for src, fwd, h, proj, pc, other in ((f.domain, via0, f, p0, c0, gB), (g.domain, via1, g, p1, c1, fA)):
        v, log = check_leq(src, c, fwd, h.forward, proj, budget)
        out.append(InequalityCertificate(proj, pc, conjoin([v, c.replay(proj, pc, budget) if pc else Verdict.unknown({"kit": "p"})]), log))
        ov, ocert = filter_member(c, other, None, budget)
        term = PAIR_WITH_TERM if h is f else T.abstract(["x"], T.app(T.Const("p"), T.Var("G"), _x))
        syn = synthesize(c, term, {"G": other}, {"G": ocert} if ocert else {}, budget)
        if syn.realizer is None:
            out.append(InequalityCertificate(None, None, syn.verdict, term=term))
            continue
        v2, log2 = check_leq(src, c, h.forward, fwd, syn.realizer, budget)
        out.append(InequalityCertificate(syn.realizer, syn.certificate, conjoin([syn.verdict, v2]), log2, term))
    return CoproductLaws(*out)


def _kit_cert(pca: Pca, name: str) -> FilterCertificate | None:
    ref = pca.kit_ref(name)
    return FilterCertificate(T.Var("x0"), (ref,)) if ref is not None else None


# --- 2-products ----------------------------------------------------------------


@dataclass
class TwoProduct:
    pca: Pca
    projections: list


def two_product(pcas: Sequence[Pca], budget: Budget | None = None) -> TwoProduct:
    """``∏(A_i, φ_i)`` over a finite index with projections ``(p_i, δ)``."""
    pcas = tuple(pcas)
    if not isinstance(pcas, tuple) or len(pcas) == 0:
        raise IndexNotFinite("finite nonempty index required")
    prod = product_pca(pcas)
    projs = []
    for i, comp in enumerate(pcas):
        p = RegFunctor.projection(prod.world, i)
        projs.append(applicative(f"π{i}", prod, comp, delta(), comp.kit_set("i"), p, _kit_cert(comp, "i"), budget))
    return TwoProduct(prod, projs)


def pairing(prod: TwoProduct, maps: Sequence[ApplicativeMorphism], budget: Budget | None = None) -> ApplicativeMorphism:
    """``⟨f_i⟩ : C → ∏A_i`` for morphisms ``f_i : C → A_i`` over Set.

    The functor part is the diagonal ``Set → Set^I``; the relation is f_i on
    fiber i and the tracker is the family of trackers.
    """
    source = maps[0].source
    if any(m.source is not source for m in maps) or len(maps) != len(prod.projections):
        raise Mismatch("pairing needs one morphism per factor, all from one source")
    if any(m.target is not c for m, c in zip(maps, prod.pca.components)):
        raise Mismatch("morphism targets must be the factors")
    diag = RegFunctor.pullback(prod.pca.world.index)
    rel = Relation("⟨f⟩", lambda i, a: maps[i].forward(0, a))
    tracker = prod.pca.wrap([m.tracker for m in maps])
    cert = None
    if all(m.certificate is not None for m in maps):
        cert = FilterCertificate(None, (), tuple(m.certificate for m in maps))
    return applicative("⟨" + ",".join(m.name for m in maps) + "⟩", source, prod.pca, rel, tracker, diag, cert, budget)


# --- applicative transformations -----------------------------------------------


@dataclass(frozen=True, eq=False)
class NatTrans:
    """A natural transformation between Set-valued regular functors.

    ``component`` acts on elements of p(X), for objects and carriers alike.
    """

    name: str
    source: Any
    target: Any
    component: Callable[[Any], Any]
    inverse: Callable[[Any], Any] | None = None

    def at(self, x: Any) -> Rel:
        return arrow(self.source.apply(x), self.target.apply(x), self.component, f"{self.name}_{x.name}")


def check_naturality(mu: NatTrans, arrows: Sequence[Rel]) -> Verdict:
    """``μ_Y ∘ p(h) = q(h) ∘ μ_X`` for each fixture arrow h: X → Y (exact)."""
    n = 0
    for h in arrows:
        left = compose_rel(mu.source.apply(h), mu.at(h.target))
        right = compose_rel(mu.at(h.source), mu.target.apply(h))
        if not same_graph(left, right):
            raise NotNatural({"arrow": h.name or "h", "source": h.source.name, "target": h.target.name})
        n += 1
    return Verdict.proven_(n)


@dataclass
class ApplicativeTransformation:
    mu: NatTrans
    naturality: Verdict
    premorphism: Verdict  # μ̄_A tracked by I
    tracking: InequalityCertificate  # f ≤ g∘μ̄_A
    iso: ApplicativeMorphism | None = None
    inverse_check: Verdict | None = None

    @property
    def verdict(self) -> Verdict:
        parts = [self.naturality, self.premorphism, self.tracking.verdict]
        if self.iso is not None:
            parts.append(self.iso.verdict)
        if self.inverse_check is not None:
            parts.append(self.inverse_check)
        return conjoin(parts)


def mu_bar(mu: NatTrans, pca: Pca) -> tuple:
    """``μ̄_A : p*(A) → q*(A)`` as a relation, with both carriers."""
    pa, qa = transport(mu.source, pca), transport(mu.target, pca)
    rel = Relation(f"μ̄{mu.name}", lambda i, a: RealizerSet.of([mu.component(a)]))
    return pa, qa, rel


def transform(
    mu: NatTrans,
    f: ApplicativeMorphism,
    g: ApplicativeMorphism,
    arrows: Sequence[Rel] = (),
    hint: Any = None,
    budget: Budget | None = None,
) -> ApplicativeTransformation:
    """Check that μ is an applicative transformation ``(p,f) ⇒ (q,g)``."""
    budget = budget or f.target.budget
    if f.source is not g.source or f.target is not g.target:
        raise Mismatch("f and g must be parallel")
    nat = check_naturality(mu, arrows)
    pa, qa, rel = mu_bar(mu, f.source)
    prem = check_tracking(pa, qa, rel, qa.kit_set("i"), budget)
    u = hint if hint is not None else f.target.kit_set("i")

    def via(i: int, a: Any) -> RealizerSet:
        return g.forward(i, mu.component(a))

    v, log = check_leq(f.domain, f.target, f.forward, via, u, budget)
    fv, cert = filter_member(f.target, u, None, budget)
    tracking = InequalityCertificate(u, cert, conjoin([v, fv]), log)
    iso = inv = None
    if mu.inverse is not None:
        iso = applicative(f"μ*{mu.name}", f.source, qa, rel, qa.kit_set("i"), mu.source, _kit_cert(qa, "i"), budget)
        inv = _inverse_check(mu, pa, budget)
    return ApplicativeTransformation(mu, nat, prem, tracking, iso, inv)


def _inverse_check(mu: NatTrans, pa: Pca, budget: Budget) -> Verdict:
    tally = Tally()
    xs, full = domain_sample(pa, 0, budget)
    if not full:
        tally.sampled()
    for a in xs:
        b = mu.component(a)
        if mu.inverse(b) == a and mu.component(mu.inverse(b)) == b:
            tally.ok()
        else:
            tally.fail({"element": pa.pas.show(a)})
    return tally.verdict()


@dataclass
class ImageComparison:
    generator: str
    image: Any
    transported: Any
    strict: bool | None  # μ̄(p(U)) ⊊ q(U)
    verdict: Verdict
    certificate: FilterCertificate | None


def transport_images(mu: NatTrans, pca: Pca, budget: Budget | None = None, limit: int = 4) -> list:
    """For each generator U: μ̄(p(U)) against q(U), and a membership search for the former.

    A failed search is reported as is; no impossibility is claimed.
    """
    budget = budget or pca.budget
    pa, qa, rel = mu_bar(mu, pca)
    out = []
    for g in filter_generators(pca, limit):
        pu = mu.source.on_set(g.set)
        img = rel.image(pu, qa, budget)
        qu = mu.target.on_set(g.set)
        strict = None
        if img.is_finite and qu.is_finite:
            strict = set(img.elements) < set(qu.elements)
        v, cert = filter_member(qa, img, None, budget)
        out.append(ImageComparison(g.label, img, qu, strict, v, cert))
    return out


# --- the functor on assemblies -----------------------------------------------


def asm_obj(m: ApplicativeMorphism, X: Assembly) -> Assembly:
    """``F X``: carrier p(|X|) with ``E_{FX} = f∘p(E_X)``."""
    p = m.functor
    kinds = [s.kind for s in _steps(p)]
    if all(k == "Identity" for k in kinds):
        E = {x: _fiber_image(m, X.idx(x), X.fiber(x)) for x in X.carrier}
        return Assembly(f"F{X.name}", X.carrier, E, X.index)
    if kinds == ["Pullback"]:
        if X.index is not None:
            raise WorldMismatch("pullback acts on Set-level assemblies")
        n = len(p.target.index)
        carrier = tuple((i, x) for i in range(n) for x in X.carrier)
        E = {(i, x): _fiber_image(m, i, X.fiber(x)) for i, x in carrier}
        return Assembly(f"F{X.name}", carrier, E, {(i, x): i for i, x in carrier})
    raise WorldMismatch(f"assemblies are transported along identity or pullback functors, not {p}")


def _fiber_image(m: ApplicativeMorphism, i: int, u: RealizerSet) -> RealizerSet:
    if u.is_finite:
        return _union([m.forward(i, a) for a in u.elements])
    if len(m.domain.fibers) == 1:
        return parts_of(m.image(u))[0]
    raise ValueError("infinite fibers are transported only over Set")


def _lift_map(m: ApplicativeMorphism, h: AsmMorphism) -> dict:
    if all(s.kind == "Identity" for s in _steps(m.functor)):
        return dict(h.mapping)
    n = len(m.functor.target.index)
    return {(i, x): (i, h.mapping[x]) for i in range(n) for x in h.source.carrier}


ASM_TERM = T.abstract(["x"], T.app(T.Var("V"), T.Var("W"), T.Var("x")))


def asm_arrow(m: ApplicativeMorphism, h: AsmMorphism, FX: Assembly | None = None, FY: Assembly | None = None, budget: Budget | None = None) -> AsmMorphism:
    """``F h = p(h)``, tracked by λx.V·f(p(U))·x."""
    budget = budget or m.target.budget
    FX = FX or asm_obj(m, h.source)
    FY = FY or asm_obj(m, h.target)
    pU = m.functor.on_set(h.tracker)
    fpU = m.image(pU, budget)
    wv, wcert = filter_member(m.target, fpU, None, budget)
    certs = {k: c for k, c in (("V", m.certificate), ("W", wcert)) if c is not None}
    syn = synthesize(m.target, ASM_TERM, {"V": m.tracker, "W": fpU}, certs, budget)
    mp = _lift_map(m, h)
    if syn.realizer is None:
        return AsmMorphism(FX, FY, mp, None, None, conjoin([syn.verdict, wv]), f"F{h.name}")
    out = make_morphism(m.target, FX, FY, mp, syn.realizer, syn.certificate, budget, f"F{h.name}")
    out.verdict = conjoin([out.verdict, syn.verdict])
    return out


def same_assembly(X: Assembly, Y: Assembly) -> Verdict:
    """Structural equality of finite assemblies (exact)."""
    if X.carrier != Y.carrier:
        return Verdict.refute({"carriers": [repr(X.carrier), repr(Y.carrier)]})
    for x in X.carrier:
        a, b = X.fiber(x), Y.fiber(x)
        if not (a.is_finite and b.is_finite):
            return Verdict.unknown({"fiber": repr(x)})
        if a != b or X.idx(x) != Y.idx(x):
            return Verdict.refute({"point": repr(x)})
    return Verdict.proven_(len(X.carrier))


def asm_functoriality(f: ApplicativeMorphism, g: ApplicativeMorphism, objects: Sequence[Assembly], arrows: Sequence[AsmMorphism] = (), budget: Budget | None = None) -> Verdict:
    """``Asm(g∘f) = Asm(g)∘Asm(f)`` on fixture objects and arrows."""
    gf = compose_applicative(f, g, budget)
    out = []
    for X in objects:
        out.append(same_assembly(asm_obj(gf, X), asm_obj(g, asm_obj(f, X))))
    for h in arrows:
        a = asm_arrow(gf, h, budget=budget)
        b = asm_arrow(g, asm_arrow(f, h, budget=budget), budget=budget)
        out.append(Verdict.proven_(1) if a.mapping == b.mapping else Verdict.refute({"arrow": h.name}))
    return conjoin(out)


def asm_identity_law(m: ApplicativeMorphism, objects: Sequence[Assembly]) -> Verdict:
    """``Asm(δ) = id`` on fixture objects."""
    return conjoin(same_assembly(asm_obj(m, X), X) for X in objects)


# --- filter lemmas as certificate translations --------------------------------


def _flatten(ref: GenRef) -> tuple:
    """A reference as a term over base generators."""
    if ref.kind == "derived":
        term, refs = ref.data
        return term, tuple(refs)
    return T.Var("x0"), (ref,)


def _splice(outer: T.Term, pieces: Sequence[tuple]) -> FilterCertificate:
    """Substitute per-variable (term, refs) pieces into an outer term."""
    mapping, gens = {}, []
    for j, (term, refs) in enumerate(pieces):
        sub = FilterCertificate(term, refs)
        mapping[f"x{j}"] = shift_cert_term(sub, len(gens))
        gens.extend(refs)
    return FilterCertificate(T.substitute(outer, mapping), tuple(gens))


def flatten_image_cert(cert: FilterCertificate) -> FilterCertificate:
    """A ``⟨p⟨G⟩⟩`` certificate as a ``⟨pG⟩`` certificate: ``p(t(U⃗)) = t(p(U⃗))``."""
    pieces = []
    for ref in cert.gens:
        if ref.kind != "image":
            raise MalformedCertificate("image references expected")
        term, refs = _flatten(ref.data)
        pieces.append((term, tuple(GenRef("image", r) for r in refs)))
    return _splice(cert.term, pieces)


def translate_rect_cert(cert: FilterCertificate, left: Pca, right: Pca) -> FilterCertificate:
    """A ``⟨⟨G⟩×⟨H⟩⟩`` certificate as a ``⟨G×H⟩`` certificate.

    A rectangle ``t(G⃗) × s(H⃗)`` becomes ``z·t(W⃗)·s(T⃗)`` with
    ``W_i = G_i × I``, ``T_j = I × H_j`` and ``z = K × K̄``. This needs k and i
    among the generators of G, and k̄ and i among those of H.
    """
    kG, iG = left.kit_ref("k"), left.kit_ref("i")
    kbH, iH = right.kit_ref("kbar"), right.kit_ref("i")
    if None in (kG, iG, kbH, iH):
        raise MalformedCertificate("G needs k and i, H needs k̄ and i as generators")
    pieces = []
    for ref in cert.gens:
        if ref.kind != "rect":
            raise MalformedCertificate("rectangle references expected")
        lt, lrefs = _flatten(ref.data[0])
        rt, rrefs = _flatten(ref.data[1])
        z = GenRef("rect", (kG, kbH))
        W = [GenRef("rect", (r, iH)) for r in lrefs]
        Tr = [GenRef("rect", (iG, r)) for r in rrefs]
        n, m = len(W), len(Tr)
        lt2 = T.substitute(lt, {f"x{j}": T.Var(f"x{j + 1}") for j in range(n)})
        rt2 = T.substitute(rt, {f"x{j}": T.Var(f"x{j + 1 + n}") for j in range(m)})
        pieces.append((T.app(T.Var("x0"), lt2, rt2), (z, *W, *Tr)))
    return _splice(cert.term, pieces)


def transport_morphism(p: Any, f: ApplicativeMorphism, budget: Budget | None = None) -> ApplicativeMorphism:
    """``p*(f) : p*(A) → p*(B)`` for a morphism with identity functor part."""
    if any(s.kind != "Identity" for s in _steps(f.functor)):
        raise WorldMismatch("only morphisms inside one fiber are transported")
    src, tgt = transport(p, f.source), transport(p, f.target)
    rel = transport_relation(p, f.relation)
    cert = transport_cert(p, f.certificate, f.target) if f.certificate is not None else None
    return applicative(f"{p}({f.name})", src, tgt, rel, p.on_set(f.tracker), None, cert, budget)
