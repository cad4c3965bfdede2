"""Quasi-surjective and computationally dense applicative morphisms.

A witness for either property is a realizer set in the target filter and a
responder: a rule taking a target filter member U, given with a certificate,
to a source filter member V with the required inclusion. Checks replay a
witness on a finite list of target generators.

The right adjoint of ``Asm(p,f)`` is built for reindexing functors (pullback
along a finite index, or along a map of finite indices), on finite fixture
assemblies, with the fibers ``E′`` tested exactly and enumerated from a
declared realizer pool.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from . import terms as T
from .assemblies import Assembly, AsmMorphism, check_morphism, make_morphism
from .morphisms import (
    ASM_TERM,
    ApplicativeMorphism,
    _members,
    _splice,
    compose_applicative,
    domain_sample,
    filter_generators,
)
from .outcome import Tally, Verdict, conjoin
from .pca import (
    Budget,
    FilterCertificate,
    GenRef,
    ImageFilter,
    MalformedCertificate,
    Pca,
    SliceFilter,
    as_derived,
    filter_member,
    synthesize,
)
from .realizers import RealizerSet, parts_of, subsets_upto


class IncompatibleMorphisms(ValueError):
    pass


class ReplayFailure(RuntimeError):
    """A converted witness fails its own evidence."""

    def __init__(self, verdict: Verdict):
        super().__init__(f"converted witness does not replay: {verdict}")
        self.verdict = verdict


class NotComputableAdjoint(ValueError):
    pass


Responder = Callable[[Any, FilterCertificate], tuple]

_S, _K = T.Const("s"), T.Const("k")
_I_SK = T.app(_S, _K, _K)


# --- shared helpers ------------------------------------------------------------


def _fp(m: ApplicativeMorphism, v: Any, budget: Budget) -> Any:
    """``f(p(V))``."""
    return m.image(m.functor.on_set(v), budget)


def _kit(pca: Pca, name: str) -> tuple:
    ref = pca.kit_ref(name)
    return pca.kit_set(name), (FilterCertificate(T.Var("x0"), (ref,)) if ref is not None else None)


def _app_cert(f: FilterCertificate, x: FilterCertificate) -> FilterCertificate:
    return _splice(T.App(T.Var("x0"), T.Var("x1")), [(f.term, f.gens), (x.term, x.gens)])


def _certified(pca: Pca, u: Any, budget: Budget) -> tuple:
    """A certificate for u, preferring the kit when u is a kit set."""
    for name in ("i", "k", "s", "p", "p0", "p1"):
        if parts_of(pca.kit_set(name)) == parts_of(u):
            kset, kcert = _kit(pca, name)
            if kcert is not None:
                return pca.replay(u, kcert, budget), kcert
    return filter_member(pca, u, None, budget)


def _eval_cert(pca: Pca, cert: FilterCertificate, budget: Budget) -> tuple:
    ev = pca.eval_cert(cert, None, budget)
    return ev.verdict, (ev.image(pca) if ev.verdict.ok else None)


def _flat(cert: FilterCertificate) -> FilterCertificate:
    pieces = []
    for ref in cert.gens:
        if ref.kind == "derived":
            inner = _flat(FilterCertificate(*ref.data))
            pieces.append((inner.term, inner.gens))
        else:
            pieces.append((T.Var("x0"), (ref,)))
    return _splice(cert.term, pieces)


def _source_ref(m: ApplicativeMorphism, ref: GenRef) -> GenRef | None:
    """The source generator whose transport is the target generator ``ref``."""
    tf, sf = m.target.filter, m.source.filter
    if m.target is m.source:
        return ref
    if isinstance(tf, ImageFilter) and ref.kind == "image" and tf.base is m.source:
        return ref.data
    if isinstance(tf, SliceFilter) and ref.kind == "pullback":
        if isinstance(sf, SliceFilter):
            return ref
        if tf.base is m.source:
            return ref.data
    return None


def _bind(pca: Pca, term: T.Term, gens: list) -> FilterCertificate:
    mapping = {}
    for name in sorted(T.consts(term)):
        ref = pca.kit_ref(name)
        if ref is None:
            raise MalformedCertificate(f"{pca.name} has no generator for {name}")
        mapping[name] = T.Var(f"x{len(gens)}")
        gens.append(ref)
    return FilterCertificate(T.replace_consts(term, mapping), tuple(gens))


def lemma_translate(m: ApplicativeMorphism, cert: FilterCertificate, star: GenRef | None) -> FilterCertificate:
    """A source certificate of V with ``f(p(V))·G ⊆ U`` for the certified U.

    Transported generators become ``K·V₀``, the generator ``star`` (the set G)
    becomes I and an application becomes S applied to both sides.
    """
    flat = _flat(cert)
    gens: list = []
    slots: dict = {}
    for j, ref in enumerate(flat.gens):
        if star is not None and ref == star:
            slots[f"x{j}"] = _I_SK
            continue
        src = _source_ref(m, ref)
        if src is None:
            raise MalformedCertificate(f"generator {ref.kind} is not transported from the source")
        slots[f"x{j}"] = T.App(_K, T.Var(f"x{len(gens)}"))
        gens.append(src)

    def tr(t: T.Term) -> T.Term:
        if isinstance(t, T.Var):
            return slots[t.name]
        if isinstance(t, T.App):
            return T.app(_S, tr(t.left), tr(t.right))
        raise MalformedCertificate("certificate terms use generator variables only")

    return _bind(m.source, tr(flat.term), gens)


def direct_translate(m: ApplicativeMorphism, cert: FilterCertificate, budget: Budget) -> FilterCertificate:
    """A source certificate of V with ``p(V) ⊆ U``: each generator is pulled back."""
    flat = _flat(cert)
    gens = []
    for ref in flat.gens:
        src = _source_ref(m, ref)
        if src is None and ref.kind == "extra":
            src = _extra_preimage(m, budget)
        if src is None:
            raise MalformedCertificate(f"generator {ref.kind} has no source preimage")
        gens.append(src)
    return FilterCertificate(flat.term, tuple(gens))


def _extra_preimage(m: ApplicativeMorphism, budget: Budget) -> GenRef | None:
    """A source member transported inside ``E_I`` when all its parts share a core point."""
    tf = m.target.filter
    if tf.core is None:
        return None
    parts = parts_of(tf.extra)
    if not all(p.is_finite for p in parts):
        return None
    common = frozenset.intersection(*[frozenset(e for e in p.elements if tf.core(e)) for p in parts])
    for e in sorted(common, key=repr):
        v, c = filter_member(m.source, m.source.singleton(e), None, budget)
        if c is not None and v.ok:
            return as_derived(c)
    return None


def _fallback(m: ApplicativeMorphism, N: Any, budget: Budget) -> Responder:
    """Search source generators G and K·G for a responder."""

    def respond(U: Any, cert: FilterCertificate) -> tuple:
        kset, kcert = _kit(m.source, "k")
        for g in filter_generators(m.source, 6):
            options = [(g.set, g.certificate)]
            ok, kg = m.source.set_apply(kset, g.set, budget)
            if kg is not None and kcert is not None:
                options.append((kg, _app_cert(kcert, g.certificate)))
            for V, vc in options:
                if qs_evidence(m, N, V, U, budget).ok:
                    return V, vc
        return None, None

    return respond


# --- quasi-surjectivity ------------------------------------------------------------


@dataclass
class Response:
    """One covered generator: U, the responder's V and the replayed evidence."""

    label: str
    U: Any
    u_cert: FilterCertificate | None
    V: Any
    v_cert: FilterCertificate | None
    verdict: Verdict

    def to_json(self, source: Pca, target: Pca) -> dict:
        return {
            "U": self.label,
            "V": None if self.V is None else source.show(self.V),
            "verdict": self.verdict.to_json(),
        }


@dataclass(eq=False)
class QsWitness:
    """``N ∈ ψ`` with a responder ``U ↦ V``, ``N·f(p(V)) ⊆ U``."""

    morphism: ApplicativeMorphism
    N: Any
    certificate: FilterCertificate | None
    responder: Responder = field(repr=False)
    responses: list = field(default_factory=list)
    strategy: str = ""
    n_verdict: Verdict = field(default_factory=lambda: Verdict.proven_(0))

    @property
    def verdict(self) -> Verdict:
        if not self.responses:
            return conjoin([self.n_verdict, Verdict.unknown({"responses": 0})])
        return conjoin([self.n_verdict] + [r.verdict for r in self.responses])

    def respond(self, U: Any, cert: FilterCertificate) -> tuple:
        return self.responder(U, cert)

    def report(self) -> dict:
        m = self.morphism
        return {
            "kind": "qs",
            "morphism": m.name,
            "strategy": self.strategy,
            "N": m.target.show(self.N),
            "responses": [r.to_json(m.source, m.target) for r in self.responses],
            "verdict": self.verdict.to_json(),
        }


def qs_evidence(m: ApplicativeMorphism, N: Any, V: Any, U: Any, budget: Budget | None = None) -> Verdict:
    """``N·f(p(V))↓`` and ``N·f(p(V)) ⊆ U``."""
    budget = budget or m.target.budget
    fpv = _fp(m, V, budget)
    return m.target.eval_sets(T.App(T.Var("n"), T.Var("b")), {"n": N, "b": fpv}, U, budget).verdict


def _qs_response(m: ApplicativeMorphism, N: Any, responder: Responder, label: str, U: Any, cert: FilterCertificate, budget: Budget) -> Response:
    try:
        V, vc = responder(U, cert)
    except MalformedCertificate as exc:
        V, vc = None, None
        reason = str(exc)
    else:
        reason = "no responder"
    if V is None or vc is None:
        return Response(label, U, cert, None, None, Verdict.unknown({"generator": label, "reason": reason}))
    rv = m.source.replay(V, vc, budget)
    ev = qs_evidence(m, N, V, U, budget)
    if ev.refuted:
        ev = Verdict.refute({"generator": label, **ev.counterexample}, ev.checked)
    return Response(label, U, cert, V, vc, conjoin([rv, ev]))


def _strategies(m: ApplicativeMorphism, budget: Budget) -> list:
    """Candidate ``(name, N, certificate, responder)``, most specific first."""
    out = []
    tgt = m.target
    if m.source is tgt:
        N, c = _kit(tgt, "i")
        out.append(("identity", N, c, lambda U, cert: (U, cert)))
    if not m.relation.diagonal:
        return out
    stars = []
    if isinstance(tgt.filter, SliceFilter):
        stars.append((GenRef("extra"), tgt.resolve(GenRef("extra")), FilterCertificate(T.Var("x0"), (GenRef("extra"),))))
    fa = _fp(m, m.source.full(), budget)
    fv, fc = filter_member(tgt, fa, None, budget)
    if fc is not None:
        stars.append((None, fa, fc))
    for star, G, gcert in stars:
        syn = synthesize(tgt, T.abstract(["x"], T.App(T.Var("x"), T.Var("G"))), {"G": G}, {"G": gcert}, budget)
        if syn.realizer is None or syn.certificate is None:
            continue

        def respond(U: Any, cert: FilterCertificate, star: GenRef | None = star) -> tuple:
            vc = lemma_translate(m, cert, star)
            v, V = _eval_cert(m.source, vc, budget)
            return (V, vc) if V is not None else (None, None)

        name = "lemma" if star is not None else "pullback"
        out.append((name, syn.realizer, syn.certificate, respond))
    return out


def _registered(m: ApplicativeMorphism, generators: Sequence | None) -> list:
    if generators is not None:
        return [(g.label, g.set, g.certificate) for g in generators]
    return [(g.label, g.set, g.certificate) for g in filter_generators(m.target, 6)]


def replay_qs(w: QsWitness, generators: Sequence | None = None, budget: Budget | None = None) -> QsWitness:
    """Re-run ``N ∈ ψ`` and the responder on the registered generators."""
    m = w.morphism
    budget = budget or m.target.budget
    nv = m.target.replay(w.N, w.certificate, budget) if w.certificate is not None else Verdict.unknown({"N": "uncertified"})
    gens = _registered(m, generators) if generators is not None or not w.responses else [(r.label, r.U, r.u_cert) for r in w.responses]
    responses = [_qs_response(m, w.N, w.responder, label, U, c, budget) for label, U, c in gens]
    return QsWitness(m, w.N, w.certificate, w.responder, responses, w.strategy, nv)


def check_qs(
    m: ApplicativeMorphism,
    witness: QsWitness | None = None,
    generators: Sequence | None = None,
    budget: Budget | None = None,
) -> tuple:
    """Quasi-surjectivity on the listed generators, as ``(verdict, witness)``.

    A given witness is replayed. Otherwise the candidates for N are i (for
    endomorphisms), ``λx.x·E_I`` (for slice targets) and ``λx.x·f(p(A))``,
    each with its certificate-translating responder and a search fallback.
    """
    budget = budget or m.target.budget
    if witness is not None:
        w = replay_qs(witness, generators, budget)
        return w.verdict, w
    gens = _registered(m, generators)
    tried = []
    best = None
    for name, N, cert, respond in _strategies(m, budget):
        fb = _fallback(m, N, budget)

        def responder(U: Any, c: FilterCertificate, respond: Responder = respond, fb: Responder = fb) -> tuple:
            try:
                V, vc = respond(U, c)
            except MalformedCertificate:
                V, vc = None, None
            if V is not None and qs_evidence(m, N, V, U, budget).ok:
                return V, vc
            return fb(U, c)

        nv = m.target.replay(N, cert, budget)
        responses = [_qs_response(m, N, responder, label, U, c, budget) for label, U, c in gens]
        w = QsWitness(m, N, cert, responder, responses, name, nv)
        tried.append(name)
        if w.verdict.ok:
            return w.verdict, w
        if best is None:
            best = w
    if best is not None and best.verdict.refuted:
        # a failing candidate says nothing about other N
        return Verdict.unknown({"strategies": tried}, note="no candidate witness replays"), None
    return Verdict.unknown({"strategies": tried}), None


COMPOSE_QS_TERM = T.abstract(["x"], T.App(T.Var("N"), T.app(T.Var("T"), T.Var("G"), T.Var("x"))))


def qs_compose(w1: QsWitness, w2: QsWitness, budget: Budget | None = None) -> QsWitness:
    """A witness for ``g∘f`` from witnesses for f and g: ``λx.N′(T·g(q(N))·x)``."""
    f, g = w1.morphism, w2.morphism
    if f.target is not g.source:
        raise IncompatibleMorphisms(f"{f.target.name} is not {g.source.name}")
    budget = budget or g.target.budget
    comp = compose_applicative(f, g, budget)
    gqn = g.image(g.functor.on_set(w1.N), budget)
    _, gcert = filter_member(g.target, gqn, None, budget)
    certs = {k: c for k, c in (("N", w2.certificate), ("T", g.certificate), ("G", gcert)) if c is not None}
    syn = synthesize(g.target, COMPOSE_QS_TERM, {"N": w2.N, "T": g.tracker, "G": gqn}, certs, budget)
    if syn.realizer is None:
        raise IncompatibleMorphisms(f"composite witness does not evaluate: {syn.verdict}")

    def responder(U: Any, c: FilterCertificate) -> tuple:
        V, vc = w2.respond(U, c)
        if V is None:
            return None, None
        return w1.respond(V, vc)

    nv = syn.verdict if syn.certificate is not None else Verdict.unknown({"N": "uncertified"})
    gens = [(r.label, r.U, r.u_cert) for r in w2.responses]
    responses = [_qs_response(comp, syn.realizer, responder, label, U, c, budget) for label, U, c in gens]
    return QsWitness(comp, syn.realizer, syn.certificate, responder, responses, "composite", nv)


def _push_cert(f: ApplicativeMorphism, vcert: FilterCertificate, V: Any, budget: Budget) -> tuple:
    """A target certificate for ``f(p(V))``, by transport when f is the diagonal."""
    img = _fp(f, V, budget)
    if f.relation.diagonal:
        tf = f.target.filter
        ref = None
        if isinstance(tf, ImageFilter) and tf.base is f.source:
            ref = GenRef("image", as_derived(vcert))
        elif isinstance(tf, SliceFilter) and tf.base is f.source:
            ref = GenRef("pullback", as_derived(vcert))
        elif f.source is f.target:
            return img, vcert
        if ref is not None:
            return img, FilterCertificate(T.Var("x0"), (ref,))
    _, c = filter_member(f.target, img, None, budget)
    return img, c


def second_factor(w: QsWitness, f: ApplicativeMorphism, g: ApplicativeMorphism, budget: Budget | None = None) -> QsWitness:
    """N witnesses ``g`` when it witnesses ``g∘f``, with responder ``U ↦ f(p(V))``."""
    comp = w.morphism
    if f.target is not g.source or comp.source is not f.source or comp.target is not g.target:
        raise IncompatibleMorphisms("the witness is not for the composite of these factors")
    budget = budget or g.target.budget

    def responder(U: Any, c: FilterCertificate) -> tuple:
        V, vc = w.respond(U, c)
        if V is None:
            return None, None
        return _push_cert(f, vc, V, budget)

    responses = [_qs_response(g, w.N, responder, r.label, r.U, r.u_cert, budget) for r in w.responses]
    return QsWitness(g, w.N, w.certificate, responder, responses, "factor", w.n_verdict)


# --- computational density ----------------------------------------------------------


@dataclass(eq=False)
class CdWitness:
    """``M ∈ ψ`` with a responder ``U ↦ V``, ``V·A↓`` and the guarded clause."""

    morphism: ApplicativeMorphism
    M: Any
    certificate: FilterCertificate | None
    responder: Responder = field(repr=False)
    responses: list = field(default_factory=list)
    strategy: str = ""
    m_verdict: Verdict = field(default_factory=lambda: Verdict.proven_(0))

    @property
    def verdict(self) -> Verdict:
        if not self.responses:
            return conjoin([self.m_verdict, Verdict.unknown({"responses": 0})])
        return conjoin([self.m_verdict] + [r.verdict for r in self.responses])

    def respond(self, U: Any, cert: FilterCertificate) -> tuple:
        return self.responder(U, cert)

    def report(self) -> dict:
        m = self.morphism
        return {
            "kind": "cd",
            "morphism": m.name,
            "strategy": self.strategy,
            "M": m.target.show(self.M),
            "responses": [r.to_json(m.source, m.target) for r in self.responses],
            "verdict": self.verdict.to_json(),
        }


def _in_values(pas: Any, x: Any, values: list) -> bool | None:
    for v in values:
        same = pas.eq(x, v)
        if same:
            return True
    return False


def guarded_clause(m: ApplicativeMorphism, M: Any, U: Any, V: Any, budget: Budget | None = None) -> Verdict:
    """``p(V)(r) ∧ U·f(a)↓ → M·f(ra) ⊆ U·f(a)`` on samples of r and a.

    ``mb ∈ U·f(a)`` means ``mb = ub′`` for some ``u ∈ U`` and ``b′ ∈ f(a)``.
    """
    budget = budget or m.target.budget
    tally = Tally()
    skipped = 0
    pV = m.functor.on_set(V)
    for i in range(len(m.domain.fibers)):
        dpas, tpas = m.domain.fibers[i], m.target.fibers[i]
        rs, rs_all = _members(parts_of(pV)[i], m.domain, i, 3, budget.seed)
        xs, xs_all = domain_sample(m.domain, i, budget)
        xs = xs[: budget.samples]
        us, us_all = _members(parts_of(U)[i], m.target, i, 4, budget.seed)
        ms, ms_all = _members(parts_of(M)[i], m.target, i, 3, budget.seed)
        if not (rs_all and xs_all and us_all and ms_all):
            tally.sampled()
        for r, a in itertools.product(rs, xs):
            ra = dpas.apply(r, a, budget.fuel)
            if not ra.defined:
                skipped += 1
                continue
            fa, fa_all = _members(m.forward(i, a), m.target, i, 3, budget.seed)
            vals, premise = [], True
            for u, b in itertools.product(us, fa):
                ub = tpas.apply(u, b, budget.fuel)
                if not ub.defined:
                    premise = False
                    break
                vals.append(ub.value)
            if not premise:
                skipped += 1
                continue
            fra, _ = _members(m.forward(i, ra.value), m.target, i, 3, budget.seed)
            where = {"fiber": i, "r": dpas.show(r), "a": dpas.show(a)}
            for mm, b in itertools.product(ms, fra):
                out = tpas.apply(mm, b, budget.fuel)
                if not out.defined:
                    if out.is_unknown:
                        tally.unknown({"fuel": budget.fuel, **where})
                    else:
                        tally.fail({**where, "reason": "M·f(ra) undefined"})
                    continue
                if _in_values(tpas, out.value, vals):
                    tally.ok()
                elif us_all and fa_all:
                    tally.fail({**where, "value": tpas.show(out.value), "reason": "outside U·f(a)"})
                else:
                    tally.unknown({"membership": tpas.show(out.value)})
    if skipped:
        tally.note = f"{skipped} samples with a false premise were skipped"
    return tally.verdict()


def _cd_response(m: ApplicativeMorphism, M: Any, responder: Responder, label: str, U: Any, cert: FilterCertificate, budget: Budget) -> Response:
    try:
        V, vc = responder(U, cert)
    except MalformedCertificate as exc:
        return Response(label, U, cert, None, None, Verdict.unknown({"generator": label, "reason": str(exc)}))
    if V is None or vc is None:
        return Response(label, U, cert, None, None, Verdict.unknown({"generator": label, "reason": "no responder"}))
    rv = m.source.replay(V, vc, budget)
    va = m.source.eval_sets(T.App(T.Var("v"), T.Var("a")), {"v": V, "a": m.source.full()}, None, budget).verdict
    if not va.ok:
        # only the transported form p(V)·p(A)↓ may hold
        weak = m.domain.eval_sets(T.App(T.Var("v"), T.Var("a")), {"v": m.functor.on_set(V), "a": m.domain.full()}, None, budget).verdict
        va = va.with_note(f"V·A fails; p(V)·p(A): {weak.kind}")
    cl = guarded_clause(m, M, U, V, budget)
    if cl.refuted:
        cl = Verdict.refute({"generator": label, **cl.counterexample}, cl.checked)
    return Response(label, U, cert, V, vc, conjoin([rv, va, cl]))


def check_cd(m: ApplicativeMorphism, witness: CdWitness, generators: Sequence | None = None, budget: Budget | None = None) -> tuple:
    """Replay a density witness on the listed generators."""
    budget = budget or m.target.budget
    gens = _registered(m, generators) if generators is not None or not witness.responses else [(r.label, r.U, r.u_cert) for r in witness.responses]
    mv = m.target.replay(witness.M, witness.certificate, budget) if witness.certificate is not None else Verdict.unknown({"M": "uncertified"})
    responses = [_cd_response(m, witness.M, witness.responder, label, U, c, budget) for label, U, c in gens]
    w = CdWitness(m, witness.M, witness.certificate, witness.responder, responses, witness.strategy, mv)
    return w.verdict, w


def direct_cd(m: ApplicativeMorphism, generators: Sequence | None = None, budget: Budget | None = None) -> CdWitness:
    """``M = I`` with ``V`` the generator-wise preimage, for diagonal reindexings."""
    budget = budget or m.target.budget
    M, mc = _kit(m.target, "i")

    def responder(U: Any, c: FilterCertificate) -> tuple:
        vc = direct_translate(m, c, budget)
        _, V = _eval_cert(m.source, vc, budget)
        return (V, vc) if V is not None else (None, None)

    w = CdWitness(m, M, mc, responder, [], "direct")
    return check_cd(m, w, generators or filter_generators(m.target, 6), budget)[1]


QS_TO_CD_TERM = T.abstract(
    ["x"], T.app(T.Var("N"), T.app(T.Var("T"), T.Var("F0"), T.Var("x")), T.app(T.Var("T"), T.Var("F1"), T.Var("x")))
)
CD_TO_QS_TERM = T.abstract(["x"], T.App(T.Var("M"), T.app(T.Var("T"), T.Var("x"), T.Var("FA"))))


def _ensure(w: Any) -> Any:
    if w.verdict.refuted:
        raise ReplayFailure(w.verdict)
    return w


def qs_to_cd(w: QsWitness, budget: Budget | None = None) -> CdWitness:
    """``M = λx.N(T·f(P₀)·x)(T·f(P₁)·x)`` with responder ``W = P·V``."""
    m = w.morphism
    budget = budget or m.target.budget
    params, certs = {"N": w.N, "T": m.tracker}, {"N": w.certificate, "T": m.certificate}
    for name, kit in (("F0", "p0"), ("F1", "p1")):
        img = _fp(m, m.source.kit_set(kit), budget)
        params[name] = img
        certs[name] = _certified(m.target, img, budget)[1]
    syn = synthesize(m.target, QS_TO_CD_TERM, params, {k: c for k, c in certs.items() if c is not None}, budget)
    if syn.realizer is None:
        raise ReplayFailure(syn.verdict)
    P, pc = _kit(m.source, "p")

    def responder(U: Any, c: FilterCertificate) -> tuple:
        V, vc = w.respond(U, c)
        if V is None:
            return None, None
        _, W = m.source.set_apply(P, V, budget)
        if W is None or pc is None:
            return None, None
        return W, _app_cert(pc, vc)

    out = CdWitness(m, syn.realizer, syn.certificate, responder, [], "from-qs", syn.verdict)
    gens = [(r.label, r.U, r.u_cert) for r in w.responses]
    out.responses = [_cd_response(m, out.M, responder, label, U, c, budget) for label, U, c in gens]
    return _ensure(out)


def cd_to_qs(w: CdWitness, budget: Budget | None = None) -> QsWitness:
    """``N = λx.M(T·x·f(p(A)))`` answering U with the responder for ``K·U``."""
    m = w.morphism
    budget = budget or m.target.budget
    fa = _fp(m, m.source.full(), budget)
    _, fac = filter_member(m.target, fa, None, budget)
    certs = {k: c for k, c in (("M", w.certificate), ("T", m.certificate), ("FA", fac)) if c is not None}
    syn = synthesize(m.target, CD_TO_QS_TERM, {"M": w.M, "T": m.tracker, "FA": fa}, certs, budget)
    if syn.realizer is None:
        raise ReplayFailure(syn.verdict)
    K, kc = _kit(m.target, "k")

    def responder(U: Any, c: FilterCertificate) -> tuple:
        _, KU = m.target.set_apply(K, U, budget)
        if KU is None or kc is None:
            return None, None
        return w.respond(KU, _app_cert(kc, c))

    out = QsWitness(m, syn.realizer, syn.certificate, responder, [], "from-cd", syn.verdict)
    gens = [(r.label, r.U, r.u_cert) for r in w.responses]
    out.responses = [_qs_response(m, out.N, responder, label, U, c, budget) for label, U, c in gens]
    return _ensure(out)


def convert_density(direction: str, w: Any, budget: Budget | None = None) -> Any:
    """``"QsToCd"`` or ``"CdToQs"``; raises ReplayFailure if the result fails its evidence."""
    if direction == "QsToCd":
        if not isinstance(w, QsWitness):
            raise TypeError("QsToCd converts a QsWitness")
        return qs_to_cd(w, budget)
    if direction == "CdToQs":
        if not isinstance(w, CdWitness):
            raise TypeError("CdToQs converts a CdWitness")
        return cd_to_qs(w, budget)
    raise ValueError(f"unknown direction {direction!r}")


def check_inclusion_witness(m: ApplicativeMorphism, M: Any, E: Any, budget: Budget | None = None) -> Verdict:
    """``E(e) → eb↓ ∧ ∃a (f(a, eb) ∧ M·f(a) = b)`` on samples of b, for a given E ∈ ψ."""
    budget = budget or m.target.budget
    tally = Tally()
    ev, _ = filter_member(m.target, E, None, budget)
    for i in range(len(m.target.fibers)):
        tpas = m.target.fibers[i]
        es, es_all = _members(parts_of(E)[i], m.target, i, 3, budget.seed)
        ms, ms_all = _members(parts_of(M)[i], m.target, i, 3, budget.seed)
        bs, bs_all = domain_sample(m.target, i, budget)
        pool, _ = domain_sample(m.domain, i, budget)
        if not (es_all and ms_all and bs_all):
            tally.sampled()
        for e, b in itertools.product(es, bs[: budget.samples]):
            eb = tpas.apply(e, b, budget.fuel)
            where = {"fiber": i, "e": tpas.show(e), "b": tpas.show(b)}
            if not eb.defined:
                if eb.is_unknown:
                    tally.unknown({"fuel": budget.fuel, **where})
                else:
                    tally.fail({**where, "reason": "eb undefined"})
                continue
            candidates = ([eb.value] if m.relation.diagonal else []) + list(pool)
            found = False
            for a in candidates:
                fa = m.forward(i, a)
                if fa.contains(eb.value) is not True:
                    continue
                outs = [tpas.apply(mm, c, budget.fuel) for mm in ms for c in _members(fa, m.target, i, 3, 0)[0]]
                if all(o.defined and tpas.eq(o.value, b) for o in outs):
                    found = True
                    break
            if found:
                tally.ok()
            elif m.relation.diagonal and ms_all:
                tally.fail({**where, "reason": "M·eb differs from b"})
            else:
                tally.unknown({"search": len(candidates), **where})
    return conjoin([ev, tally.verdict()])


# --- the right adjoint ----------------------------------------------------------------


def _positions(m: ApplicativeMorphism) -> tuple:
    p = m.functor
    kind = getattr(p, "kind", None)
    n = len(m.target.fibers)
    if kind == "Identity":
        return tuple(range(n))
    if kind == "Pullback":
        return (0,) * n
    if kind == "Reindex":
        return tuple(p.positions)
    raise NotComputableAdjoint(f"no right adjoint is computed for {p}")


def _identity_like(pas: Any, ms: RealizerSet) -> bool:
    if not ms.is_finite:
        return False
    i = pas.const(T.Const("i"))
    return all(pas.eq(x, i) is True for x in ms.elements)


@dataclass
class HomReport:
    """``hom(FX, Y)`` against ``hom(X, GY)`` under transposition."""

    verdict: Verdict
    left: int
    right: int
    undecided: int


@dataclass(eq=False)
class AdjointData:
    """The right adjoint G of ``Asm(p,f)`` on fixture assemblies.

    Source assemblies are Set-level when the source is, otherwise indexed by
    the source index. ``F X`` has points ``(i, x)`` and ``G Y`` has points
    ``(j, s)`` with s a section of Y over the indices above j.
    """

    morphism: ApplicativeMorphism
    witness: CdWitness
    positions: tuple
    pool: tuple
    budget: Budget
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def width(self) -> int:
        return len(self.morphism.source.fibers)

    def above(self, j: int) -> list:
        return [i for i, p in enumerate(self.positions) if p == j]

    # F

    def F_obj(self, X: Assembly) -> Assembly:
        m = self.morphism
        carrier = tuple((i, x) for i, j in enumerate(self.positions) for x in X.carrier if X.idx(x) == j)
        E = {}
        for i, x in carrier:
            src = X.fiber(x)
            if m.relation.diagonal:
                E[(i, x)] = src
            elif src.is_finite:
                E[(i, x)] = RealizerSet.of(e for a in src.elements for e in m.forward(i, a).elements)
            else:
                raise NotComputableAdjoint("fixture assemblies need finite fibers")
        return Assembly(f"F{X.name}", carrier, E, {p: p[0] for p in carrier})

    def F_arrow(self, h: AsmMorphism, FX: Assembly | None = None, FY: Assembly | None = None) -> AsmMorphism:
        m, budget = self.morphism, self.budget
        FX = FX or self.F_obj(h.source)
        FY = FY or self.F_obj(h.target)
        mapping = {(i, x): (i, h.mapping[x]) for i, x in FX.carrier}
        fpu = _fp(m, h.tracker, budget)
        _, wc = filter_member(m.target, fpu, None, budget)
        certs = {k: c for k, c in (("V", m.certificate), ("W", wc)) if c is not None}
        syn = synthesize(m.target, ASM_TERM, {"V": m.tracker, "W": fpu}, certs, budget)
        if syn.realizer is None:
            return AsmMorphism(FX, FY, mapping, None, None, syn.verdict, f"F{h.name}")
        return make_morphism(m.target, FX, FY, mapping, syn.realizer, syn.certificate, budget, f"F{h.name}")

    # G

    def E_prime(self, Y: Assembly, y: Any, extra: Sequence = ()) -> RealizerSet | None:
        """``{a | ∀m,b (M(m) ∧ f(a,b) → mb↓ ∧ E_Y(y, mb))}``, or None if no pool element is in it."""
        m, budget = self.morphism, self.budget
        i = Y.idx(y)
        tpas = m.target.fibers[i]
        ms = parts_of(self.witness.M)[i]
        ey = Y.fiber(y)
        if m.relation.diagonal and ey.is_finite and _identity_like(tpas, ms):
            return ey
        if not ms.is_finite:
            raise NotComputableAdjoint("E′ needs a finite M")

        def test(a: Any) -> bool | None:
            fa = m.forward(i, a)
            if not fa.is_finite:
                return None
            for mm, b in itertools.product(ms.elements, fa.elements):
                out = tpas.apply(mm, b, budget.fuel)
                if out.is_unknown:
                    return None
                if not out.defined:
                    return False
                hit = ey.contains(out.value)
                if hit is not True:
                    return hit
            return True

        pool = list(self.pool[self.positions[i]]) + list(extra) + self._seeds(Y, self.positions[i])
        members = [a for a in pool if test(a) is True]
        if not members:
            return None
        return RealizerSet.predicate(test, lambda: iter(members), members[0], f"E′({y})")

    def _seeds(self, Y: Assembly, j: int) -> list:
        """``V·u`` for realizers u of Y over j, V the unit tracker: these satisfy ``M·f(Vu) ⊆ f(u)``."""
        key = ("seeds", id(Y), j)
        if key not in self._cache:
            V, _ = self.unit_tracker()
            out = []
            if V is not None:
                pas = self.morphism.source.fibers[j]
                vs, _ = _members(parts_of(V)[j], self.morphism.source, j, 3, 0)
                for y in Y.carrier:
                    if self.positions[Y.idx(y)] != j or not Y.fiber(y).is_finite:
                        continue
                    for v, u in itertools.product(vs, Y.fiber(y).elements):
                        r = pas.apply(v, u, self.budget.fuel)
                        if r.defined:
                            out.append(r.value)
            self._cache[key] = out
        return self._cache[key]

    def sections(self, Y: Assembly, j: int) -> list:
        per = [[y for y in Y.carrier if Y.idx(y) == i] for i in self.above(j)]
        return list(itertools.product(*per))

    def _section_fiber(self, Y: Assembly, j: int, s: tuple, extra: Sequence = ()) -> RealizerSet | None:
        m = self.morphism
        parts = [self.E_prime(Y, y, extra) for y in s]
        if any(p is None for p in parts):
            return None, True
        if not parts:
            return RealizerSet.full(m.source.fibers[j].const(T.K)), False
        if all(p.is_finite for p in parts):
            common = set(parts[0].elements).intersection(*[set(p.elements) for p in parts[1:]])
            return (RealizerSet.of(common), False) if common else (None, False)

        def test(a: Any) -> bool | None:
            hits = [p.contains(a) for p in parts]
            if any(h is False for h in hits):
                return False
            return None if any(h is None for h in hits) else True

        pool = list(self.pool[j]) + list(extra) + self._seeds(Y, j)
        members = [a for a in pool if test(a) is True]
        if not members:
            return None, True
        return RealizerSet.predicate(test, lambda: iter(members), members[0], "E′G"), False

    def G_obj(self, Y: Assembly, extra: Sequence = ()) -> Assembly:
        key = (id(Y), tuple(repr(e) for e in extra))
        hit = self._cache.get(key)
        if hit is not None:
            return hit[1]
        carrier, E, missing = [], {}, []
        for j in range(self.width):
            for s in self.sections(Y, j):
                fib, unsure = self._section_fiber(Y, j, s, extra)
                if fib is not None:
                    carrier.append((j, s))
                    E[(j, s)] = fib
                elif unsure:
                    missing.append((j, s))
        index = {p: p[0] for p in carrier} if self.morphism.source.indexed else None
        out = Assembly(f"G{Y.name}", tuple(carrier), E, index)
        self._cache[key] = (Y, out)
        self._cache[("missing", id(out))] = missing
        return out

    def missing(self, GY: Assembly) -> list:
        """Sections left out of ``|GY|`` because no pool element realizes them."""
        return self._cache.get(("missing", id(GY)), [])

    def G_arrow(self, g: AsmMorphism, GY: Assembly | None = None, GZ: Assembly | None = None) -> AsmMorphism:
        """``G(g)`` tracked by the responder for ``U = λx.W(Mx)``."""
        m, budget = self.morphism, self.budget
        GY = GY or self.G_obj(g.source)
        GZ = GZ or self.G_obj(g.target)
        mapping = {(j, s): (j, tuple(g.mapping[y] for y in s)) for j, s in GY.carrier}
        bad = [k for k, v in mapping.items() if v not in GZ.E]
        if bad:
            return AsmMorphism(GY, GZ, {}, None, None, Verdict.refute({"point": repr(bad[0]), "reason": "image not in |GZ|"}), f"G{g.name}")
        V, vc, why = self._responder_for(T.abstract(["x"], T.App(T.Var("W"), T.App(T.Var("M"), T.Var("x")))), {"W": g.tracker}, {"W": g.certificate})
        if V is None:
            return AsmMorphism(GY, GZ, mapping, None, None, why, f"G{g.name}")
        return make_morphism(m.source, GY, GZ, mapping, V, vc, budget, f"G{g.name}")

    def _responder_for(self, term: T.Term, params: dict, certs: dict) -> tuple:
        m, budget, w = self.morphism, self.budget, self.witness
        syn = synthesize(m.target, term, {**params, "M": w.M}, {k: c for k, c in {**certs, "M": w.certificate}.items() if c is not None}, budget)
        if syn.realizer is None or syn.certificate is None:
            return None, None, syn.verdict
        V, vc = w.respond(syn.realizer, syn.certificate)
        if V is None:
            return None, None, Verdict.unknown({"responder": "none"})
        return V, vc, None

    def unit_tracker(self) -> tuple:
        """V from the I-instance: ``p(V)(r) → M·f(ra) ⊆ f(a)``."""
        I, ic = _kit(self.morphism.target, "i")
        return self.witness.respond(I, ic)

    def eta(self, X: Assembly) -> dict:
        return {x: (X.idx(x), tuple((i, x) for i in self.above(X.idx(x)))) for x in X.carrier}

    def unit(self, X: Assembly, FX: Assembly | None = None) -> AsmMorphism:
        FX = FX or self.F_obj(X)
        V, vc = self.unit_tracker()
        extra = self._images(V, X)
        GFX = self.G_obj(FX, extra)
        mapping = self.eta(X)
        bad = [x for x, s in mapping.items() if s not in GFX.E]
        if bad or V is None:
            why = Verdict.unknown({"point": repr(bad[0]) if bad else None, "reason": "section outside the pool"})
            return AsmMorphism(X, GFX, {}, None, None, why, f"η{X.name}")
        return make_morphism(self.morphism.source, X, GFX, mapping, V, vc, self.budget, f"η{X.name}")

    def _images(self, V: Any, X: Assembly) -> list:
        """Values ``v·a`` for realizers a of X, offered as extra pool elements."""
        if V is None:
            return []
        out = []
        for x in X.carrier:
            j = X.idx(x)
            pas = self.morphism.source.fibers[j]
            vs, _ = _members(parts_of(V)[j], self.morphism.source, j, 3, 0)
            for v, a in itertools.product(vs, X.fiber(x).sample(pas.pool(), pas.draw, 4, 0)):
                r = pas.apply(v, a, self.budget.fuel)
                if r.defined:
                    out.append(r.value)
        return out

    def epsilon(self, Y: Assembly, GY: Assembly) -> dict:
        return {(i, (j, s)): s[self.above(j).index(i)] for j, s in GY.carrier for i in self.above(j)}

    def counit(self, Y: Assembly, GY: Assembly | None = None) -> AsmMorphism:
        """``ε̃_Y: FGY → Y`` tracked by M."""
        GY = GY or self.G_obj(Y)
        FGY = self.F_obj(GY)
        w = self.witness
        return make_morphism(self.morphism.target, FGY, Y, self.epsilon(Y, GY), w.M, w.certificate, self.budget, f"ε{Y.name}")

    # the adjunction

    def transpose(self, X: Assembly, phi: dict) -> dict:
        return {x: (X.idx(x), tuple(phi[(i, x)] for i in self.above(X.idx(x)))) for x in X.carrier}

    def untranspose(self, X: Assembly, psi: dict) -> dict:
        out = {}
        for x in X.carrier:
            j, s = psi[x]
            for k, i in enumerate(self.above(j)):
                out[(i, x)] = s[k]
        return out

    def transpose_morphism(self, X: Assembly, FX: Assembly, phi: AsmMorphism, GY: Assembly) -> AsmMorphism:
        """``G(φ)∘η̃_X`` tracked by ``λx.V₂(V₁x)``."""
        m, budget = self.morphism, self.budget
        eta = self.unit(X, FX)
        mapping = self.transpose(X, phi.mapping)
        if eta.tracker is None:
            return AsmMorphism(X, GY, mapping, None, None, eta.verdict, "φ♭")
        g = self.G_arrow(phi, eta.target, GY)
        if g.tracker is None:
            return AsmMorphism(X, GY, mapping, None, None, g.verdict, "φ♭")
        term = T.abstract(["x"], T.App(T.Var("B"), T.App(T.Var("C"), T.Var("x"))))
        syn = synthesize(m.source, term, {"B": g.tracker, "C": eta.tracker}, {"B": g.certificate, "C": eta.certificate}, budget)
        if syn.realizer is None:
            return AsmMorphism(X, GY, mapping, None, None, syn.verdict, "φ♭")
        return make_morphism(m.source, X, GY, mapping, syn.realizer, syn.certificate, budget, "φ♭")

    def hom_bijection(self, X: Assembly, Y: Assembly) -> HomReport:
        """Enumerate ``hom(FX, Y)`` and ``hom(X, GY)`` and compare them under transposition.

        Each candidate map is decided by the tracker search and obstructions; a
        map of the right side left undecided is retried with the transposed
        tracker when it is the transpose of a tracked map.
        """
        m, budget = self.morphism, self.budget
        FX, GY = self.F_obj(X), self.G_obj(Y)
        key = lambda d: tuple(sorted((repr(k), repr(v)) for k, v in d.items()))
        left, right, undecided, checked = {}, {}, [], 0

        def maps(A: Assembly, B: Assembly) -> Any:
            choices = [[b for b in B.carrier if B.idx(b) == A.idx(a)] for a in A.carrier]
            for combo in itertools.product(*choices):
                yield dict(zip(A.carrier, combo))

        for mp in maps(FX, Y):
            checked += 1
            h = check_morphism(m.target, FX, Y, mp, None, budget)
            if h.verdict.ok:
                left[key(mp)] = h
            if not (h.verdict.proven or h.verdict.refuted):
                undecided.append(h.verdict)
        for mp in maps(X, GY):
            checked += 1
            v = check_morphism(m.source, X, GY, mp, None, budget).verdict
            if not (v.ok or v.refuted):
                phi = left.get(key(self.untranspose(X, mp)))
                if phi is not None:
                    v = self.transpose_morphism(X, FX, phi, GY).verdict
            if v.ok:
                right[key(mp)] = mp
            if not (v.proven or v.refuted):
                undecided.append(v)
        moved = {key(self.transpose(X, h.mapping)) for h in left.values()}
        back = {key(self.untranspose(X, psi)) for psi in right.values()}
        same = moved == set(right) and back == set(left)
        n_l, n_r = len(left), len(right)
        missing = self.missing(GY)
        if missing:
            note = f"{len(missing)} sections of G{Y.name} have no realizer in the pool"
            return HomReport(Verdict.unknown({"missing": [repr(x) for x in missing[:2]]}, checked, note), n_l, n_r, len(undecided) + len(missing))
        if not same:
            diff = sorted(moved ^ set(right))
            cex = {"unmatched": [list(d) for d in diff[:1]], "left": n_l, "right": n_r}
            if undecided:
                return HomReport(Verdict.unknown(cex, checked), n_l, n_r, len(undecided))
            return HomReport(Verdict.refute(cex, checked), n_l, n_r, 0)
        return HomReport(conjoin(undecided + [Verdict.proven_(checked)]), n_l, n_r, len(undecided))

    def triangles(self, X: Assembly, Y: Assembly) -> Verdict:
        """``ε_F ∘ F η = id`` on FX and ``G ε ∘ η_G = id`` on GY, as maps of carriers."""
        tally = Tally()
        FX = self.F_obj(X)
        eta = self.eta(X)
        V, _ = self.unit_tracker()
        GFX = self.G_obj(FX, self._images(V, X))
        for i, x in FX.carrier:
            if eta[x] not in GFX.E:
                tally.unknown({"point": repr(x), "reason": "ηx outside the pool"})
                continue
            j, s = eta[x]
            back = s[self.above(j).index(i)]
            (tally.ok() if back == (i, x) else tally.fail({"point": repr((i, x)), "value": repr(back)}))
        GY = self.G_obj(Y)
        eps = self.epsilon(Y, GY)
        for j, s in GY.carrier:
            eta_g = (j, tuple((i, (j, s)) for i in self.above(j)))
            image = (j, tuple(eps[p] for p in eta_g[1]))
            (tally.ok() if image == (j, s) else tally.fail({"point": repr((j, s)), "value": repr(image)}))
        return tally.verdict()

    def compatibility(self, Y: Assembly) -> Verdict:
        """``p E′_GY → E′_Y``: a realizer of a section realizes each of its components."""
        tally = Tally()
        GY = self.G_obj(Y)
        src = self.morphism.source
        for j, s in GY.carrier:
            fib = GY.fiber((j, s))
            pas = src.fibers[j]
            if not fib.is_finite:
                tally.sampled()
            for a in fib.sample(list(self.pool[j]), pas.draw, self.budget.samples, self.budget.seed):
                for y in s:
                    ep = self.E_prime(Y, y, [a])
                    hit = None if ep is None else ep.contains(a)
                    if hit:
                        tally.ok()
                    elif hit is None:
                        tally.unknown({"section": repr(s), "component": repr(y)})
                    else:
                        tally.fail({"section": repr(s), "component": repr(y), "realizer": pas.show(a)})
        return tally.verdict()


def right_adjoint(m: ApplicativeMorphism, w: CdWitness, pool: Sequence | None = None, budget: Budget | None = None) -> AdjointData:
    """The right adjoint data for a reindexing ``(p, f)`` with a density witness.

    ``pool`` lists, per source index, the realizers from which ``E′`` is
    enumerated; membership itself is tested exactly.
    """
    budget = budget or m.target.budget
    positions = _positions(m)
    width = len(m.source.fibers)
    if pool is None:
        pool = [list(m.source.fibers[j].pool()) for j in range(width)]
    elif width == 1 and pool and not isinstance(pool[0], (list, tuple)):
        pool = [list(pool)]
    return AdjointData(m, w, positions, tuple(tuple(p) for p in pool), budget)


# --- density from the adjoint ----------------------------------------------------------


def inhabited_subsets(adj: AdjointData, pool: Sequence, max_size: int = 1) -> Assembly:
    """S: inhabited subsets of a finite realizer pool per target index, realized by themselves."""
    m = adj.morphism
    n = len(m.target.fibers)
    pools = [list(pool)] * n if pool and not isinstance(pool[0], (list, tuple)) else [list(p) for p in pool]
    carrier, E = [], {}
    for i in range(n):
        for u in subsets_upto(pools[i], max_size):
            carrier.append((i, u))
            E[(i, u)] = u
    return Assembly("S", tuple(carrier), E, {p: p[0] for p in carrier})


def adjoint_implies_dense(
    adj: AdjointData,
    pool: Sequence,
    max_size: int = 1,
    generators: Sequence | None = None,
) -> QsWitness:
    """The tracker N of ``ε_S`` as a quasi-surjectivity witness.

    For a member U of ψ that is a point of S, the global section U of S is
    transposed to ``Ũ: 1 → GS`` and ``V = Ũ-tracker·A`` answers U.
    """
    m, budget = adj.morphism, adj.budget
    if adj.width != 1:
        raise NotComputableAdjoint("density is extracted for Set-level sources")
    S = inhabited_subsets(adj, pool, max_size)
    one = Assembly("1", ("*",), {"*": m.source.full()})
    F1 = adj.F_obj(one)
    eps = adj.counit(S)
    N, ncert = eps.tracker, eps.certificate
    K, kc = _kit(m.target, "k")
    V1, v1c = adj.unit_tracker()
    A = m.source.full()
    _, ac = filter_member(m.source, A, None, budget)

    def responder(U: Any, c: FilterCertificate) -> tuple:
        parts = parts_of(U)
        points = [(i, p) for i, p in enumerate(parts)]
        if any(pt not in S.E for pt in points) or V1 is None or ac is None:
            return None, None
        _, KU = m.target.set_apply(K, U, budget)
        section = make_morphism(m.target, F1, S, {(i, "*"): (i, parts[i]) for i in range(len(parts))}, KU, _app_cert(kc, c), budget)
        if not section.verdict.ok:
            return None, None
        V2, v2c, _ = adj._responder_for(
            T.abstract(["x"], T.App(T.Var("W"), T.App(T.Var("M"), T.Var("x")))), {"W": KU}, {"W": section.certificate}
        )
        if V2 is None:
            return None, None
        comp = synthesize(m.source, T.abstract(["x"], T.App(T.Var("B"), T.App(T.Var("C"), T.Var("x")))), {"B": V2, "C": V1}, {"B": v2c, "C": v1c}, budget)
        if comp.realizer is None or comp.certificate is None:
            return None, None
        tilde = {"*": (0, tuple((i, parts[i]) for i in adj.above(0)))}
        GS = adj.G_obj(S, adj._images(comp.realizer, one))
        if tilde["*"] not in GS.E:
            return None, None
        ut = make_morphism(m.source, one, GS, tilde, comp.realizer, comp.certificate, budget, "Ũ")
        if not ut.verdict.ok:
            return None, None
        _, V = m.source.set_apply(comp.realizer, A, budget)
        if V is None:
            return None, None
        return V, _app_cert(comp.certificate, ac)

    nv = eps.verdict
    # only members that are points of S have a global section to transpose
    gens = [g for g in _registered(m, generators) if all((i, p) in S.E for i, p in enumerate(parts_of(g[1])))]
    responses = [_qs_response(m, N, responder, label, U, c, budget) for label, U, c in gens]
    return QsWitness(m, N, ncert, responder, responses, "adjoint", nv)
