import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relpca import fixtures as F
from relpca import graph as G
from relpca import pca as P
from relpca import terms as T
from relpca.outcome import conjoin
from relpca.realizers import EmptyRealizerSet, Family
from relpca.realizers import RealizerSet as R

SK = P.make_backend("sk")
x0, x1 = T.Var("x0"), T.Var("x1")


def brute_graph_apply(u, v, level):
    """Graph application at a level, by trying every finite subset of V_L."""
    vl = [j for j in v if j < level]
    out = set()
    for r in range(len(vl) + 1):
        for e in itertools.combinations(vl, r):
            out |= {m for m in range(level) if G.pair(G.code(e), m) in u}
    return frozenset(out)


def test_trivial_backend():
    t = P.make_backend("trivial")
    v, image = P.set_apply(t, R.of(["•"]), R.of(["•"]))
    assert v.proven and image == R.of(["•"])
    assert all(v.proven for v in P.verify_kit(t).values())


def test_sk_set_apply_matches_reduction():
    v, image = P.set_apply(SK, R.of(["k"]), R.of([("s", "k")]))
    assert v.proven and image == R.of([("k", ("s", "k"))])


def test_full_times_full_is_never_proven():
    v, image = P.set_apply(SK, SK.full(), SK.full())
    assert not v.proven


def test_skk_reduces_quickly():
    out = SK.pas.apply((("s", "k"), "k"), "s", 10)
    assert out.defined and out.value == "s"


def test_fuel_exhaustion_is_unknown():
    omega = T.abstract(["x"], T.App(T.Var("x"), T.Var("x")))
    out = T.eval_term(SK.pas, T.App(omega, omega), {}, 200)
    assert out.is_unknown


@settings(max_examples=30)
@given(st.sampled_from(P.make_backend("sk").pas.pool()), st.sampled_from(P.make_backend("sk").pas.pool()))
def test_more_fuel_never_changes_a_value(a, b):
    low = SK.pas.apply(a, b, 30)
    if low.defined:
        assert SK.pas.apply(a, b, 3000).value == low.value


def test_realizes_examples():
    assert P.realizes(R.of(["k"]), ("x", "y"), T.Var("x"), SK).ok
    skk = R.of([(("s", "k"), "k")])
    assert P.realizes(skk, ("x",), T.Var("x"), SK).ok
    v = P.realizes(R.of(["k"]), ("x", "y"), T.Var("y"), SK)
    assert v.refuted
    a, b = v.counterexample["valuation"]
    assert a != b and v.counterexample["got"] == a


def test_kit_replays_on_sk():
    kit = P.verify_kit(SK)
    assert conjoin(kit.values()).ok
    pas = SK.pas
    for a, b in [("k", "s"), ("s", ("k", "k"))]:
        pair = T.eval_term(pas, T.app(T.Const("p"), T.Var("a"), T.Var("b")), {"a": a, "b": b}).value
        assert pas.apply(pas.const(T.Const("p0")), pair).value == a
        assert pas.apply(pas.const(T.Const("p1")), pair).value == b


def test_maximal_filter_accepts_any_inhabited_set():
    m = P.make_backend("sk", filter="maximal", atoms=("o1",))
    for u in (R.of(["o1"]), R.of(["s", ("k", "o1")])):
        v, cert = P.filter_member(m, u)
        assert v.proven and m.replay(u, cert).proven
    with pytest.raises(EmptyRealizerSet):
        R.of([])


def test_singleton_filter_cites_the_point():
    v, cert = P.filter_member(SK, R.of([(("s", "k"), "k")]))
    assert v.proven and cert.term == x0


def test_generated_filter_certificate_for_skk():
    rel = F.relative_sk()
    g = F.generated(rel, ("k", "s"))
    skk = R.of([rel.kit_element("i")])
    cert = P.FilterCertificate(T.app(x1, x0, x0), (P.GenRef("gen", 0), P.GenRef("gen", 1)))
    assert P.filter_member(g, skk, cert)[0].proven
    v, found = P.filter_member(g, skk)
    assert v.proven and g.replay(skk, found).proven


def test_wrong_certificate_is_refuted():
    rel = F.relative_sk()
    g = F.generated(rel, ("k", "s"))
    bad = P.FilterCertificate(T.App(x0, x0), (P.GenRef("gen", 0),))
    v, _ = P.filter_member(g, R.of([rel.kit_element("i")]), bad)
    assert v.refuted and v.counterexample["reason"] == "outside target"


def test_core_obstruction():
    g = F.generated(F.relative_sk())
    v, cert = P.filter_member(g, R.of(["o1"]))
    assert v.refuted and cert is None


def test_upward_closure_reuses_the_certificate():
    rel = F.relative_sk()
    g = F.generated(rel, ("k", "s"))
    small = R.of([rel.kit_element("i")])
    big = R.of([rel.kit_element("i"), "k"])
    _, cert = P.filter_member(g, small)
    assert g.replay(big, cert).ok


def test_closure_under_application():
    rel = F.relative_sk()
    g = F.generated(rel, ("k", "s"))
    u, w = R.of(["k"]), R.of(["s"])
    (vu, cu), (vw, cw) = P.filter_member(g, u), P.filter_member(g, w)
    defined, uw = P.set_apply(g, u, w)
    assert vu.proven and vw.proven and defined.proven
    term = T.App(cu.term, P.shift_cert_term(cw, len(cu.gens)))
    assert g.replay(uw, P.FilterCertificate(term, cu.gens + cw.gens)).proven


def test_certificate_json_round_trip_and_malformed():
    g = F.generated(F.relative_sk(), ("k", "s"))
    cert = P.FilterCertificate(T.app(x1, x0, x0), (P.GenRef("gen", 0), P.GenRef("gen", 1)))
    data = P.cert_to_json(cert, g)
    assert data == {"term": "x1 x0 x0", "generators": [{"kind": "gen", "index": 0}, {"kind": "gen", "index": 1}]}
    assert P.cert_from_json(data, g) == cert
    with pytest.raises(P.MalformedCertificate):
        P.cert_from_json({"term": "x0 (", "generators": []}, g)


def test_search_is_deterministic():
    g = F.generated(F.relative_sk())
    target = R.of([("k", "k")])
    assert P.filter_member(g, target)[1] == P.filter_member(g, target)[1]


# graph model

ELEMS = st.frozensets(st.integers(0, 40), max_size=6)


@settings(max_examples=60)
@given(ELEMS, ELEMS)
def test_graph_application_matches_brute_force(u, v):
    level = 8
    got = G.GraphLevel(level).observe(G.GApp(G.Fin(u), G.Fin(v)))
    assert got == brute_graph_apply(u, v, level)


@settings(max_examples=40)
@given(ELEMS, ELEMS, ELEMS)
def test_graph_application_is_monotone(u, v, extra):
    lv = G.GraphLevel(8)
    base = lv.observe(G.GApp(G.Fin(u), G.Fin(v)))
    assert base <= lv.observe(G.GApp(G.Fin(u | extra), G.Fin(v)))
    assert base <= lv.observe(G.GApp(G.Fin(u), G.Fin(v | extra)))
    assert base <= G.GraphLevel(9).observe(G.GApp(G.Fin(u), G.Fin(v)))


@given(st.integers(0, 200), st.integers(0, 200))
def test_pairing_bijection(a, b):
    assert G.unpair(G.pair(a, b)) == (a, b)
    assert G.pair(0, 0) == 0 and G.pair(1, 0) == 1 and G.pair(0, 1) == 2


def test_graph_axioms_are_evidence_only():
    rep = P.axiom_suite(P.make_backend("graph").pas, 20, 0)
    assert all(v.kind in ("Evidence", "Unknown") for v in rep.verdicts.values())
    assert not any(v.refuted for v in rep.verdicts.values())


def test_carrier_mismatch():
    two = Family((R.of(["k"]), R.of(["s"])))
    with pytest.raises(P.CarrierMismatch):
        P.set_apply(SK, two, R.of(["k"]))
