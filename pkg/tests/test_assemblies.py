import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relpca import assemblies as A
from relpca import pca as P
from relpca.realizers import RealizerSet as R

SK = P.make_backend("sk")
TRIV = P.make_backend("trivial")

X = A.Assembly("X", ("a", "b"), {"a": R.of(["k"]), "b": R.of(["s"])})
Y = A.Assembly("Y", ("u", "v", "w"), {"u": R.of(["k"]), "v": R.of(["s", ("k", "k")]), "w": R.of([("s", "k")])})
F_MAP = {"a": "u", "b": "v"}
G_MAP = {"u": "a", "v": "a", "w": "a"}


def direct_tracking(pca, src, tgt, mapping, tracker):
    """Oracle: apply every tracker element to every realizer of every point."""
    for x in src.carrier:
        for a in src.fiber(x).elements:
            for r in tracker.elements:
                out = pca.pas.apply(r, a)
                if not out.defined or not tgt.fiber(mapping[x]).contains(out.value):
                    return False
    return True


@pytest.fixture(scope="module")
def fg():
    return A.check_morphism(SK, X, Y, F_MAP), A.check_morphism(SK, Y, X, G_MAP)


def test_identity_is_tracked_by_i():
    idx = A.identity(SK, X)
    assert idx.verdict.proven and idx.tracker == SK.kit_set("i")


def test_arrows_into_nabla_are_tracked_by_i():
    N = A.nabla(SK, ["p", "q"])
    for f in A.all_functions(Y.carrier, N.carrier):
        assert A.check_morphism(SK, Y, N, f, SK.kit_set("i")).verdict.proven


@settings(max_examples=30)
@given(st.lists(st.sampled_from(["p", "q", "r"]), min_size=3, max_size=3))
def test_every_total_arrow_is_tracked_over_the_trivial_pca(images):
    S = A.Assembly("S", (1, 2, 3), {i: R.of(["•"]) for i in (1, 2, 3)})
    T_ = A.Assembly("T", ("p", "q", "r"), {y: R.of(["•"]) for y in "pqr"})
    assert A.check_morphism(TRIV, S, T_, dict(zip((1, 2, 3), images))).verdict.proven


def test_search_result_is_checked_by_oracle(fg):
    f, g = fg
    assert f.verdict.proven and direct_tracking(SK, X, Y, F_MAP, f.tracker)
    assert g.verdict.proven and direct_tracking(SK, Y, X, G_MAP, g.tracker)


def test_not_an_arrow():
    with pytest.raises(A.NotAnArrow):
        A.check_morphism(SK, X, Y, {"a": "u"})


def test_composition(fg):
    f, g = fg
    gf = A.compose_morphisms(SK, f, g)
    assert gf.verdict.ok and gf.mapping == {"a": "a", "b": "a"}
    assert direct_tracking(SK, X, X, gf.mapping, gf.tracker)
    with pytest.raises(A.CompositionMismatch):
        A.compose_morphisms(SK, f, f)


def test_category_laws(fg):
    f, g = fg
    idX, idY = A.identity(SK, X), A.identity(SK, Y)
    assert A.same_morphism(A.compose_morphisms(SK, idX, f), f)
    assert A.same_morphism(A.compose_morphisms(SK, f, idY), f)
    left = A.compose_morphisms(SK, A.compose_morphisms(SK, f, g), f)
    right = A.compose_morphisms(SK, f, A.compose_morphisms(SK, g, f))
    assert A.same_morphism(left, right) and left.verdict.ok and right.verdict.ok


def test_trivial_composite_tracker_is_the_point():
    S = A.Assembly("S", (1,), {1: R.of(["•"])})
    m = A.identity(TRIV, S)
    assert A.compose_morphisms(TRIV, m, m).tracker == R.of(["•"])


def test_product_and_mediating(fg):
    f, _ = fg
    prod = A.product(SK, X, Y)
    assert set(prod.obj.carrier) == {(x, y) for x in X.carrier for y in Y.carrier}
    assert prod.proj0.verdict.ok and prod.proj1.verdict.ok
    m = A.mediating(SK, prod, A.identity(SK, X), f)
    assert m.verdict.ok
    assert A.compose_morphisms(SK, m, prod.proj0).mapping == {"a": "a", "b": "b"}
    assert A.compose_morphisms(SK, m, prod.proj1).mapping == F_MAP


def test_product_with_terminal_is_isomorphic():
    one = A.terminal(SK)
    prod = A.product(SK, X, one)
    bang = A.check_morphism(SK, X, one, {x: "*" for x in X.carrier}, SK.kit_set("i"))
    m = A.mediating(SK, prod, A.identity(SK, X), bang)
    back = A.compose_morphisms(SK, prod.proj0, m)
    assert m.verdict.ok and back.verdict.ok
    assert back.mapping == {p: p for p in prod.obj.carrier}


def test_equalizer(fg):
    f, g = fg
    gf = A.compose_morphisms(SK, f, g)
    eq = A.equalizer(SK, gf, A.identity(SK, X))
    assert eq.obj.carrier == ("a",)
    const_b = A.check_morphism(SK, X, X, {"a": "b", "b": "b"}, R.of([("k", "s")]))
    with pytest.raises(ValueError):
        A.equalizer(SK, gf, const_b)


def test_image_factorization(fg):
    _, g = fg
    im = A.image(SK, g)
    assert im.obj.carrier == ("a",)
    assert A.compose_morphisms(SK, im.epi, im.mono).mapping == G_MAP
    assert im.epi.tracker == SK.kit_set("i") and im.witness.verdict.ok
    assert im.mono.tracker == g.tracker


def test_epi_check_refutes_non_surjections(fg):
    f, _ = fg
    assert A.check_epi(SK, f).verdict.refuted


@settings(max_examples=20, deadline=None)
@given(st.lists(st.sampled_from(["u", "v", "w"]), min_size=2, max_size=2))
def test_epi_witness_implies_surjective(images):
    Yi = A.nabla(SK, ["u", "v", "w"])
    e = A.check_morphism(SK, X, Yi, dict(zip(X.carrier, images)), SK.kit_set("i"))
    if A.check_epi(SK, e).verdict.ok:
        assert set(images) == set(Yi.carrier)


def test_pullback_of_epi_stays_epi(fg):
    _, g = fg
    im = A.image(SK, g)
    pb, w = A.pullback_epi(SK, im.epi, im.witness, A.identity(SK, im.obj))
    assert w.verdict.ok and A.check_epi(SK, pb.proj1, w.witness).verdict.ok


def test_gamma_nabla():
    N = A.nabla(SK, ["p", "q"])
    assert A.gamma(N).elements == ("p", "q")
    T3 = A.Assembly("T", (1, 2, 3), {1: R.of(["k"]), 2: R.of(["s"]), 3: R.of(["k"])})
    v = A.adjunction_bijection(SK, T3, ["p", "q"])
    homs = len(list(itertools.product("pq", repeat=3)))
    assert v.proven and v.note == f"{homs} arrows on both sides"
    assert len(A.all_functions(T3.carrier, ("p", "q"))) == homs


def test_unit_is_identity_on_points():
    eta = A.unit(SK, Y)
    assert eta.verdict.proven and eta.mapping == {y: y for y in Y.carrier}
    assert len(set(eta.mapping.values())) == len(Y.carrier)


def test_constant_objects():
    v, u, cert = A.is_constant(SK, A.nabla(SK, ["p", "q"]))
    assert v.proven and u.is_full
    v, u, _ = A.is_constant(SK, A.object_of_realizers(SK, ["k", "s"]))
    assert v.refuted and u is None


def test_prone_subobjects():
    incl = A.prone_restriction(SK, Y, ["u", "w"])
    assert incl.verdict.proven and incl.source.carrier == ("u", "w")
    assert A.is_prone(SK, incl).verdict.proven


def test_projectivity_over_singletons():
    rep = A.projectivity_report(SK, [(X, None)])
    assert rep.verdict.ok and rep.direction == "singletons"
    (s,) = rep.sections
    assert s.source.name == "1'" and s.mapping["*"] in X.carrier


def test_json_round_trip():
    back = A.assembly_from_json(A.assembly_to_json(Y, SK), SK)
    assert back.carrier == Y.carrier
    assert all(back.fiber(y) == Y.fiber(y) for y in Y.carrier)
