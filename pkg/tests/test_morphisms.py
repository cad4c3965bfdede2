import pytest

from relpca import assemblies as A
from relpca import fixtures as F
from relpca import morphisms as M
from relpca import pca as P
from relpca.backend import RegFunctor, World, WorldMismatch, pow_obj, rel
from relpca.realizers import Family
from relpca.realizers import RealizerSet as R

SK = P.make_backend("sk")
TRIV = P.make_backend("trivial")
X = A.Assembly("X", ("a", "b"), {"a": R.of(["k"]), "b": R.of(["s"])})


@pytest.fixture(scope="module")
def maps():
    return M.identity(SK), F.kwrap(SK)


def test_identity_and_kwrap_are_applicative(maps):
    idm, kw = maps
    for m in maps:
        assert m.verdict.ok and not m.verdict.proven
        assert set(m.conditions) == {"a", "b", "c"}
    assert idm.tracker == SK.kit_set("i")


def test_composition_laws(maps):
    idm, kw = maps
    left, right = M.compose_applicative(idm, kw), M.compose_applicative(kw, idm)
    assert left.verdict.ok and right.verdict.ok
    assert M.same_relation(left, kw).ok and M.same_relation(right, kw).ok
    kk = M.compose_applicative(kw, kw)
    assert kk.verdict.ok
    # oracle: the composite relation sends a to k (k a)
    for a in ("k", "s", ("s", "k")):
        assert kk.forward(0, a) == R.of([("k", ("k", a))])


def test_composition_mismatch(maps):
    with pytest.raises(M.Mismatch):
        M.compose_applicative(maps[0], M.identity(TRIV))


def test_preorder(maps):
    idm, kw = maps
    refl = M.preorder_check(kw, kw)
    assert refl.verdict.ok and refl.realizer == SK.kit_set("i")
    chain = M.compose_inequalities(idm, idm, M.preorder_check(idm, idm), M.preorder_check(idm, idm))
    assert chain.verdict.ok
    # oracle: the synthesized realizer acts as the identity on samples
    for a in ("k", "s", ("k", "s")):
        (r,) = chain.realizer.elements
        assert SK.pas.apply(r, a).value == a


def test_zero_is_top(maps):
    _, kw = maps
    z = M.zero(SK, SK)
    assert z.verdict.ok
    assert M.preorder_check(kw, z, M.top_realizer(SK)).verdict.ok
    assert M.is_zero(z, M.top_realizer(SK)).ok
    assert not M.preorder_check(z, kw).verdict.ok


def test_pseudocoproduct(maps):
    idm, kw = maps
    cop = M.coproduct(SK, SK)
    assert cop.kappa0.verdict.ok and cop.kappa1.verdict.ok
    assert M.copair(cop, idm, kw).verdict.ok
    laws = M.coproduct_laws(cop, idm, kw)
    assert laws.verdict.ok
    assert laws.left_to_f.realizer == SK.kit_set("p0")
    assert laws.right_to_g.realizer == SK.kit_set("p1")


def test_two_product_of_trivial_pcas():
    tp = M.two_product([TRIV, TRIV])
    assert tp.pca.world == World.pow((0, 1))
    assert all(p.verdict.proven for p in tp.projections)
    with pytest.raises(M.IndexNotFinite):
        M.two_product([])


def test_pairing_then_projection(maps):
    idm, kw = maps
    tp = M.two_product([SK, SK])
    pr = M.pairing(tp, [idm, kw])
    assert pr.verdict.ok
    for i, m in enumerate((idm, kw)):
        assert M.same_relation(M.compose_applicative(pr, tp.projections[i]), m).ok


def test_transport_identity_and_projection():
    assert M.transport(RegFunctor.identity(), SK) is SK
    tp = M.two_product([SK, TRIV])
    for i, comp in enumerate((SK, TRIV)):
        back = M.transport(RegFunctor.projection(tp.pca.world, i), tp.pca)
        assert back.fibers == comp.fibers and type(back.filter) is type(comp.filter)
    with pytest.raises(WorldMismatch):
        M.transport(RegFunctor.projection(World.pow((0, 1)), 0), SK)


def test_certificates_transport_term_for_term():
    relsk = F.relative_sk()
    g = F.generated(relsk, ("k", "s"))
    skk = R.of([relsk.kit_element("i")])
    _, cert = P.filter_member(g, skk)
    p = RegFunctor.pullback((0, 1))
    gp = M.transport(p, g)
    moved = M.transport_cert(p, cert, g)
    assert moved.term == cert.term or all(part.term == cert.term for part in moved.parts or ())
    assert gp.replay(p.on_set(skk), moved).ok


def test_identity_transformation(maps):
    _, kw = maps
    mu = M.NatTrans("id", RegFunctor.identity(), RegFunctor.identity(), lambda a: a, lambda a: a)
    tr = M.transform(mu, kw, kw)
    assert tr.verdict.ok and tr.tracking.realizer == SK.kit_set("i")


def test_naturality_failure_reports_the_square():
    w = World.pow((0, 1))
    ident = RegFunctor.identity(w)
    Xo = pow_obj("X", w, [[1, 2], [3]])
    h = rel(Xo, Xo, [((0, 1), (0, 2)), ((0, 2), (0, 2)), ((1, 3), (1, 3))])
    assert M.check_naturality(M.NatTrans("id", ident, ident, lambda e: e), [h]).proven
    bad = M.NatTrans("collapse", ident, ident, lambda e: (0, 1) if e[0] == 0 else e)
    with pytest.raises(M.NotNatural) as err:
        M.check_naturality(bad, [h])
    assert err.value.square["source"] == "X"


def test_asm_functor_on_objects_matches_direct_images(maps):
    idm, kw = maps
    FX = M.asm_obj(kw, X)
    for x in X.carrier:
        direct = {("k", a) for a in X.fiber(x).elements}
        assert set(FX.fiber(x).elements) == direct
    assert M.asm_identity_law(idm, [X]).proven


def test_asm_functoriality(maps):
    idm, kw = maps
    h = A.check_morphism(SK, X, X, {"a": "a", "b": "b"}, SK.kit_set("i"))
    assert M.asm_functoriality(kw, kw, [X], [h]).ok
    assert M.asm_functoriality(idm, kw, [X], [h]).ok


def test_rect_certificate_translation():
    relsk = F.relative_sk()
    _, _, closed, opened = F.rect_pair(relsk)
    u = R.of([("k", "s")])
    v, cert = P.filter_member(closed, u)
    assert v.ok
    assert opened.replay(u, M.translate_rect_cert(cert, closed.filter.left, closed.filter.right)).ok


def test_image_certificate_flattening():
    relsk = F.relative_sk()
    _, closed, opened = F.image_pair(relsk)
    u = Family((R.of(["k"]), R.of(["s", "k"])))
    v, cert = P.filter_member(closed, u)
    assert v.ok and opened.replay(u, M.flatten_image_cert(cert)).ok


def test_mapping_relation_and_delta():
    d = M.delta()
    assert d.forward(0, "k") == R.of(["k"])
    wrap = M.mapping(lambda a: ("k", a), "wrap")
    assert wrap.forward(0, "s") == R.of([("k", "s")])
