import itertools
from types import SimpleNamespace

import pytest

from relpca import assemblies as A
from relpca import density as D
from relpca import fixtures as F
from relpca import morphisms as M
from relpca import pca as P
from relpca import slicing as SL
from relpca import terms as T
from relpca.outcome import Verdict
from relpca.realizers import RealizerSet as R

REL = F.relative_sk()
X = A.Assembly("X", ("x", "x2"), {"x": R.of(["o1"]), "x2": R.of(["o2"])})
Y = A.Assembly(
    "Y",
    ("y0", "y0b", "y1", "y1b"),
    {"y0": R.of(["o1"]), "y0b": R.of(["o2"]), "y1": R.of(["o1"]), "y1b": R.of(["o1", "o2"])},
    {"y0": 0, "y0b": 0, "y1": 1, "y1b": 1},
)


@pytest.fixture(scope="module")
def morphisms():
    sp = SL.slice_pca(REL, SL.one_plus_one(REL))
    return M.identity(REL), F.cocartesian(REL), F.slice_inclusion(sp)


@pytest.fixture(scope="module")
def adjoint(morphisms):
    _, coc, _ = morphisms
    return D.right_adjoint(coc, D.direct_cd(coc))


def test_identity_is_witnessed_by_i(morphisms):
    idm, _, _ = morphisms
    v, w = D.check_qs(idm)
    assert v.proven and w.N == REL.kit_set("i")


def test_qs_examples(morphisms):
    _, coc, inc = morphisms
    v, w = D.check_qs(coc)
    assert v.ok and D.replay_qs(w).verdict.ok
    v, w = D.check_qs(inc)
    assert v.proven and D.replay_qs(w).verdict.proven


def test_trivial_pca_conversions_give_the_point():
    t = P.make_backend("trivial")
    v, w = D.check_qs(M.identity(t))
    cd = D.qs_to_cd(w)
    back = D.cd_to_qs(cd)
    assert v.proven and cd.M == back.N == R.of(["•"])


def test_conversions_round_trip(morphisms):
    for m in morphisms[1:]:
        _, w = D.check_qs(m)
        cd = D.convert_density("QsToCd", w)
        back = D.convert_density("CdToQs", cd)
        assert D.check_cd(m, cd)[0].ok and D.check_qs(m, back)[0].ok
        assert len(back.responses) == len(w.responses)


def test_conversion_rejects_bad_input(morphisms):
    _, _, inc = morphisms
    _, w = D.check_qs(inc)
    with pytest.raises(ValueError):
        D.convert_density("Sideways", w)
    with pytest.raises(TypeError):
        D.convert_density("CdToQs", w)


def test_failed_evidence_raises_replay_failure():
    broken = SimpleNamespace(verdict=Verdict.refute({"reason": "evidence"}))
    with pytest.raises(D.ReplayFailure):
        D._ensure(broken)


def test_composition_with_identity_and_factor(morphisms):
    idm, _, inc = morphisms
    _, wid = D.check_qs(idm)
    _, wi = D.check_qs(inc)
    comp = D.qs_compose(wid, wi)
    assert comp.verdict.ok and D.replay_qs(comp).verdict.ok
    assert D.second_factor(comp, idm, inc).verdict.ok
    with pytest.raises(D.IncompatibleMorphisms):
        D.qs_compose(wi, wid)


def test_adjoint_shape(adjoint):
    assert adjoint.positions == (0, 0) and adjoint.width == 1
    assert adjoint.above(0) == [0, 1]


def test_unit_counit_and_triangles(adjoint):
    assert adjoint.unit(X).verdict.ok
    assert adjoint.counit(Y).verdict.ok
    assert adjoint.triangles(X, Y).proven
    assert adjoint.compatibility(Y).proven


def test_hom_bijection_matches_enumeration(adjoint):
    rep = adjoint.hom_bijection(X, Y)
    FX = adjoint.F_obj(X)
    coc = adjoint.morphism
    tracked = 0
    for imgs in itertools.product(Y.carrier, repeat=len(FX.carrier)):
        mp = dict(zip(FX.carrier, imgs))
        if any(Y.idx(mp[p]) != FX.idx(p) for p in FX.carrier):
            continue
        tracked += A.check_morphism(coc.target, FX, Y, mp).verdict.ok
    assert rep.verdict.proven and rep.left == rep.right == tracked


def test_adjoint_over_one_point(morphisms):
    idm, _, _ = morphisms
    adj = D.right_adjoint(idm, D.direct_cd(idm))
    rep = adj.hom_bijection(X, X)
    assert adj.positions == (0,) and rep.verdict.proven and rep.left == rep.right


def test_projection_has_no_computed_adjoint():
    tp = M.two_product([REL, REL])
    proj = tp.projections[0]
    with pytest.raises(D.NotComputableAdjoint):
        D.right_adjoint(proj, None)


def test_density_from_the_adjoint(adjoint):
    pas = REL.pas
    w = D.adjoint_implies_dense(adjoint, ["o1", "o2", pas.const(T.K), pas.const(T.S)])
    assert w.verdict.ok and D.replay_qs(w).verdict.ok
