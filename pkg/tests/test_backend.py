import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relpca.backend import (
    SET,
    And,
    Atom,
    BudgetRequired,
    ComposedFunctor,
    Eq,
    Exists,
    Fn,
    Obj,
    RegFunctor,
    SourceTargetMismatch,
    Structure,
    Top,
    UnboundSymbol,
    World,
    WorldMismatch,
    arrow,
    check_sequent,
    compose_rel,
    diagonal,
    finite_obj,
    functor_apply,
    image_factorization,
    pow_obj,
    rel,
    same_graph,
    slice_obj,
)

A = finite_obj("A", [1, 2, 3])
B = finite_obj("B", ["a", "b"])
C = finite_obj("C", ["x", "y"])


def relations(src, tgt):
    pairs = list(itertools.product(src.elements, tgt.elements))
    return st.sets(st.sampled_from(pairs)).map(lambda ps: rel(src, tgt, ps))


def oracle_compose(f, g):
    return {(a, c) for a, b in f.pairs for b2, c in g.pairs if b == b2}


def test_worlds_need_an_index():
    with pytest.raises(ValueError):
        World("Pow", ())
    assert World.pow((0, 1)).width == 2 and SET.width == 1


def test_compose_example():
    D = finite_obj("D", [1, 2])
    E = finite_obj("E", ["a"])
    X = finite_obj("X", ["x"])
    f = rel(D, E, [(1, "a"), (2, "a")])
    g = rel(E, X, [("a", "x")])
    assert compose_rel(f, g).pairs == {(1, "x"), (2, "x")}


def test_compose_mismatch():
    with pytest.raises(SourceTargetMismatch):
        compose_rel(diagonal(A), diagonal(B))


@given(relations(A, B), relations(B, C))
def test_compose_matches_triple_enumeration(f, g):
    assert compose_rel(f, g).pairs == oracle_compose(f, g)


@given(relations(A, B), relations(B, C), relations(C, A))
def test_composition_is_associative(f, g, h):
    assert same_graph(compose_rel(compose_rel(f, g), h), compose_rel(f, compose_rel(g, h)))


@given(relations(A, B))
def test_diagonal_is_a_unit(f):
    assert same_graph(compose_rel(diagonal(A), f), f)
    assert same_graph(compose_rel(f, diagonal(B)), f)


def test_slice_composition_is_fiberwise():
    w = World.slice((0, 1))
    X = slice_obj("X", w, {"p": 0, "q": 0, "r": 1})
    Y = slice_obj("Y", w, {"u": 0, "v": 1, "t": 1})
    Z = slice_obj("Z", w, {"m": 0, "n": 1})
    f = rel(X, Y, [("p", "u"), ("q", "u"), ("r", "v"), ("r", "t")])
    g = rel(Y, Z, [("u", "m"), ("v", "n")])
    gf = compose_rel(f, g)
    for i in (0, 1):
        fib = {(a, c) for a, c in gf.pairs if X.fiber_of(a) == i}
        want = {(a, c) for a, b in f.pairs for b2, c in g.pairs if b == b2 and X.fiber_of(a) == i}
        assert fib == want


def test_relations_respect_fibers():
    w = World.slice((0, 1))
    X = slice_obj("X", w, {"p": 0})
    Y = slice_obj("Y", w, {"u": 1})
    with pytest.raises(ValueError):
        rel(X, Y, [("p", "u")])


def test_infinite_diagonal_is_a_predicate():
    N = Obj("N", SET, None, enum=lambda: itertools.count(), test=lambda n: isinstance(n, int))
    d = diagonal(N)
    assert d.holds(5, 5) and not d.holds(5, 6) and d.forward(7) == (7,)
    with pytest.raises(BudgetRequired):
        N.iterate()


@given(st.dictionaries(st.sampled_from([1, 2, 3]), st.sampled_from(["a", "b"]), min_size=3))
def test_image_factorization(mapping):
    f = arrow(A, B, mapping)
    fac = image_factorization(f)
    assert same_graph(compose_rel(fac.epi, fac.mono), f)
    assert len(set(fac.mono.pairs)) == len({b for _, b in fac.mono.pairs})
    assert {b for _, b in fac.epi.pairs} == set(fac.image.elements)


# sequents


def test_trivial_sequents():
    st_ = Structure({"A": A}, {"E": rel(A, B, [(1, "a"), (2, "b"), (3, "a")])})
    st_.sorts["B"] = B
    assert check_sequent(st_, Top(), Eq("x", "x"), {"x": "A"}).proven
    hyp = Atom("E", ("x", "b0"))
    concl = Exists("b", "B", Atom("E", ("x", "b")))
    assert check_sequent(st_, hyp, concl, {"x": "A", "b0": "B"}).proven


def test_sequent_refutation_carries_assignment():
    st_ = Structure({"A": A}, functions={"f": arrow(A, A, {1: 2, 2: 2, 3: 1})})
    v = check_sequent(st_, Top(), Eq(Fn("f", "x"), "x"), {"x": "A"})
    assert v.refuted and v.counterexample == {"x": "1"}


def test_unbound_symbols():
    st_ = Structure({"A": A})
    with pytest.raises(UnboundSymbol):
        check_sequent(st_, Top(), Atom("R", ("x",)), {"x": "A"})
    with pytest.raises(UnboundSymbol):
        check_sequent(st_, Top(), Top(), {"x": "Nope"})


def test_infinite_sort_needs_budget_and_gives_evidence():
    N = Obj("N", SET, None, enum=lambda: itertools.count(), test=lambda n: isinstance(n, int))
    st_ = Structure({"N": N})
    with pytest.raises(BudgetRequired):
        check_sequent(st_, Top(), Eq("x", "x"), {"x": "N"})
    v = check_sequent(st_, Top(), Eq("x", "x"), {"x": "N"}, samples=20)
    assert v.kind == "Evidence" and v.checked == 20


@settings(max_examples=40)
@given(relations(A, A), relations(A, A))
def test_sequents_are_monotone_in_hypotheses(r, s):
    st_ = Structure({"A": A}, {"R": r, "S": s})
    concl = Exists("z", "A", Atom("R", ("x", "z")))
    base = check_sequent(st_, Atom("R", ("x", "y")), concl, {"x": "A", "y": "A"})
    more = check_sequent(st_, And((Atom("R", ("x", "y")), Atom("S", ("y", "x")))), concl, {"x": "A", "y": "A"})
    assert base.proven
    assert not (base.proven and more.refuted)


def test_projection_transports_valid_sequents():
    w = World.pow((0, 1))
    X = pow_obj("X", w, [[1, 2], [3]])
    f = rel(X, X, [((0, 1), (0, 2)), ((0, 2), (0, 2)), ((1, 3), (1, 3))])
    p = RegFunctor.projection(w, 0)
    X0, f0 = functor_apply(p, X), functor_apply(p, f)
    st_ = Structure({"X": X0}, {"F": f0})
    # F is total: x ⊢ ∃y F(x, y); re-enumerated in the target world
    v = check_sequent(st_, Top(), Exists("y", "X", Atom("F", ("x", "y"))), {"x": "X"})
    assert v.proven


# functors


def test_identity_and_projection():
    f = rel(A, B, [(1, "a")])
    assert RegFunctor.identity().apply(f) is f
    w = World.pow((0, 1))
    X = pow_obj("X", w, [[1, 2], ["z"]])
    assert set(RegFunctor.projection(w, 0).apply(X).elements) == {1, 2}


def test_pullback_matches_product_with_index():
    p = RegFunctor.pullback((0, 1))
    IA = p.apply(A)
    explicit = {((i, a), i) for i in (0, 1) for a in A.elements}
    assert set(IA.over) == explicit


def test_world_mismatch():
    w = World.pow((0, 1))
    with pytest.raises(WorldMismatch):
        RegFunctor.projection(w, 0).apply(A)
    with pytest.raises(WorldMismatch):
        RegFunctor.projection(SET, 0)


FUNCTORS = [
    (RegFunctor.identity(), A, B),
    (RegFunctor.pullback((0, 1)), A, B),
    (RegFunctor.terminal(), A, B),
]


@pytest.mark.parametrize("F,X,Y", FUNCTORS, ids=lambda x: str(x) if isinstance(x, RegFunctor) else "")
@settings(max_examples=25)
@given(data=st.data())
def test_functors_preserve_composition_and_diagonals(F, X, Y, data):
    f = data.draw(relations(X, Y))
    g = data.draw(relations(Y, X))
    assert same_graph(F.apply(compose_rel(f, g)), compose_rel(F.apply(f), F.apply(g)))
    assert same_graph(F.apply(diagonal(X)), diagonal(F.apply(X)))


@settings(max_examples=25)
@given(data=st.data())
def test_power_functors_preserve_composition(data):
    w = World.pow((0, 1))
    X = pow_obj("X", w, [[1, 2], [3]])
    Y = pow_obj("Y", w, [["a"], ["b", "c"]])

    def fiberwise(src, tgt):
        pairs = [(a, b) for a in src.elements for b in tgt.elements if a[0] == b[0]]
        return st.sets(st.sampled_from(pairs)).map(lambda ps: rel(src, tgt, ps))

    f, g = data.draw(fiberwise(X, Y)), data.draw(fiberwise(Y, X))
    for F in (RegFunctor.projection(w, 1), RegFunctor.product(w), RegFunctor.swap(w)):
        assert same_graph(F.apply(compose_rel(f, g)), compose_rel(F.apply(f), F.apply(g)))
        assert same_graph(F.apply(diagonal(X)), diagonal(F.apply(X)))


def test_product_functor_on_objects():
    w = World.pow((0, 1))
    X = pow_obj("X", w, [[1, 2], ["z"]])
    assert set(RegFunctor.product(w).apply(X).elements) == {(1, "z"), (2, "z")}


def test_composed_functor_applies_left_to_right():
    w = World.slice((0, 1))
    F = ComposedFunctor((RegFunctor.pullback((0, 1)), RegFunctor.swap(w)))
    assert F.source == SET and F.target == w
    assert F.on_element("a") == ("a", "a")


def test_reindex_pulls_back_along_a_map():
    J, I = World.slice(("j",)), World.slice((0, 1))
    r = RegFunctor.reindex(J, I, ("j", "j"))
    Y = slice_obj("Y", J, {"y1": "j", "y2": "j"})
    assert len(r.apply(Y).elements) == 4 and r.positions == (0, 0)
    with pytest.raises(WorldMismatch):
        RegFunctor.reindex(J, I, ("j",))
