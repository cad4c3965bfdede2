import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relpca import sk
from relpca import terms as T
from relpca.outcome import AppOutcome, Verdict, conjoin
from relpca.pca import SkPas, TrivialPas

x, y, z = T.Var("x"), T.Var("y"), T.Var("z")
PAS = SkPas(fuel=4000, atoms=("o1", "o2"))


def oracle(t, fuel=2000):
    """Leftmost-outermost SK reduction, written without the spine machine."""

    def step(u):
        if isinstance(u, tuple):
            f, a = u
            if isinstance(f, tuple) and f[0] == "k":
                return f[1], True
            if isinstance(f, tuple) and isinstance(f[0], tuple) and f[0][0] == "s":
                g, h = f[0][1], f[1]
                return ((g, a), (h, a)), True
            f2, done = step(f)
            if done:
                return (f2, a), True
            a2, done = step(a)
            return (f, a2), done
        return u, False

    for _ in range(fuel):
        t, moved = step(t)
        if not moved:
            return t
    return None


def normal_forms(max_leaves=5):
    return st.builds(
        lambda seed, n: sk.random_normal_form(random.Random(seed), n, ("o1", "o2")),
        st.integers(0, 10**6),
        st.integers(1, max_leaves),
    )


def run(t, valuation=()):
    return T.eval_term(PAS, t, valuation, 4000)


def test_printing_and_size():
    t = T.app(x, y, z)
    assert T.show(t) == "x y z" and T.size(t) == 5 and T.app_count(t) == 2
    assert T.show(T.App(x, T.App(y, z))) == "x (y z)"
    assert T.var_order(T.app(z, T.App(x, z), y)) == ("z", "x", "y")


def test_abstract_identity_is_skk():
    assert T.bracket_abstract("x", x) == T.app(T.S, T.K, T.K)


def test_abstract_constant_atom():
    assert T.bracket_abstract("x", y) == T.App(T.K, y)


@settings(max_examples=50)
@given(normal_forms())
def test_identity_term_behaves_as_identity(a):
    out = run(T.App(T.bracket_abstract("x", x), T.Const("a", a)))
    assert out.defined and out.value == oracle(a)


@given(st.lists(st.sampled_from(["x", "y", "z"]), min_size=1, max_size=4))
def test_abstracted_variable_disappears(names):
    body = T.app(*[T.Var(n) for n in names])
    for v in set(names):
        assert v not in T.free_vars(T.bracket_abstract(v, body))
    assert not T.free_vars(T.abstract(sorted(set(names)), body))


def test_pairing():
    pair = T.abstract(["x", "y", "z"], T.app(z, x, y))
    a, b, c = "o1", "o2", ("k", "o1")
    out = run(T.app(pair, T.Var("a"), T.Var("b"), T.Var("c")), {"a": a, "b": b, "c": c})
    assert out.value == oracle(((c, a), b))


@settings(max_examples=60)
@given(normal_forms(), normal_forms(), normal_forms())
def test_combinator_laws_against_oracle(a, b, c):
    assert run(T.app(T.K, x, y), [a, b]).value == a
    left = run(T.app(T.S, x, y, z), [a, b, c])
    want = oracle(((a, c), (b, c)))
    if want is not None and left.defined:
        assert left.value == want


def test_unfold_counts_applications():
    f = T.unfold_definedness(T.App(x, T.App(y, z)), {"x": "a", "y": "b", "z": "c"})
    assert f.render() == "D(b,c) ∧ D(a,_1)"


@given(st.recursive(st.sampled_from([x, y, z]), lambda s: st.builds(T.App, s, s), max_leaves=8))
def test_conjuncts_match_application_nodes(t):
    f = T.unfold_definedness(t, {"x": 1, "y": 2, "z": 3})
    assert len(f) == T.app_count(t)


def test_unbound_variable():
    with pytest.raises(T.UnboundVariable):
        T.unfold_definedness(T.App(x, y), {"x": 1})


def test_trivial_model_is_total():
    for t in T.enumerate_terms(5, [x, T.K, T.S]):
        assert T.eval_term(TrivialPas(), t, {"x": "•"}).value == "•"


def test_divergence_is_out_of_fuel():
    omega = T.abstract(["x"], T.App(x, x))
    out = run(T.App(omega, omega))
    assert not out.defined and out.status == AppOutcome.out_of_fuel(1).status


def test_enumeration_counts():
    # Catalan(1) * 2^1 + Catalan(2) * 2^2 + Catalan(3) * 2^3
    terms = list(T.enumerate_terms(5, [x, y]))
    assert len(terms) == 2 + 4 + 16
    assert all(T.size(t) <= 5 for t in terms)
    assert all({"x", "y"} <= T.free_vars(t) for t in T.enumerate_terms(5, [x, y], require_all=True))


@given(st.recursive(st.sampled_from([x, y, T.K, T.S]), lambda s: st.builds(T.App, s, s), max_leaves=10))
def test_parse_show_round_trip(t):
    assert T.parse(T.show(t), ["k", "s"]) == t


def test_parse_lambda_and_errors():
    assert T.parse(r"\x. x", ["k", "s"]) == T.app(T.S, T.K, T.K)
    assert T.parse("λx y. y x") == T.abstract(["x", "y"], T.App(y, x))
    for bad, pos in [("(x y", 4), ("x )", 2), ("x $", 2), (r"\. x", 1)]:
        with pytest.raises(T.ParseError) as err:
            T.parse(bad)
        assert err.value.position == pos


@given(normal_forms(7))
def test_sk_read_show_round_trip(a):
    assert sk.read(sk.show(a)) == a and sk.is_normal(a)


def test_enumerated_normal_forms_are_normal():
    forms = sk.enumerate_normal_forms(5, ("o1",))
    assert len(set(forms)) == len(forms)
    assert all(sk.is_normal(f) and sk.term_size(f) <= 5 for f in forms)
    assert ("k", "o1") in forms and ("o1", "k") in forms


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict("Proven", exhaustive=False)
    with pytest.raises(ValueError):
        Verdict("Refuted")
    assert conjoin([Verdict.proven_(), Verdict("Evidence", exhaustive=False)]).kind == "Evidence"
    assert conjoin([Verdict.proven_(), Verdict("Refuted", counterexample=1)]).refuted
