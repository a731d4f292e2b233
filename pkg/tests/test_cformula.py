import pytest
from hypothesis import given, settings, strategies as st

from lreckit.cformula import (
    Evaluator,
    Interner,
    TableEvaluator,
    dag_size,
    distinguishes,
    eval_formula,
    mk_and,
    mk_atom,
    mk_bool,
    mk_count,
    mk_eq,
    mk_exists,
    mk_forall,
    mk_implies,
    mk_not,
    mk_or,
    nvars,
    parse_sexpr,
    print_sexpr,
    qdepth,
    tree_size,
)
from lreckit.errors import MalformedInput, NotASentence, UnboundVariable
from lreckit.structures import RelStructure, Vocabulary

VOC = Vocabulary((("E", 2), ("P", 1)))
VARS = ("x", "y", "z")


def structures():
    return st.integers(1, 4).flatmap(
        lambda n: st.builds(
            lambda e, p: RelStructure(VOC, n, {"E": e, "P": p}),
            st.frozensets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))),
            st.frozensets(st.tuples(st.integers(0, n - 1))),
        )
    )


def formulas():
    var = st.sampled_from(VARS)
    atomic = st.one_of(
        st.booleans().map(mk_bool),
        st.tuples(var, var).map(lambda p: mk_eq(*p)),
        st.tuples(var, var).map(lambda p: mk_atom("E", p)),
        var.map(lambda v: mk_atom("P", (v,))),
    )

    def compound(children):
        return st.one_of(
            children.map(mk_not),
            st.lists(children, min_size=1, max_size=3).map(mk_or),
            st.lists(children, min_size=1, max_size=3).map(mk_and),
            st.tuples(var, children).map(lambda p: mk_exists(*p)),
            st.tuples(var, children).map(lambda p: mk_forall(*p)),
            st.tuples(
                st.sampled_from((">=", "=", "<=")), st.integers(0, 4), var, children
            ).map(lambda p: mk_count(*p)),
        )

    return st.recursive(atomic, compound, max_leaves=12)


FULL = {"x": 0, "y": 0, "z": 0}


def full_assignment(s):
    return {v: 0 for v in VARS} if s.n else {}


@settings(max_examples=200)
@given(structures(), formulas())
def test_recursive_and_table_evaluators_agree(s, f):
    assign = {v: 0 for v in VARS}
    assert Evaluator(s).eval(f, assign) == TableEvaluator(s).eval(f, assign)


@settings(max_examples=100)
@given(structures(), formulas())
def test_memoized_matches_unmemoized(s, f):
    assign = {v: 0 for v in VARS}
    assert eval_formula(s, f, assign, memoize=True) == eval_formula(
        s, f, assign, memoize=False
    )


@settings(max_examples=150)
@given(formulas())
def test_sexpr_round_trip(f):
    assert parse_sexpr(print_sexpr(f)) is f


@settings(max_examples=100)
@given(structures(), formulas(), st.integers(0, 3))
def test_exact_count_is_ge_and_not_ge_succ(s, f, t):
    exact = mk_count("=", t, "x", f)
    split = mk_and(
        [mk_count(">=", t, "x", f), mk_not(mk_count(">=", t + 1, "x", f))]
    )
    assign = {v: 0 for v in VARS}
    assert TableEvaluator(s).eval(exact, assign) == TableEvaluator(s).eval(
        split, assign
    )


@settings(max_examples=100)
@given(formulas(), formulas())
def test_interning_gives_identity(f, g):
    again_f = parse_sexpr(print_sexpr(f))
    assert again_f is f
    if print_sexpr(f) == print_sexpr(g):
        assert f is g


def test_interner_isolation():
    itn = Interner()
    f = mk_atom("P", ("x",), itn)
    g = mk_atom("P", ("x",))
    assert f is not g
    assert print_sexpr(f) == print_sexpr(g)


def test_qdepth_and_nvars():
    inner = mk_atom("E", ("x", "y"))
    f = mk_exists("x", mk_count(">=", 2, "y", inner))
    assert qdepth(inner) == 0
    assert qdepth(f) == 2
    assert nvars(f) == 2
    g = mk_and([f, mk_atom("P", ("z",))])
    assert nvars(g) == 3


def test_shadowing_inner_binder_wins():
    s = RelStructure(VOC, 2, {"E": frozenset(), "P": frozenset({(1,)})})
    # exists x (not P(x) and exists x P(x)) -- the inner x is independent
    f = mk_exists(
        "x", mk_and([mk_not(mk_atom("P", ("x",))), mk_exists("x", mk_atom("P", ("x",)))])
    )
    assert eval_formula(s, f)


def test_dag_smaller_than_tree_when_shared():
    p = mk_atom("P", ("x",))
    f = mk_or([mk_and([p, p]), mk_and([p, p])])
    assert dag_size(f) < tree_size(f)


def test_boolean_simplifications():
    p = mk_atom("P", ("x",))
    assert mk_not(mk_not(p)) is p
    assert mk_and([p, mk_bool(True)]) is p
    assert mk_or([p, mk_bool(False)]) is p
    assert mk_or([p, mk_bool(True)]) is mk_bool(True)
    assert mk_and([p, mk_bool(False)]) is mk_bool(False)
    assert mk_count(">=", 0, "x", p) is mk_bool(True)


def test_implies():
    s = RelStructure(VOC, 2, {"E": frozenset(), "P": frozenset({(0,), (1,)})})
    f = mk_forall("x", mk_implies(mk_atom("P", ("x",)), mk_eq("x", "x")))
    assert eval_formula(s, f)


def test_unbound_variable_raises():
    s = RelStructure(VOC, 2, {"E": frozenset(), "P": frozenset()})
    with pytest.raises(UnboundVariable):
        eval_formula(s, mk_atom("P", ("x",)), {})


def test_distinguishes_requires_sentence():
    s = RelStructure(VOC, 2, {"E": frozenset(), "P": frozenset()})
    t = RelStructure(VOC, 2, {"E": frozenset(), "P": frozenset({(0,)})})
    sentence = mk_exists("x", mk_atom("P", ("x",)))
    assert distinguishes(s, t, sentence)
    with pytest.raises(NotASentence):
        distinguishes(s, t, mk_atom("P", ("x",)))


def test_parse_errors():
    with pytest.raises(MalformedInput):
        parse_sexpr("(frob x)")
    with pytest.raises(MalformedInput):
        parse_sexpr("(count maybe 1 x (bool t))")
    with pytest.raises(MalformedInput):
        parse_sexpr("(eq x)")
    with pytest.raises(MalformedInput):
        parse_sexpr("(bool t) extra")
