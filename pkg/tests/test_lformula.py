import pytest

from helpers import fig1_instance
from lreckit.errors import (
    MalformedInput,
    NestedLrec,
    RangeViolation,
    UnboundVariable,
)
from lreckit.lformula import (
    TwoSortedAssignment,
    build_quotient,
    eval_fo_c,
    eval_lrec,
    parse_lsexpr,
    print_lsexpr,
)
from lreckit.structures import RelStructure, Vocabulary
from lreckit.xfix import XInstance, encode_tau_n

VOC = Vocabulary((("E", 2), ("P", 1)))


def struct(n, edges, p=()):
    return RelStructure(
        VOC, n, {"E": frozenset(edges), "P": frozenset((v,) for v in p)}
    )


def ev(s, text, dom=None, num=None):
    return eval_fo_c(s, parse_lsexpr(text), TwoSortedAssignment(dom or {}, num or {}))


def test_round_trip_all_forms():
    texts = [
        "(bool t)",
        "(eq x y)",
        "(atom E x y)",
        "(not (atom P x))",
        "(or (bool f) (atom P x))",
        "(and (bool t) (bool t))",
        "(exists x (atom P x))",
        "(forall x (atom P x))",
        "(num-exists i (num-eq i 2))",
        "(num-le min max)",
        "(num-succ i j)",
        "(count-dom x (atom P x) k)",
        "(count-num i (num-le i j) 3)",
        "(lrec (y1) (y2) (i) (eq y1 y2) (atom E y1 y2) (num-eq i 0) (x) (k))",
    ]
    for text in texts:
        f = parse_lsexpr(text)
        assert print_lsexpr(parse_lsexpr(print_lsexpr(f))) == print_lsexpr(f)


def test_parse_errors():
    for bad in ["(= x y)", "(lrec (y1) (y2))", "(num-le 1)", "(atom)"]:
        with pytest.raises(MalformedInput):
            parse_lsexpr(bad)


def test_number_sort_semantics():
    s = struct(3, [])
    assert ev(s, "(num-le min max)")
    assert ev(s, "(num-eq max 3)")
    assert ev(s, "(num-succ i j)", num={"i": 1, "j": 2})
    assert not ev(s, "(num-succ i j)", num={"i": 2, "j": 2})
    assert ev(s, "(num-exists i (num-eq i 3))")
    with pytest.raises(RangeViolation):
        ev(s, "(num-exists i (num-eq i 4))")
    with pytest.raises(RangeViolation):
        ev(s, "(num-eq i i)", num={"i": 9})


def test_counting_forms():
    s = struct(3, [(0, 1), (0, 2)], p=[1, 2])
    assert ev(s, "(count-dom x (atom P x) k)", num={"k": 2})
    assert not ev(s, "(count-dom x (atom P x) k)", num={"k": 1})
    # numbers 0..3 that are <= 1: exactly two of them
    assert ev(s, "(count-num i (num-le i 1) 2)")


def test_unbound_and_nested_errors():
    s = struct(2, [])
    with pytest.raises(UnboundVariable):
        ev(s, "(atom P x)")
    with pytest.raises(MalformedInput):
        eval_fo_c(
            s,
            parse_lsexpr(
                "(lrec (y1) (y2) (i) (eq y1 y2) (atom E y1 y2) "
                "(num-eq i 0) (x) (k))"
            ),
        )
    with pytest.raises(NestedLrec):
        # the recursion-free evaluator refuses lrec outright
        from lreckit.lformula import LEvaluator

        LEvaluator(s, allow_lrec=False).eval(
            parse_lsexpr(
                "(lrec (y1) (y2) (i) (eq y1 y2) (atom E y1 y2) "
                "(num-eq i 0) (x) (k))"
            ),
            TwoSortedAssignment({"x": 0}, {"k": 1}),
        )


FIG1_LREC = """
(lrec (y1) (y2) (i)
  (eq y1 y2)
  (atom E y1 y2)
  (or (and (atom P y1) (not (eq y1 y1))) (bool f)
      (and (atom A y1) (or (num-eq i 0) (num-eq i 2) (num-eq i 3)))
      (and (atom B y1) (or (num-eq i 0) (num-eq i 1)))
      (and (atom D y1) (num-eq i 3)))
  (x) (k))
"""


def fig1_structure():
    voc = Vocabulary((("E", 2), ("A", 1), ("B", 1), ("D", 1), ("P", 1)))
    g, _ = fig1_instance()
    return RelStructure(
        voc,
        3,
        {
            "E": frozenset(g.edges),
            "A": frozenset({(0,)}),
            "B": frozenset({(1,)}),
            "D": frozenset({(2,)}),
            "P": frozenset(),
        },
    )


def test_lrec_matches_direct_recursion():
    s = fig1_structure()
    f = parse_lsexpr(FIG1_LREC)
    g, c = fig1_instance()
    inst = XInstance(g, c)
    for v in range(3):
        for m in range(4):
            got = eval_lrec(s, f, TwoSortedAssignment({"x": v}, {"k": m}))
            assert got == inst.member(v, m), (v, m)


def test_quotient_contracts_equivalent_elements():
    # two P-labelled elements are merged; the third stays alone
    s = struct(3, [(0, 1), (0, 2)], p=[1, 2])
    f_eq = parse_lsexpr(
        "(or (eq y1 y2) (and (atom P y1) (atom P y2)))"
    )
    f_edge = parse_lsexpr("(atom E y1 y2)")
    f_card = parse_lsexpr("(num-eq i 0)")
    q = build_quotient(
        s, TwoSortedAssignment(), 1, f_eq, f_edge, f_card, ("i",), ("y1",), ("y2",)
    )
    assert len(q.classes) == 2
    assert q.class_of((1,)) == q.class_of((2,))
    assert q.class_of((0,)) != q.class_of((1,))
    assert not q.closure_changed


def test_quotient_closes_non_equivalences_with_warning():
    s = struct(3, [])
    f_eq = parse_lsexpr("(and (atom P y1) (not (atom P y2)))")
    s = struct(3, [], p=[0])
    with pytest.warns(UserWarning, match="closure"):
        q = build_quotient(
            s,
            TwoSortedAssignment(),
            1,
            f_eq,
            parse_lsexpr("(bool f)"),
            parse_lsexpr("(bool f)"),
            ("i",),
            ("y1",),
            ("y2",),
        )
    assert q.closure_changed


def test_lrec_on_encoded_instance_via_label_predicates():
    # evaluate the recursion over the tau-encoded structure itself, with
    # the card formula reading the P_i labels
    g, c = fig1_instance()
    s = encode_tau_n(g, c, 3)
    card = ("(or "
            "(and (atom P0 y1) (num-eq i 0)) (and (atom P1 y1) (num-eq i 1)) "
            "(and (atom P2 y1) (num-eq i 2)) (and (atom P3 y1) (num-eq i 3)))")
    f = parse_lsexpr(
        "(lrec (y1) (y2) (i) (eq y1 y2) (atom E y1 y2) " + card + " (x) (k))"
    )
    inst = XInstance(g, c)
    for v in range(3):
        for m in range(4):
            got = eval_lrec(s, f, TwoSortedAssignment({"x": v}, {"k": m}))
            assert got == inst.member(v, m), (v, m)
