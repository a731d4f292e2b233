import pytest

from helpers import FIG1_IN_X, FIG1_NOT_IN_X, fig1_instance
from lreckit.cformula import Interner, TableEvaluator, nvars, qdepth
from lreckit.compile import CompileParams, FormulaCache, compile_x_formula, formula_stats
from lreckit.corpus import generate_corpus
from lreckit.errors import MalformedInput, RangeViolation
from lreckit.xfix import XInstance, compute_X, encode_tau_n


def test_params_validation():
    with pytest.raises(MalformedInput):
        CompileParams(0, 1)
    with pytest.raises(RangeViolation):
        CompileParams(3, 3)
    p = CompileParams(3, 1)
    # smallest H with 2^H >= (n+1)^(4r+2)
    assert 2 ** p.H >= 4 ** 6 > 2 ** (p.H - 1)


def test_worked_example_compiles_correctly():
    g, c = fig1_instance()
    s = encode_tau_n(g, c, 3)
    ev = TableEvaluator(s)
    params = CompileParams(3, 1)
    cache = FormulaCache()
    for v, i in FIG1_IN_X:
        assert ev.eval(compile_x_formula(params, i, cache=cache), {"x": v}), (v, i)
    for v, i in FIG1_NOT_IN_X:
        assert not ev.eval(compile_x_formula(params, i, cache=cache), {"x": v}), (v, i)


def test_full_sweep_on_worked_example():
    g, c = fig1_instance()
    s = encode_tau_n(g, c, 3)
    ev = TableEvaluator(s)
    inst = XInstance(g, c)
    params = CompileParams(3, 1)
    cache = FormulaCache()
    for i in range(1, 5):
        f = compile_x_formula(params, i, cache=cache)
        for v in range(3):
            assert ev.eval(f, {"x": v}) == compute_X(inst, v, i), (v, i)


def test_random_instances_agree_with_oracle():
    params = CompileParams(4, 1)
    cache = FormulaCache()
    formulas = {i: compile_x_formula(params, i, cache=cache) for i in range(1, 6)}
    for g, c in generate_corpus(31, 4, 12):
        s = encode_tau_n(g, c, 4)
        ev = TableEvaluator(s)
        inst = XInstance(g, c)
        for i, f in formulas.items():
            for v in range(g.n):
                assert ev.eval(f, {"x": v}) == compute_X(inst, v, i), (v, i)


def test_out_of_range_resource_rejected():
    params = CompileParams(3, 1)
    with pytest.raises(RangeViolation):
        compile_x_formula(params, 0)
    with pytest.raises(RangeViolation):
        compile_x_formula(params, 5)


def test_bounded_variable_count_across_resources():
    params = CompileParams(3, 1)
    cache = FormulaCache()
    counts = [
        nvars(compile_x_formula(params, i, cache=cache)) for i in range(1, 5)
    ]
    assert max(counts) == 4
    assert all(c <= 4 for c in counts)


def test_stats_fields():
    f = compile_x_formula(CompileParams(2, 1), 1)
    stats = formula_stats(f)
    assert set(stats) >= {"qd", "nvars", "dag_size", "tree_size"}
    assert stats["qd"] == qdepth(f)
    assert stats["dag_size"] <= stats["tree_size"]


def test_cache_isolation_and_reuse():
    params = CompileParams(3, 1)
    cache = FormulaCache(Interner())
    f1 = compile_x_formula(params, 2, cache=cache)
    f2 = compile_x_formula(params, 2, cache=cache)
    assert f1 is f2
    other = compile_x_formula(params, 2, cache=FormulaCache(Interner()))
    assert other is not f1
    from lreckit.cformula import print_sexpr

    assert print_sexpr(other) == print_sexpr(f1)


def test_query_variable_name_is_configurable():
    g, c = fig1_instance()
    s = encode_tau_n(g, c, 3)
    params = CompileParams(3, 1)
    default = compile_x_formula(params, 1)
    renamed = compile_x_formula(params, 1, x="q")
    ev = TableEvaluator(s)
    for v in range(3):
        assert ev.eval(default, {"x": v}) == ev.eval(renamed, {"q": v})
