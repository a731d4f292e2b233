import itertools

import pytest

from lreckit.corpus import (
    all_conditions,
    enumerate_rooted_dags,
    generate_corpus,
    random_rooted_dag,
)
from lreckit.errors import SizeExceeded
from lreckit.structures import DiGraph, reachable_closure


def test_empty_corpus():
    assert generate_corpus(0, 5, 0) == []


def test_determinism():
    a = generate_corpus(42, 8, 30)
    b = generate_corpus(42, 8, 30)
    assert a == b
    c = generate_corpus(43, 8, 30)
    assert a != c


def test_instances_are_rooted_dags_with_admissible_conditions():
    for g, c in generate_corpus(3, 9, 100):
        assert g.root is not None
        assert g.is_acyclic()
        assert reachable_closure(g, g.root) == set(range(g.n))
        for v in range(g.n):
            assert all(0 <= x <= g.out_degree(v) for x in c[v])


def test_size_bound():
    with pytest.raises(SizeExceeded):
        generate_corpus(0, 13, 1)
    with pytest.raises(SizeExceeded):
        enumerate_rooted_dags(5)


def brute_force_rooted_dags(n):
    out = []
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for bits in itertools.product((False, True), repeat=len(pairs)):
        edges = frozenset(p for p, b in zip(pairs, bits) if b)
        g = DiGraph(n, edges)
        if not g.is_acyclic():
            continue
        for root in range(n):
            if len(reachable_closure(g, root)) == n:
                out.append(DiGraph(n, edges, root=root))
    return out


def test_exhaustive_enumeration_covers_every_rooted_dag():
    from lreckit.corpus import _rooted_iso

    reps = enumerate_rooted_dags(3)
    # representatives are pairwise non-isomorphic
    for a, b in itertools.combinations(reps, 2):
        assert not _rooted_iso(a, b)
    # and every rooted DAG on <= 3 vertices matches some representative
    for n in (1, 2, 3):
        for g in brute_force_rooted_dags(n):
            assert any(_rooted_iso(g, h) for h in reps)


def test_all_conditions_count():
    g = DiGraph(2, frozenset({(0, 1)}), root=0)
    conds = list(all_conditions(g))
    # vertex 0 has out-degree 1 (subsets of {0,1}), vertex 1 out-degree 0
    assert len(conds) == 4 * 2
    assert len({c.to_json() for c in conds}) == len(conds)


def test_random_rooted_dag_prunes_to_reachable():
    import random

    rng = random.Random(9)
    for _ in range(50):
        g = random_rooted_dag(rng, 8)
        assert reachable_closure(g, g.root) == set(range(g.n))
