"""Compiler from the recursion relation X to counting-logic formulas.

Given a size bound n and resource-width exponent r, compile_x_formula
produces a formula phi_i(x) over the vocabulary {E, P_0..P_n} that holds
at a vertex v of an encoded instance exactly when (v, i) lies in X. The
formula families mirror the balanced decomposition: type-0 formulas
verify membership outright, type-1 formulas verify it relative to one
waypoint pair whose child-count is assumed. Quantifier depth stays
O(r log n) and the number of variable names is a constant.

translate_lrec_once then turns a single recursion operator over
recursion-free subformulas into one counting-logic formula on the source
vocabulary by substituting definable equality/edge/label tests for the
atoms of the compiled formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cformula import (
    CFormula,
    EQN,
    GE,
    LE,
    Interner,
    default_interner,
    mk_and,
    mk_atom,
    mk_bool,
    mk_count,
    mk_eq,
    mk_exists,
    mk_forall,
    mk_not,
    mk_or,
    dag_size,
    nvars,
    qdepth,
    tree_size,
)
from .errors import (
    ArityMismatch,
    MalformedInput,
    NestedLrec,
    RangeViolation,
    TupleWidthUnsupported,
    UnboundVariable,
)
from .lformula import (
    COUNTDOM,
    COUNTNUM,
    LATOM,
    LAND,
    LBOOL,
    LEQ,
    LEXISTS,
    LFormula,
    LNOT,
    LOR,
    LREC,
    NUMEQ,
    NUMEXISTS,
    NUMLE,
    NUMSUCC,
    decode_number,
)

PALETTE = ("x", "y", "z", "u", "v", "w")
# Reserved names never drawn from the palette: the query variable of a
# translated recursion formula and the two substitution auxiliaries.
QUERY_VAR = "q"
SUBST_VARS = ("s1", "s2")


def _fresh(avoid) -> str:
    for name in PALETTE:
        if name not in avoid:
            return name
    raise AssertionError("palette exhausted")


@dataclass(frozen=True)
class CompileParams:
    """Size bound n and resource-width exponent r; resources range in
    [1, (n+1)^r] and H budgets the doubling recursion."""

    n: int
    r: int

    def __post_init__(self):
        if self.n < 1:
            raise MalformedInput(f"n must be >= 1, got {self.n}")
        if not (1 <= self.r <= 2):
            raise RangeViolation(f"r must be in [1, 2], got {self.r}")

    @property
    def H(self) -> int:
        # ceil((4r+2) * log2(n+1)), computed exactly:
        # smallest H with 2^H >= (n+1)^(4r+2)
        return ((self.n + 1) ** (4 * self.r + 2) - 1).bit_length()


class FormulaCache:
    """Memo from (family tag, indices, variable names) to interned nodes.

    Families: deg, path, child0, child1, psi0, psi1. All construction goes
    through the cache; the recursive definitions would blow up as trees.
    """

    def __init__(self, interner: Interner | None = None):
        self.interner = interner if interner is not None else default_interner()
        self._memo: dict[tuple, CFormula] = {}

    def get(self, key: tuple) -> CFormula | None:
        return self._memo.get(key)

    def put(self, key: tuple, f: CFormula) -> CFormula:
        self._memo[key] = f
        return f

    def __len__(self):
        return len(self._memo)


_DEFAULT_CACHE = FormulaCache()


def default_cache() -> FormulaCache:
    return _DEFAULT_CACHE


def deg_formula(d: int, target: str = "x", aux: str = "y",
                n: int | None = None,
                interner: Interner | None = None) -> CFormula:
    """In-degree test: exactly d elements with an edge into target."""
    if d < 0 or (n is not None and d > n):
        raise RangeViolation(f"degree {d} out of range")
    if aux == target:
        raise MalformedInput("aux variable must differ from target")
    return mk_count(EQN, d, aux, mk_atom("E", (aux, target), interner), interner)


def path_formula(h: int, l: int, lp: int, params: CompileParams,
                 x: str = "x", y: str = "y",
                 cache: FormulaCache | None = None) -> CFormula:
    """Resource-annotated reachability: a walk from (x, l) to (y, lp) in
    the unfolded recursion DAG, verifiable in h doubling steps."""
    cache = cache if cache is not None else _DEFAULT_CACHE
    itn = cache.interner
    key = ("path", params.n, h, l, lp, x, y)
    hit = cache.get(key)
    if hit is not None:
        return hit
    n = params.n
    if h == 0:
        if l == lp:
            f = mk_eq(x, y, itn)
        else:
            aux = _fresh({x, y})
            degs = [
                deg_formula(d, y, aux, interner=itn)
                for d in range(1, n + 1)
                if (l - 1) // d == lp
            ]
            f = mk_and([mk_atom("E", (x, y), itn), mk_or(degs, itn)], itn)
    else:
        z = _fresh({x, y})
        options = [
            mk_and([path_formula(h - 1, l, j, params, x, z, cache),
                    path_formula(h - 1, j, lp, params, z, y, cache)], itn)
            for j in range(lp, l + 1)
        ]
        f = mk_exists(z, mk_or(options, itn), itn)
    return cache.put(key, f)


def _psi0_base(ip: int, params: CompileParams, x: str,
               cache: FormulaCache) -> CFormula:
    itn = cache.interner
    key = ("psi0base", params.n, ip, x)
    hit = cache.get(key)
    if hit is not None:
        return hit
    n = params.n
    y = _fresh({x})
    aux = _fresh({x, y})
    # The degree disjunction starts at i' (the node is a leaf exactly when
    # every successor's in-degree is at least i'); see the build decisions
    # ledger, entry "psi0-degree-range".
    degs = [deg_formula(d, y, aux, interner=itn) for d in range(ip, n + 1)]
    f = mk_and([
        mk_atom("P0", (x,), itn),
        mk_forall(y, mk_or([mk_not(mk_atom("E", (x, y), itn), itn),
                            mk_or(degs, itn)], itn), itn),
    ], itn)
    return cache.put(key, f)


def psi_t0(h: int, ip: int, params: CompileParams, x: str = "x",
           cache: FormulaCache | None = None) -> CFormula:
    """Type-0 family: (x, ip) lies in X, verifiable in h recursion steps."""
    cache = cache if cache is not None else _DEFAULT_CACHE
    itn = cache.interner
    key = ("psi0", params.n, h, ip, x)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if ip <= 0:
        return cache.put(key, mk_bool(False, itn))
    n = params.n
    base = _psi0_base(ip, params, x, cache)
    if h == 0:
        f = base
    else:
        y = _fresh({x})
        options = [
            mk_and([
                path_formula(h, ip, l, params, x, y, cache),
                children_t0(h - 1, l, c, params, y, cache),
                psi_t1(h - 1, ip, l, c, params, x, y, cache),
            ], itn)
            # l = ip is the degenerate split at (x, ip) itself: the path
            # collapses to x = y and the type-1 conjunct to P_c(x), giving
            # the direct child-count check; without it the type-1 family
            # never reaches its diagonal base case (ledger entry
            # "psi-ell-range")
            for l in range(1, ip + 1)
            for c in range(0, n + 1)
        ]
        f = mk_or([base, mk_exists(y, mk_or(options, itn), itn)], itn)
    return cache.put(key, f)


def children_t0(h: int, l: int, c: int, params: CompileParams, y: str = "y",
                cache: FormulaCache | None = None) -> CFormula:
    """(y, l) admits exactly c type-0 children inside X."""
    cache = cache if cache is not None else _DEFAULT_CACHE
    itn = cache.interner
    key = ("child0", params.n, h, l, c, y)
    hit = cache.get(key)
    if hit is not None:
        return hit
    n = params.n
    z = _fresh({y})
    aux = _fresh({y, z})
    per_d = [
        mk_and([deg_formula(d, z, aux, interner=itn),
                psi_t0(h, (l - 1) // d, params, z, cache)], itn)
        for d in range(1, n + 1)
    ]
    body = mk_and([mk_atom("E", (y, z), itn), mk_or(per_d, itn)], itn)
    return cache.put(key, mk_count(EQN, c, z, body, itn))


def psi_t1(h: int, ip: int, j: int, c: int, params: CompileParams,
           x: str = "x", y: str = "y",
           cache: FormulaCache | None = None) -> CFormula:
    """Type-1 family: (x, ip) lies in X, verifiable in h steps while
    stopping at the waypoint (y, j), assumed to have exactly c in-X
    children."""
    cache = cache if cache is not None else _DEFAULT_CACHE
    itn = cache.interner
    key = ("psi1", params.n, h, ip, j, c, x, y)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if ip <= 0 or j <= 0:
        return cache.put(key, mk_bool(False, itn))
    n = params.n
    if ip == j:
        base = mk_and([mk_atom(f"P{c}", (x,), itn), mk_eq(x, y, itn)], itn) \
            if c <= n else mk_bool(False, itn)
    else:
        base = mk_bool(False, itn)
    if h == 0:
        f = base
    else:
        z = _fresh({x, y})
        options = [
            mk_and([
                path_formula(h, ip, l, params, x, z, cache),
                path_formula(h, l, j, params, z, y, cache),
                children_t1(h - 1, l, j, c, cp, params, z, y, cache),
                psi_t1(h - 1, ip, l, cp, params, x, z, cache),
            ], itn)
            # l = ip reaches the diagonal base case via the degenerate
            # split at (x, ip) itself (ledger entry "psi-ell-range")
            for l in range(j + 1, ip + 1)
            for cp in range(0, n + 1)
        ]
        f = mk_or([base, mk_exists(z, mk_or(options, itn), itn)], itn)
    return cache.put(key, f)


def children_t1(h: int, l: int, j: int, c: int, cp: int,
                params: CompileParams, z: str = "z", y: str = "y",
                cache: FormulaCache | None = None) -> CFormula:
    """(z, l) admits exactly cp children inside X, given that the waypoint
    (y, j) has exactly c; children above the waypoint recurse as type 1,
    the rest as type 0."""
    cache = cache if cache is not None else _DEFAULT_CACHE
    itn = cache.interner
    key = ("child1", params.n, h, l, j, c, cp, z, y)
    hit = cache.get(key)
    if hit is not None:
        return hit
    n = params.n
    zp = _fresh({z, y})
    aux = _fresh({z, y, zp})
    per_d = []
    for d in range(1, n + 1):
        lnext = (l - 1) // d
        above = path_formula(h, lnext, j, params, zp, y, cache)
        branch = mk_or([
            mk_and([psi_t0(h, lnext, params, zp, cache),
                    mk_not(above, itn)], itn),
            mk_and([psi_t1(h, lnext, j, c, params, zp, y, cache),
                    above], itn),
        ], itn)
        per_d.append(mk_and([deg_formula(d, zp, aux, interner=itn),
                             branch], itn))
    body = mk_and([mk_atom("E", (z, zp), itn), mk_or(per_d, itn)], itn)
    return cache.put(key, mk_count(EQN, cp, zp, body, itn))


def compile_x_formula(params: CompileParams, i: int, x: str = "x",
                      cache: FormulaCache | None = None) -> CFormula:
    """The formula phi_i(x) deciding (x, i) in X on encoded instances of
    size at most n."""
    cache = cache if cache is not None else _DEFAULT_CACHE
    if not (1 <= i <= (params.n + 1) ** params.r):
        raise RangeViolation(
            f"resource {i} not in [1, {(params.n + 1) ** params.r}]"
        )
    return psi_t0(params.H, i, params, x, cache)


def formula_stats(f: CFormula) -> dict:
    """Quantifier depth, variable count, DAG size, expanded-tree size."""
    return {
        "qd": qdepth(f),
        "nvars": nvars(f),
        "dag_size": dag_size(f),
        "tree_size": tree_size(f),
    }


# --- number elimination ----------------------------------------------------

def _term_value(term: tuple, num_map: dict[str, int], n: int) -> int:
    if term[0] == "var":
        if term[1] not in num_map:
            raise UnboundVariable(f"number variable {term[1]!r} unassigned")
        return num_map[term[1]]
    if term[0] == "lit":
        if term[1] > n:
            raise RangeViolation(f"literal {term[1]} exceeds n={n}")
        return term[1]
    if term[0] == "min":
        return 0
    return n  # max


def eliminate_numbers(lf: LFormula, dom_map: dict[str, str],
                      num_map: dict[str, int], n: int,
                      interner: Interner | None = None,
                      _depth: int = 0) -> CFormula:
    """Turn a recursion-free two-sorted formula into a counting-logic
    formula, valid on structures of size exactly n.

    Number quantifiers become disjunctions over [0, n]; # over numbers
    becomes a boolean combination of the per-value instances; numeric
    atoms collapse to constants. Free domain variables are renamed via
    dom_map; bound ones get depth-indexed names (b0, b1, ...) so no
    instantiation can capture them.
    """
    itn = interner if interner is not None else default_interner()

    def go(f: LFormula, dmap, nmap, depth) -> CFormula:
        if f.kind == LBOOL:
            return mk_bool(f.value, itn)
        if f.kind == LEQ:
            return mk_eq(dmap[f.vars[0]], dmap[f.vars[1]], itn)
        if f.kind == LATOM:
            return mk_atom(f.symbol, tuple(dmap[v] for v in f.vars), itn)
        if f.kind == LNOT:
            return mk_not(go(f.children[0], dmap, nmap, depth), itn)
        if f.kind == LOR:
            return mk_or([go(c, dmap, nmap, depth) for c in f.children], itn)
        if f.kind == LAND:
            return mk_and([go(c, dmap, nmap, depth) for c in f.children], itn)
        if f.kind == LEXISTS:
            b = f"b{depth}"
            return mk_exists(
                b, go(f.children[0], {**dmap, f.bound_var: b}, nmap, depth + 1),
                itn)
        if f.kind == NUMEXISTS:
            return mk_or(
                [go(f.children[0], dmap, {**nmap, f.bound_var: v}, depth)
                 for v in range(n + 1)], itn)
        if f.kind == NUMLE:
            return mk_bool(_term_value(f.terms[0], nmap, n)
                           <= _term_value(f.terms[1], nmap, n), itn)
        if f.kind == NUMSUCC:
            return mk_bool(_term_value(f.terms[0], nmap, n) + 1
                           == _term_value(f.terms[1], nmap, n), itn)
        if f.kind == NUMEQ:
            return mk_bool(_term_value(f.terms[0], nmap, n)
                           == _term_value(f.terms[1], nmap, n), itn)
        if f.kind == COUNTDOM:
            b = f"b{depth}"
            target = _term_value(f.kappa, nmap, n)
            body = go(f.children[0], {**dmap, f.bound_var: b}, nmap, depth + 1)
            return mk_count(EQN, target, b, body, itn)
        if f.kind == COUNTNUM:
            target = _term_value(f.kappa, nmap, n)
            instances = [
                go(f.children[0], dmap, {**nmap, f.bound_var: v}, depth)
                for v in range(n + 1)
            ]
            if target > n + 1:
                return mk_bool(False, itn)
            picks = []
            for chosen in itertools.combinations(range(n + 1), target):
                chosen = set(chosen)
                picks.append(mk_and(
                    [instances[v] if v in chosen else mk_not(instances[v], itn)
                     for v in range(n + 1)], itn))
            return mk_or(picks, itn)
        if f.kind == LREC:
            raise NestedLrec("number elimination requires recursion-free input")
        raise AssertionError(f.kind)

    missing = lf.dom_free - dom_map.keys()
    if missing:
        raise UnboundVariable(f"unmapped domain variables: {sorted(missing)}")
    missing_n = lf.num_free - num_map.keys()
    if missing_n:
        raise UnboundVariable(f"unassigned number variables: {sorted(missing_n)}")
    return go(lf, dict(dom_map), dict(num_map), _depth)


# --- the recursion-operator translation ------------------------------------

def _count_vectors(n: int):
    """All vectors (q_1..q_n), q_s = number of classes of size s, subject
    to the total-elements bound sum(s * q_s) <= n."""
    ranges = [range(n // s + 1) for s in range(1, n + 1)]
    for q in itertools.product(*ranges):
        if sum(s * qs for s, qs in zip(range(1, n + 1), q)) <= n:
            yield q


def _cmp(count: int, mode: str, threshold: int) -> bool:
    if mode == GE:
        return count >= threshold
    if mode == LE:
        return count <= threshold
    return count == threshold


def translate_lrec_once(f: LFormula, n: int, m_values,
                        cache: FormulaCache | None = None) -> CFormula:
    """Translate one outermost recursion operator (tuple width 1) over
    recursion-free subformulas into a counting-logic formula on the source
    vocabulary, for structures of size exactly n and the given values of
    the resource variables.

    The result has one free domain variable, QUERY_VAR, standing for the
    queried element. Equality and edge atoms of the compiled X-formula are
    replaced by definable-equivalence-guarded tests; counting quantifiers,
    which range over equivalence classes, are decomposed by class size:
    exactly q_s classes of size s satisfy a class-invariant test iff
    exactly s*q_s elements satisfy it conjoined with "my class has size
    s". This assumes the equality formula defines a genuine equivalence
    relation (see the build decisions ledger, entry "class-counting").
    """
    cache = cache if cache is not None else _DEFAULT_CACHE
    itn = cache.interner
    if f.kind != LREC:
        raise MalformedInput("expected an outermost lrec formula")
    eq_f, edge_f, card_f = f.children
    if any(sub.contains_lrec() for sub in f.children):
        raise NestedLrec("subformulas must be recursion-free")
    if len(f.y1) != 1:
        raise TupleWidthUnsupported(
            f"translation supports tuple width 1, got {len(f.y1)}"
        )
    m_values = tuple(m_values)
    if len(m_values) != len(f.kappas):
        raise ArityMismatch(
            f"got {len(m_values)} resource values for {len(f.kappas)} variables"
        )
    resource = decode_number(m_values, n)
    if resource < 1:
        return mk_bool(False, itn)

    kappa_map = dict(zip(f.kappas, m_values))
    y1, y2, xvar = f.y1[0], f.y2[0], f.xs[0]
    s1, s2 = SUBST_VARS

    psi_eq_cache: dict[tuple[str, str], CFormula] = {}
    psi_edge_cache: dict[tuple[str, str], CFormula] = {}
    psi_card_cache: dict[tuple[str, tuple[int, ...]], CFormula] = {}

    def psi_eq(a: str, b: str) -> CFormula:
        hit = psi_eq_cache.get((a, b))
        if hit is None:
            hit = eliminate_numbers(
                eq_f, {y1: a, y2: b, xvar: QUERY_VAR}, kappa_map, n, itn)
            psi_eq_cache[(a, b)] = hit
        return hit

    def psi_edge(a: str, b: str) -> CFormula:
        hit = psi_edge_cache.get((a, b))
        if hit is None:
            hit = eliminate_numbers(
                edge_f, {y1: a, y2: b, xvar: QUERY_VAR}, kappa_map, n, itn)
            psi_edge_cache[(a, b)] = hit
        return hit

    def psi_card(a: str, ivals: tuple[int, ...]) -> CFormula:
        hit = psi_card_cache.get((a, ivals))
        if hit is None:
            hit = eliminate_numbers(
                card_f, {y1: a, xvar: QUERY_VAR},
                {**kappa_map, **dict(zip(f.iotas, ivals))}, n, itn)
            psi_card_cache[(a, ivals)] = hit
        return hit

    def size_test(s: int, z: str) -> CFormula:
        # "the class of z has exactly s members"
        return mk_count(EQN, s, s1, psi_eq(s1, z), itn)

    params = CompileParams(n, len(f.kappas))
    phi_x = compile_x_formula(params, resource, QUERY_VAR, cache)

    memo: dict[int, CFormula] = {}

    def transform(node: CFormula) -> CFormula:
        hit = memo.get(node.nid)
        if hit is not None:
            return hit
        kind = node.kind
        if kind == "bool":
            out = node
        elif kind == "eq":
            out = psi_eq(node.vars[0], node.vars[1])
        elif kind == "atom":
            if node.symbol == "E":
                a, b = node.vars
                out = mk_exists(s1, mk_exists(s2, mk_and([
                    psi_eq(s1, a), psi_eq(s2, b), psi_edge(s1, s2)], itn),
                    itn), itn)
            elif node.symbol.startswith("P"):
                label = int(node.symbol[1:])
                (a,) = node.vars
                width = len(f.iotas)
                variants = [
                    psi_card(s1, ivals)
                    for ivals in itertools.product(range(n + 1), repeat=width)
                    if decode_number(ivals, n) == label
                ]
                out = mk_exists(s1, mk_and(
                    [psi_eq(s1, a), mk_or(variants, itn)], itn), itn)
            else:
                raise MalformedInput(f"unexpected symbol {node.symbol!r}")
        elif kind == "not":
            out = mk_not(transform(node.children[0]), itn)
        elif kind == "or":
            out = mk_or([transform(c) for c in node.children], itn)
        elif kind == "and":
            out = mk_and([transform(c) for c in node.children], itn)
        elif kind == "count":
            child = transform(node.children[0])
            z = node.bound_var
            picks = []
            for q in _count_vectors(n):
                if not _cmp(sum(q), node.mode, node.threshold):
                    continue
                conj = [
                    mk_count(EQN, s * qs, z,
                             mk_and([child, size_test(s, z)], itn), itn)
                    for s, qs in zip(range(1, n + 1), q)
                ]
                picks.append(mk_and(conj, itn))
            out = mk_or(picks, itn)
        else:
            raise AssertionError(kind)
        memo[node.nid] = out
        return out

    return transform(phi_x)
