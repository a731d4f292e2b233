"""First-order counting logic with the resource-bounded recursion operator.

LFormula is a two-sorted AST: domain variables range over structure
elements, number variables over 0..n (derived from n, never stored).
The lrec operator quotients a definable graph on k-tuples by a definable
equivalence, labels the classes with admissible child-counts, and asks
whether the queried (class, resource) pair lies in the recursion relation
X computed by the xfix module.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

from .cformula import parse_sexpr_data
from .errors import (
    ArityMismatch,
    ComponentOutOfRange,
    MalformedInput,
    NestedLrec,
    RangeViolation,
    SizeExceeded,
    UnboundVariable,
    UnknownSymbol,
    UnsupportedDimension,
)
from .structures import DiGraph, RelStructure
from .xfix import CardinalityCondition, XInstance, compute_X

LBOOL = "bool"
LEQ = "eq"
LATOM = "atom"
LNOT = "not"
LOR = "or"
LAND = "and"
LEXISTS = "exists"
NUMEXISTS = "num-exists"
NUMLE = "num-le"
NUMSUCC = "num-succ"
NUMEQ = "num-eq"
COUNTDOM = "count-dom"
COUNTNUM = "count-num"
LREC = "lrec"

MAX_NUM_TUPLE = 8
MAX_TUPLE_WIDTH = 3

# Number terms: ("var", name) | ("lit", value) | ("min",) | ("max",)


def num_var(name: str) -> tuple:
    return ("var", name)


def num_lit(value: int) -> tuple:
    if value < 0:
        raise RangeViolation(f"number literal {value} is negative")
    return ("lit", value)


NUM_MIN = ("min",)
NUM_MAX = ("max",)


def _term_free(term: tuple) -> frozenset[str]:
    return frozenset((term[1],)) if term[0] == "var" else frozenset()


class LFormula:
    """One AST node (a tree, not interned). Build via the mk_l* helpers."""

    __slots__ = ("kind", "value", "vars", "symbol", "children", "bound_var",
                 "terms", "kappa", "y1", "y2", "iotas", "xs", "kappas",
                 "dom_free", "num_free")

    def __init__(self, kind, *, value=None, vars=(), symbol=None, children=(),
                 bound_var=None, terms=(), kappa=None,
                 y1=(), y2=(), iotas=(), xs=(), kappas=()):
        self.kind = kind
        self.value = value
        self.vars = tuple(vars)
        self.symbol = symbol
        self.children = tuple(children)
        self.bound_var = bound_var
        self.terms = tuple(terms)
        self.kappa = kappa
        self.y1 = tuple(y1)
        self.y2 = tuple(y2)
        self.iotas = tuple(iotas)
        self.xs = tuple(xs)
        self.kappas = tuple(kappas)

        if kind == LBOOL:
            self.dom_free, self.num_free = frozenset(), frozenset()
        elif kind in (LEQ, LATOM):
            self.dom_free, self.num_free = frozenset(self.vars), frozenset()
        elif kind in (LNOT, LOR, LAND):
            self.dom_free = frozenset().union(
                *(c.dom_free for c in self.children)) if children else frozenset()
            self.num_free = frozenset().union(
                *(c.num_free for c in self.children)) if children else frozenset()
        elif kind == LEXISTS:
            (c,) = self.children
            self.dom_free = c.dom_free - {bound_var}
            self.num_free = c.num_free
        elif kind == NUMEXISTS:
            (c,) = self.children
            self.dom_free = c.dom_free
            self.num_free = c.num_free - {bound_var}
        elif kind in (NUMLE, NUMSUCC, NUMEQ):
            self.dom_free = frozenset()
            self.num_free = _term_free(self.terms[0]) | _term_free(self.terms[1])
        elif kind == COUNTDOM:
            (c,) = self.children
            self.dom_free = c.dom_free - {bound_var}
            self.num_free = c.num_free | _term_free(kappa)
        elif kind == COUNTNUM:
            (c,) = self.children
            self.dom_free = c.dom_free
            self.num_free = (c.num_free - {bound_var}) | _term_free(kappa)
        elif kind == LREC:
            k = len(self.y1)
            if not (len(self.y2) == len(self.xs) == k) or k < 1:
                raise ArityMismatch(
                    f"y1/y2/x widths {len(self.y1)}/{len(self.y2)}/{len(self.xs)}"
                    " must be equal and >= 1"
                )
            if not self.iotas or not self.kappas:
                raise ArityMismatch("iota and kappa tuples must be non-empty")
            eq_f, edge_f, card_f = self.children
            hidden_edge = set(self.y1) | set(self.y2)
            hidden_card = set(self.y1) | set(self.iotas)
            # free(lrec) = (free(edge) \ (y1+y2)) + (free(card) \ (y1+iotas))
            #              + xs + kappas; the equivalence formula is expected
            # to use only y1/y2, any extras simply read the outer assignment
            self.dom_free = frozenset(
                (edge_f.dom_free - hidden_edge)
                | (card_f.dom_free - set(self.y1))
                | set(self.xs)
            )
            self.num_free = frozenset(
                edge_f.num_free
                | (card_f.num_free - set(self.iotas))
                | set(self.kappas)
            )
        else:
            raise ValueError(f"unknown kind {kind!r}")

    def contains_lrec(self) -> bool:
        if self.kind == LREC:
            return True
        return any(c.contains_lrec() for c in self.children)

    def __repr__(self):
        return f"<LFormula {print_lsexpr(self)}>"


def mk_lbool(value: bool) -> LFormula:
    return LFormula(LBOOL, value=bool(value))


def mk_leq(x: str, y: str) -> LFormula:
    return LFormula(LEQ, vars=(x, y))


def mk_latom(symbol: str, vars) -> LFormula:
    return LFormula(LATOM, symbol=symbol, vars=tuple(vars))


def mk_lnot(child: LFormula) -> LFormula:
    return LFormula(LNOT, children=(child,))


def mk_lor(children) -> LFormula:
    return LFormula(LOR, children=tuple(children))


def mk_land(children) -> LFormula:
    return LFormula(LAND, children=tuple(children))


def mk_lexists(var: str, child: LFormula) -> LFormula:
    return LFormula(LEXISTS, bound_var=var, children=(child,))


def mk_lforall(var: str, child: LFormula) -> LFormula:
    return mk_lnot(mk_lexists(var, mk_lnot(child)))


def mk_num_exists(var: str, child: LFormula) -> LFormula:
    return LFormula(NUMEXISTS, bound_var=var, children=(child,))


def mk_num_le(t1, t2) -> LFormula:
    return LFormula(NUMLE, terms=(t1, t2))


def mk_num_succ(t1, t2) -> LFormula:
    return LFormula(NUMSUCC, terms=(t1, t2))


def mk_num_eq(t1, t2) -> LFormula:
    return LFormula(NUMEQ, terms=(t1, t2))


def mk_count_dom(var: str, child: LFormula, kappa) -> LFormula:
    return LFormula(COUNTDOM, bound_var=var, children=(child,), kappa=kappa)


def mk_count_num(var: str, child: LFormula, kappa) -> LFormula:
    return LFormula(COUNTNUM, bound_var=var, children=(child,), kappa=kappa)


def mk_lrec(y1, y2, iotas, eq_f: LFormula, edge_f: LFormula, card_f: LFormula,
            xs, kappas) -> LFormula:
    return LFormula(LREC, children=(eq_f, edge_f, card_f),
                    y1=y1, y2=y2, iotas=iotas, xs=xs, kappas=kappas)


@dataclass
class TwoSortedAssignment:
    """Domain-variable and number-variable maps (numbers range over 0..n)."""

    dom: dict[str, int] = field(default_factory=dict)
    num: dict[str, int] = field(default_factory=dict)

    def copy(self) -> "TwoSortedAssignment":
        return TwoSortedAssignment(dict(self.dom), dict(self.num))


def decode_number(values, n: int) -> int:
    """Interpret a tuple of number values as one base-(n+1) numeral,
    least-significant component first."""
    values = tuple(values)
    if len(values) > MAX_NUM_TUPLE:
        raise SizeExceeded(f"number tuple of width {len(values)} exceeds "
                           f"{MAX_NUM_TUPLE}")
    total = 0
    for j, v in enumerate(values):
        if not (0 <= v <= n):
            raise ComponentOutOfRange(f"component {v} not in [0, {n}]")
        total += v * (n + 1) ** j
    return total


@dataclass(frozen=True)
class QuotientGraph:
    """The contracted recursion graph: classes of k-tuples, lifted edges,
    and admissible-count labels per class."""

    n: int
    k: int
    classes: tuple[tuple[tuple[int, ...], ...], ...]
    edges: frozenset[tuple[int, int]]
    labels: tuple[frozenset[int], ...]
    closure_changed: bool

    def class_of(self, tup: tuple[int, ...]) -> int:
        for idx, members in enumerate(self.classes):
            if tup in members:
                return idx
        raise MalformedInput(f"tuple {tup} is not a vertex of the quotient")

    def export(self) -> tuple[DiGraph, CardinalityCondition]:
        g = DiGraph(len(self.classes), self.edges)
        mapping = {idx: set(label) for idx, label in enumerate(self.labels)}
        with warnings.catch_warnings():
            # labels above the out-degree are unattainable but harmless;
            # keeping them does not change X
            warnings.simplefilter("ignore")
            cond = CardinalityCondition.from_dict(g, mapping)
        return g, cond


class LEvaluator:
    """Memoizing two-sorted model checker; handles lrec recursively."""

    def __init__(self, structure: RelStructure, allow_lrec: bool = True):
        self.structure = structure
        self.allow_lrec = allow_lrec
        self._memo: dict[tuple, bool] = {}

    # -- number terms ------------------------------------------------------

    def term_value(self, term: tuple, a: TwoSortedAssignment) -> int:
        n = self.structure.n
        if term[0] == "var":
            if term[1] not in a.num:
                raise UnboundVariable(f"number variable {term[1]!r} unassigned")
            return a.num[term[1]]
        if term[0] == "lit":
            if term[1] > n:
                raise RangeViolation(f"literal {term[1]} exceeds n={n}")
            return term[1]
        if term[0] == "min":
            return 0
        if term[0] == "max":
            return n
        raise MalformedInput(f"unknown number term {term!r}")

    # -- formulas ----------------------------------------------------------

    def eval(self, f: LFormula, a: TwoSortedAssignment | None = None) -> bool:
        a = a or TwoSortedAssignment()
        n = self.structure.n
        for name, value in a.num.items():
            if not (0 <= value <= n):
                raise RangeViolation(f"number {name}={value} not in [0, {n}]")
        missing_d = f.dom_free - a.dom.keys()
        missing_n = f.num_free - a.num.keys()
        if missing_d or missing_n:
            raise UnboundVariable(
                f"unassigned variables: {sorted(missing_d | missing_n)}"
            )
        return self._eval(f, a)

    def _eval(self, f: LFormula, a: TwoSortedAssignment) -> bool:
        key = (
            id(f),
            tuple(sorted((v, a.dom[v]) for v in f.dom_free)),
            tuple(sorted((v, a.num[v]) for v in f.num_free)),
        )
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        result = self._eval_inner(f, a)
        self._memo[key] = result
        return result

    def _eval_inner(self, f: LFormula, a: TwoSortedAssignment) -> bool:
        s = self.structure
        n = s.n
        if f.kind == LBOOL:
            return f.value
        if f.kind == LEQ:
            return a.dom[f.vars[0]] == a.dom[f.vars[1]]
        if f.kind == LATOM:
            if f.symbol not in s.vocabulary:
                raise UnknownSymbol(f.symbol)
            return tuple(a.dom[v] for v in f.vars) in s.rel(f.symbol)
        if f.kind == LNOT:
            return not self._eval(f.children[0], a)
        if f.kind == LOR:
            return any(self._eval(c, a) for c in f.children)
        if f.kind == LAND:
            return all(self._eval(c, a) for c in f.children)
        if f.kind == LEXISTS:
            sub = a.copy()
            for v in range(n):
                sub.dom[f.bound_var] = v
                if self._eval(f.children[0], sub):
                    return True
            return False
        if f.kind == NUMEXISTS:
            sub = a.copy()
            for v in range(n + 1):
                sub.num[f.bound_var] = v
                if self._eval(f.children[0], sub):
                    return True
            return False
        if f.kind == NUMLE:
            return self.term_value(f.terms[0], a) <= self.term_value(f.terms[1], a)
        if f.kind == NUMSUCC:
            return self.term_value(f.terms[0], a) + 1 == self.term_value(f.terms[1], a)
        if f.kind == NUMEQ:
            return self.term_value(f.terms[0], a) == self.term_value(f.terms[1], a)
        if f.kind == COUNTDOM:
            sub = a.copy()
            count = 0
            for v in range(n):
                sub.dom[f.bound_var] = v
                if self._eval(f.children[0], sub):
                    count += 1
            return count == self.term_value(f.kappa, a)
        if f.kind == COUNTNUM:
            sub = a.copy()
            count = 0
            for v in range(n + 1):
                sub.num[f.bound_var] = v
                if self._eval(f.children[0], sub):
                    count += 1
            return count == self.term_value(f.kappa, a)
        if f.kind == LREC:
            if not self.allow_lrec:
                raise NestedLrec("lrec is not allowed in this evaluation")
            return self._eval_lrec(f, a)
        raise AssertionError(f.kind)

    def _eval_lrec(self, f: LFormula, a: TwoSortedAssignment) -> bool:
        eq_f, edge_f, card_f = f.children
        quotient = build_quotient(
            self.structure, a, len(f.y1), eq_f, edge_f, card_f, f.iotas,
            f.y1, f.y2,
        )
        xtuple = tuple(a.dom[v] for v in f.xs)
        resource = decode_number(
            tuple(a.num[v] for v in f.kappas), self.structure.n
        )
        g, c = quotient.export()
        if resource < 1:
            return False
        return compute_X(XInstance(g, c), quotient.class_of(xtuple), resource)


def build_quotient(s: RelStructure, a: TwoSortedAssignment, k: int,
                   eq_f: LFormula, edge_f: LFormula, card_f: LFormula,
                   iotas, y1, y2) -> QuotientGraph:
    """Contract the definable graph on V^k by the definable equivalence.

    The relation defined by eq_f is closed under reflexivity, symmetry and
    transitivity first; a diagnostic warning is emitted when closure
    actually changed it. Class labels collect the encoded iota-tuples
    satisfying card_f for any member of the class.
    """
    if k > MAX_TUPLE_WIDTH:
        raise UnsupportedDimension(f"tuple width {k} exceeds {MAX_TUPLE_WIDTH}")
    y1, y2, iotas = tuple(y1), tuple(y2), tuple(iotas)
    if len(y1) != k or len(y2) != k:
        raise ArityMismatch(f"y1/y2 must have width {k}")
    ev = LEvaluator(s)
    verts = list(itertools.product(range(s.n), repeat=k))

    def with_tuple(base: TwoSortedAssignment, names, tup) -> TwoSortedAssignment:
        out = base.copy()
        out.dom.update(zip(names, tup))
        return out

    raw = set()
    for u in verts:
        au = with_tuple(a, y1, u)
        for v in verts:
            if ev.eval(eq_f, with_tuple(au, y2, v)):
                raw.add((u, v))

    # RST closure = connected components of the symmetrized relation,
    # with every vertex reflexively in its own component.
    parent = {u: u for u in verts}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for u, v in raw:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    closed = {
        (u, v) for u in verts for v in verts if find(u) == find(v)
    }
    if closed != raw:
        warnings.warn(
            "equivalence formula was not an equivalence relation; "
            "its reflexive-symmetric-transitive closure is used"
        )

    groups: dict[tuple, list] = {}
    for u in verts:
        groups.setdefault(find(u), []).append(u)
    classes = tuple(
        tuple(sorted(members))
        for members in sorted(groups.values(), key=lambda ms: min(ms))
    )
    index = {u: idx for idx, members in enumerate(classes) for u in members}

    edges = set()
    for u in verts:
        au = with_tuple(a, y1, u)
        for v in verts:
            if ev.eval(edge_f, with_tuple(au, y2, v)):
                edges.add((index[u], index[v]))

    labels: list[set[int]] = [set() for _ in classes]
    for u in verts:
        au = with_tuple(a, y1, u)
        for ivals in itertools.product(range(s.n + 1), repeat=len(iotas)):
            sub = au.copy()
            sub.num.update(zip(iotas, ivals))
            if ev.eval(card_f, sub):
                labels[index[u]].add(decode_number(ivals, s.n))

    return QuotientGraph(
        s.n, k, classes, frozenset(edges),
        tuple(frozenset(l) for l in labels),
        closure_changed=(closed != raw),
    )


def eval_fo_c(s: RelStructure, f: LFormula,
              a: TwoSortedAssignment | None = None) -> bool:
    """Evaluate a recursion-free formula under the two-sorted semantics."""
    if f.contains_lrec():
        raise MalformedInput("eval_fo_c requires a formula without lrec")
    return LEvaluator(s, allow_lrec=False).eval(f, a)


def eval_lrec(s: RelStructure, f: LFormula,
              a: TwoSortedAssignment | None = None) -> bool:
    """Evaluate any formula, recursion operators included."""
    return LEvaluator(s).eval(f, a)


# --- S-expression serialization -------------------------------------------

def _print_term(term: tuple) -> str:
    if term[0] == "var":
        return term[1]
    if term[0] == "lit":
        return str(term[1])
    return term[0]  # min / max


def print_lsexpr(f: LFormula) -> str:
    if f.kind == LBOOL:
        return f"(bool {'t' if f.value else 'f'})"
    if f.kind == LEQ:
        return f"(eq {f.vars[0]} {f.vars[1]})"
    if f.kind == LATOM:
        return f"(atom {f.symbol} {' '.join(f.vars)})"
    if f.kind == LNOT:
        return f"(not {print_lsexpr(f.children[0])})"
    if f.kind in (LOR, LAND):
        inner = " ".join(print_lsexpr(c) for c in f.children)
        return f"({f.kind} {inner})"
    if f.kind in (LEXISTS, NUMEXISTS):
        return f"({f.kind} {f.bound_var} {print_lsexpr(f.children[0])})"
    if f.kind in (NUMLE, NUMSUCC, NUMEQ):
        return f"({f.kind} {_print_term(f.terms[0])} {_print_term(f.terms[1])})"
    if f.kind in (COUNTDOM, COUNTNUM):
        return (f"({f.kind} {f.bound_var} {print_lsexpr(f.children[0])} "
                f"{_print_term(f.kappa)})")
    if f.kind == LREC:
        eq_f, edge_f, card_f = f.children
        return ("(lrec (" + " ".join(f.y1) + ") (" + " ".join(f.y2) + ") ("
                + " ".join(f.iotas) + ") " + print_lsexpr(eq_f) + " "
                + print_lsexpr(edge_f) + " " + print_lsexpr(card_f)
                + " (" + " ".join(f.xs) + ") (" + " ".join(f.kappas) + "))")
    raise AssertionError(f.kind)


def _term_from_token(tok) -> tuple:
    if not isinstance(tok, str):
        raise MalformedInput(f"expected a number term, got {tok!r}")
    if tok == "min":
        return NUM_MIN
    if tok == "max":
        return NUM_MAX
    if tok.isdigit():
        return num_lit(int(tok))
    return num_var(tok)


def _names(data, what: str) -> tuple[str, ...]:
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise MalformedInput(f"{what} must be a list of variable names")
    return tuple(data)


def lformula_from_data(data) -> LFormula:
    if not isinstance(data, list) or not data:
        raise MalformedInput(f"expected a list form, got {data!r}")
    head = data[0]
    if head == "bool":
        if len(data) != 2 or data[1] not in ("t", "f"):
            raise MalformedInput("(bool t|f)")
        return mk_lbool(data[1] == "t")
    if head == "eq":
        if len(data) != 3:
            raise MalformedInput("(eq x y)")
        return mk_leq(data[1], data[2])
    if head == "atom":
        if len(data) < 3:
            raise MalformedInput("(atom SYM x...)")
        return mk_latom(data[1], data[2:])
    if head == "not":
        if len(data) != 2:
            raise MalformedInput("(not f)")
        return mk_lnot(lformula_from_data(data[1]))
    if head in ("or", "and"):
        children = [lformula_from_data(d) for d in data[1:]]
        return mk_lor(children) if head == "or" else mk_land(children)
    if head in ("exists", "forall", "num-exists"):
        if len(data) != 3 or not isinstance(data[1], str):
            raise MalformedInput(f"({head} x f)")
        body = lformula_from_data(data[2])
        if head == "exists":
            return mk_lexists(data[1], body)
        if head == "forall":
            return mk_lforall(data[1], body)
        return mk_num_exists(data[1], body)
    if head in ("num-le", "num-succ", "num-eq"):
        if len(data) != 3:
            raise MalformedInput(f"({head} t1 t2)")
        t1, t2 = _term_from_token(data[1]), _term_from_token(data[2])
        return {NUMLE: mk_num_le, NUMSUCC: mk_num_succ,
                NUMEQ: mk_num_eq}[head](t1, t2)
    if head in ("count-dom", "count-num"):
        if len(data) != 4 or not isinstance(data[1], str):
            raise MalformedInput(f"({head} x f k)")
        body = lformula_from_data(data[2])
        kappa = _term_from_token(data[3])
        maker = mk_count_dom if head == "count-dom" else mk_count_num
        return maker(data[1], body, kappa)
    if head == "lrec":
        if len(data) != 9:
            raise MalformedInput(
                "(lrec (y1...) (y2...) (i...) eq-f edge-f card-f (x...) (k...))"
            )
        return mk_lrec(
            _names(data[1], "y1"), _names(data[2], "y2"), _names(data[3], "iota"),
            lformula_from_data(data[4]), lformula_from_data(data[5]),
            lformula_from_data(data[6]),
            _names(data[7], "x"), _names(data[8], "kappa"),
        )
    raise MalformedInput(f"unknown form {head!r}")


def parse_lsexpr(text: str) -> LFormula:
    return lformula_from_data(parse_sexpr_data(text))
