"""Hash-consed counting-logic formulas and their memoizing model checker.

Formulas are interned: structurally equal trees share one node, so the
recursive formula families built by the compiler stay DAG-sized. Nodes
cache quantifier depth and the set of variable names occurring.
"""

from __future__ import annotations

import threading
from typing import Iterable

from .errors import (
    MalformedInput,
    NotASentence,
    RangeViolation,
    UnboundVariable,
    UnknownSymbol,
)
from .structures import RelStructure

BOOL = "bool"
EQ = "eq"
ATOM = "atom"
NOT = "not"
OR = "or"
AND = "and"
COUNT = "count"

GE = ">="
EQN = "="
LE = "<="

MAX_THRESHOLD = 1_000_000


class CFormula:
    """One interned formula node. Compare by identity; build via mk_*."""

    __slots__ = (
        "kind",
        "value",
        "vars",
        "symbol",
        "children",
        "mode",
        "threshold",
        "bound_var",
        "nid",
        "qdepth",
        "varnames",
        "free_vars",
    )

    def __init__(self, kind, *, value=None, vars=(), symbol=None, children=(),
                 mode=None, threshold=None, bound_var=None):
        self.kind = kind
        self.value = value
        self.vars = vars
        self.symbol = symbol
        self.children = children
        self.mode = mode
        self.threshold = threshold
        self.bound_var = bound_var
        self.nid = -1  # assigned by the interner

        if kind in (BOOL, EQ, ATOM):
            self.qdepth = 0
            self.varnames = frozenset(vars)
            self.free_vars = frozenset(vars)
        elif kind in (NOT, OR, AND):
            self.qdepth = max((c.qdepth for c in children), default=0)
            self.varnames = frozenset().union(*(c.varnames for c in children)) \
                if children else frozenset()
            self.free_vars = frozenset().union(*(c.free_vars for c in children)) \
                if children else frozenset()
        elif kind == COUNT:
            (child,) = children
            self.qdepth = child.qdepth + 1
            self.varnames = child.varnames | {bound_var}
            self.free_vars = child.free_vars - {bound_var}
        else:
            raise ValueError(f"unknown kind {kind!r}")

    def key(self):
        return (self.kind, self.value, self.vars, self.symbol,
                tuple(c.nid for c in self.children),
                self.mode, self.threshold, self.bound_var)

    def __repr__(self):
        return f"<CFormula #{self.nid} {print_sexpr(self)}>"


class Interner:
    """Table mapping structural keys to unique nodes; creation is atomic."""

    def __init__(self):
        self._table: dict[tuple, CFormula] = {}
        self._lock = threading.Lock()

    def intern(self, node: CFormula) -> CFormula:
        key = node.key()
        with self._lock:
            existing = self._table.get(key)
            if existing is not None:
                return existing
            node.nid = len(self._table)
            self._table[key] = node
            return node

    def __len__(self):
        return len(self._table)


_DEFAULT = Interner()


def default_interner() -> Interner:
    return _DEFAULT


def mk_bool(value: bool, interner: Interner | None = None) -> CFormula:
    interner = interner if interner is not None else _DEFAULT
    return interner.intern(CFormula(BOOL, value=bool(value)))


def mk_eq(x: str, y: str, interner: Interner | None = None) -> CFormula:
    interner = interner if interner is not None else _DEFAULT
    return interner.intern(CFormula(EQ, vars=(x, y)))


def mk_atom(symbol: str, vars: Iterable[str],
            interner: Interner | None = None) -> CFormula:
    interner = interner if interner is not None else _DEFAULT
    return interner.intern(CFormula(ATOM, symbol=symbol, vars=tuple(vars)))


def mk_not(child: CFormula, interner: Interner | None = None) -> CFormula:
    interner = interner if interner is not None else _DEFAULT
    if child.kind == BOOL:
        return mk_bool(not child.value, interner)
    if child.kind == NOT:
        return child.children[0]
    return interner.intern(CFormula(NOT, children=(child,)))


def mk_or(children: Iterable[CFormula],
          interner: Interner | None = None) -> CFormula:
    interner = interner if interner is not None else _DEFAULT
    kept = []
    for c in children:
        if c.kind == BOOL:
            if c.value:
                return mk_bool(True, interner)
            continue  # drop falses
        kept.append(c)
    if not kept:
        return mk_bool(False, interner)
    if len(kept) == 1:
        return kept[0]
    return interner.intern(CFormula(OR, children=tuple(kept)))


def mk_and(children: Iterable[CFormula],
           interner: Interner | None = None) -> CFormula:
    interner = interner if interner is not None else _DEFAULT
    kept = []
    for c in children:
        if c.kind == BOOL:
            if not c.value:
                return mk_bool(False, interner)
            continue
        kept.append(c)
    if not kept:
        return mk_bool(True, interner)
    if len(kept) == 1:
        return kept[0]
    return interner.intern(CFormula(AND, children=tuple(kept)))


def mk_count(mode: str, threshold: int, bound_var: str, child: CFormula,
             interner: Interner | None = None) -> CFormula:
    interner = interner if interner is not None else _DEFAULT
    if mode not in (GE, EQN, LE):
        raise MalformedInput(f"unknown counting mode {mode!r}")
    if threshold < 0 or threshold > MAX_THRESHOLD:
        raise RangeViolation(f"threshold {threshold} out of range")
    # Folds valid on every structure (the witness count of a constant-false
    # body is 0; a >=0 bound always holds).
    if mode == GE and threshold == 0:
        return mk_bool(True, interner)
    if child.kind == BOOL and not child.value:
        if mode == GE:
            return mk_bool(False, interner)
        if mode == LE:
            return mk_bool(True, interner)
        return mk_bool(threshold == 0, interner)
    return interner.intern(
        CFormula(COUNT, mode=mode, threshold=threshold,
                 bound_var=bound_var, children=(child,))
    )


def mk_exists(var: str, child: CFormula,
              interner: Interner | None = None) -> CFormula:
    return mk_count(GE, 1, var, child, interner)


def mk_forall(var: str, child: CFormula,
              interner: Interner | None = None) -> CFormula:
    return mk_not(mk_count(GE, 1, var, mk_not(child, interner), interner), interner)


def mk_implies(a: CFormula, b: CFormula,
               interner: Interner | None = None) -> CFormula:
    return mk_or([mk_not(a, interner), b], interner)


def qdepth(f: CFormula) -> int:
    return f.qdepth


def nvars(f: CFormula) -> int:
    return len(f.varnames)


def dag_size(f: CFormula) -> int:
    """Number of distinct interned nodes reachable from f."""
    seen = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if node.nid in seen:
            continue
        seen.add(node.nid)
        stack.extend(node.children)
    return len(seen)


def tree_size(f: CFormula) -> int:
    """Size of the fully expanded tree (exact, unbounded integer)."""
    memo: dict[int, int] = {}

    def go(node: CFormula) -> int:
        cached = memo.get(node.nid)
        if cached is not None:
            return cached
        size = 1 + sum(go(c) for c in node.children)
        memo[node.nid] = size
        return size

    return go(f)


def _compare(count: int, mode: str, threshold: int) -> bool:
    if mode == GE:
        return count >= threshold
    if mode == LE:
        return count <= threshold
    return count == threshold


class Evaluator:
    """Memoizing model checker for one structure.

    The memo key is (node id, assignment restricted to the node's free
    variables), so sharing in the hash-consed DAG pays off across calls.
    """

    def __init__(self, structure: RelStructure, memoize: bool = True):
        self.structure = structure
        self.memoize = memoize
        self._memo: dict[tuple, bool] = {}

    def eval(self, f: CFormula, assignment: dict[str, int] | None = None) -> bool:
        assignment = assignment or {}
        missing = f.free_vars - assignment.keys()
        if missing:
            raise UnboundVariable(f"unassigned variables: {sorted(missing)}")
        return self._eval(f, assignment)

    def _eval(self, f: CFormula, a: dict[str, int]) -> bool:
        if f.kind == BOOL:
            return f.value
        if self.memoize:
            key = (f.nid, tuple(sorted((v, a[v]) for v in f.free_vars)))
            cached = self._memo.get(key)
            if cached is not None:
                return cached
        result = self._eval_inner(f, a)
        if self.memoize:
            self._memo[key] = result
        return result

    def _eval_inner(self, f: CFormula, a: dict[str, int]) -> bool:
        s = self.structure
        if f.kind == EQ:
            return a[f.vars[0]] == a[f.vars[1]]
        if f.kind == ATOM:
            if f.symbol not in s.vocabulary:
                raise UnknownSymbol(f.symbol)
            return tuple(a[v] for v in f.vars) in s.rel(f.symbol)
        if f.kind == NOT:
            return not self._eval(f.children[0], a)
        if f.kind == OR:
            return any(self._eval(c, a) for c in f.children)
        if f.kind == AND:
            return all(self._eval(c, a) for c in f.children)
        if f.kind == COUNT:
            child = f.children[0]
            sub = dict(a)
            count = 0
            for v in range(s.n):
                sub[f.bound_var] = v  # innermost binding shadows outer scopes
                if self._eval(child, sub):
                    count += 1
            return _compare(count, f.mode, f.threshold)
        raise AssertionError(f.kind)


def eval_formula(s: RelStructure, f: CFormula,
                 assignment: dict[str, int] | None = None,
                 memoize: bool = True) -> bool:
    return Evaluator(s, memoize=memoize).eval(f, assignment)


class TableEvaluator:
    """Bottom-up model checker: one truth table per interned node.

    Each DAG node is processed once, producing a table over assignments of
    its free variables; sharing across queries (different assignments,
    different roots over a common sub-DAG) is free. Much faster than the
    recursive evaluator on the large compiled families.
    """

    def __init__(self, structure: RelStructure):
        self.structure = structure
        self._memo: dict[int, tuple[tuple[str, ...], dict]] = {}

    def table(self, f: CFormula) -> tuple[tuple[str, ...], dict]:
        cached = self._memo.get(f.nid)
        if cached is not None:
            return cached
        s = self.structure
        n = s.n
        fv = tuple(sorted(f.free_vars))
        import itertools

        if f.kind in (BOOL, EQ, ATOM):
            if f.kind == ATOM and f.symbol not in s.vocabulary:
                raise UnknownSymbol(f.symbol)
            rel = s.rel(f.symbol) if f.kind == ATOM else None
            tbl = {}
            for assign in itertools.product(range(n), repeat=len(fv)):
                a = dict(zip(fv, assign))
                if f.kind == BOOL:
                    tbl[assign] = f.value
                elif f.kind == EQ:
                    tbl[assign] = a[f.vars[0]] == a[f.vars[1]]
                else:
                    tbl[assign] = tuple(a[v] for v in f.vars) in rel
        elif f.kind == NOT:
            _, ct = self.table(f.children[0])
            tbl = {k: not v for k, v in ct.items()}
        elif f.kind in (OR, AND):
            subs = [self.table(c) for c in f.children]
            pos = [tuple(fv.index(v) for v in cv) for cv, _ in subs]
            want = f.kind == OR
            tbl = {}
            for assign in itertools.product(range(n), repeat=len(fv)):
                out = not want
                for (_, ct), ps in zip(subs, pos):
                    if ct[tuple(assign[p] for p in ps)] == want:
                        out = want
                        break
                tbl[assign] = out
        elif f.kind == COUNT:
            cv, ct = self.table(f.children[0])
            bound = f.bound_var
            tbl = {}
            if bound not in cv:
                pos = tuple(fv.index(v) for v in cv)
                for assign in itertools.product(range(n), repeat=len(fv)):
                    count = n if ct[tuple(assign[p] for p in pos)] else 0
                    tbl[assign] = _compare(count, f.mode, f.threshold)
            else:
                bidx = cv.index(bound)
                pos = tuple(
                    -1 if v == bound else fv.index(v) for v in cv
                )
                for assign in itertools.product(range(n), repeat=len(fv)):
                    count = 0
                    proj = [assign[p] if p >= 0 else 0 for p in pos]
                    for b in range(n):
                        proj[bidx] = b
                        if ct[tuple(proj)]:
                            count += 1
                    tbl[assign] = _compare(count, f.mode, f.threshold)
        else:
            raise AssertionError(f.kind)
        result = (fv, tbl)
        self._memo[f.nid] = result
        return result

    def eval(self, f: CFormula, assignment: dict[str, int] | None = None) -> bool:
        assignment = assignment or {}
        missing = f.free_vars - assignment.keys()
        if missing:
            raise UnboundVariable(f"unassigned variables: {sorted(missing)}")
        fv, tbl = self.table(f)
        return tbl[tuple(assignment[v] for v in fv)]


def distinguishes(g: RelStructure, h: RelStructure, f: CFormula) -> bool:
    """True iff the sentence f evaluates differently on g and h."""
    if f.free_vars:
        raise NotASentence(f"free variables: {sorted(f.free_vars)}")
    return eval_formula(g, f) != eval_formula(h, f)


# --- S-expression serialization -------------------------------------------

def print_sexpr(f: CFormula) -> str:
    if f.kind == BOOL:
        return f"(bool {'t' if f.value else 'f'})"
    if f.kind == EQ:
        return f"(eq {f.vars[0]} {f.vars[1]})"
    if f.kind == ATOM:
        return f"(atom {f.symbol} {' '.join(f.vars)})"
    if f.kind == NOT:
        return f"(not {print_sexpr(f.children[0])})"
    if f.kind in (OR, AND):
        inner = " ".join(print_sexpr(c) for c in f.children)
        return f"({f.kind} {inner})"
    if f.kind == COUNT:
        return (f"(count {f.mode} {f.threshold} {f.bound_var} "
                f"{print_sexpr(f.children[0])})")
    raise AssertionError(f.kind)


def tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise MalformedInput("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise MalformedInput("missing closing parenthesis")
        return items, pos + 1
    if tok == ")":
        raise MalformedInput("unexpected ')'")
    return tok, pos + 1


def parse_sexpr_data(text: str):
    tokens = tokenize(text)
    data, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise MalformedInput("trailing input after formula")
    return data


def formula_from_data(data, interner: Interner | None = None) -> CFormula:
    if not isinstance(data, list) or not data:
        raise MalformedInput(f"expected a list form, got {data!r}")
    head = data[0]
    if head == "bool":
        if len(data) != 2 or data[1] not in ("t", "f"):
            raise MalformedInput("(bool t|f)")
        return mk_bool(data[1] == "t", interner)
    if head == "eq":
        if len(data) != 3:
            raise MalformedInput("(eq x y)")
        return mk_eq(data[1], data[2], interner)
    if head == "atom":
        if len(data) < 3:
            raise MalformedInput("(atom SYM x...)")
        return mk_atom(data[1], data[2:], interner)
    if head == "not":
        if len(data) != 2:
            raise MalformedInput("(not f)")
        return mk_not(formula_from_data(data[1], interner), interner)
    if head in ("or", "and"):
        children = [formula_from_data(d, interner) for d in data[1:]]
        return (mk_or if head == "or" else mk_and)(children, interner)
    if head == "count":
        if len(data) != 5:
            raise MalformedInput("(count MODE N x f)")
        mode, threshold, var = data[1], data[2], data[3]
        try:
            threshold = int(threshold)
        except ValueError:
            raise MalformedInput(f"bad threshold {threshold!r}") from None
        return mk_count(mode, threshold, var,
                        formula_from_data(data[4], interner), interner)
    raise MalformedInput(f"unknown form {head!r}")


def parse_sexpr(text: str, interner: Interner | None = None) -> CFormula:
    return formula_from_data(parse_sexpr_data(text), interner)
