"""Tree-unfolding statistics of rooted DAGs.

wt(v) counts root-to-v paths; mul(v) is the maximum product of in-degrees
along such a path. Their vertex sums awt/amul bound the size of the tree
unfolding. Restricted subgraphs reachable while avoiding a waypoint set W
(except as endpoint) are the units split by the balancer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import NotAcyclic, NotRooted, PreconditionViolated
from .structures import DiGraph, reachable_closure, topological_order


@dataclass(frozen=True)
class WeightTable:
    wt: tuple[int, ...]
    mul: tuple[int, ...]
    awt: int
    amul: int

    def to_dict(self) -> dict:
        return {
            "wt": list(self.wt),
            "mul": list(self.mul),
            "awt": self.awt,
            "amul": self.amul,
        }


def weights(g: DiGraph) -> WeightTable:
    """Weight and multiplicity of every vertex, plus their aggregates.

    Weights can be exponential in |g|; Python ints keep them exact.
    """
    if g.root is None:
        raise NotRooted("graph carries no root")
    order = topological_order(g)
    if order is None:
        raise NotAcyclic("graph has a cycle")
    wt = [0] * g.n
    mul = [0] * g.n
    wt[g.root] = mul[g.root] = 1
    for v in order:
        if v == g.root:
            continue
        preds = g.in_neighbours[v]
        wt[v] = sum(wt[u] for u in preds)
        mul[v] = len(preds) * max(mul[u] for u in preds)
    return WeightTable(tuple(wt), tuple(mul), sum(wt), sum(mul))


@dataclass(frozen=True)
class Subgraph:
    """A restricted subgraph with its vertex map back to the host graph:
    new id k corresponds to host vertex vertices[k]."""

    graph: DiGraph
    vertices: tuple[int, ...]

    def host_ids(self) -> frozenset[int]:
        return frozenset(self.vertices)


def restricted(g: DiGraph, v: int, w_set: Iterable[int]) -> Subgraph:
    """Induced subgraph on vertices reachable from v by paths that avoid
    w_set except possibly at the endpoint; rooted at v."""
    w_set = frozenset(w_set)
    for w in w_set:
        if w not in reachable_closure(g, v):
            raise PreconditionViolated(f"{w} is not reachable from {v}")
    if v in w_set:
        keep = {v}
    else:
        keep = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for x in g.out_neighbours[u]:
                if x not in keep:
                    keep.add(x)
                    if x not in w_set:
                        stack.append(x)
    ids = tuple(sorted(keep))
    index = {u: k for k, u in enumerate(ids)}
    # Waypoints are sinks of the restriction: paths may end at a waypoint
    # but never continue through one, so its outgoing edges are dropped.
    # Keeping them would count paths through waypoints and break the
    # weight-splitting inequality the balancer relies on.
    edges = frozenset(
        (index[a], index[b])
        for a, b in g.edges
        if a in keep and b in keep and a not in w_set
    )
    return Subgraph(DiGraph(len(ids), edges, root=index[v]), ids)


def awt_restricted(g: DiGraph, v: int, w_set: Iterable[int]) -> int:
    return weights(restricted(g, v, w_set).graph).awt


def has_m_path_property(g: DiGraph, m: int) -> bool:
    """True iff mul(v) <= m for every vertex."""
    return max(weights(g).mul) <= m
