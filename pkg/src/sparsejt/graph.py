"""DAGs, moralization, elimination-game triangulation and junction trees."""

from __future__ import annotations

import graphlib
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, NetworkError

HEURISTICS = ("min_fill", "min_nei")


@dataclass
class Dag:
    nodes: list[str]
    parents: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise NetworkError("duplicate node names in DAG")
        for v in self.nodes:
            self.parents.setdefault(v, [])
        for v, pa in self.parents.items():
            if v not in known:
                raise NetworkError(f"parent map names unknown node {v!r}")
            for p in pa:
                if p not in known:
                    raise NetworkError(f"node {v!r} has unknown parent {p!r}")
        self.topological_order()

    def topological_order(self) -> list[str]:
        ts = graphlib.TopologicalSorter({v: self.parents[v] for v in self.nodes})
        try:
            return list(ts.static_order())
        except graphlib.CycleError as exc:
            raise NetworkError(f"directed cycle through {exc.args[1]}") from None

    def children(self, v: str) -> list[str]:
        return [c for c in self.nodes if v in self.parents[c]]


class UndirectedGraph:
    """Simple undirected graph with symmetric neighbor sets."""

    def __init__(self, nodes: Iterable[str] = (), edges: Iterable[tuple[str, str]] = ()):
        self.nodes: list[str] = []
        self.adj: dict[str, set[str]] = {}
        for v in nodes:
            self.add_node(v)
        for u, v in edges:
            self.add_edge(u, v)

    def add_node(self, v: str) -> None:
        if v not in self.adj:
            self.nodes.append(v)
            self.adj[v] = set()

    def add_edge(self, u: str, v: str) -> None:
        if u == v:
            raise ValueError(f"self loop on {u!r}")
        self.add_node(u)
        self.add_node(v)
        self.adj[u].add(v)
        self.adj[v].add(u)

    def has_edge(self, u: str, v: str) -> bool:
        return v in self.adj.get(u, ())

    def edges(self) -> list[tuple[str, str]]:
        pos = {v: i for i, v in enumerate(self.nodes)}
        out = set()
        for u in self.nodes:
            for v in self.adj[u]:
                out.add((u, v) if pos[u] < pos[v] else (v, u))
        return sorted(out, key=lambda e: (pos[e[0]], pos[e[1]]))

    def copy(self) -> "UndirectedGraph":
        g = UndirectedGraph(self.nodes)
        for v in self.nodes:
            g.adj[v] = set(self.adj[v])
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and self.adj == other.adj

    def __repr__(self) -> str:
        return f"UndirectedGraph(nodes={len(self.nodes)}, edges={len(self.edges())})"


def moralize(dag: Dag) -> UndirectedGraph:
    """Marry co-parents and drop arc directions."""
    g = UndirectedGraph(dag.nodes)
    for child in dag.nodes:
        pa = dag.parents[child]
        for p in pa:
            g.add_edge(p, child)
        for p, q in combinations(pa, 2):
            g.add_edge(p, q)
    return g


@dataclass
class Triangulation:
    graph: UndirectedGraph
    fill_edges: list[tuple[str, str]]
    cliques: list[tuple[str, ...]]
    statespace: list[int]
    elimination_order: list[str]


def _fill_count(adj: Mapping[str, set], v: str) -> int:
    nb = sorted(adj[v])
    return sum(1 for a, b in combinations(nb, 2) if b not in adj[a])


def _score(adj, v: str, heuristic: str):
    if heuristic == "min_fill":
        return (_fill_count(adj, v), v)
    return (len(adj[v]), _fill_count(adj, v), v)


def triangulate(
    g: UndirectedGraph,
    statespaces: Mapping[str, int] | None = None,
    heuristic: str = "min_fill",
) -> Triangulation:
    """Run the elimination game with a greedy heuristic.

    ``min_fill`` eliminates the node adding the fewest fill edges;
    ``min_nei`` the node with the fewest current neighbors (fill count
    breaks ties).  Remaining ties go to the smallest node name.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown triangulation heuristic {heuristic!r}; use one of {HEURISTICS}")
    statespaces = statespaces or {}
    work = {v: set(nb) for v, nb in g.adj.items()}
    tri = g.copy()
    scores = {v: _score(work, v, heuristic) for v in work}
    order, fills, cliques = [], [], []
    while work:
        v = min(scores.values())[-1]
        nb = work[v]
        cand = frozenset(nb | {v})
        if not any(cand <= c for c in cliques):
            cliques.append(cand)
        for a, b in combinations(sorted(nb), 2):
            if b not in work[a]:
                work[a].add(b)
                work[b].add(a)
                tri.add_edge(a, b)
                fills.append((a, b))
        for u in nb:
            work[u].discard(v)
        del work[v]
        del scores[v]
        order.append(v)
        touched = set(nb)
        for u in nb:
            touched |= work[u]
        for u in touched:
            scores[u] = _score(work, u, heuristic)

    pos = {v: i for i, v in enumerate(g.nodes)}
    cl = [tuple(sorted(c, key=pos.__getitem__)) for c in cliques]
    space = [math.prod(statespaces.get(v, 2) for v in c) for c in cl]
    return Triangulation(tri, fills, cl, space, order)


def mcs_order(g: UndirectedGraph) -> list[str]:
    """Maximum cardinality search visiting order (ties: first node in ``g.nodes``)."""
    weight = {v: 0 for v in g.nodes}
    order = []
    while weight:
        v = max(weight, key=lambda u: weight[u])
        order.append(v)
        del weight[v]
        for u in g.adj[v]:
            if u in weight:
                weight[u] += 1
    return order


def fill_in(g: UndirectedGraph, order: Sequence[str]) -> list[tuple[str, str]]:
    """Fill edges produced by eliminating the nodes of ``g`` in ``order``."""
    work = {v: set(nb) for v, nb in g.adj.items()}
    fills = []
    for v in order:
        nb = sorted(work[v])
        for a, b in combinations(nb, 2):
            if b not in work[a]:
                work[a].add(b)
                work[b].add(a)
                fills.append((a, b))
        for u in nb:
            work[u].discard(v)
        del work[v]
    return fills


def is_chordal(g: UndirectedGraph) -> bool:
    """Chordal iff eliminating in reverse MCS order needs no fill edge."""
    return not fill_in(g, mcs_order(g)[::-1])


@dataclass
class JunctionTreeSkeleton:
    cliques: list[tuple[str, ...]]
    edges: list[tuple[int, int]]
    separators: dict[tuple[int, int], tuple[str, ...]]
    root: int
    parent: list[int | None] = field(default_factory=list)
    order: list[int] = field(default_factory=list)

    def __post_init__(self):
        nbrs = {i: [] for i in range(len(self.cliques))}
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        parent: list[int | None] = [None] * len(self.cliques)
        order, seen = [self.root], {self.root}
        for i in order:
            for j in sorted(nbrs[i]):
                if j not in seen:
                    seen.add(j)
                    parent[j] = i
                    order.append(j)
        if len(order) != len(self.cliques):
            raise ValueError("junction tree edges do not span all cliques")
        self.parent = parent
        self.order = order

    def separator(self, i: int, j: int) -> tuple[str, ...]:
        return self.separators[(i, j) if (i, j) in self.separators else (j, i)]

    def children(self, i: int) -> list[int]:
        return [j for j in self.order if self.parent[j] == i]

    def path(self, i: int, j: int) -> list[int]:
        """Clique indices on the tree path from ``i`` to ``j`` (inclusive)."""
        up_i = [i]
        while self.parent[up_i[-1]] is not None:
            up_i.append(self.parent[up_i[-1]])
        up_j = [j]
        while up_j[-1] not in up_i:
            up_j.append(self.parent[up_j[-1]])
        meet = up_j[-1]
        return up_i[: up_i.index(meet) + 1] + up_j[-2::-1]


def build_junction_tree(t: Triangulation, root_node: str | None = None) -> JunctionTreeSkeleton:
    """Maximum-weight spanning tree of the clique graph, weights ``|C_i & C_j|``.

    Zero-weight edges join disconnected components with empty separators.
    Without ``root_node`` the first clique of the elimination is the root.
    """
    cliques = t.cliques
    if root_node is None:
        root = 0
    else:
        hits = [i for i, c in enumerate(cliques) if root_node in c]
        if not hits:
            raise DomainError(f"root node {root_node!r} is not in any clique")
        root = hits[0]
    sets = [set(c) for c in cliques]
    cand = sorted(
        ((-len(sets[i] & sets[j]), i, j) for i, j in combinations(range(len(cliques)), 2)),
    )
    comp = list(range(len(cliques)))

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    edges, seps = [], {}
    for _, i, j in cand:
        ri, rj = find(i), find(j)
        if ri != rj:
            comp[ri] = rj
            edges.append((i, j))
            seps[(i, j)] = tuple(v for v in cliques[i] if v in sets[j])
            if len(edges) == len(cliques) - 1:
                break
    return JunctionTreeSkeleton(list(cliques), edges, seps, root)


def statespace_report(t: Triangulation, top: int | None = None) -> list[tuple[tuple[str, ...], int, int]]:
    """Largest cliques by dense cell count as ``(clique, cells, bytes)`` with 8 bytes per cell."""
    idx = sorted(range(len(t.cliques)), key=lambda i: (-t.statespace[i], i))
    if top is not None:
        idx = idx[:top]
    return [(t.cliques[i], t.statespace[i], 8 * t.statespace[i]) for i in idx]
