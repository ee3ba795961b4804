"""Weighted directed graphs with positive edge weights.

A loaded graph is a directed graph without parallel edges together with a
weight in (0, inf) on every edge.  Vertices are global integer ids (>= 1),
so subgraphs of a common ambient graph can be compared and unioned without
any relabeling.  Graphs are immutable after construction; connectivity
(every ordered pair joined by a directed path) is computed eagerly and
cached.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    EmptyFamily,
    GraphFormatError,
    NonPositiveWeight,
    PathNotInGraph,
    VertexNotInGraph,
)
from ._util import fmt


@dataclass(frozen=True)
class Edge:
    """Directed edge with a positive weight."""

    src: int
    dst: int
    weight: float


@dataclass(frozen=True)
class CyclePath:
    """A walk given by its vertex itinerary.

    vertices[0] is the base; a first-return cycle at v starts and ends at v
    and never visits v in between (interior vertices may repeat).
    """

    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise ValueError("a path needs at least one edge")

    @property
    def base(self) -> int:
        return self.vertices[0]

    @property
    def length(self) -> int:
        """Number of edges."""
        return len(self.vertices) - 1

    def is_first_return_cycle(self) -> bool:
        vs = self.vertices
        return vs[0] == vs[-1] and all(u != vs[0] for u in vs[1:-1])

    def weight_in(self, graph: "LoadedGraph") -> float:
        w = 1.0
        for u, t in zip(self.vertices, self.vertices[1:]):
            w *= graph.weight(u, t)
        return w


class LoadedGraph:
    """Immutable weighted digraph over global integer vertex ids."""

    __slots__ = ("vertices", "connected", "_wmap", "_index", "_indptr",
                 "_indices", "_weights", "_dense")

    def __init__(self, edges: Iterable):
        wmap = {}
        for e in edges:
            if isinstance(e, Edge):
                u, t, w = e.src, e.dst, e.weight
            else:
                u, t, w = e
            u = int(u)
            t = int(t)
            w = float(w)
            if u < 1 or t < 1:
                raise GraphFormatError(f"vertex ids must be >= 1, got ({u}, {t})")
            if not (w > 0.0) or not np.isfinite(w):
                raise NonPositiveWeight(f"edge ({u}, {t}) has weight {w!r}")
            if (u, t) in wmap:
                raise DuplicateEdge(f"edge ({u}, {t}) given twice")
            wmap[(u, t)] = w
        if not wmap:
            raise GraphFormatError("a loaded graph needs at least one edge")
        verts = sorted({u for u, _ in wmap} | {t for _, t in wmap})
        index = {vid: i for i, vid in enumerate(verts)}
        V = len(verts)
        deg = np.zeros(V + 1, dtype=np.int64)
        for (u, t) in wmap:
            deg[index[u] + 1] += 1
        indptr = np.cumsum(deg)
        indices = np.zeros(len(wmap), dtype=np.int64)
        weights = np.zeros(len(wmap))
        fill = indptr[:-1].copy()
        for (u, t) in sorted(wmap):
            i = index[u]
            indices[fill[i]] = index[t]
            weights[fill[i]] = wmap[(u, t)]
            fill[i] += 1
        object.__setattr__(self, "vertices", tuple(verts))
        object.__setattr__(self, "_wmap", wmap)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_indptr", indptr)
        object.__setattr__(self, "_indices", indices)
        object.__setattr__(self, "_weights", weights)
        object.__setattr__(self, "_dense", None)
        object.__setattr__(self, "connected", self._strong_connectivity())

    def __setattr__(self, name, value):
        raise AttributeError("LoadedGraph is immutable")

    # -- basic queries ----------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self._wmap)

    def edges(self):
        """Edges in canonical (src, dst) order."""
        for (u, t) in sorted(self._wmap):
            yield Edge(u, t, self._wmap[(u, t)])

    def has_vertex(self, vid: int) -> bool:
        return vid in self._index

    def has_edge(self, u: int, t: int) -> bool:
        return (u, t) in self._wmap

    def weight(self, u: int, t: int) -> float:
        try:
            return self._wmap[(u, t)]
        except KeyError:
            raise PathNotInGraph(f"edge ({u}, {t}) not in graph") from None

    def vertex_index(self, vid: int) -> int:
        try:
            return self._index[vid]
        except KeyError:
            raise VertexNotInGraph(f"vertex {vid} not in graph") from None

    def csr(self):
        """(indptr, indices, weights) over vertex positions, row-sorted."""
        return self._indptr, self._indices, self._weights

    def dense_matrix(self) -> np.ndarray:
        """Dense weight matrix aligned with ``vertices`` (cached)."""
        if self._dense is None:
            V = self.n_vertices
            W = np.zeros((V, V))
            for (u, t), w in self._wmap.items():
                W[self._index[u], self._index[t]] = w
            object.__setattr__(self, "_dense", W)
        return self._dense

    # -- structure --------------------------------------------------------

    def _reach_all(self, reverse: bool) -> bool:
        V = self.n_vertices
        seen = np.zeros(V, dtype=bool)
        if reverse:
            radj = [[] for _ in range(V)]
            for (u, t) in self._wmap:
                radj[self._index[t]].append(self._index[u])
            nbr = radj.__getitem__
        else:
            nbr = lambda i: self._indices[self._indptr[i]:self._indptr[i + 1]]
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            i = stack.pop()
            for j in nbr(i):
                if not seen[j]:
                    seen[j] = True
                    count += 1
                    stack.append(int(j))
        return count == V

    def _strong_connectivity(self) -> bool:
        return self._reach_all(False) and self._reach_all(True)

    def union(self, other: "LoadedGraph") -> "LoadedGraph":
        """Union of edge sets; weights must agree on shared edges."""
        merged = dict(self._wmap)
        for (u, t), w in other._wmap.items():
            if merged.setdefault((u, t), w) != w:
                raise GraphFormatError(
                    f"edge ({u}, {t}) carries conflicting weights in union"
                )
        return LoadedGraph((u, t, w) for (u, t), w in merged.items())

    def subgraph_of(self, other: "LoadedGraph") -> bool:
        """True when every edge of self is in other with the same weight."""
        return all(other._wmap.get(k) == w for k, w in self._wmap.items())

    def __eq__(self, other):
        return isinstance(other, LoadedGraph) and self._wmap == other._wmap

    def __repr__(self):
        return f"LoadedGraph({self.n_vertices} vertices, {self.n_edges} edges)"


def build_graph(edges: Iterable) -> LoadedGraph:
    """Validate an edge list and construct a LoadedGraph.

    Accepts (src, dst, weight) triples or Edge objects.  Raises
    NonPositiveWeight for weights outside (0, inf) and DuplicateEdge for a
    repeated ordered pair.
    """
    return LoadedGraph(edges)


def is_connected(graph: LoadedGraph) -> bool:
    """Cached strong connectivity: every ordered pair is joined by a path."""
    return graph.connected


def subgraph_generated_by(source, paths: Sequence) -> LoadedGraph:
    """Union of the vertices and edges traversed by a family of paths.

    ``source`` supplies the weights: either a LoadedGraph or any object
    with an ``edge_weight(u, t)`` method returning the weight or None
    (families of infinite graphs implement this).  An edge used by a path
    but absent from the source raises PathNotInGraph; an empty family has
    no defined subgraph and raises EmptyFamily.
    """
    paths = list(paths)
    if not paths:
        raise EmptyFamily("a generating family must contain at least one path")
    if isinstance(source, LoadedGraph):
        lookup = lambda u, t: source._wmap.get((u, t))
    else:
        lookup = source.edge_weight
    edges = {}
    for p in paths:
        vs = p.vertices if isinstance(p, CyclePath) else tuple(p)
        if len(vs) < 2:
            raise PathNotInGraph(f"path {vs!r} has no edges")
        for u, t in zip(vs, vs[1:]):
            w = lookup(u, t)
            if w is None:
                raise PathNotInGraph(f"edge ({u}, {t}) not in ambient graph")
            edges[(u, t)] = w
    return LoadedGraph((u, t, w) for (u, t), w in edges.items())


def principal_subgraph(graph: LoadedGraph, vertex_set) -> LoadedGraph:
    """Restriction of the graph to a vertex subset.

    Ids in ``vertex_set`` that the graph does not contain are ignored, so
    restricting twice equals restricting to the intersection; if nothing
    of the set is present the call raises VertexNotInGraph, and if no edge
    survives the restriction raises EmptyFamily.
    """
    keep = set(vertex_set)
    if not keep:
        raise VertexNotInGraph("vertex set is empty")
    if not keep & set(graph.vertices):
        raise VertexNotInGraph(f"none of {sorted(keep)} is in the graph")
    edges = [(u, t, w) for (u, t), w in graph._wmap.items()
             if u in keep and t in keep]
    if not edges:
        raise EmptyFamily("restriction keeps no edges")
    return LoadedGraph(edges)


def is_exhaustive_prefix(family, sequence: Sequence[LoadedGraph],
                         probe_depth: int) -> bool:
    """Finite consistency check for an increasing subgraph sequence.

    True when the sequence is nested (each entry contains the previous)
    and its union covers every edge of the family realized up to
    ``probe_depth``.  A finite prefix can only certify failure or
    consistency, never exhaustiveness itself.
    """
    seq = list(sequence)
    if not seq:
        return False
    for prev, cur in zip(seq, seq[1:]):
        if not prev.subgraph_of(cur):
            return False
    union = seq[0]
    for g in seq[1:]:
        union = union.union(g)
    target = family.realize(probe_depth)
    return target.subgraph_of(union)


# -- JSON format --------------------------------------------------------------

def graph_from_json(text_or_obj) -> LoadedGraph:
    """Parse the edge-list JSON format.

    Shape: {"edges": [{"from": 1, "to": 2, "w": 0.5}, ...]} with weights
    given as doubles or as decimal strings; both are accepted and doubles
    round-trip bit-exactly.
    """
    if isinstance(text_or_obj, (str, bytes)):
        try:
            obj = json.loads(text_or_obj)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from None
    else:
        obj = text_or_obj
    if not isinstance(obj, dict) or "edges" not in obj:
        raise GraphFormatError('expected an object with an "edges" array')
    if not isinstance(obj["edges"], list):
        raise GraphFormatError('"edges" must be an array')
    triples = []
    for entry in obj["edges"]:
        try:
            u = int(entry["from"])
            t = int(entry["to"])
            w = float(entry["w"])
        except (TypeError, KeyError, ValueError) as exc:
            raise GraphFormatError(f"bad edge entry {entry!r}: {exc}") from None
        triples.append((u, t, w))
    return build_graph(triples)


def graph_to_json(graph: LoadedGraph) -> str:
    """Serialize to the edge-list JSON format, canonically ordered."""
    rows = [
        f'{{"from": {e.src}, "to": {e.dst}, "w": {fmt(e.weight)}}}'
        for e in graph.edges()
    ]
    return '{"edges": [\n  ' + ',\n  '.join(rows) + '\n]}\n'
