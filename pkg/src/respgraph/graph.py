"""The video response user graph and its structural decompositions.

An arc ``u -> v`` means user ``u`` posted at least one response to a video
owned by ``v``; the arc weight is the number of such responses.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import DegenerateInput
from .ingest import InteractionTrace


@dataclass(frozen=True, eq=False)
class ResponseGraph:
    """Immutable weighted digraph over user ids.

    ``nodes`` is sorted; arcs are stored as parallel index arrays sorted by
    (source, target). Use :meth:`from_arcs` or :func:`build_graph` rather
    than the raw constructor.
    """

    nodes: tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    @classmethod
    def from_arcs(cls, nodes: Iterable[str], arcs: Iterable[tuple[str, str, int]]) -> "ResponseGraph":
        arcs = list(arcs)
        node_set = set(nodes)
        for u, v, _ in arcs:
            node_set.add(u)
            node_set.add(v)
        ordered = tuple(sorted(node_set))
        index = {u: i for i, u in enumerate(ordered)}
        merged: Counter = Counter()
        for u, v, w in arcs:
            if w < 1:
                raise ValueError(f"arc weight must be >= 1, got {w} for {u}->{v}")
            merged[index[u], index[v]] += int(w)
        if merged:
            keys = sorted(merged)
            src = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
            dst = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
            weight = np.fromiter((merged[k] for k in keys), dtype=np.int64, count=len(keys))
        else:
            src = dst = weight = np.zeros(0, dtype=np.int64)
        g = cls(ordered, src, dst, weight)
        g.__dict__["index"] = index
        return g

    # ---- basic accessors ------------------------------------------------ #
    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_arcs(self) -> int:
        return int(self.src.size)

    @cached_property
    def index(self) -> dict[str, int]:
        return {u: i for i, u in enumerate(self.nodes)}

    def arcs(self) -> Iterator[tuple[str, str, int]]:
        nodes = self.nodes
        for s, d, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            yield nodes[s], nodes[d], w

    def weight_of(self, u: str, v: str) -> int:
        """Arc weight, 0 when the arc is absent."""
        i, j = self.index.get(u), self.index.get(v)
        if i is None or j is None:
            return 0
        lo, hi = self.out_indptr[i], self.out_indptr[i + 1]
        pos = lo + np.searchsorted(self.dst[lo:hi], j)
        if pos < hi and self.dst[pos] == j:
            return int(self.weight[pos])
        return 0

    def __eq__(self, other):
        if not isinstance(other, ResponseGraph):
            return NotImplemented
        return (self.nodes == other.nodes and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst) and np.array_equal(self.weight, other.weight))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"ResponseGraph(n_nodes={self.n_nodes}, n_arcs={self.n_arcs})"

    # ---- adjacency -------------------------------------------------------- #
    @cached_property
    def out_indptr(self) -> np.ndarray:
        # arcs are sorted by source, so dst doubles as the CSR index array
        counts = np.bincount(self.src, minlength=self.n_nodes)
        return np.concatenate(([0], np.cumsum(counts))).astype(np.int64)

    @cached_property
    def _in_order(self) -> np.ndarray:
        return np.lexsort((self.src, self.dst))

    @cached_property
    def in_indptr(self) -> np.ndarray:
        counts = np.bincount(self.dst, minlength=self.n_nodes)
        return np.concatenate(([0], np.cumsum(counts))).astype(np.int64)

    @cached_property
    def in_sources(self) -> np.ndarray:
        return self.src[self._in_order]

    def successors(self, i: int) -> np.ndarray:
        return self.dst[self.out_indptr[i]:self.out_indptr[i + 1]]

    def predecessors(self, i: int) -> np.ndarray:
        return self.in_sources[self.in_indptr[i]:self.in_indptr[i + 1]]

    def to_csr(self, weighted: bool = True) -> sparse.csr_matrix:
        data = self.weight.astype(float) if weighted else np.ones(self.n_arcs)
        return sparse.csr_matrix((data, (self.src, self.dst)), shape=(self.n_nodes, self.n_nodes))

    # ---- derived graphs --------------------------------------------------- #
    @property
    def self_loop_mask(self) -> np.ndarray:
        return self.src == self.dst

    def without_self_loops(self) -> "ResponseGraph":
        keep = ~self.self_loop_mask
        if keep.all():
            return self
        return ResponseGraph(self.nodes, self.src[keep], self.dst[keep], self.weight[keep])

    def subgraph(self, nodes: Iterable[str]) -> "ResponseGraph":
        """Induced subgraph on ``nodes`` (which must belong to this graph)."""
        chosen = sorted(set(nodes))
        old = np.array([self.index[u] for u in chosen], dtype=np.int64)
        remap = np.full(self.n_nodes, -1, dtype=np.int64)
        remap[old] = np.arange(old.size)
        keep = (remap[self.src] >= 0) & (remap[self.dst] >= 0)
        return ResponseGraph(tuple(chosen), remap[self.src[keep]], remap[self.dst[keep]], self.weight[keep])


def build_graph(trace: InteractionTrace, include_self_loops: bool = False) -> ResponseGraph:
    """Build the user graph from a trace.

    The node set is every responder plus every owner of a responded video,
    independent of ``include_self_loops``: a user whose only activity is
    responding to their own videos is still a node, just without an arc.
    """
    counts: Counter = Counter()
    nodes = set()
    owner = trace.owner
    for r in trace.responses:
        u, v = r.responder, owner(r.parent_video)
        nodes.add(u)
        nodes.add(v)
        if u != v or include_self_loops:
            counts[u, v] += 1
    return ResponseGraph.from_arcs(nodes, ((u, v, w) for (u, v), w in counts.items()))


# --------------------------------------------------------------------------- #
# degrees
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class DegreeView:
    nodes: tuple[str, ...]
    k_in: np.ndarray
    k_out: np.ndarray
    w_in: np.ndarray
    w_out: np.ndarray

    def of(self, user: str) -> dict[str, int]:
        i = self.nodes.index(user)
        return {"k_in": int(self.k_in[i]), "k_out": int(self.k_out[i]),
                "w_in": int(self.w_in[i]), "w_out": int(self.w_out[i])}

    @staticmethod
    def _cv(x: np.ndarray) -> float:
        m = x.mean() if x.size else 0.0
        return float(x.std() / m) if m > 0 else float("nan")

    def summary(self) -> dict[str, float]:
        """Average degrees and coefficients of variation (population std / mean)."""
        if not self.nodes:
            return {"avg_k_in": 0.0, "cv_k_in": float("nan"), "avg_k_out": 0.0,
                    "cv_k_out": float("nan"), "avg_k": 0.0}
        avg_in, avg_out = float(self.k_in.mean()), float(self.k_out.mean())
        return {
            "avg_k_in": avg_in,
            "cv_k_in": self._cv(self.k_in),
            "avg_k_out": avg_out,
            "cv_k_out": self._cv(self.k_out),
            "avg_k": avg_in + avg_out,
        }


def degrees(graph: ResponseGraph) -> DegreeView:
    n = graph.n_nodes
    return DegreeView(
        nodes=graph.nodes,
        k_in=np.bincount(graph.dst, minlength=n).astype(np.int64),
        k_out=np.bincount(graph.src, minlength=n).astype(np.int64),
        w_in=np.bincount(graph.dst, weights=graph.weight, minlength=n).astype(np.int64),
        w_out=np.bincount(graph.src, weights=graph.weight, minlength=n).astype(np.int64),
    )


# --------------------------------------------------------------------------- #
# components
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class ComponentDecomposition:
    graph: ResponseGraph
    sccs: list[tuple[str, ...]]
    wccs: list[tuple[str, ...]]

    @property
    def largest_scc(self) -> tuple[str, ...]:
        return self.sccs[0] if self.sccs else ()

    def largest_scc_subgraph(self) -> ResponseGraph:
        return self.graph.subgraph(self.largest_scc)


def _sorted_components(nodes: tuple[str, ...], groups: Iterable[Iterable[int]]) -> list[tuple[str, ...]]:
    # node ids are sorted, so the smallest index is the smallest member id
    comps = [sorted(g) for g in groups]
    comps.sort(key=lambda c: (-len(c), c[0]))
    return [tuple(nodes[i] for i in c) for c in comps]


def _components(graph: ResponseGraph, connection: str) -> list[tuple[str, ...]]:
    if graph.n_nodes == 0:
        return []
    _, labels = csgraph.connected_components(graph.to_csr(weighted=False), directed=True, connection=connection)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    return _sorted_components(graph.nodes, (g.tolist() for g in np.split(order, bounds)))


def weak_components(graph: ResponseGraph) -> list[tuple[str, ...]]:
    return _components(graph, "weak")


def scc_decompose(graph: ResponseGraph) -> ComponentDecomposition:
    comps = _components(graph, "strong")
    return ComponentDecomposition(graph, comps, weak_components(graph))


def component_size_rank(decomp: ComponentDecomposition) -> list[tuple[int, int]]:
    """``(rank, size)`` pairs, rank 1 being the largest SCC."""
    return [(i, len(c)) for i, c in enumerate(decomp.sccs, start=1)]


# --------------------------------------------------------------------------- #
# distances
# --------------------------------------------------------------------------- #
def average_distance(graph: ResponseGraph, sample_size: int, seed: int = 0) -> float:
    """Mean directed hop distance over reachable ordered pairs ``u != v``.

    BFS runs from ``sample_size`` sources drawn uniformly without
    replacement; every node is a source (exact mode) once ``sample_size``
    reaches the node count.
    """
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    g = graph.without_self_loops()
    if g.n_arcs == 0:
        raise DegenerateInput("average distance needs at least one arc between distinct users")
    n = g.n_nodes
    if sample_size >= n:
        sources = np.arange(n)
    else:
        sources = np.sort(np.random.default_rng(seed).choice(n, size=sample_size, replace=False))
    adj = g.to_csr(weighted=False)
    chunk = max(1, 2_000_000 // n)
    total = 0.0
    pairs = 0
    for start in range(0, sources.size, chunk):
        dist = csgraph.shortest_path(adj, method="D", directed=True, unweighted=True,
                                     indices=sources[start:start + chunk])
        finite = dist[np.isfinite(dist) & (dist > 0)]
        total += float(finite.sum())
        pairs += int(finite.size)
    if pairs == 0:
        raise DegenerateInput("no reachable pairs from the sampled sources")
    return total / pairs


def edge_list_rows(graph: ResponseGraph) -> list[tuple[str, str, int]]:
    """Rows for the ``src,dst,weight`` edge-list export."""
    return list(graph.arcs())
