"""Clustering coefficient, degree assortativity and the in/out-degree ratio CDF."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .graph import DegreeView, ResponseGraph


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    nodes: tuple[str, ...]
    cc: np.ndarray
    mean: float
    by_out_degree: dict[int, float] = field(default_factory=dict)

    def of(self, user: str) -> float:
        return float(self.cc[self.nodes.index(user)])

    def distribution(self) -> list[tuple[float, float]]:
        """Empirical CDF points ``(cc value, fraction of nodes <= value)``."""
        return empirical_cdf(self.cc)

    @property
    def zero_fraction(self) -> float:
        return float(np.mean(self.cc == 0)) if self.cc.size else 0.0


@dataclass(frozen=True)
class AssortativityResult:
    """``r`` is ``None`` when the denominator of the Pearson form vanishes."""

    r: float | None
    m: int
    source_degree: str = "out"
    target_degree: str = "in"

    @property
    def defined(self) -> bool:
        return self.r is not None


@dataclass(frozen=True)
class RatioCDF:
    """CDF of ``k_in / k_out`` over nodes with ``k_out >= 1``.

    Nodes with ``k_out == 0`` have an infinite ratio and are only counted in
    ``infinite``.
    """

    ratios: np.ndarray
    points: list[tuple[float, float]]
    infinite: int
    infinite_nodes: tuple[str, ...] = ()

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.ratios, q, method="inverted_cdf"))


def empirical_cdf(values) -> list[tuple[float, float]]:
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        return []
    uniq, idx = np.unique(x, return_index=True)
    # fraction <= v is the index of the first element strictly greater
    upper = np.append(idx[1:], x.size)
    return [(float(u), float(c) / x.size) for u, c in zip(uniq, upper)]


def undirected_neighbors(graph: ResponseGraph) -> list[set[int]]:
    """Neighbor sets of the undirected projection, self-loops ignored."""
    nbrs: list[set[int]] = [set() for _ in range(graph.n_nodes)]
    for s, d in zip(graph.src.tolist(), graph.dst.tolist()):
        if s != d:
            nbrs[s].add(d)
            nbrs[d].add(s)
    return nbrs


def clustering(graph: ResponseGraph) -> ClusteringResult:
    """Per-node clustering on the undirected projection.

    ``cc(i) = links among neighbors / (d (d - 1) / 2)``; nodes with fewer
    than two neighbors get 0 and still count toward the network mean.
    """
    nbrs = undirected_neighbors(graph)
    twice_links = [0] * graph.n_nodes
    for u, nu in enumerate(nbrs):
        for v in nu:
            if v <= u:
                continue
            nv = nbrs[v]
            common = len(nu & nv) if len(nu) < len(nv) else len(nv & nu)
            if common:
                twice_links[u] += common
                twice_links[v] += common
    cc = np.zeros(graph.n_nodes)
    for i, t in enumerate(twice_links):
        d = len(nbrs[i])
        if d >= 2 and t:
            cc[i] = (t // 2) / (d * (d - 1) // 2)
    mean = float(cc.mean()) if cc.size else 0.0

    k_out = np.bincount(graph.src[~graph.self_loop_mask], minlength=graph.n_nodes)
    buckets: dict[int, list[float]] = defaultdict(list)
    for k, c in zip(k_out.tolist(), cc.tolist()):
        buckets[k].append(c)
    by_out = {k: float(np.mean(v)) for k, v in sorted(buckets.items())}
    return ClusteringResult(graph.nodes, cc, mean, by_out)


_DEGREE_KINDS = ("in", "out")


def assortativity(graph: ResponseGraph, source_degree: str = "out", target_degree: str = "in") -> AssortativityResult:
    """Pearson correlation of excess degrees across arcs.

    For each arc the pair is (excess ``source_degree`` of its tail, excess
    ``target_degree`` of its head); excess degree is degree minus one and
    degrees count distinct neighbors. The default (out, in) pairing is the
    conventional directed form; the Pearson coefficient is symmetric in its
    two series, so naming the head's value ``j`` and the tail's ``k`` or the
    reverse gives the same number.
    """
    if source_degree not in _DEGREE_KINDS or target_degree not in _DEGREE_KINDS:
        raise ValueError(f"degree kinds must be in {_DEGREE_KINDS}")
    m = graph.n_arcs
    if m < 2:
        raise ValidationError(f"assortativity needs at least 2 arcs, got {m}")
    n = graph.n_nodes
    deg = {
        "in": np.bincount(graph.dst, minlength=n).astype(np.float64),
        "out": np.bincount(graph.src, minlength=n).astype(np.float64),
    }
    j = deg[source_degree][graph.src] - 1.0
    k = deg[target_degree][graph.dst] - 1.0
    sj, sk = j.sum(), k.sum()
    num = float(np.dot(j, k) - sj * sk / m)
    var_j = float(np.dot(j, j) - sj * sj / m)
    var_k = float(np.dot(k, k) - sk * sk / m)
    # integer-valued sums, so an exactly regular side gives exactly zero
    if var_j <= 0 or var_k <= 0:
        return AssortativityResult(None, m, source_degree, target_degree)
    r = num / math.sqrt(var_j * var_k)
    return AssortativityResult(max(-1.0, min(1.0, r)), m, source_degree, target_degree)


def in_out_ratio_cdf(deg: DegreeView) -> RatioCDF:
    has_out = deg.k_out >= 1
    ratios = np.sort(deg.k_in[has_out] / deg.k_out[has_out])
    inf_nodes = tuple(u for u, keep in zip(deg.nodes, has_out.tolist()) if not keep)
    return RatioCDF(ratios, empirical_cdf(ratios), len(inf_nodes), inf_nodes)
