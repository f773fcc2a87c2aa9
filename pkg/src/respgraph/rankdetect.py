"""UserRank (PageRank on the response graph) and anti-social user flagging."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .errors import InsufficientData
from .graph import DegreeView, ResponseGraph
from .ingest import InteractionTrace
from .sequences import UserBehaviorProfile
from .statfit import CorrelationResult, PowerLawFit, pearson

IRD_RULE = "ird_threshold"
INOUT_RULE = "inout_ratio"
OUTLIER_RULE = "powerlaw_outlier"
RULES = (IRD_RULE, INOUT_RULE, OUTLIER_RULE)


@dataclass(frozen=True, eq=False)
class RankResult:
    nodes: tuple[str, ...]
    scores: np.ndarray
    damping: float
    iterations: int
    residual: float
    converged: bool

    def score(self, user: str) -> float:
        return float(self.scores[self.nodes.index(user)])

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.nodes, self.scores.tolist()))


@dataclass(frozen=True)
class FlagReport:
    user: str
    rules: frozenset[str] = frozenset()
    values: Mapping[str, float | None] = field(default_factory=dict)

    @property
    def flagged(self) -> bool:
        return bool(self.rules)

    @property
    def verdict(self) -> str:
        return "flagged" if self.rules else "clean"


def user_rank(graph: ResponseGraph, damping: float = 0.85, tol: float = 1e-12,
              max_iter: int = 1000, weighted: bool = True) -> RankResult:
    """PageRank by power iteration along responder -> responded arcs.

    Transition probabilities are proportional to arc weights (response
    counts) unless ``weighted`` is false. Rank held by users without
    out-arcs is spread uniformly. Iteration stops when the L1 change drops
    below ``tol``, returning the iterate that moved less than ``tol`` under
    one more update; hitting ``max_iter`` first is reported through
    ``converged=False`` rather than raised.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    n = graph.n_nodes
    if n == 0:
        raise ValueError("user_rank needs a non-empty graph")
    w = graph.weight.astype(float) if weighted else np.ones(graph.n_arcs)
    out_w = np.bincount(graph.src, weights=w, minlength=n)
    dangling = out_w == 0
    # transposed transition matrix: column u holds u's outgoing probabilities
    pt = sparse.csr_matrix((w / out_w[graph.src], (graph.dst, graph.src)), shape=(n, n))

    x = np.full(n, 1.0 / n)
    residual = math.inf
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        spread = damping * x[dangling].sum() + (1.0 - damping)
        new = damping * (pt @ x) + spread / n
        new /= new.sum()
        residual = float(np.abs(new - x).sum())
        if residual < tol:
            # x is a fixed point to within tol; keep it rather than the
            # rounding-perturbed update
            converged = True
            break
        x = new
    return RankResult(graph.nodes, x, damping, it, residual, converged)


def user_views(trace: InteractionTrace) -> dict[str, int]:
    """Total views over each user's uploaded videos."""
    out: dict[str, int] = {}
    for v in trace.videos:
        out[v.owner] = out.get(v.owner, 0) + v.views
    return out


def rank_vs_views(rank: RankResult, trace: InteractionTrace) -> CorrelationResult:
    views = user_views(trace)
    return pearson(rank.scores, [views.get(u, 0) for u in rank.nodes])


def rank_vs_indegree(rank: RankResult, deg: DegreeView) -> CorrelationResult:
    if deg.nodes == rank.nodes:
        k_in = deg.k_in
    else:
        idx = {u: i for i, u in enumerate(deg.nodes)}
        k_in = np.array([deg.k_in[idx[u]] for u in rank.nodes])
    return pearson(rank.scores, k_in)


# --------------------------------------------------------------------------- #
# flag rules
# --------------------------------------------------------------------------- #
def flag_ird(profiles: Mapping[str, UserBehaviorProfile] | Iterable[UserBehaviorProfile],
             ird_max: float = 3.0, resp_min: float = 10.0) -> list[FlagReport]:
    """Flag users whose average IRD is below ``ird_max`` while their average
    responses per video exceed ``resp_min``. Users without any IRD gap are
    never flagged."""
    items = profiles.values() if isinstance(profiles, Mapping) else profiles
    out = []
    for p in items:
        hit = p.avg_ird is not None and p.avg_ird < ird_max and p.avg_responses_per_video > resp_min
        out.append(FlagReport(p.user, frozenset({IRD_RULE}) if hit else frozenset(),
                              {"avg_ird": p.avg_ird, "avg_resp_per_video": p.avg_responses_per_video}))
    return out


def flag_inout(deg: DegreeView, ratio_min: float = 10.0, min_out: int = 20) -> list[FlagReport]:
    """Flag heavy posters who get few responses back.

    Uses response counts (weighted degrees): flagged when ``w_out >= min_out``
    and ``w_out / w_in >= ratio_min``, a zero ``w_in`` counting as infinite.
    """
    out = []
    for u, w_in, w_out in zip(deg.nodes, deg.w_in.tolist(), deg.w_out.tolist()):
        ratio = w_out / w_in if w_in else math.inf
        hit = w_out >= min_out and ratio >= ratio_min
        out.append(FlagReport(u, frozenset({INOUT_RULE}) if hit else frozenset(), {"out_in_ratio": ratio}))
    return out


def tail_surprise(counts: np.ndarray, fit: PowerLawFit) -> np.ndarray:
    """Normalized log-spacings of the fitted tail probabilities.

    ``counts`` must be sorted in decreasing order. With ``S`` the fitted
    ``P(X >= x)``, entry ``r`` (1-based) is ``r * ln(S(x_{r+1}) / S(x_r))``.
    Under the fitted law these are roughly independent Exp(1) draws whatever
    the rank. A
    count the law gives zero probability gets ``inf``; the last rank has no
    successor and gets 0.
    """
    s = fit.tail_probability(counts)
    z = np.zeros(counts.size)
    r = np.arange(1, counts.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = s[1:] / s[:-1]
        z[:-1] = np.where(s[:-1] > 0, r * np.log(ratio), math.inf)
    return np.maximum(z, 0.0)


def flag_powerlaw_outliers(samples: Mapping[str, int], fit: PowerLawFit, k: int = 3,
                           multiple: float = 2.0, window: int = 20) -> list[FlagReport]:
    """Flag up to ``k`` users sitting above a break in the fitted upper tail.

    Users are ranked by count (ties by id). For each candidate cut ``c`` from
    ``k`` down to 1, the surprise of the gap below rank ``c`` (see
    :func:`tail_surprise`) is compared with the spread of the ``window``
    ranks under the cut, re-ranked as if the top ``c`` were removed. The
    spread is the largest surprise in that window (floored at 1). The first
    cut whose gap exceeds ``multiple`` times the spread flags ranks ``1..c``:
    every count above the break is out of line with the law, ties included.
    """
    if len(samples) < 20:
        raise InsufficientData(f"need at least 20 users, got {len(samples)}")
    ranked = sorted(samples.items(), key=lambda kv: (-kv[1], kv[0]))
    counts = np.array([c for _, c in ranked], dtype=float)
    base = tail_surprise(counts, fit)
    k = min(k, counts.size - 1)
    cut = 0
    for c in range(k, 0, -1):
        ref = tail_surprise(counts[c:c + window + 1], fit)[:-1]
        spread = max(float(ref.max()) if ref.size else 0.0, 1.0)
        if base[c - 1] > multiple * spread:
            cut = c
            break
    out = []
    for i, (u, c) in enumerate(ranked):
        rules = frozenset({OUTLIER_RULE}) if i < cut else frozenset()
        out.append(FlagReport(u, rules, {"residual": float(base[i]), "count": float(c)}))
    return out


def combine_reports(*reports: Iterable[FlagReport]) -> dict[str, FlagReport]:
    """Merge per-rule reports into one report per user."""
    merged: dict[str, tuple[set[str], dict]] = {}
    for group in reports:
        for rep in group:
            rules, values = merged.setdefault(rep.user, (set(), {}))
            rules.update(rep.rules)
            values.update(rep.values)
    return {u: FlagReport(u, frozenset(r), v) for u, (r, v) in sorted(merged.items())}


def rule_counts(reports: Mapping[str, FlagReport]) -> dict[str, int]:
    counts = {rule: 0 for rule in RULES}
    for rep in reports.values():
        for rule in rep.rules:
            counts[rule] += 1
    counts["flagged"] = sum(1 for rep in reports.values() if rep.flagged)
    return counts
