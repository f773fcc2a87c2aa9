"""Snowball crawler and random seed finder over an abstract data source.

The crawler starts from seed users, collects each user's videos, and
enqueues the users on the other side of every response it sees. Because it
follows responses in both directions, the sampled graph is always a union of
entire weakly connected components of the full graph.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import ExhaustedDictionary, SourceError
from .graph import ResponseGraph, build_graph, degrees, weak_components
from .ingest import InteractionTrace


@dataclass(frozen=True)
class VideoPage:
    video_id: str
    owner: str
    parent: str | None  # responded video when this video is a response
    parent_owner: str | None
    responses: tuple[tuple[str, str], ...]  # (response video, responder) in position order


@dataclass(frozen=True)
class UserInfo:
    user: str
    country: str
    responded: bool
    responsive: bool


class DataSource(Protocol):
    def get_user_info(self, user: str) -> UserInfo: ...

    def get_user_videos(self, user: str) -> Sequence[str]: ...

    def get_video_page(self, video: str) -> VideoPage: ...

    def get_video_responses(self, video: str) -> Sequence[tuple[str, str]]: ...

    def tag_search(self, word: str) -> Sequence[str]: ...


class TraceSource:
    """Read-only :class:`DataSource` backed by an in-memory trace.

    ``tags`` maps a search word to the ids of videos carrying that tag;
    ``tag_search`` returns the contributors of those videos.
    """

    def __init__(self, trace: InteractionTrace, tags: dict[str, Sequence[str]] | None = None):
        self.trace = trace
        self.tags = {w: tuple(v) for w, v in (tags or {}).items()}
        responsive = {r.responder for r in trace.responses}
        responded = {trace.owner(v) for v in trace.by_parent}
        self._responsive = frozenset(responsive)
        self._responded = frozenset(responded)
        self.queries: Counter = Counter()

    def _video(self, video: str):
        try:
            return self.trace.video(video)
        except KeyError:
            raise SourceError(f"video {video!r}", "no such video") from None

    def get_user_info(self, user: str) -> UserInfo:
        self.queries["user_info"] += 1
        vids = self.trace.videos_by_owner.get(user)
        if vids is None and user not in self._responsive:
            raise SourceError(f"user {user!r}", "no such user")
        country = self.trace.video(vids[0]).country if vids else "UNKNOWN"
        return UserInfo(user, country, user in self._responded, user in self._responsive)

    def get_user_videos(self, user: str) -> Sequence[str]:
        self.queries["user_videos"] += 1
        return self.trace.videos_by_owner.get(user, ())

    def get_video_responses(self, video: str) -> Sequence[tuple[str, str]]:
        self.queries["video_responses"] += 1
        self._video(video)
        return tuple((r.response_video, r.responder) for r in self.trace.by_parent.get(video, ()))

    def get_video_page(self, video: str) -> VideoPage:
        self.queries["video_page"] += 1
        meta = self._video(video)
        parent = self.trace.parent_of.get(video)
        return VideoPage(
            video_id=video,
            owner=meta.owner,
            parent=parent,
            parent_owner=self.trace.owner(parent) if parent is not None else None,
            responses=tuple((r.response_video, r.responder) for r in self.trace.by_parent.get(video, ())),
        )

    def tag_search(self, word: str) -> Sequence[str]:
        self.queries["tag_search"] += 1
        owners = {self._video(v).owner for v in self.tags.get(word, ())}
        return sorted(owners)


def random_tag_index(trace: InteractionTrace, vocabulary: Sequence[str], per_video: int = 3,
                     seed: int = 0) -> dict[str, list[str]]:
    """Tag every video with ``per_video`` distinct words drawn uniformly from ``vocabulary``."""
    rng = np.random.default_rng(seed)
    k = min(per_video, len(vocabulary))
    picks = rng.integers(0, len(vocabulary), size=(len(trace.videos), k))
    # redraw rows holding a repeated word until every row is distinct
    while True:
        s = np.sort(picks, axis=1)
        bad = np.flatnonzero((s[:, 1:] == s[:, :-1]).any(axis=1))
        if not bad.size:
            break
        picks[bad] = rng.integers(0, len(vocabulary), size=(bad.size, k))
    index: dict[str, list[str]] = {w: [] for w in vocabulary}
    for v, row in zip(trace.videos, picks.tolist()):
        for w in row:
            index[vocabulary[w]].append(v.video_id)
    return index


@dataclass
class CrawlState:
    frontier: deque = field(default_factory=deque)
    visited: set[str] = field(default_factory=set)
    videos: set[str] = field(default_factory=set)
    edges: dict[str, tuple[str, str]] = field(default_factory=dict)  # response video -> (responder, owner)
    queries: int = 0


def crawl(source: DataSource, seeds: Iterable[str]) -> tuple[ResponseGraph, CrawlState]:
    """Breadth-first crawl from ``seeds``; returns the sampled user graph.

    For every user taken from the frontier: fetch the user's info and video
    list; for each video, read its page; enqueue every responder of a
    responded video and the owner of the video a response answers. Users are
    processed once, in first-seen order. The sampled graph has an arc per
    collected response, self-responses included as loops, and its nodes are
    the responded and responsive users reached.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("crawl needs at least one seed")
    state = CrawlState()
    queued: set[str] = set()
    for s in seeds:
        if s not in queued:
            queued.add(s)
            state.frontier.append(s)

    def enqueue(u: str) -> None:
        if u not in queued:
            queued.add(u)
            state.frontier.append(u)

    while state.frontier:
        user = state.frontier.popleft()
        state.visited.add(user)
        source.get_user_info(user)
        videos = source.get_user_videos(user)
        state.queries += 2
        for v in videos:
            page = source.get_video_page(v)
            state.queries += 1
            state.videos.add(v)
            if page.responses:
                for resp_video, responder in page.responses:
                    state.edges[resp_video] = (responder, page.owner)
                    enqueue(responder)
            if page.parent is not None:
                state.edges[v] = (page.owner, page.parent_owner)
                enqueue(page.parent_owner)

    weights: Counter = Counter(state.edges.values())
    nodes = {u for pair in weights for u in pair}
    return ResponseGraph.from_arcs(nodes, ((u, v, w) for (u, v), w in weights.items())), state


def random_seeds(source: DataSource, dictionary: Sequence[str], count: int = 100, seed: int = 0) -> list[str]:
    """Pick ``count`` users uniformly among responded/responsive tag-search hits.

    Words are drawn at random without replacement; the search stops as soon
    as at least ``count`` distinct candidates are known.
    """
    if not dictionary:
        raise ValueError("dictionary is empty")
    rng = np.random.default_rng(seed)
    candidates: set[str] = set()
    checked: dict[str, bool] = {}
    for w in rng.permutation(len(dictionary)).tolist():
        for user in source.tag_search(dictionary[w]):
            if user not in checked:
                info = source.get_user_info(user)
                checked[user] = info.responded or info.responsive
            if checked[user]:
                candidates.add(user)
        if len(candidates) >= count:
            break
    if len(candidates) < count:
        raise ExhaustedDictionary(f"only {len(candidates)} responded/responsive users found, need {count}")
    pool = sorted(candidates)
    return [pool[i] for i in sorted(rng.choice(len(pool), size=count, replace=False).tolist())]


def top_responded_seeds(trace: InteractionTrace, n_videos: int = 100) -> list[str]:
    """Owners of the ``n_videos`` most responded videos (ties by video id)."""
    ranked = sorted(trace.by_parent.items(), key=lambda kv: (-len(kv[1]), kv[0]))[:n_videos]
    return sorted({trace.owner(v) for v, _ in ranked})


@dataclass(frozen=True)
class SamplingReport:
    property1: bool
    violations: tuple[tuple[str, ...], ...]  # sampled components that are not whole truth components
    visited: int
    coverage: float
    top_k: dict[int, float]
    seed_hit_fraction: float | None = None

    def as_dict(self) -> dict:
        d = {
            "visited": self.visited,
            "coverage": self.coverage,
            "property1": self.property1,
            "property1_violations": [list(c) for c in self.violations],
            "property3": {str(k): v for k, v in sorted(self.top_k.items())},
        }
        if self.seed_hit_fraction is not None:
            d["random_seed_hit_fraction"] = self.seed_hit_fraction
        return d


def verify_sampling(sample: ResponseGraph, truth: ResponseGraph, top_k_list: Sequence[int] = (10, 100, 1000),
                    seeds: Sequence[str] | None = None) -> SamplingReport:
    """Check the three sampling properties of a crawl against the full graph.

    Property 1: every weakly connected component of the sample is a whole
    component of the truth. Property 2: ``coverage`` is the share of truth
    nodes in the sample (and, given ``seeds``, the share of those seeds the
    sample contains). Property 3: for each ``k``, the share of the ``k``
    users receiving the most responses (ties by id) found in the sample.
    """
    truth_comp = {}
    for i, comp in enumerate(weak_components(truth)):
        for u in comp:
            truth_comp[u] = i
    comp_size = Counter(truth_comp.values())
    violations = []
    for comp in weak_components(sample):
        ids = {truth_comp.get(u) for u in comp}
        if len(ids) != 1 or None in ids or comp_size[next(iter(ids))] != len(comp):
            violations.append(comp)

    sample_nodes = set(sample.nodes)
    covered = sum(1 for u in truth.nodes if u in sample_nodes)
    deg = degrees(truth)
    ranked = sorted(zip(truth.nodes, deg.w_in.tolist()), key=lambda t: (-t[1], t[0]))
    top_k = {}
    for k in top_k_list:
        head = ranked[:k]
        top_k[k] = sum(1 for u, _ in head if u in sample_nodes) / len(head) if head else 0.0
    hit = None
    if seeds:
        hit = sum(1 for s in seeds if s in sample_nodes) / len(seeds)
    return SamplingReport(
        property1=not violations,
        violations=tuple(violations),
        visited=len(sample_nodes),
        coverage=covered / truth.n_nodes if truth.n_nodes else 1.0,
        top_k=top_k,
        seed_hit_fraction=hit,
    )


def truth_graph(trace: InteractionTrace) -> ResponseGraph:
    """The full graph a crawl of ``trace`` is compared with (self-loops kept)."""
    return build_graph(trace, include_self_loops=True)
