"""Synthetic interaction traces with known ground truth, and degree-preserving rewiring.

Normal users post a power-law distributed number of responses to videos
picked by a Zipf popularity law; a configured share of those responses go to
the poster's own videos. Spammers post consecutive bursts of responses to a
few videos. Everything is driven by one seeded ``numpy`` generator, so a
config always yields the same trace.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError
from .graph import ResponseGraph
from .ingest import UNKNOWN, InteractionTrace, ResponseRecord, VideoMeta
from .statfit import sample_discrete_power_law

DAY = 86_400

DEFAULT_COUNTRIES = (
    ("US", 0.40), ("GB", 0.12), ("BR", 0.10), ("CA", 0.08), ("DE", 0.08),
    ("MX", 0.06), ("JP", 0.06), ("FR", 0.05), ("AU", 0.05),
)


@dataclass(frozen=True)
class SpammerSpec:
    count: int = 0
    videos_per_spammer: tuple[int, int] = (2, 5)
    responses_per_video: tuple[int, int] = (12, 30)
    # >1 splits each video's responses into that many bursts placed
    # independently among the normal responses
    bursts_per_video: int = 1


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n_users: int = 1000
    n_videos: int = 2000  # videos that can be responded to
    activity_exponent: float = 2.1
    activity_max: int = 1000
    popularity_exponent: float = 1.0
    parent_duration: tuple[float, float] = (1.35, 300.0)  # Weibull (shape, scale) in seconds
    response_duration: tuple[float, float] = (1.15, 200.0)
    self_response_rate: float = 0.25
    locality_rate: float = 0.6
    unknown_country_rate: float = 0.0
    countries: tuple[tuple[str, float], ...] = DEFAULT_COUNTRIES
    spammers: SpammerSpec = field(default_factory=SpammerSpec)
    vri_negative_fraction: float = 0.27
    vri_scale_days: float = 60.0
    start_time: int = 1_136_073_600  # 2006-01-01
    upload_window_days: float = 600.0
    parent_views: tuple[float, float] = (7.6, 2.0)  # lognormal (mu, sigma)
    response_views: tuple[float, float] = (6.2, 2.0)

    def validate(self) -> None:
        for name in ("self_response_rate", "locality_rate", "unknown_country_rate", "vri_negative_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        for name in ("n_users", "n_videos", "activity_max"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.activity_max < 1:
            raise ConfigError("activity_max must be >= 1")
        if self.activity_exponent <= 0 or self.popularity_exponent < 0:
            raise ConfigError("exponents must be positive")
        for name in ("parent_duration", "response_duration"):
            shape, scale = getattr(self, name)
            if shape <= 0 or scale <= 0:
                raise ConfigError(f"{name} needs positive shape and scale")
        if self.vri_scale_days <= 0 or self.upload_window_days < 0:
            raise ConfigError("time scales must be positive")
        if not self.countries or any(w <= 0 for _, w in self.countries):
            raise ConfigError("country pool needs positive weights")
        if len(self.countries) < 2 and self.locality_rate < 1.0:
            raise ConfigError("non-local responses need at least two countries")
        sp = self.spammers
        lo, hi = sp.responses_per_video
        vlo, vhi = sp.videos_per_spammer
        if sp.count < 0 or lo < 1 or hi < lo or vlo < 1 or vhi < vlo or sp.bursts_per_video < 1:
            raise ConfigError("invalid spammer spec")
        if sp.count and vhi > self.n_videos:
            raise ConfigError("spammers need at least videos_per_spammer[1] target videos")
        if self.n_users and self.n_videos == 0:
            raise ConfigError("responses need at least one video to respond to")

    @classmethod
    def from_dict(cls, d: dict) -> "GenConfig":
        d = dict(d)
        if "spammers" in d and isinstance(d["spammers"], dict):
            sp = {k: tuple(v) if isinstance(v, list) else v for k, v in d["spammers"].items()}
            d["spammers"] = SpammerSpec(**sp)
        for key in ("parent_duration", "response_duration", "parent_views", "response_views"):
            if key in d:
                d[key] = tuple(d[key])
        if "countries" in d:
            d["countries"] = tuple((c, float(w)) for c, w in d["countries"])
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GroundTruth:
    roles: dict[str, str]
    response_counts: dict[str, int]  # responses posted per responder
    responses: int
    self_responses: int
    negative_vri: int
    local_responses: int
    locality_denominator: int
    videos: int
    views: int
    response_views: int
    videos_without_response: int
    users: int

    @property
    def spammers(self) -> list[str]:
        return sorted(u for u, r in self.roles.items() if r == "spammer")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _user_ids(prefix: str, n: int) -> list[str]:
    width = max(6, len(str(max(n - 1, 0))))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def _weibull_seconds(rng: np.random.Generator, shape_scale: tuple[float, float], size: int) -> np.ndarray:
    shape, scale = shape_scale
    return np.maximum(1, np.ceil(scale * rng.weibull(shape, size))).astype(np.int64)


def _lognormal_counts(rng: np.random.Generator, mu_sigma: tuple[float, float], size: int) -> np.ndarray:
    mu, sigma = mu_sigma
    return np.floor(rng.lognormal(mu, sigma, size)).astype(np.int64)


def generate(config: GenConfig) -> tuple[InteractionTrace, GroundTruth]:
    config.validate()
    rng = np.random.default_rng(config.seed)
    n_users, n_videos = config.n_users, config.n_videos

    users = _user_ids("u", n_users)
    spammers = _user_ids("s", config.spammers.count) if config.spammers.count else []
    codes = [c for c, _ in config.countries]
    cw = np.array([w for _, w in config.countries], dtype=float)
    cw /= cw.sum()
    home = rng.choice(len(codes), size=n_users, p=cw) if n_users else np.zeros(0, dtype=np.int64)

    # ---- responded-to video pool ---------------------------------------- #
    owner_idx = rng.integers(0, n_users, size=n_videos) if n_users else np.zeros(0, dtype=np.int64)
    pool_country = home[owner_idx] if n_users else np.zeros(n_videos, dtype=np.int64)
    pool_time = config.start_time + np.floor(rng.random(n_videos) * config.upload_window_days * DAY).astype(np.int64)
    pool_duration = _weibull_seconds(rng, config.parent_duration, n_videos)
    pool_views = _lognormal_counts(rng, config.parent_views, n_videos)
    popularity = rng.permutation(n_videos) + 1.0
    pop_w = popularity ** -config.popularity_exponent
    pop_cdf = np.cumsum(pop_w)
    pop_cdf /= pop_cdf[-1] if n_videos else 1.0

    # ---- spammer bursts ------------------------------------------------- #
    sp = config.spammers
    sp_parent, sp_user, sp_key, sp_sub = [], [], [], []
    for s in range(sp.count):
        n_targets = int(rng.integers(sp.videos_per_spammer[0], sp.videos_per_spammer[1] + 1))
        targets: list[int] = []
        while len(targets) < n_targets:
            v = int(np.searchsorted(pop_cdf, rng.random(), side="right"))
            if v not in targets:
                targets.append(v)
        for v in targets:
            m = int(rng.integers(sp.responses_per_video[0], sp.responses_per_video[1] + 1))
            chunks = np.array_split(np.arange(m), min(sp.bursts_per_video, m))
            for chunk in chunks:
                key = rng.random()
                for j in chunk:
                    sp_parent.append(v)
                    sp_user.append(s)
                    sp_key.append(key)
                    sp_sub.append(int(j))

    # ---- normal responses ---------------------------------------------- #
    if n_users:
        activity = sample_discrete_power_law(rng, config.activity_exponent, n_users, 1, config.activity_max)
    else:
        activity = np.zeros(0, dtype=np.int64)
    responder = np.repeat(np.arange(n_users), activity)
    n_normal = responder.size

    owns = np.zeros(n_users, dtype=bool)
    owns[owner_idx] = True
    order_by_owner = np.argsort(owner_idx, kind="stable")
    owner_start = np.searchsorted(owner_idx[order_by_owner], np.arange(n_users + 1))

    eligible = np.flatnonzero(owns[responder]) if n_normal else np.zeros(0, dtype=np.int64)
    # the rate applies to all responses; only normal users self-respond
    n_self = int(round(config.self_response_rate * (n_normal + len(sp_parent))))
    if n_self > eligible.size:
        raise ConfigError(f"{n_self} self-responses requested but only {eligible.size} responses "
                          "come from users owning a video")
    is_self = np.zeros(n_normal, dtype=bool)
    if n_self:
        is_self[rng.choice(eligible, size=n_self, replace=False)] = True

    parent = np.empty(n_normal, dtype=np.int64)
    s_idx = np.flatnonzero(is_self)
    if s_idx.size:
        u = responder[s_idx]
        k = owner_start[u + 1] - owner_start[u]
        pick = owner_start[u] + np.floor(rng.random(s_idx.size) * k).astype(np.int64)
        parent[s_idx] = order_by_owner[pick]
    todo = np.flatnonzero(~is_self)
    for _ in range(1000):
        if not todo.size:
            break
        parent[todo] = np.searchsorted(pop_cdf, rng.random(todo.size), side="right")
        todo = todo[owner_idx[parent[todo]] == responder[todo]]
    if todo.size:
        raise ConfigError("could not place non-self responses; is there more than one video owner?")

    n_spam = len(sp_parent)
    all_parent = np.concatenate([parent, np.array(sp_parent, dtype=np.int64)])
    all_key = np.concatenate([rng.random(n_normal), np.array(sp_key, dtype=float)])
    all_sub = np.concatenate([np.zeros(n_normal, dtype=np.int64), np.array(sp_sub, dtype=np.int64)])
    # responder label index: normal users first, then spammers
    all_resp = np.concatenate([responder, n_users + np.array(sp_user, dtype=np.int64)])
    is_spam = np.concatenate([np.zeros(n_normal, dtype=bool), np.ones(n_spam, dtype=bool)])
    n_resp = n_normal + n_spam

    order = np.lexsort((all_sub, all_key, all_parent))
    all_parent, all_resp, is_spam = all_parent[order], all_resp[order], is_spam[order]
    is_self_all = np.concatenate([is_self, np.zeros(n_spam, dtype=bool)])[order]
    starts = np.flatnonzero(np.r_[True, all_parent[1:] != all_parent[:-1]]) if n_resp else np.zeros(0, dtype=np.int64)
    group_start = np.repeat(starts, np.diff(np.r_[starts, n_resp]))
    position = np.arange(n_resp) - group_start + 1

    # ---- response video attributes ------------------------------------- #
    negative = rng.random(n_resp) < config.vri_negative_fraction
    magnitude = np.maximum(1, np.ceil(rng.exponential(config.vri_scale_days * DAY, n_resp))).astype(np.int64)
    resp_time = pool_time[all_parent] + np.where(negative, -magnitude, magnitude)
    resp_duration = _weibull_seconds(rng, config.response_duration, n_resp)
    resp_views = _lognormal_counts(rng, config.response_views, n_resp)

    parent_c = pool_country[all_parent]
    local = rng.random(n_resp) < config.locality_rate
    # a non-local response gets a country drawn from the pool minus the parent's
    other = rng.choice(len(codes) - 1, size=n_resp, p=None) if len(codes) > 1 else np.zeros(n_resp, dtype=np.int64)
    other = other + (other >= parent_c)
    resp_c = np.where(local, parent_c, other)

    unknown_pool = rng.random(n_videos) < config.unknown_country_rate
    unknown_resp = rng.random(n_resp) < config.unknown_country_rate

    # ---- assemble ------------------------------------------------------- #
    labels = users + spammers
    vw = max(6, len(str(max(n_videos + n_resp - 1, 0))))
    pool_ids = [f"v{i:0{vw}d}" for i in range(n_videos)]
    resp_ids = [f"r{i:0{vw}d}" for i in range(n_resp)]

    videos = [
        VideoMeta(pool_ids[i], users[owner_idx[i]], int(pool_time[i]), int(pool_duration[i]),
                  int(pool_views[i]), UNKNOWN if unknown_pool[i] else codes[pool_country[i]])
        for i in range(n_videos)
    ]
    videos.extend(
        VideoMeta(resp_ids[i], labels[all_resp[i]], int(resp_time[i]), int(resp_duration[i]),
                  int(resp_views[i]), UNKNOWN if unknown_resp[i] else codes[resp_c[i]])
        for i in range(n_resp)
    )
    responses = [
        ResponseRecord(pool_ids[all_parent[i]], resp_ids[i], labels[all_resp[i]], int(position[i]))
        for i in range(n_resp)
    ]
    trace = InteractionTrace(tuple(videos), tuple(responses))

    # ---- bookkeeping ---------------------------------------------------- #
    counted = ~unknown_pool[all_parent] & ~unknown_resp
    per_user = np.bincount(all_resp, minlength=len(labels))
    responded = np.zeros(n_videos, dtype=bool)
    responded[all_parent] = True
    appearing = set(users[i] for i in owner_idx.tolist())
    appearing.update(labels[i] for i in np.unique(all_resp).tolist())
    truth = GroundTruth(
        roles={**{u: "normal" for u in users}, **{s: "spammer" for s in spammers}},
        response_counts={labels[i]: int(c) for i, c in enumerate(per_user) if c},
        responses=n_resp,
        self_responses=int(is_self_all.sum()),
        negative_vri=int(negative.sum()),
        local_responses=int((local & counted).sum()),
        locality_denominator=int(counted.sum()),
        videos=n_videos + n_resp,
        views=int(pool_views.sum() + resp_views.sum()),
        response_views=int(resp_views.sum()),
        videos_without_response=int(n_videos - responded.sum() + n_resp),
        users=len(appearing),
    )
    return trace, truth


# --------------------------------------------------------------------------- #
# degree-preserving rewiring
# --------------------------------------------------------------------------- #
@dataclass(frozen=True, eq=False)
class RewireResult:
    graph: ResponseGraph
    accepted: int
    rejected: int


def configuration_model_rewire(graph: ResponseGraph, seed: int, swaps: int) -> RewireResult:
    """Randomize arcs with directed double-edge swaps.

    Each attempt picks two arcs ``a->b`` and ``c->d`` and replaces them with
    ``a->d`` and ``c->b``, which keeps every node's in- and out-degree. An
    attempt that would create a self-loop or a duplicate arc is skipped and
    counted in ``rejected``. Self-loops already present are left in place;
    arc weights travel with the arc's source.
    """
    if swaps < 1:
        raise ValueError("swaps must be >= 1")
    rng = np.random.default_rng(seed)
    loops = graph.self_loop_mask
    src = graph.src[~loops].tolist()
    dst = graph.dst[~loops].tolist()
    wts = graph.weight[~loops].tolist()
    m = len(src)
    present = set(zip(src, dst))
    accepted = rejected = 0
    if m >= 2:
        picks = rng.integers(0, m, size=(swaps, 2))
        for i, j in picks.tolist():
            a, b, c, d = src[i], dst[i], src[j], dst[j]
            if i == j or a == d or c == b or (a, d) in present or (c, b) in present:
                rejected += 1
                continue
            present.discard((a, b))
            present.discard((c, d))
            present.add((a, d))
            present.add((c, b))
            dst[i], dst[j] = d, b
            accepted += 1
    else:
        rejected = swaps
    nodes = graph.nodes
    arcs = [(nodes[s], nodes[t], w) for s, t, w in zip(src, dst, wts)]
    arcs.extend((nodes[s], nodes[s], w) for s, w in zip(graph.src[loops].tolist(), graph.weight[loops].tolist()))
    return RewireResult(ResponseGraph.from_arcs(nodes, arcs), accepted, rejected)
