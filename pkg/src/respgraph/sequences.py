"""Per-video response sequences and the user behavior derived from them."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ingest import UNKNOWN, InteractionTrace
from .netmetrics import empirical_cdf

DAY = 86_400


@dataclass(frozen=True)
class Run:
    """A maximal block of consecutive responses by one user."""

    user: str
    start: int  # 1-based position of the first response in the block
    length: int


@dataclass(frozen=True)
class ResponseSequence:
    video: str
    owner: str
    responses: tuple[tuple[str, str, int], ...]  # (responder, response_video, position)
    runs: tuple[Run, ...]

    @property
    def n(self) -> int:
        return len(self.responses)

    @property
    def responders(self) -> list[str]:
        return [r[0] for r in self.responses]

    @property
    def unique_users(self) -> int:
        return len({r[0] for r in self.responses})


@dataclass(frozen=True)
class InteractionProfile:
    video: str
    unique_users: int
    sequences: int
    ratio: float


@dataclass(frozen=True)
class UserBehaviorProfile:
    user: str
    total_responses: int
    distinct_videos_responded: int
    avg_responses_per_video: float
    ird_gaps: tuple[int, ...]
    avg_ird: float | None
    self_response_count: int = 0
    in_degree: int = 0
    out_degree: int = 0


@dataclass(frozen=True)
class VRIResult:
    response_videos: tuple[str, ...]
    intervals: np.ndarray  # seconds, response upload minus parent upload
    skipped: int

    @property
    def fraction_negative(self) -> float:
        return float(np.mean(self.intervals < 0)) if self.intervals.size else 0.0

    @property
    def fraction_within_month(self) -> float:
        if not self.intervals.size:
            return 0.0
        return float(np.mean((self.intervals >= 0) & (self.intervals <= 30 * DAY)))

    @property
    def fraction_ge_100_days(self) -> float:
        return float(np.mean(self.intervals >= 100 * DAY)) if self.intervals.size else 0.0

    def cdf(self) -> list[tuple[float, float]]:
        return empirical_cdf(self.intervals)

    def histogram_days(self, bin_days: int = 10) -> list[tuple[int, int]]:
        """``(bin start in days, count)`` with ``bin_days``-wide bins."""
        if not self.intervals.size:
            return []
        bins = np.floor_divide(self.intervals, bin_days * DAY)
        values, counts = np.unique(bins, return_counts=True)
        return [(int(v) * bin_days, int(c)) for v, c in zip(values, counts)]


@dataclass(frozen=True)
class SelfResponseStats:
    fraction_self: float
    fraction_videos_with_self: float
    fraction_videos_only_self: float
    self_responses: int = 0
    responses: int = 0
    responded_videos: int = 0


@dataclass(frozen=True)
class LocalityResult:
    per_video: dict[str, float]  # fraction of local responses in [0, 1]
    skipped_unknown_owner: int
    skipped_no_known_responder: int

    def cdf(self) -> list[tuple[float, float]]:
        return empirical_cdf(list(self.per_video.values()))

    def fraction_above(self, threshold: float) -> float:
        vals = np.fromiter(self.per_video.values(), dtype=float)
        return float(np.mean(vals > threshold)) if vals.size else 0.0


# --------------------------------------------------------------------------- #
# sequences and runs
# --------------------------------------------------------------------------- #
def runs_of(users: Sequence[str]) -> list[Run]:
    runs: list[Run] = []
    start = 0
    for i in range(1, len(users) + 1):
        if i == len(users) or users[i] != users[start]:
            runs.append(Run(users[start], start + 1, i - start))
            start = i
    return runs


def build_sequences(trace: InteractionTrace) -> dict[str, ResponseSequence]:
    out = {}
    for video, recs in sorted(trace.by_parent.items()):
        users = [r.responder for r in recs]
        out[video] = ResponseSequence(
            video=video,
            owner=trace.owner(video),
            responses=tuple((r.responder, r.response_video, r.position) for r in recs),
            runs=tuple(runs_of(users)),
        )
    return out


def us_ratio(seq: ResponseSequence) -> InteractionProfile:
    if seq.n < 1:
        raise ValueError(f"video {seq.video!r} has no responses")
    u, s = seq.unique_users, len(seq.runs)
    return InteractionProfile(seq.video, u, s, u / s)


def ird_gaps(users: Sequence[str]) -> dict[str, list[int]]:
    """Responses strictly between consecutive occurrences of each user."""
    last: dict[str, int] = {}
    gaps: dict[str, list[int]] = defaultdict(list)
    for pos, u in enumerate(users):
        if u in last:
            gaps[u].append(pos - last[u] - 1)
        last[u] = pos
    return dict(gaps)


# --------------------------------------------------------------------------- #
# trace-level statistics
# --------------------------------------------------------------------------- #
def vri(trace: InteractionTrace) -> VRIResult:
    ids, values = [], []
    skipped = 0
    for r in trace.responses:
        t_resp = trace.video(r.response_video).upload_time
        t_parent = trace.video(r.parent_video).upload_time
        if t_resp is None or t_parent is None:
            skipped += 1
            continue
        ids.append(r.response_video)
        values.append(t_resp - t_parent)
    return VRIResult(tuple(ids), np.asarray(values, dtype=np.int64), skipped)


def self_response_stats(trace: InteractionTrace) -> SelfResponseStats:
    n_self = 0
    with_self = only_self = 0
    for video, recs in trace.by_parent.items():
        owner = trace.owner(video)
        k = sum(1 for r in recs if r.responder == owner)
        n_self += k
        with_self += k > 0
        only_self += k == len(recs)
    n_resp = len(trace.responses)
    n_vid = len(trace.by_parent)
    return SelfResponseStats(
        fraction_self=n_self / n_resp if n_resp else 0.0,
        fraction_videos_with_self=with_self / n_vid if n_vid else 0.0,
        fraction_videos_only_self=only_self / n_vid if n_vid else 0.0,
        self_responses=n_self,
        responses=n_resp,
        responded_videos=n_vid,
    )


def geo_locality(trace: InteractionTrace) -> LocalityResult:
    """Share of each responded video's responses uploaded from its own country.

    Country is read from the video records: a response counts as local when
    the response video's country equals the responded video's. Responses of
    UNKNOWN country are left out of the denominator; videos whose own country
    is UNKNOWN, or with no known-country response, are skipped and counted.
    """
    per_video: dict[str, float] = {}
    unknown_owner = no_known = 0
    for video, recs in sorted(trace.by_parent.items()):
        home = trace.video(video).country
        if home == UNKNOWN:
            unknown_owner += 1
            continue
        known = local = 0
        for r in recs:
            c = trace.video(r.response_video).country
            if c == UNKNOWN:
                continue
            known += 1
            local += c == home
        if known == 0:
            no_known += 1
            continue
        per_video[video] = local / known
    return LocalityResult(per_video, unknown_owner, no_known)


def behavior_profiles(trace: InteractionTrace,
                      sequences: dict[str, ResponseSequence] | None = None) -> dict[str, UserBehaviorProfile]:
    """Aggregate per responsive user.

    IRD gaps are taken between consecutive responses of the same user within
    one video and pooled over all videos before averaging. Degrees count
    distinct neighbors and include self-responses.
    """
    if sequences is None:
        sequences = build_sequences(trace)
    total: dict[str, int] = defaultdict(int)
    videos: dict[str, int] = defaultdict(int)
    gaps: dict[str, list[int]] = defaultdict(list)
    selfs: dict[str, int] = defaultdict(int)
    outs: dict[str, set[str]] = defaultdict(set)
    ins: dict[str, set[str]] = defaultdict(set)
    for seq in sequences.values():
        users = seq.responders
        for u in set(users):
            videos[u] += 1
            outs[u].add(seq.owner)
            ins[seq.owner].add(u)
        for u in users:
            total[u] += 1
            if u == seq.owner:
                selfs[u] += 1
        for u, g in ird_gaps(users).items():
            gaps[u].extend(g)

    out = {}
    for u in sorted(total):
        g = tuple(gaps.get(u, ()))
        out[u] = UserBehaviorProfile(
            user=u,
            total_responses=total[u],
            distinct_videos_responded=videos[u],
            avg_responses_per_video=total[u] / videos[u],
            ird_gaps=g,
            avg_ird=sum(g) / len(g) if g else None,
            self_response_count=selfs.get(u, 0),
            in_degree=len(ins.get(u, ())),
            out_degree=len(outs[u]),
        )
    return out


def responses_per_user(trace: InteractionTrace) -> dict[str, int]:
    out: dict[str, int] = defaultdict(int)
    for r in trace.responses:
        out[r.responder] += 1
    return dict(sorted(out.items()))


def responses_per_responded_user(trace: InteractionTrace) -> dict[str, int]:
    out: dict[str, int] = defaultdict(int)
    for r in trace.responses:
        out[trace.owner(r.parent_video)] += 1
    return dict(sorted(out.items()))


def responses_per_video(trace: InteractionTrace) -> dict[str, int]:
    return {v: len(recs) for v, recs in sorted(trace.by_parent.items())}


def interaction_profiles(sequences: Iterable[ResponseSequence]) -> list[InteractionProfile]:
    return [us_ratio(s) for s in sequences]
