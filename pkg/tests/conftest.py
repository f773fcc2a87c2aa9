"""Shared builders for small hand-made traces and graphs."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from respgraph.graph import ResponseGraph
from respgraph.ingest import InteractionTrace, ResponseRecord, VideoMeta


def make_trace(threads: dict[str, tuple[str, list[str]]], extra_videos: dict[str, str] | None = None,
               countries: dict[str, str] | None = None, times: dict[str, int | None] | None = None,
               views: dict[str, int] | None = None) -> InteractionTrace:
    """Build a trace from ``{parent video: (owner, [responder, ...])}``.

    Response videos are named ``<parent>.r<position>`` and owned by their
    responder. ``extra_videos`` maps further video ids to owners.
    """
    countries = countries or {}
    times = times or {}
    views = views or {}
    videos, responses = [], []

    def meta(vid, owner):
        return VideoMeta(vid, owner, times.get(vid, 0), 60, views.get(vid, 1), countries.get(vid, "US"))

    for parent, (owner, responders) in threads.items():
        videos.append(meta(parent, owner))
        for pos, user in enumerate(responders, start=1):
            rid = f"{parent}.r{pos}"
            videos.append(meta(rid, user))
            responses.append(ResponseRecord(parent, rid, user, pos))
    for vid, owner in (extra_videos or {}).items():
        videos.append(meta(vid, owner))
    return InteractionTrace(tuple(videos), tuple(responses))


def random_digraph(rng: np.random.Generator, n: int, p: float, loops: bool = False,
                   max_weight: int = 1) -> ResponseGraph:
    nodes = [f"n{i:02d}" for i in range(n)]
    arcs = []
    for i, j in itertools.product(range(n), repeat=2):
        if (i != j or loops) and rng.random() < p:
            arcs.append((nodes[i], nodes[j], int(rng.integers(1, max_weight + 1))))
    return ResponseGraph.from_arcs(nodes, arcs)


def graph_from(arcs, nodes=None) -> ResponseGraph:
    arcs = [tuple(a) if len(a) == 3 else (a[0], a[1], 1) for a in arcs]
    if nodes is None:
        nodes = {x for a in arcs for x in a[:2]}
    return ResponseGraph.from_arcs(nodes, arcs)


# the seven-response worked example: W owns the video, U1 U2 U3 respond
EXAMPLE_SEQUENCE = ["U1", "U1", "U2", "U1", "U1", "U1", "U3"]


@pytest.fixture
def example_trace() -> InteractionTrace:
    return make_trace({"V": ("W", EXAMPLE_SEQUENCE)})
