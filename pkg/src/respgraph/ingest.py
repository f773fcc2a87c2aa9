"""Trace data model, loaders and writers.

A trace holds two record kinds: video metadata and response records. On
disk it is either a directory with ``videos.csv`` and ``responses.csv`` or a
single JSONL file whose objects carry ``"kind": "video" | "response"``.
"""

from __future__ import annotations

import csv
import json
import os
import re
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

from .errors import IntegrityError, ParseError

UNKNOWN = "UNKNOWN"

VIDEO_FIELDS = ("video_id", "owner", "upload_time", "duration_s", "views", "country")
RESPONSE_FIELDS = ("parent_video", "response_video", "responder", "position")

_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")


@dataclass(frozen=True, slots=True)
class VideoMeta:
    video_id: str
    owner: str
    upload_time: int | None
    duration: int
    views: int
    country: str = UNKNOWN


@dataclass(frozen=True, slots=True)
class ResponseRecord:
    parent_video: str
    response_video: str
    responder: str
    position: int


@dataclass(frozen=True)
class SummaryStats:
    videos: int = 0
    responses: int = 0
    views: int = 0
    response_views: int = 0
    videos_without_response: int = 0
    users: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "videos": self.videos,
            "responses": self.responses,
            "views": self.views,
            "response_views": self.response_views,
            "videos_without_response": self.videos_without_response,
            "users": self.users,
        }


@dataclass(frozen=True, eq=False)
class InteractionTrace:
    """Validated, immutable set of videos and responses.

    Records are stored in canonical order (videos by id, responses by parent
    then position), so two traces holding the same records compare equal no
    matter how their input rows were ordered.
    """

    videos: tuple[VideoMeta, ...] = ()
    responses: tuple[ResponseRecord, ...] = ()
    _index: dict[str, VideoMeta] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        videos = tuple(sorted(self.videos, key=lambda v: v.video_id))
        responses = tuple(sorted(self.responses, key=lambda r: (r.parent_video, r.position)))
        object.__setattr__(self, "videos", videos)
        object.__setattr__(self, "responses", responses)
        object.__setattr__(self, "_index", _validate(videos, responses))

    def __eq__(self, other):
        if not isinstance(other, InteractionTrace):
            return NotImplemented
        return self.videos == other.videos and self.responses == other.responses

    __hash__ = None  # type: ignore[assignment]

    def video(self, video_id: str) -> VideoMeta:
        return self._index[video_id]

    def owner(self, video_id: str) -> str:
        return self._index[video_id].owner

    @cached_property
    def by_parent(self) -> dict[str, tuple[ResponseRecord, ...]]:
        """Responses grouped per responded video, in position order."""
        groups: dict[str, list[ResponseRecord]] = defaultdict(list)
        for r in self.responses:
            groups[r.parent_video].append(r)
        return {k: tuple(v) for k, v in groups.items()}

    @cached_property
    def videos_by_owner(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = defaultdict(list)
        for v in self.videos:
            out[v.owner].append(v.video_id)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def users(self) -> tuple[str, ...]:
        """Every user appearing as a video owner or a responder."""
        names = {v.owner for v in self.videos}
        names.update(r.responder for r in self.responses)
        return tuple(sorted(names))

    @cached_property
    def parent_of(self) -> dict[str, str]:
        """Map from response video id to the video it responds to."""
        return {r.response_video: r.parent_video for r in self.responses}


def _validate(videos: tuple[VideoMeta, ...], responses: tuple[ResponseRecord, ...]) -> dict[str, VideoMeta]:
    index: dict[str, VideoMeta] = {}
    for v in videos:
        if v.video_id in index:
            raise IntegrityError("duplicate video_id", repr(v.video_id))
        if v.duration < 0 or v.views < 0:
            raise IntegrityError("non-negative duration/views", repr(v.video_id))
        index[v.video_id] = v

    positions: dict[str, list[int]] = defaultdict(list)
    for r in responses:
        if r.parent_video not in index:
            raise IntegrityError("dangling video reference", f"parent_video {r.parent_video!r} not in videos")
        if r.response_video not in index:
            raise IntegrityError("dangling video reference", f"response_video {r.response_video!r} not in videos")
        if r.parent_video == r.response_video:
            raise IntegrityError("self-referencing response", repr(r.parent_video))
        positions[r.parent_video].append(r.position)

    # responses arrive sorted by (parent, position)
    for parent, pos in positions.items():
        if pos != list(range(1, len(pos) + 1)):
            seen = set()
            for p in pos:
                if p in seen:
                    raise IntegrityError("duplicate position", f"{parent!r} position {p}")
                seen.add(p)
            raise IntegrityError("position gap", f"{parent!r} positions {sorted(pos)} are not 1..{len(pos)}")
    return index


# --------------------------------------------------------------------------- #
# summary
# --------------------------------------------------------------------------- #
def trace_summary(trace: InteractionTrace) -> SummaryStats:
    responded = {r.parent_video for r in trace.responses}
    response_videos = {r.response_video for r in trace.responses}
    return SummaryStats(
        videos=len(trace.videos),
        responses=len(trace.responses),
        views=sum(v.views for v in trace.videos),
        response_views=sum(trace.video(v).views for v in response_videos),
        videos_without_response=len(trace.videos) - len(responded),
        users=len(trace.users),
    )


# --------------------------------------------------------------------------- #
# parsing
# --------------------------------------------------------------------------- #
def _int_field(value, name: str, line: int, path: str, *, allow_empty: bool = False,
               non_negative: bool = False) -> int | None:
    if value is None or (isinstance(value, str) and value.strip() == ""):
        if allow_empty:
            return None
        raise ParseError(f"missing {name}", line, path)
    if isinstance(value, bool):
        raise ParseError(f"{name} must be an integer, got {value!r}", line, path)
    if isinstance(value, int):
        out = value
    else:
        try:
            out = int(str(value).strip())
        except ValueError:
            raise ParseError(f"{name} must be an integer, got {value!r}", line, path) from None
    if non_negative and out < 0:
        raise ParseError(f"{name} must be non-negative, got {out}", line, path)
    return out


def _str_field(value, name: str, line: int, path: str) -> str:
    if value is None or not isinstance(value, (str, int)) or str(value).strip() == "":
        raise ParseError(f"missing {name}", line, path)
    return str(value).strip()


def _country(value, line: int, path: str) -> str:
    if value is None:
        return UNKNOWN
    code = str(value).strip()
    if code == "" or code == UNKNOWN:
        return UNKNOWN
    if not _COUNTRY_RE.match(code):
        raise ParseError(f"country must be an ISO alpha-2 code or {UNKNOWN}, got {code!r}", line, path)
    return code


def _video_from(row: Mapping, line: int, path: str) -> VideoMeta:
    return VideoMeta(
        video_id=_str_field(row.get("video_id"), "video_id", line, path),
        owner=_str_field(row.get("owner"), "owner", line, path),
        upload_time=_int_field(row.get("upload_time"), "upload_time", line, path, allow_empty=True),
        duration=_int_field(row.get("duration_s"), "duration_s", line, path, non_negative=True),
        views=_int_field(row.get("views"), "views", line, path, non_negative=True),
        country=_country(row.get("country"), line, path),
    )


def _response_from(row: Mapping, line: int, path: str) -> ResponseRecord:
    position = _int_field(row.get("position"), "position", line, path)
    if position < 1:
        raise ParseError(f"position must be >= 1, got {position}", line, path)
    return ResponseRecord(
        parent_video=_str_field(row.get("parent_video"), "parent_video", line, path),
        response_video=_str_field(row.get("response_video"), "response_video", line, path),
        responder=_str_field(row.get("responder"), "responder", line, path),
        position=position,
    )


def _read_csv(path: Path, header: tuple[str, ...], build) -> list:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError("empty file, header expected", 1, str(path)) from None
        if tuple(c.strip() for c in first) != header:
            raise ParseError(f"bad header {first!r}, expected {','.join(header)}", 1, str(path))
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", line, str(path))
            out.append(build(dict(zip(header, row)), line, str(path)))
    return out


def _read_jsonl(path: Path) -> tuple[list[VideoMeta], list[ResponseRecord]]:
    videos, responses = [], []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line_no, str(path)) from None
            if not isinstance(obj, dict):
                raise ParseError("each line must be a JSON object", line_no, str(path))
            kind = obj.get("kind")
            if kind == "video":
                videos.append(_video_from(obj, line_no, str(path)))
            elif kind == "response":
                responses.append(_response_from(obj, line_no, str(path)))
            else:
                raise ParseError(f"kind must be 'video' or 'response', got {kind!r}", line_no, str(path))
    return videos, responses


def load_trace(path: str | os.PathLike, format: str | None = None) -> InteractionTrace:
    """Load and validate a trace.

    ``format`` is ``"csv"`` (``path`` is a directory holding ``videos.csv``
    and ``responses.csv``) or ``"jsonl"``; when omitted it is inferred from
    whether ``path`` is a directory.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.is_dir() else "jsonl"
    if format == "csv":
        if not path.is_dir():
            raise FileNotFoundError(f"{path} is not a directory with videos.csv/responses.csv")
        videos = _read_csv(path / "videos.csv", VIDEO_FIELDS, _video_from)
        responses = _read_csv(path / "responses.csv", RESPONSE_FIELDS, _response_from)
    elif format == "jsonl":
        if not path.is_file():
            raise FileNotFoundError(path)
        videos, responses = _read_jsonl(path)
    else:
        raise ValueError(f"unknown trace format {format!r}")
    return InteractionTrace(tuple(videos), tuple(responses))


# --------------------------------------------------------------------------- #
# writing
# --------------------------------------------------------------------------- #
def _video_row(v: VideoMeta) -> list:
    return [v.video_id, v.owner, "" if v.upload_time is None else v.upload_time, v.duration, v.views, v.country]


def _response_row(r: ResponseRecord) -> list:
    return [r.parent_video, r.response_video, r.responder, r.position]


def iter_csv_lines(header: Iterable[str], rows: Iterable[Iterable]) -> Iterable[str]:
    yield ",".join(header) + "\n"
    for row in rows:
        yield ",".join(str(c) for c in row) + "\n"


def trace_csv_text(trace: InteractionTrace) -> tuple[str, str]:
    """Return the ``videos.csv`` and ``responses.csv`` contents."""
    videos = "".join(iter_csv_lines(VIDEO_FIELDS, (_video_row(v) for v in trace.videos)))
    responses = "".join(iter_csv_lines(RESPONSE_FIELDS, (_response_row(r) for r in trace.responses)))
    return videos, responses


def trace_jsonl_text(trace: InteractionTrace) -> str:
    lines = []
    for v in trace.videos:
        obj = {"kind": "video", **dict(zip(VIDEO_FIELDS, _video_row(v)))}
        if v.upload_time is None:
            obj["upload_time"] = None
        lines.append(json.dumps(obj, separators=(",", ":")))
    for r in trace.responses:
        lines.append(json.dumps({"kind": "response", **dict(zip(RESPONSE_FIELDS, _response_row(r)))},
                                separators=(",", ":")))
    return "\n".join(lines) + ("\n" if lines else "")


def write_trace(trace: InteractionTrace, path: str | os.PathLike, format: str = "csv") -> list[Path]:
    """Serialize ``trace``; returns the files written."""
    from .export import atomic_write_text

    path = Path(path)
    if format == "csv":
        path.mkdir(parents=True, exist_ok=True)
        videos, responses = trace_csv_text(trace)
        atomic_write_text(path / "videos.csv", videos)
        atomic_write_text(path / "responses.csv", responses)
        return [path / "videos.csv", path / "responses.csv"]
    if format == "jsonl":
        path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(path, trace_jsonl_text(trace))
        return [path]
    raise ValueError(f"unknown trace format {format!r}")
