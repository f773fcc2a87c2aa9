import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from respgraph.errors import IntegrityError, ParseError
from respgraph.ingest import (InteractionTrace, ResponseRecord, VideoMeta, load_trace, trace_summary,
                              write_trace)

from conftest import make_trace

VIDEOS_HEADER = "video_id,owner,upload_time,duration_s,views,country\n"
RESPONSES_HEADER = "parent_video,response_video,responder,position\n"


def write_csv_trace(tmp_path, videos: str, responses: str):
    (tmp_path / "videos.csv").write_text(VIDEOS_HEADER + videos)
    (tmp_path / "responses.csv").write_text(RESPONSES_HEADER + responses)
    return tmp_path


def test_load_small_csv(tmp_path):
    write_csv_trace(tmp_path,
                    "v1,a,100,60,10,US\nv2,b,200,30,5,GB\nv3,c,,45,0,UNKNOWN\n",
                    "v1,v2,b,1\nv1,v3,c,2\n")
    tr = load_trace(tmp_path, "csv")
    assert len(tr.videos) == 3
    assert len(tr.responses) == 2
    assert tr.video("v3").upload_time is None
    assert tr.video("v3").country == "UNKNOWN"
    assert [r.responder for r in tr.by_parent["v1"]] == ["b", "c"]


def test_load_infers_format(tmp_path):
    write_csv_trace(tmp_path, "v1,a,1,1,1,US\n", "")
    assert len(load_trace(tmp_path).videos) == 1
    f = tmp_path / "t.jsonl"
    f.write_text(json.dumps({"kind": "video", "video_id": "v1", "owner": "a", "upload_time": 1,
                             "duration_s": 1, "views": 1, "country": "US"}) + "\n")
    assert len(load_trace(f).videos) == 1


def test_dangling_parent_is_integrity_error(tmp_path):
    write_csv_trace(tmp_path, "v2,b,1,1,1,US\n", "v1,v2,b,1\n")
    with pytest.raises(IntegrityError) as exc:
        load_trace(tmp_path)
    assert exc.value.invariant == "dangling video reference"


def test_position_gap_is_integrity_error(tmp_path):
    write_csv_trace(tmp_path, "v1,a,1,1,1,US\nv2,b,1,1,1,US\nv3,c,1,1,1,US\n", "v1,v2,b,1\nv1,v3,c,3\n")
    with pytest.raises(IntegrityError) as exc:
        load_trace(tmp_path)
    assert exc.value.invariant == "position gap"


def test_duplicate_position_and_video_id():
    v = [VideoMeta("v1", "a", 0, 1, 1), VideoMeta("v2", "b", 0, 1, 1), VideoMeta("v3", "c", 0, 1, 1)]
    with pytest.raises(IntegrityError, match="duplicate position"):
        InteractionTrace(tuple(v), (ResponseRecord("v1", "v2", "b", 1), ResponseRecord("v1", "v3", "c", 1)))
    with pytest.raises(IntegrityError, match="duplicate video_id"):
        InteractionTrace((v[0], v[0]), ())


def test_self_referencing_response_rejected():
    v = (VideoMeta("v1", "a", 0, 1, 1),)
    with pytest.raises(IntegrityError, match="self-referencing"):
        InteractionTrace(v, (ResponseRecord("v1", "v1", "a", 1),))


@pytest.mark.parametrize("videos, line", [
    ("v1,a,1,1,1,US\nv2,b,xx,1,1,US\n", 3),
    ("v1,a,1,-4,1,US\n", 2),
    ("v1,a,1,1,1,USA\n", 2),
    ("v1,a,1,1\n", 2),
])
def test_malformed_rows_report_line(tmp_path, videos, line):
    write_csv_trace(tmp_path, videos, "")
    with pytest.raises(ParseError) as exc:
        load_trace(tmp_path)
    assert exc.value.line == line


def test_bad_header(tmp_path):
    (tmp_path / "videos.csv").write_text("id,owner\n")
    (tmp_path / "responses.csv").write_text(RESPONSES_HEADER)
    with pytest.raises(ParseError):
        load_trace(tmp_path)


def test_jsonl_errors(tmp_path):
    f = tmp_path / "t.jsonl"
    f.write_text('{"kind": "video", "video_id": "v1", "owner": "a", "upload_time": 1, '
                 '"duration_s": 1, "views": 1, "country": "US"}\n{not json\n')
    with pytest.raises(ParseError) as exc:
        load_trace(f)
    assert exc.value.line == 2
    f.write_text('{"kind": "comment"}\n')
    with pytest.raises(ParseError, match="kind"):
        load_trace(f)


def test_summary_empty():
    s = trace_summary(InteractionTrace())
    assert s.as_dict() == {"videos": 0, "responses": 0, "views": 0, "response_views": 0,
                           "videos_without_response": 0, "users": 0}


def test_summary_hand_tally():
    tr = make_trace({"p": ("a", ["b"])}, views={"p": 10, "p.r1": 5})
    s = trace_summary(tr)
    assert (s.videos, s.responses, s.views, s.response_views) == (2, 1, 15, 5)
    assert s.videos_without_response == 1
    assert s.users == 2


def test_rows_are_canonicalized():
    tr = make_trace({"p": ("a", ["b", "c", "b"]), "q": ("b", ["a"])})
    shuffled = list(tr.responses)
    random.Random(3).shuffle(shuffled)
    vids = list(tr.videos)
    random.Random(4).shuffle(vids)
    again = InteractionTrace(tuple(vids), tuple(shuffled))
    assert again == tr
    assert trace_summary(again) == trace_summary(tr)


threads = st.dictionaries(
    st.sampled_from([f"v{i}" for i in range(6)]),
    st.tuples(st.sampled_from("abcd"), st.lists(st.sampled_from("abcde"), max_size=6)),
    max_size=4,
)


@settings(max_examples=60, deadline=None)
@given(threads, st.sampled_from(["csv", "jsonl"]))
def test_round_trip(tmp_path_factory, spec, fmt):
    tr = make_trace(spec, countries={k: "UNKNOWN" for k in list(spec)[:1]},
                    times={k: None for k in list(spec)[1:2]})
    base = tmp_path_factory.mktemp("rt")
    target = base / "trace.jsonl" if fmt == "jsonl" else base / "trace"
    write_trace(tr, target, fmt)
    assert load_trace(target, fmt) == tr
