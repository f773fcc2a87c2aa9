"""``respgraph`` command line: run pipeline stages and write report files.

Every stage writes its files atomically into the output directory and the
run finishes by writing ``run.json`` (config, library versions and a sha256
per output). Nothing time- or path-dependent goes into the outputs, so the
same inputs and flags give byte-identical trees.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy

from . import __version__
from .crawlsim import (TraceSource, crawl, random_seeds, random_tag_index, top_responded_seeds, truth_graph,
                       verify_sampling)
from .errors import RespGraphError, ValidationError
from .export import atomic_write_text, csv_text, json_text
from .graph import (average_distance, build_graph, component_size_rank, degrees, edge_list_rows,
                    scc_decompose, weak_components)
from .ingest import InteractionTrace, load_trace, trace_summary, write_trace
from .netmetrics import assortativity, clustering, in_out_ratio_cdf
from .rankdetect import (combine_reports, flag_inout, flag_ird, flag_powerlaw_outliers, rank_vs_indegree,
                         rank_vs_views, rule_counts, user_rank, user_views)
from .sequences import (behavior_profiles, build_sequences, geo_locality, interaction_profiles,
                        responses_per_responded_user, responses_per_user, responses_per_video,
                        self_response_stats, vri)
from .statfit import ccdf, fit_power_law, fit_weibull, pearson
from .synthgen import GenConfig, configuration_model_rewire, generate

COMMANDS = ("summary", "graph", "metrics", "fit", "sequences", "detect", "generate", "crawlsim", "all")
TRACE_COMMANDS = ("summary", "graph", "metrics", "fit", "sequences", "detect", "crawlsim")


class Outputs:
    """Collects the files of one run; writes are serialized and atomic."""

    def __init__(self, root: Path):
        self.root = root
        self.files: dict[str, str] = {}

    def text(self, name: str, text: str) -> None:
        atomic_write_text(self.root / name, text)
        self.files[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    def csv(self, name: str, header: Sequence[str], rows) -> None:
        self.text(name, csv_text(header, rows))

    def json(self, name: str, obj) -> None:
        self.text(name, json_text(obj))

    def plot(self, name: str, data: str, xlabel: str, ylabel: str, logscale: str = "xy",
             style: str = "points", using: str = "1:2") -> None:
        lines = [
            "set datafile separator ','",
            f"set xlabel '{xlabel}'",
            f"set ylabel '{ylabel}'",
        ]
        if logscale:
            lines.append(f"set logscale {logscale}")
        lines.append(f"plot '{data}' every ::1 using {using} with {style} notitle")
        self.text(name, "\n".join(lines) + "\n")


@dataclass
class Context:
    args: argparse.Namespace
    out: Outputs
    trace: InteractionTrace | None = None
    cache: dict = field(default_factory=dict)

    def graph(self):
        if "graph" not in self.cache:
            self.cache["graph"] = build_graph(self.trace)
        return self.cache["graph"]

    def degrees(self):
        if "degrees" not in self.cache:
            self.cache["degrees"] = degrees(self.graph())
        return self.cache["degrees"]

    def profiles(self):
        if "profiles" not in self.cache:
            self.cache["sequences"] = build_sequences(self.trace)
            self.cache["profiles"] = behavior_profiles(self.trace, self.cache["sequences"])
        return self.cache["profiles"]

    def sequences(self):
        self.profiles()
        return self.cache["sequences"]


def _safe(fn: Callable, *args, **kwargs):
    """Run a statistic that may be undefined on this input; None when it is."""
    try:
        return fn(*args, **kwargs)
    except ValidationError:
        return None


# --------------------------------------------------------------------------- #
# stages
# --------------------------------------------------------------------------- #
def stage_summary(ctx: Context) -> None:
    ctx.out.json("summary.json", trace_summary(ctx.trace).as_dict())


def stage_graph(ctx: Context) -> None:
    g = ctx.graph()
    deg = ctx.degrees()
    out = ctx.out
    out.csv("edges.csv", ("src", "dst", "weight"), edge_list_rows(g))
    out.csv("degrees.csv", ("user", "k_in", "k_out", "w_in", "w_out"),
            zip(g.nodes, deg.k_in.tolist(), deg.k_out.tolist(), deg.w_in.tolist(), deg.w_out.tolist()))
    for name, values in (("in", deg.k_in), ("out", deg.k_out)):
        pts = ccdf(values[values > 0]) if np.any(values > 0) else []
        out.csv(f"degree_ccdf_{name}.csv", ("k", "ccdf"), pts)
    out.plot("degree_ccdf_in.gp", "degree_ccdf_in.csv", "in-degree k", "P(K >= k)")
    out.plot("degree_ccdf_out.gp", "degree_ccdf_out.csv", "out-degree k", "P(K >= k)")

    decomp = scc_decompose(g)
    ctx.cache["decomp"] = decomp
    ranks = component_size_rank(decomp)
    out.csv("component_rank.csv", ("rank", "size"), ranks)
    out.plot("component_rank.gp", "component_rank.csv", "component rank", "size")

    core = decomp.largest_scc_subgraph()
    dist = None
    if core.n_arcs:
        dist = _safe(average_distance, core, ctx.args.distance_samples, seed=ctx.args.seed)
    core_deg = degrees(core)
    out.json("graph.json", {
        "nodes": g.n_nodes,
        "arcs": g.n_arcs,
        "responses": int(g.weight.sum()),
        "degrees": deg.summary(),
        "scc_count": len(decomp.sccs),
        "wcc_count": len(decomp.wccs),
        "largest_scc": {
            "nodes": core.n_nodes,
            "arcs": core.n_arcs,
            "degrees": core_deg.summary(),
            "avg_distance": dist,
            "distance_samples": ctx.args.distance_samples,
        },
    })


def stage_metrics(ctx: Context) -> None:
    g = ctx.graph()
    out = ctx.out
    cc = clustering(g)
    out.csv("clustering.csv", ("node", "cc"), zip(cc.nodes, cc.cc.tolist()))
    out.csv("clustering_by_out_degree.csv", ("k_out", "mean_cc"), sorted(cc.by_out_degree.items()))
    ratios = in_out_ratio_cdf(ctx.degrees())
    out.csv("inout_ratio_cdf.csv", ("ratio", "cdf"), ratios.points)
    out.plot("inout_ratio_cdf.gp", "inout_ratio_cdf.csv", "in/out degree ratio", "CDF", logscale="x",
             style="steps")

    assort = _safe(assortativity, g, ctx.args.assort_source, ctx.args.assort_target)
    metrics = {
        "CC": cc.mean,
        "cc_zero_fraction": cc.zero_fraction,
        "r": assort.r if assort else None,
        "M": assort.m if assort else g.n_arcs,
        "assortativity_degrees": [ctx.args.assort_source, ctx.args.assort_target],
        "inout_ratio_infinite": ratios.infinite,
    }
    if ctx.args.rewire_swaps > 0:
        rw = configuration_model_rewire(g, ctx.args.seed, ctx.args.rewire_swaps)
        metrics["random_baseline"] = {
            "CC": clustering(rw.graph).mean,
            "swaps_accepted": rw.accepted,
            "swaps_rejected": rw.rejected,
        }
    out.json("metrics.json", metrics)


def _power_law_record(samples, args) -> dict | None:
    fit = _safe(fit_power_law, samples, method=args.fit_method, x_min=args.x_min)
    return fit.as_record() if fit else None


def stage_fit(ctx: Context) -> None:
    tr = ctx.trace
    out = ctx.out
    deg = ctx.degrees()
    series = {
        "responses_per_user": list(responses_per_user(tr).values()),
        "responses_per_video": list(responses_per_video(tr).values()),
        "responses_per_responded_user": list(responses_per_responded_user(tr).values()),
        "in_degree": deg.k_in[deg.k_in > 0].tolist(),
        "out_degree": deg.k_out[deg.k_out > 0].tolist(),
    }
    fits: dict = {}
    for name, samples in series.items():
        fits[name] = _power_law_record(samples, ctx.args)
        out.csv(f"ccdf_{name}.csv", ("value", "ccdf"), ccdf(samples) if samples else [])
        out.plot(f"ccdf_{name}.gp", f"ccdf_{name}.csv", name.replace("_", " "), "P(X >= x)")

    responded = set(tr.by_parent)
    is_resp = tr.parent_of
    durations = {
        "responded_video_duration": [v.duration for v in tr.videos if v.video_id in responded and v.duration > 0],
        "response_video_duration": [v.duration for v in tr.videos if v.video_id in is_resp and v.duration > 0],
    }
    for name, samples in durations.items():
        fit = _safe(fit_weibull, samples)
        fits[name] = fit.as_record() if fit else None
        out.csv(f"ccdf_{name}.csv", ("value", "ccdf"), ccdf(samples) if samples else [])

    # responses vs views, per responded video and per responded user
    per_video = responses_per_video(tr)
    corr = {
        "responses_vs_views_video": _safe(pearson, list(per_video.values()),
                                          [tr.video(v).views for v in per_video]),
    }
    dur_pairs = [(tr.video(r.parent_video).duration, tr.video(r.response_video).duration) for r in tr.responses]
    if dur_pairs:
        a, b = zip(*dur_pairs)
        corr["parent_vs_response_duration"] = _safe(pearson, a, b)
    views = user_views(tr)
    per_user = responses_per_responded_user(tr)
    corr["responses_vs_views_user"] = _safe(pearson, list(per_user.values()), [views.get(u, 0) for u in per_user])
    fits["correlations"] = {k: (c.as_record() if c else None) for k, c in corr.items()}
    out.json("fits.json", fits)


def stage_sequences(ctx: Context) -> None:
    tr = ctx.trace
    out = ctx.out
    profiles = ctx.profiles()
    inter = interaction_profiles(ctx.sequences().values())
    out.csv("us_ratio.csv", ("video", "unique_users", "sequences", "ratio"),
            ((p.video, p.unique_users, p.sequences, p.ratio) for p in inter))
    out.csv("user_behavior.csv", ("user", "avg_ird", "avg_resp_per_video", "total_responses"),
            ((p.user, p.avg_ird, p.avg_responses_per_video, p.total_responses) for p in profiles.values()))
    out.csv("ird_scatter.csv", ("avg_resp_per_video", "avg_ird"),
            ((p.avg_responses_per_video, p.avg_ird) for p in profiles.values() if p.avg_ird is not None))
    out.plot("ird_scatter.gp", "ird_scatter.csv", "average responses per video", "average IRD")

    loc = geo_locality(tr)
    out.csv("locality.csv", ("video", "local_pct"), ((v, 100.0 * f) for v, f in loc.per_video.items()))
    intervals = vri(tr)
    out.csv("vri_histogram.csv", ("day", "count"), intervals.histogram_days(ctx.args.vri_bin_days))
    out.plot("vri_histogram.gp", "vri_histogram.csv", "VRI (days)", "responses", logscale="y", style="boxes")
    selfs = self_response_stats(tr)
    ratios = np.array([p.ratio for p in inter]) if inter else np.array([])
    out.json("sequences.json", {
        "self_responses": {
            "fraction_self": selfs.fraction_self,
            "fraction_videos_with_self": selfs.fraction_videos_with_self,
            "fraction_videos_only_self": selfs.fraction_videos_only_self,
            "self_responses": selfs.self_responses,
            "responses": selfs.responses,
        },
        "vri": {
            "n": int(intervals.intervals.size),
            "skipped": intervals.skipped,
            "fraction_negative": intervals.fraction_negative,
            "fraction_within_month": intervals.fraction_within_month,
            "fraction_ge_100_days": intervals.fraction_ge_100_days,
        },
        "locality": {
            "videos": len(loc.per_video),
            "fraction_above_half": loc.fraction_above(0.5),
            "skipped_unknown_owner": loc.skipped_unknown_owner,
            "skipped_no_known_responder": loc.skipped_no_known_responder,
        },
        "us_ratio": {
            "videos": len(inter),
            "mean": float(ratios.mean()) if ratios.size else None,
            "fraction_equal_one": float(np.mean(ratios == 1.0)) if ratios.size else None,
        },
    })


def stage_detect(ctx: Context) -> None:
    tr = ctx.trace
    args = ctx.args
    out = ctx.out
    g = ctx.graph()
    deg = ctx.degrees()
    rank = user_rank(g, damping=args.damping, tol=args.rank_tol, weighted=not args.unweighted_rank)
    scores = rank.as_dict()
    out.csv("rank.csv", ("user", "score"), zip(rank.nodes, rank.scores.tolist()))
    out.csv("userrank_ccdf.csv", ("score", "ccdf"), ccdf(rank.scores))
    out.plot("userrank_ccdf.gp", "userrank_ccdf.csv", "UserRank", "P(X >= x)")
    views = user_views(tr)
    out.csv("rank_views.csv", ("user_rank", "views"), ((scores[u], views.get(u, 0)) for u in rank.nodes))
    out.plot("rank_views.gp", "rank_views.csv", "UserRank", "total views")

    profiles = ctx.profiles()
    reports = [flag_ird(profiles, ird_max=args.ird_max, resp_min=args.resp_min),
               flag_inout(deg, ratio_min=args.ratio_min, min_out=args.min_out)]
    counts = responses_per_user(tr)
    fit = _safe(fit_power_law, list(counts.values()), method=args.fit_method, x_min=args.x_min)
    outlier_note = None
    if fit is None:
        outlier_note = "power-law fit undefined"
    elif len(counts) < 20:
        outlier_note = "fewer than 20 users"
    else:
        reports.append(flag_powerlaw_outliers(counts, fit, k=args.outlier_k, multiple=args.outlier_mult))
    merged = combine_reports(*reports)

    rows = []
    for u, rep in merged.items():
        v = rep.values
        rows.append((u, ";".join(sorted(rep.rules)), v.get("avg_ird"), v.get("avg_resp_per_video"),
                     v.get("out_in_ratio"), scores.get(u)))
    out.csv("flags.csv", ("user", "rules", "avg_ird", "avg_resp_per_video", "out_in_ratio", "user_rank"), rows)

    c_views = _safe(rank_vs_views, rank, tr)
    c_indeg = _safe(rank_vs_indegree, rank, deg)
    out.json("detect.json", {
        "rule_counts": rule_counts(merged),
        "thresholds": {"ird_max": args.ird_max, "resp_min": args.resp_min, "ratio_min": args.ratio_min,
                       "min_out": args.min_out, "outlier_k": args.outlier_k, "outlier_mult": args.outlier_mult},
        "outlier_fit": fit.as_record() if fit else None,
        "outlier_skipped": outlier_note,
        "user_rank": {"damping": rank.damping, "iterations": rank.iterations, "residual": rank.residual,
                      "converged": rank.converged, "weighted": not args.unweighted_rank},
        "rank_vs_views": c_views.as_record() if c_views else None,
        "rank_vs_indegree": c_indeg.as_record() if c_indeg else None,
    })


def stage_crawlsim(ctx: Context) -> None:
    args = ctx.args
    tr = ctx.trace
    vocabulary = [f"w{i:04d}" for i in range(args.vocab_size)]
    if args.crawl_seeds == "top":
        source = TraceSource(tr)
        seeds = top_responded_seeds(tr, args.n_seeds)
    else:
        source = TraceSource(tr, random_tag_index(tr, vocabulary, per_video=args.tags_per_video, seed=args.seed))
        seeds = random_seeds(source, vocabulary, count=args.n_seeds, seed=args.seed)
    if not seeds:
        raise ValidationError("trace has no responded videos to seed the crawl")
    sample, state = crawl(source, seeds)
    truth = truth_graph(tr)
    report = verify_sampling(sample, truth, args.top_k, seeds=seeds)
    body = report.as_dict()
    body["queries"] = state.queries
    body["seeds"] = len(seeds)
    body["seed_mode"] = args.crawl_seeds
    body["truth_nodes"] = truth.n_nodes
    body["truth_wcc_count"] = len(weak_components(truth))
    ctx.out.json("crawl_report.json", body)


def stage_generate(ctx: Context) -> None:
    args = ctx.args
    cfg = {}
    if args.config:
        import json
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from None
    cfg["seed"] = args.seed
    for key in ("n_users", "n_videos"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    config = GenConfig.from_dict(cfg)
    if args.spammers is not None:
        config = GenConfig.from_dict({**config.to_dict(), "spammers": {**config.to_dict()["spammers"],
                                                                       "count": args.spammers}})
    trace, truth = generate(config)
    root = ctx.out.root
    if args.format == "jsonl":
        write_trace(trace, root / "trace.jsonl", "jsonl")
        written = ["trace.jsonl"]
    else:
        write_trace(trace, root, "csv")
        written = ["videos.csv", "responses.csv"]
    for name in written:
        ctx.out.files[name] = hashlib.sha256((root / name).read_bytes()).hexdigest()
    ctx.out.text("ground_truth.json", truth.to_json())
    ctx.out.json("gen_config.json", config.to_dict())


STAGES: dict[str, Callable[[Context], None]] = {
    "summary": stage_summary,
    "graph": stage_graph,
    "metrics": stage_metrics,
    "fit": stage_fit,
    "sequences": stage_sequences,
    "detect": stage_detect,
    "crawlsim": stage_crawlsim,
    "generate": stage_generate,
}
ALL_ORDER = ("summary", "graph", "metrics", "fit", "sequences", "detect", "crawlsim")


# --------------------------------------------------------------------------- #
# argument parsing
# --------------------------------------------------------------------------- #
class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    io = common.add_argument_group("input/output")
    io.add_argument("--trace", help="trace directory (csv) or .jsonl file")
    io.add_argument("--format", choices=("csv", "jsonl"), help="trace format (default: inferred; generate: csv)")
    io.add_argument("--out", help="output directory (default: $RESPGRAPH_OUT)")
    io.add_argument("--seed", type=int, default=0, help="seed for every randomized step (default 0)")
    io.add_argument("--paper-mode", action="store_true",
                    help="log-log regression fits and the default thresholds, for comparison with published numbers")

    det = common.add_argument_group("detection")
    det.add_argument("--ird-max", type=_positive(float), default=3.0, help="flag when avg IRD < this (default 3)")
    det.add_argument("--resp-min", type=_positive(float), default=10.0,
                     help="flag when avg responses per video > this (default 10)")
    det.add_argument("--ratio-min", type=_positive(float), default=10.0, help="out/in ratio floor (default 10)")
    det.add_argument("--min-out", type=_positive(int), default=20, help="min responses posted for the ratio rule")
    det.add_argument("--outlier-k", type=_positive(int), default=3, help="max power-law outliers flagged")
    det.add_argument("--outlier-mult", type=_positive(float), default=2.0,
                     help="gap must exceed this multiple of the tail spread (default 2)")
    det.add_argument("--damping", type=float, default=0.85, help="UserRank damping factor (default 0.85)")
    det.add_argument("--rank-tol", type=_positive(float), default=1e-12, help="UserRank L1 convergence tolerance")
    det.add_argument("--unweighted-rank", action="store_true", help="ignore response multiplicities in UserRank")

    fit = common.add_argument_group("fitting and metrics")
    fit.add_argument("--fit-method", choices=("mle_discrete", "loglog_ls"), default=None,
                     help="power-law fit method (default mle_discrete; loglog_ls under --paper-mode)")
    fit.add_argument("--x-min", type=_positive(int), default=1, help="lower cutoff for power-law fits")
    fit.add_argument("--distance-samples", type=_positive(int), default=500,
                     help="BFS sources for the average distance estimate (default 500)")
    fit.add_argument("--assort-source", choices=("in", "out"), default="out", help="source-end degree for r")
    fit.add_argument("--assort-target", choices=("in", "out"), default="in", help="target-end degree for r")
    fit.add_argument("--rewire-swaps", type=int, default=0,
                     help="double-edge swaps for the random-graph CC baseline (0 skips it)")
    fit.add_argument("--vri-bin-days", type=_positive(int), default=10, help="VRI histogram bin width in days")

    crawl_g = common.add_argument_group("crawl simulation")
    crawl_g.add_argument("--crawl-seeds", choices=("top", "random"), default="top",
                         help="seed with owners of the most responded videos or by random tag search")
    crawl_g.add_argument("--n-seeds", type=_positive(int), default=100, help="seed count (default 100)")
    crawl_g.add_argument("--vocab-size", type=_positive(int), default=1000, help="synthetic tag dictionary size")
    crawl_g.add_argument("--tags-per-video", type=_positive(int), default=3, help="tags attached to each video")
    crawl_g.add_argument("--top-k", type=_positive(int), nargs="+", default=[10, 100, 1000],
                         help="k values for the top-k capture check")

    gen = common.add_argument_group("generation")
    gen.add_argument("--config", help="JSON file of generator settings")
    gen.add_argument("--n-users", type=int, help="override the number of normal users")
    gen.add_argument("--n-videos", type=int, help="override the number of respondable videos")
    gen.add_argument("--spammers", type=int, help="override the planted spammer count")

    parser = _Parser(prog="respgraph", description="Video-response graph analysis pipeline.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    helps = {
        "summary": "trace totals",
        "graph": "edge list, degrees, components, distances",
        "metrics": "clustering, assortativity, in/out ratio CDF",
        "fit": "power-law and Weibull fits, correlations",
        "sequences": "U/S ratios, IRD, VRI, self-responses, locality",
        "detect": "UserRank and anti-social user flags",
        "generate": "write a synthetic trace and its ground truth",
        "crawlsim": "crawl a trace through the simulated data source",
        "all": "every analysis stage",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def _manifest(args: argparse.Namespace, out: Outputs, stages: Sequence[str]) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "trace")}
    if args.trace:
        config["trace"] = Path(args.trace).name
    return {
        "command": args.command,
        "stages": list(stages),
        "config": config,
        "versions": {"respgraph": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "outputs": dict(sorted(out.files.items())),
    }


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        print("respgraph: error: a command is required", file=sys.stderr)
        return 1
    if args.fit_method is None:
        args.fit_method = "loglog_ls" if args.paper_mode else "mle_discrete"
    if not 0 < args.damping < 1:
        print("respgraph: error: --damping must lie in (0, 1)", file=sys.stderr)
        return 1
    out_dir = args.out or os.environ.get("RESPGRAPH_OUT")
    if not out_dir:
        print("respgraph: error: --out or RESPGRAPH_OUT is required", file=sys.stderr)
        return 1
    stages = ALL_ORDER if args.command == "all" else (args.command,)
    try:
        root = Path(out_dir)
        root.mkdir(parents=True, exist_ok=True)
        ctx = Context(args, Outputs(root))
        if args.command in TRACE_COMMANDS or args.command == "all":
            if not args.trace:
                raise ValidationError(f"{args.command} needs --trace")
            ctx.trace = load_trace(args.trace, args.format)
        for name in stages:
            STAGES[name](ctx)
        atomic_write_text(root / "run.json", json_text(_manifest(args, ctx.out, stages)))
    except (ValidationError, FileNotFoundError, NotADirectoryError) as exc:
        print(f"respgraph: error: {exc}", file=sys.stderr)
        return 1
    except RespGraphError as exc:
        print(f"respgraph: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 2
        print(f"respgraph: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
