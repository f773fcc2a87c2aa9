"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` (the lines are printed
even without ``-s``) or directly with ``python3 tests/test_acceptance.py``.
"""

import hashlib
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from respgraph.cli import run  # noqa: E402
from respgraph.crawlsim import (TraceSource, crawl, random_seeds, random_tag_index, truth_graph,  # noqa: E402
                                verify_sampling)
from respgraph.graph import ResponseGraph, scc_decompose  # noqa: E402
from respgraph.netmetrics import assortativity, clustering  # noqa: E402
from respgraph.rankdetect import flag_ird, flag_powerlaw_outliers, user_rank  # noqa: E402
from respgraph.sequences import behavior_profiles, build_sequences, ird_gaps, runs_of, us_ratio  # noqa: E402
from respgraph.statfit import fit_power_law, fit_weibull, sample_discrete_power_law, weibull_log_likelihood  # noqa: E402
from respgraph.synthgen import GenConfig, SpammerSpec, configuration_model_rewire, generate  # noqa: E402

from conftest import EXAMPLE_SEQUENCE, graph_from, make_trace, random_digraph  # noqa: E402
from test_graph import mutual_reachability_partition  # noqa: E402
from test_netmetrics import brute_cc, scalar_r  # noqa: E402
from test_rankdetect import dense_pagerank, planted_counts  # noqa: E402
from test_sequences import seq_of  # noqa: E402


def _line(n: int, ok: bool, detail: str) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] AC{n:02d} {detail}"


# --------------------------------------------------------------------------- #
def check_01():
    """Power-law exponent recovery at n=1e5 over 20 seeds."""
    x_max = 10**6
    worst_time = 0.0
    hits = {}
    for alpha in (0.7, 2.1, 2.8):
        good = 0
        for seed in range(20):
            x = sample_discrete_power_law(np.random.default_rng(seed), alpha, 100_000, x_max=x_max)
            t0 = time.perf_counter()
            # exponents at or below 1 need the truncated likelihood
            fit = fit_power_law(x, x_max=x_max if alpha <= 1 else None)
            worst_time = max(worst_time, time.perf_counter() - t0)
            good += abs(fit.alpha - alpha) <= 0.05
        hits[alpha] = good / 20
    ok = all(h >= 0.95 for h in hits.values()) and worst_time < 5
    detail = ", ".join(f"a={a}: {h:.0%}" for a, h in hits.items())
    return ok, f"power-law MLE within 0.05 ({detail}); slowest fit {worst_time:.2f}s"


def check_02():
    """Weibull shape recovery and a flat likelihood at the optimum."""
    errs, grads = [], []
    for i, shape in enumerate((1.15, 1.35)):
        x = 250.0 * np.random.default_rng(i).weibull(shape, 100_000)
        fit = fit_weibull(x)
        errs.append(abs(fit.shape - shape))
        h = 1e-5

        def ll(b, log_l):
            return weibull_log_likelihood(x, b, math.exp(log_l), mean=True)

        log_l = math.log(fit.scale)
        g_shape = (ll(fit.shape + h, log_l) - ll(fit.shape - h, log_l)) / (2 * h)
        g_scale = (ll(fit.shape, log_l + h) - ll(fit.shape, log_l - h)) / (2 * h)
        grads.append(max(abs(g_shape), abs(g_scale)))
    ok = max(errs) <= 0.03 and max(grads) < 1e-6
    return ok, f"Weibull shape error max {max(errs):.4f} (tol 0.03); |grad| max {max(grads):.1e} (tol 1e-6)"


def check_03():
    """UserRank against a dense power-iteration oracle."""
    worst = worst_sum = 0.0
    for seed in range(50):
        rng = np.random.default_rng(1000 + seed)
        g = random_digraph(rng, int(rng.integers(2, 16)), float(rng.uniform(0.1, 0.5)), loops=True, max_weight=3)
        res = user_rank(g)
        worst = max(worst, float(np.abs(res.scores - dense_pagerank(g)).max()))
        worst_sum = max(worst_sum, abs(float(res.scores.sum()) - 1))
    cycles_exact = all(
        all(s == 1.0 / n for s in user_rank(graph_from([(f"{i:02d}", f"{(i + 1) % n:02d}") for i in range(n)]))
            .scores.tolist())
        for n in range(2, 16))
    ok = worst <= 1e-8 and worst_sum <= 1e-9 and cycles_exact
    return ok, f"UserRank max dev {worst:.1e} (tol 1e-8), |sum-1| {worst_sum:.1e}, cycles exactly 1/N: {cycles_exact}"


def check_04():
    """Strong components against the mutual-reachability partition."""
    agree = 0
    for seed in range(200):
        rng = np.random.default_rng(2000 + seed)
        g = random_digraph(rng, int(rng.integers(1, 21)), float(rng.uniform(0.02, 0.4)), loops=True)
        got = {frozenset(c) for c in scc_decompose(g).sccs}
        agree += got == mutual_reachability_partition(g)
    return agree == 200, f"SCC partition equals mutual reachability on {agree}/200 digraphs"


def _planted_triangles() -> ResponseGraph:
    rng = np.random.default_rng(0)
    arcs = []
    for t in range(66):
        a, b, c = (f"n{3 * t + i:03d}" for i in range(3))
        arcs += [(a, b), (b, c), (c, a)]
    arcs += [(f"n{int(rng.integers(198)):03d}", f"x{i}") for i in range(2)]
    return graph_from(arcs)


def check_05():
    """Per-node clustering against neighbor-pair enumeration; rewiring lowers CC."""
    exact = 0
    for seed in range(100):
        rng = np.random.default_rng(3000 + seed)
        g = random_digraph(rng, int(rng.integers(1, 101)), float(rng.uniform(0.01, 0.2)), loops=True)
        res = clustering(g)
        oracle = brute_cc(g)
        exact += all(res.of(u) == oracle[u] for u in g.nodes)
    g = _planted_triangles()
    before = clustering(g).mean
    after = clustering(configuration_model_rewire(g, seed=1, swaps=100_000).graph).mean
    ok = exact == 100 and after < before
    return ok, f"cc exact on {exact}/100 graphs; rewiring CC {before:.3f} -> {after:.3f}"


def check_06():
    """Assortativity against a scalar oracle; regular graphs are undefined."""
    worst, compared = 0.0, 0
    seed = 4000
    while compared < 20:
        rng = np.random.default_rng(seed)
        seed += 1
        g = random_digraph(rng, int(rng.integers(4, 15)), 0.3)
        if g.n_arcs < 2 or scalar_r(g) is None:
            continue
        worst = max(worst, abs(assortativity(g).r - scalar_r(g)))
        compared += 1
    n = 9
    cycle = graph_from([(f"{i}", f"{(i + 1) % n}") for i in range(n)])
    complete = graph_from([(u, v) for u in "abcde" for v in "abcde" if u != v])
    undefined = not assortativity(cycle).defined and not assortativity(complete).defined
    ok = worst <= 1e-12 and undefined
    return ok, f"r max dev {worst:.1e} on 20 digraphs (tol 1e-12); regular graphs undefined: {undefined}"


def check_07():
    """U/S ratio on the worked example and U <= S on random sequences."""
    tr = make_trace({"V": ("W", EXAMPLE_SEQUENCE)})
    ratio = us_ratio(build_sequences(tr)["V"]).ratio
    rng = np.random.default_rng(7)
    holds = 0
    for _ in range(10_000):
        users = [f"u{i}" for i in rng.integers(0, int(rng.integers(1, 8)), size=int(rng.integers(1, 40)))]
        p = us_ratio(seq_of(users))
        holds += p.unique_users <= p.sequences
    ok = ratio == 0.75 and holds == 10_000
    return ok, f"worked example U/S = {ratio} (expect 0.75); U <= S on {holds}/10000 sequences"


def check_08():
    """IRD gaps on the worked example; zero gaps only inside runs."""
    tr = make_trace({"V": ("W", EXAMPLE_SEQUENCE)})
    gaps = ird_gaps(EXAMPLE_SEQUENCE)["U1"]
    avg = behavior_profiles(tr)["U1"].avg_ird
    rng = np.random.default_rng(8)
    holds = 0
    for _ in range(10_000):
        users = [f"u{i}" for i in rng.integers(0, int(rng.integers(1, 6)), size=int(rng.integers(1, 40)))]
        zeros = sum(g.count(0) for g in ird_gaps(users).values())
        holds += zeros == sum(r.length - 1 for r in runs_of(users))
    ok = gaps == [0, 1, 0, 0] and avg == 0.25 and holds == 10_000
    return ok, f"U1 gaps {gaps} avg {avg} (expect 0.25); within-run gaps zero on {holds}/10000 sequences"


def check_09():
    """IRD rule recall/FPR on planted spammers; three planted power-law outliers."""
    recalls, fprs = [], []
    for seed in range(10):
        cfg = GenConfig(seed=seed, n_users=10_000, n_videos=10_000, spammers=SpammerSpec(count=20))
        tr, truth = generate(cfg)
        flagged = {r.user for r in flag_ird(behavior_profiles(tr)) if r.flagged}
        spam = {u for u, role in truth.roles.items() if role == "spammer"}
        normal = [u for u, role in truth.roles.items() if role == "normal"]
        recalls.append(len(flagged & spam) / len(spam))
        fprs.append(len(flagged - spam) / len(normal))
    exact = 0
    for seed in range(10):
        counts = planted_counts(seed)
        fit = fit_power_law(list(counts.values()))
        exact += {r.user for r in flag_powerlaw_outliers(counts, fit) if r.flagged} == {"p0", "p1", "p2"}
    ok = min(recalls) == 1.0 and max(fprs) <= 0.01 and exact == 10
    return ok, (f"IRD rule min recall {min(recalls):.0%}, max FPR {max(fprs):.2%} over 10 seeds; "
                f"3 planted outliers recovered exactly in {exact}/10")


def check_10():
    """Crawler Property 1 and report consistency on random ground truths."""
    violations = mismatches = 0
    vocab = [f"w{i}" for i in range(50)]
    for seed in range(100):
        rng = np.random.default_rng(5000 + seed)
        cfg = GenConfig(seed=seed, n_users=int(rng.integers(30, 400)), n_videos=int(rng.integers(30, 400)),
                        self_response_rate=0.0)
        tr, _ = generate(cfg)
        src = TraceSource(tr, random_tag_index(tr, vocab, seed=seed))
        seeds = random_seeds(src, vocab, count=int(rng.integers(1, 10)), seed=seed)
        sample, _ = crawl(src, seeds)
        truth = truth_graph(tr)
        rep = verify_sampling(sample, truth, (10, 100), seeds=seeds)
        violations += len(rep.violations)
        got = set(sample.nodes)
        w_in = dict.fromkeys(truth.nodes, 0)
        for _, v, w in truth.arcs():
            w_in[v] += w
        ranked = sorted(truth.nodes, key=lambda u: (-w_in[u], u))
        recount = {k: sum(u in got for u in ranked[:k]) / min(k, len(ranked)) for k in (10, 100)}
        mismatches += rep.coverage != len(got) / truth.n_nodes or any(
            not math.isclose(rep.top_k[k], recount[k]) for k in (10, 100))
    ok = violations == 0 and mismatches == 0
    return ok, f"Property 1 violations {violations} over 100 crawls; report/recount mismatches {mismatches}"


def _tree_digest(root: Path) -> dict[str, str]:
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*")) if p.is_file()}


def check_11():
    """`all` twice on a 1e5-user generated trace: identical trees, under 60 s each."""
    with tempfile.TemporaryDirectory() as tmp:
        gen = Path(tmp) / "trace"
        assert run(["generate", "--out", str(gen), "--seed", "11", "--n-users", "100000", "--n-videos", "200000",
                    "--spammers", "20"]) == 0
        times, trees, codes = [], [], []
        for name in ("a", "b"):
            t0 = time.perf_counter()
            codes.append(run(["all", "--trace", str(gen), "--out", str(Path(tmp) / name), "--seed", "1"]))
            times.append(time.perf_counter() - t0)
            trees.append(_tree_digest(Path(tmp) / name))
    same = trees[0] == trees[1]
    ok = codes == [0, 0] and same and max(times) < 60
    return ok, (f"`all` exit codes {codes}; {len(trees[0])} files byte-identical: {same}; "
                f"runtimes {times[0]:.1f}s, {times[1]:.1f}s (limit 60s)")


CHECKS = [check_01, check_02, check_03, check_04, check_05, check_06, check_07, check_08, check_09, check_10,
          check_11]


@pytest.mark.parametrize("n", range(1, len(CHECKS) + 1))
def test_acceptance(n, capsys):
    ok, detail = CHECKS[n - 1]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for i, check in enumerate(CHECKS, start=1):
        ok, detail = check()
        results.append(ok)
        print(_line(i, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
