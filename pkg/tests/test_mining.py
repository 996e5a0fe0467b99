import math

import numpy as np
import pytest

from probgraph import (CsrGraph, EstimatorKind, SimilarityMeasure,
                       SketchKind, UnsupportedCombinationError,
                       build_sketched_graph, degree_order, doulion_tc,
                       four_clique_count, jarvis_patrick_cluster,
                       link_prediction_eval, make_link_prediction_split,
                       make_provider, reduced_execution_tc, tc_estimate,
                       triangle_count, vertex_similarity)
from tests.conftest import (brute_force_4cliques, brute_force_triangles,
                            complete_graph, cycle_graph, path_graph,
                            random_graph)


def exact_provider(view):
    return make_provider(EstimatorKind.EXACT_MERGE, view=view)


# ---------------------------------------------------------------------------
# triangle counting


def test_tc_small_fixtures():
    assert triangle_count(*_vp(cycle_graph(3))) == 1
    assert triangle_count(*_vp(complete_graph(4))) == 4
    assert triangle_count(*_vp(complete_graph(5))) == 10
    assert triangle_count(*_vp(path_graph(4))) == 0


def _vp(graph):
    view = degree_order(graph)
    return view, exact_provider(view)


def test_tc_brute_force_seeded():
    g = random_graph(12, 0.5, seed=123)
    assert triangle_count(*_vp(g)) == brute_force_triangles(g)


def test_tc_gallop_matches_merge():
    g = random_graph(60, 0.2, seed=5)
    view = degree_order(g)
    merge = triangle_count(view, exact_provider(view))
    gallop = triangle_count(view, make_provider(EstimatorKind.EXACT_GALLOP,
                                                view=view))
    assert merge == gallop


def test_tc_estimate_equals_exact_with_exact_kind():
    g = random_graph(40, 0.25, seed=9)
    view = degree_order(g)
    exact = triangle_count(view, exact_provider(view))
    assert tc_estimate(g, kind=EstimatorKind.EXACT_MERGE) == float(exact)


def test_tc_estimate_trivials():
    g = cycle_graph(3)
    sk = build_sketched_graph(g, SketchKind.ONEHASH, s=1.0, k_override=2,
                              seed=3)
    assert tc_estimate(g, sk, EstimatorKind.ONEHASH) == 1.0  # k >= max degree
    edgeless = CsrGraph.from_edges([], n=5)
    assert tc_estimate(edgeless, kind=EstimatorKind.EXACT_MERGE) == 0.0


def test_tc_exact_recovery_sketch_provider():
    g = random_graph(80, 0.15, seed=31)
    view = degree_order(g)
    exact = triangle_count(view, exact_provider(view))
    kmax = int(g.degrees().max())
    sk = build_sketched_graph(g, SketchKind.ONEHASH, s=1.0, k_override=kmax,
                              seed=8)
    assert tc_estimate(g, sk, EstimatorKind.ONEHASH) == float(exact)


# ---------------------------------------------------------------------------
# 4-clique counting


def test_4clique_small_fixtures():
    assert four_clique_count(*_vp(complete_graph(4))) == 1
    assert four_clique_count(*_vp(complete_graph(5))) == 5
    assert four_clique_count(*_vp(cycle_graph(5))) == 0


def test_4clique_brute_force_seeded():
    g = random_graph(10, 0.6, seed=77)
    assert four_clique_count(*_vp(g)) == brute_force_4cliques(g)


def test_exhaustive_differential_small_graphs():
    # exact TC and 4-clique equal brute force across many small graphs
    for seed in range(40):
        g = random_graph(4 + seed % 9, 0.5, seed=seed)
        view, p = _vp(g)
        assert triangle_count(view, p) == brute_force_triangles(g)
        assert four_clique_count(view, p) == brute_force_4cliques(g)


def test_4clique_sketch_provider_runs():
    g = random_graph(30, 0.4, seed=2)
    view = degree_order(g)
    exact = four_clique_count(view, exact_provider(view))
    sk = build_sketched_graph(g, SketchKind.ONEHASH, s=1.0,
                              k_override=int(g.degrees().max()),
                              source="directed", view=view, seed=5)
    approx = four_clique_count(view, make_provider(EstimatorKind.ONEHASH,
                                                   sketched=sk))
    # directed out-neighborhoods fit within k, so C3 intersections are exact
    assert approx == float(exact)


# ---------------------------------------------------------------------------
# vertex similarity


def _two_paths_graph():
    # N_u = {1, 2}, N_v = {2, 3} with u=0, v=4 via explicit edges
    return CsrGraph.from_edges([(0, 1), (0, 2), (4, 2), (4, 3)], n=5)


def test_similarity_hand_values():
    g = _two_paths_graph()
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    assert vertex_similarity(0, 4, SimilarityMeasure.JACCARD, p, g) \
        == pytest.approx(1 / 3)
    assert vertex_similarity(0, 4, SimilarityMeasure.COMMON_NEIGHBORS, p, g) \
        == 1.0
    assert vertex_similarity(0, 4, SimilarityMeasure.TOTAL_NEIGHBORS, p, g) \
        == 3.0
    assert vertex_similarity(0, 4, SimilarityMeasure.OVERLAP, p, g) \
        == pytest.approx(1 / 2)


def test_similarity_identical_neighborhoods():
    g = CsrGraph.from_edges([(0, 1), (0, 2), (3, 1), (3, 2)], n=4)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    assert vertex_similarity(0, 3, SimilarityMeasure.JACCARD, p, g) == 1.0


def test_similarity_brute_force_all_measures():
    g = random_graph(50, 0.2, seed=11)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    rng = np.random.default_rng(0)
    for _ in range(200):
        u, v = rng.integers(0, g.n, size=2)
        if u == v:
            continue
        common = adj[u] & adj[v]
        du, dv, c = len(adj[u]), len(adj[v]), len(common)
        expect = {
            SimilarityMeasure.JACCARD:
                c / (du + dv - c) if du + dv - c else 0.0,
            SimilarityMeasure.OVERLAP: c / min(du, dv) if min(du, dv) else 0.0,
            SimilarityMeasure.COMMON_NEIGHBORS: float(c),
            SimilarityMeasure.TOTAL_NEIGHBORS: float(du + dv - c),
            SimilarityMeasure.ADAMIC_ADAR:
                sum(1 / math.log(len(adj[w])) for w in common
                    if len(adj[w]) > 1),
            SimilarityMeasure.RESOURCE_ALLOCATION:
                sum(1 / len(adj[w]) for w in common if len(adj[w]) > 0),
        }
        for measure, want in expect.items():
            got = vertex_similarity(int(u), int(v), measure, p, g)
            assert got == pytest.approx(want), (u, v, measure)


def test_similarity_contracts():
    g = _two_paths_graph()
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    with pytest.raises(ValueError):
        vertex_similarity(1, 1, SimilarityMeasure.JACCARD, p, g)
    sk = build_sketched_graph(g, SketchKind.BLOOM, s=1.0, b=1, seed=1)
    bloom = make_provider(EstimatorKind.BF_AND, sketched=sk)
    with pytest.raises(UnsupportedCombinationError):
        vertex_similarity(0, 4, SimilarityMeasure.ADAMIC_ADAR, bloom, g)
    skv = build_sketched_graph(g, SketchKind.KMV, s=1.0, k_override=4, seed=1)
    kmv = make_provider(EstimatorKind.KMV, sketched=skv)
    with pytest.raises(UnsupportedCombinationError):
        vertex_similarity(0, 4, SimilarityMeasure.RESOURCE_ALLOCATION, kmv, g)


def test_similarity_degree_one_common_neighbor_guard():
    # common neighbor of degree 1 cannot happen; degree-2 neighbor works
    g = cycle_graph(4)  # N_0 = {1, 3}, N_2 = {1, 3}, both of degree 2
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    val = vertex_similarity(0, 2, SimilarityMeasure.ADAMIC_ADAR, p, g)
    assert val == pytest.approx(2 / math.log(2))


def test_similarity_minhash_membership_path():
    g = random_graph(40, 0.25, seed=4)
    kmax = int(g.degrees().max())
    sk = build_sketched_graph(g, SketchKind.ONEHASH, s=1.0, k_override=kmax,
                              seed=2)
    mh = make_provider(EstimatorKind.ONEHASH, sketched=sk)
    exact = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    for u, v in ((0, 1), (2, 5), (7, 30)):
        want = vertex_similarity(u, v, SimilarityMeasure.ADAMIC_ADAR, exact, g)
        got = vertex_similarity(u, v, SimilarityMeasure.ADAMIC_ADAR, mh, g)
        assert got == pytest.approx(want)


# ---------------------------------------------------------------------------
# Jarvis-Patrick clustering


def test_jp_triangle_tau_zero():
    g = cycle_graph(3)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    res = jarvis_patrick_cluster(g, p, tau=0)
    assert len(res.kept_edges) == 3
    assert res.cluster_count == 1
    assert res.singleton_count == 0


def test_jp_tau_n_empties_selection():
    g = random_graph(20, 0.4, seed=6)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    res = jarvis_patrick_cluster(g, p, tau=g.n)
    assert len(res.kept_edges) == 0
    assert res.cluster_count == 0
    assert res.singleton_count == g.n


def test_jp_k4_tau_one():
    g = complete_graph(4)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    res = jarvis_patrick_cluster(g, p, tau=1)
    assert len(res.kept_edges) == 6  # each pair shares 2 neighbors
    assert res.cluster_count == 1


def test_jp_threshold_monotonicity():
    g = random_graph(40, 0.3, seed=8)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=g)
    previous = None
    for tau in (0, 1, 2, 3, 5):
        kept = {tuple(e) for e in
                jarvis_patrick_cluster(g, p, tau).kept_edges.tolist()}
        if previous is not None:
            assert kept <= previous
        previous = kept


# ---------------------------------------------------------------------------
# link prediction


def test_lp_empty_removed_set():
    g = random_graph(20, 0.3, seed=3)
    split = make_link_prediction_split(g, 0.0, seed=1)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=split.sparse_graph)
    assert link_prediction_eval(g, split, SimilarityMeasure.COMMON_NEIGHBORS,
                                p, 10) == 0


def test_lp_top_zero():
    g = random_graph(20, 0.3, seed=3)
    split = make_link_prediction_split(g, 0.2, seed=1)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=split.sparse_graph)
    assert link_prediction_eval(g, split, SimilarityMeasure.COMMON_NEIGHBORS,
                                p, 0) == 0


def test_lp_k4_missing_edge_recovered():
    # K4 with one edge removed: the missing pair is the only non-edge and
    # shares two common neighbors, so top-1 recovers it
    g = complete_graph(4)
    from probgraph.mining import LinkPredSplit
    edges = g.edges()
    removed = edges[:1]
    sparse = edges[1:]
    split = LinkPredSplit(CsrGraph.from_edges(sparse, n=4), sparse, removed,
                          fraction=1 / 6, seed=0)
    p = make_provider(EstimatorKind.EXACT_MERGE, graph=split.sparse_graph)
    assert link_prediction_eval(g, split, SimilarityMeasure.COMMON_NEIGHBORS,
                                p, 1) == 1


def test_lp_split_invariants():
    g = random_graph(30, 0.3, seed=12)
    split = make_link_prediction_split(g, 0.25, seed=5)
    assert len(split.edges_sparse) + len(split.edges_removed) == g.m
    removed = {tuple(e) for e in split.edges_removed.tolist()}
    sparse = {tuple(e) for e in split.edges_sparse.tolist()}
    assert removed.isdisjoint(sparse)
    assert removed | sparse == {tuple(e) for e in g.edges().tolist()}
    assert len(split.edges_removed) == round(0.25 * g.m)


# ---------------------------------------------------------------------------
# sampling baselines


def test_doulion_keep_all_is_exact():
    g = complete_graph(6)
    assert doulion_tc(g, 1.0, seed=1) == 20.0


def test_doulion_edgeless():
    g = CsrGraph.from_edges([], n=4)
    assert doulion_tc(g, 0.5, seed=1) == 0.0


def test_doulion_k6_unbiased():
    g = complete_graph(6)
    vals = np.asarray([doulion_tc(g, 0.5, seed=s) for s in range(1000)])
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean() - 20.0) <= 4 * se


def test_reduced_execution_full_fraction_exact():
    g = complete_graph(6)
    view = degree_order(g)
    assert reduced_execution_tc(view, 1.0, seed=1) == 20.0
    with pytest.raises(ValueError):
        reduced_execution_tc(view, 0.0, seed=1)


def test_reduced_execution_k6_unbiased():
    g = complete_graph(6)
    view = degree_order(g)
    vals = np.asarray([reduced_execution_tc(view, 0.5, seed=s)
                       for s in range(1000)])
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean() - 20.0) <= 4 * se


# ---------------------------------------------------------------------------
# thread determinism


def test_thread_determinism_exact_and_estimator():
    g = random_graph(200, 0.08, seed=42)
    view = degree_order(g)
    exact_by_threads = [triangle_count(view, exact_provider(view), threads=t)
                        for t in (1, 2, 4, 8)]
    assert len(set(exact_by_threads)) == 1
    sk = build_sketched_graph(g, SketchKind.BLOOM, s=0.5, b=2, seed=3)
    ests = [tc_estimate(g, sk, EstimatorKind.BF_AND, threads=t)
            for t in (1, 2, 4, 8)]
    ref = ests[0]
    assert all(abs(e - ref) <= 1e-6 * max(1.0, abs(ref)) for e in ests)


def test_provider_pair_matches_pair_many():
    g = random_graph(50, 0.2, seed=14)
    for kind, sk_kind in ((EstimatorKind.BF_AND, SketchKind.BLOOM),
                          (EstimatorKind.BF_L, SketchKind.BLOOM),
                          (EstimatorKind.BF_OR, SketchKind.BLOOM),
                          (EstimatorKind.KHASH, SketchKind.KHASH),
                          (EstimatorKind.ONEHASH, SketchKind.ONEHASH)):
        sk = build_sketched_graph(g, sk_kind, s=0.9, b=2, seed=17)
        p = make_provider(kind, sketched=sk)
        edges = g.edges()[:40]
        batch = p.pair_many(edges[:, 0], edges[:, 1])
        for i, (u, v) in enumerate(edges.tolist()):
            assert batch[i] == pytest.approx(p.pair(u, v), rel=1e-9), kind


def test_tc_estimate_rejects_directed_sketches():
    g = random_graph(20, 0.3, seed=1)
    sk = build_sketched_graph(g, SketchKind.BLOOM, s=0.5, b=1, seed=1,
                              source="directed")
    with pytest.raises(ValueError, match="undirected"):
        tc_estimate(g, sk, EstimatorKind.BF_AND)


def test_build_sketched_graph_rejects_bad_source():
    g = random_graph(10, 0.3, seed=1)
    with pytest.raises(ValueError):
        build_sketched_graph(g, SketchKind.BLOOM, s=0.5, source="sideways")


def test_provider_kind_mismatch_rejected():
    g = random_graph(10, 0.4, seed=2)
    sk = build_sketched_graph(g, SketchKind.KHASH, s=1.0, seed=2)
    with pytest.raises(ValueError):
        make_provider(EstimatorKind.ONEHASH, sketched=sk)
    with pytest.raises(ValueError):
        make_provider(EstimatorKind.BF_AND, sketched=sk)
    with pytest.raises(ValueError):
        make_provider(EstimatorKind.KHASH)


def test_4clique_bloom_provider_nonnegative():
    g = random_graph(40, 0.35, seed=21)
    view = degree_order(g)
    exact = four_clique_count(view, exact_provider(view))
    sk = build_sketched_graph(g, SketchKind.BLOOM, s=0.8, b=2, seed=3,
                              source="directed", view=view)
    approx = four_clique_count(view, make_provider(EstimatorKind.BF_AND,
                                                   sketched=sk))
    assert approx >= 0.0
    assert isinstance(approx, float)
    assert exact >= 0


def test_estimator_symmetry_over_random_pairs():
    rng = np.random.default_rng(3)
    g = random_graph(60, 0.2, seed=33)
    sketches = {
        EstimatorKind.BF_AND: build_sketched_graph(
            g, SketchKind.BLOOM, s=0.6, b=2, seed=4),
        EstimatorKind.KHASH: build_sketched_graph(
            g, SketchKind.KHASH, s=0.6, seed=4),
        EstimatorKind.ONEHASH: build_sketched_graph(
            g, SketchKind.ONEHASH, s=0.6, seed=4),
        EstimatorKind.KMV: build_sketched_graph(
            g, SketchKind.KMV, s=0.6, seed=4),
    }
    for kind, sk in sketches.items():
        p = make_provider(kind, sketched=sk)
        for _ in range(25):
            u, v = (int(x) for x in rng.integers(0, g.n, size=2))
            assert p.pair(u, v) == pytest.approx(p.pair(v, u), rel=1e-12)
            assert p.pair(u, v) >= 0.0


def test_kmv_pair_many_matches_scalar_all_regimes():
    g = random_graph(70, 0.25, seed=9)
    # k=1 (degenerate fallback), small k (order-statistics path),
    # large k (verbatim path)
    for k in (1, 4, 64):
        sk = build_sketched_graph(g, SketchKind.KMV, s=1.0, k_override=k,
                                  seed=6)
        p = make_provider(EstimatorKind.KMV, sketched=sk)
        edges = g.edges()[:60]
        batch = p.pair_many(edges[:, 0], edges[:, 1])
        for i, (u, v) in enumerate(edges.tolist()):
            assert batch[i] == pytest.approx(p.pair(u, v), rel=1e-12), (k, u, v)
