"""probgraph: approximate graph mining with probabilistic neighborhood
sketches (Bloom filters, MinHash, KMV) and exact baselines.

Typical use::

    from probgraph import (CsrGraph, degree_order, build_sketched_graph,
                           make_provider, triangle_count, tc_estimate)

    graph = CsrGraph.from_edges([(0, 1), (1, 2), (2, 0)])
    view = degree_order(graph)
    exact = triangle_count(view, make_provider("exact_merge", view=view))
    sk = build_sketched_graph(graph, "bloom", s=0.25, b=2, seed=42)
    approx = tc_estimate(graph, sk, "bf_and")
"""

from .estimators import (BoundQuery, BoundResult, EstimatorKind,
                         bound_bf_mse, bound_minhash_tail, bound_tc,
                         bound_tc_from_query,
                         est_intersection_bf_and, est_intersection_bf_limit,
                         est_intersection_bf_or, est_intersection_kmv,
                         est_intersection_minhash, est_jaccard_minhash,
                         est_single_delta_class, est_single_swamidass)
from .graphs import (CsrGraph, DegreeStats, DirectedView, ParseError,
                     degree_order, degree_stats, generate_kronecker,
                     load_edge_list, write_edge_list)
from .hashing import (DEFAULT_HASH_SEED, HashFamily, hash_to_bit,
                      hash_to_unit)
from .mining import (ClusterResult, LinkPredSplit, SimilarityMeasure,
                     doulion_tc, four_clique_count, jarvis_patrick_cluster,
                     link_prediction_eval, make_link_prediction_split,
                     reduced_execution_tc, tc_estimate, triangle_count,
                     vertex_similarity)
from .providers import (BloomProvider, ExactProvider, IntersectionProvider,
                        KmvProvider, MinHashProvider,
                        UnsupportedCombinationError, make_provider)
from .setops import (intersect_count, intersect_gallop, intersect_merge,
                     select_strategy)
from .sketches import (BloomSketch, BudgetError, BudgetPlan, KHashSketch,
                       KmvSketch, OneHashSketch, SketchKind, SketchedGraph,
                       build_bloom, build_khash, build_kmv, build_onehash,
                       build_sketched_graph, dump_sketches, load_sketches,
                       plan_budget)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
