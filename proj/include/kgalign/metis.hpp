#pragma once
// Multilevel k-way graph partitioner: heavy-edge-matching coarsening, greedy
// component-aware initial partition, boundary Kernighan-Lin refinement at
// every level. Objective: minimize edge cut subject to every part's vertex
// weight staying within balance_factor * (total_weight / K).

#include <cstdint>
#include <vector>

#include "kgalign/adjacency.hpp"

namespace kgalign {

// Labels in 0..K-1 for every entity. Directed weights are symmetrized
// (a_uv + a_vu) and self-loops dropped before partitioning. vertex_weights
// (optional, default all 1) steer balance, not cut. Deterministic.
std::vector<int> metis_partition(const WeightedAdjacency& adj, int K,
                                 const std::vector<double>* vertex_weights = nullptr,
                                 double balance_factor = 1.1);

// Sum of symmetrized weights over edges whose endpoints land in different
// parts; the quantity metis_partition minimizes. Exposed for tests and the
// sampler study.
double partition_edge_cut(const WeightedAdjacency& adj, const std::vector<int>& labels);

}  // namespace kgalign
