#pragma once
// Functionality-weighted adjacency over one KG's entities.
//
// fun(r)  = #distinct heads of r / #triples of r
// ifun(r) = #distinct tails of r / #triples of r
// a_ij    = sum_{(ei,r,ej) in T} ifun(r) + sum_{(ej,r,ei) in T} fun(r)
// plus a unit self-loop weight on every entity so isolated nodes still
// propagate their own features through GCN layers.

#include <vector>

#include "kgalign/kg.hpp"

namespace kgalign {

struct RelationStats {
  int distinct_heads = 0;
  int distinct_tails = 0;
  int triple_count = 0;
  double fun = 0.0;   // in (0, 1]
  double ifun = 0.0;  // in (0, 1]
};

// Stored as in-edge CSR: row(v) lists (u, a_uv), i.e. the entities whose
// features flow into v, self-loop included. Immutable after construction.
struct WeightedAdjacency {
  int n = 0;
  std::vector<int> indptr;      // size n+1
  std::vector<int> src;         // neighbor ids u, per row v
  std::vector<double> weight;   // a_uv
  std::vector<RelationStats> rel_stats;

  struct Row {
    const int* src;
    const double* weight;
    int len;
  };
  Row row(int v) const {
    return {src.data() + indptr[v], weight.data() + indptr[v], indptr[v + 1] - indptr[v]};
  }
  // In-degree excluding the self-loop entry.
  int degree(int v) const { return indptr[v + 1] - indptr[v] - 1; }
};

WeightedAdjacency build_weighted_adjacency(const KnowledgeGraph& kg);

}  // namespace kgalign
