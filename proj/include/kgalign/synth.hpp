#pragma once
// Synthetic twin-KG benchmark generator.
//
// A base multigraph with a heavy-tailed degree distribution (preferential
// attachment) is copied twice; each copy independently drops edges and remaps
// relation labels, then shuffles entity ids. Ground truth is the identity
// alignment on the base entities, expressed in each side's shuffled id space.

#include <cstdint>
#include <utility>

#include "kgalign/kg.hpp"

namespace kgalign {

struct SyntheticSpec {
  int n_entities = 5000;
  int n_relations = 20;
  double avg_degree = 6.0;          // average total (in+out) degree of the base graph
  double edge_dropout = 0.15;       // per-side probability of dropping each base triple
  double relation_remap_prob = 0.1; // per-side probability of rewriting a triple's relation
  uint64_t rng_seed = 0;
};

struct SyntheticBenchmark {
  KnowledgeGraph kg_s;
  KnowledgeGraph kg_t;
  AlignmentSet alignment;  // identity on base entities; |pairs| == n_entities
};

// Deterministic in spec.rng_seed. Warns on stderr (and proceeds) if the base
// graph comes out disconnected.
SyntheticBenchmark generate_synthetic(const SyntheticSpec& spec);

}  // namespace kgalign
