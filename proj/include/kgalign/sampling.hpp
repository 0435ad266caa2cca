#pragma once
// Mini-batch construction for stochastic GNN training: positive-pair /
// negative-entity batch composition and layered neighborhood sampling.

#include <vector>

#include "kgalign/adjacency.hpp"
#include "kgalign/autodiff.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/rng.hpp"

namespace kgalign {

// Layered computation block produced by neighborhood sampling.
//
//   nodes[0]          input frontier (entity ids of one KG, sorted unique)
//   nodes[k+1]        output frontier of layer k; always a subset of nodes[k]
//                     because the self-loop is kept for every node
//   adj[k]            restricted adjacency: rows follow nodes[k+1], column
//                     indices point into nodes[k]
//   self_pos[k][i]    position of nodes[k+1][i] inside nodes[k] (for the
//                     residual connection)
struct SampledBlock {
  std::vector<std::vector<int>> nodes;
  std::vector<BlockCsr> adj;
  std::vector<std::vector<int>> self_pos;

  int layers() const { return static_cast<int>(adj.size()); }
  const std::vector<int>& out_nodes() const { return nodes.back(); }
  const std::vector<int>& in_nodes() const { return nodes.front(); }
};

// One training batch: aligned positive pairs phi (index-aligned vectors) plus
// negative entities theta drawn from outside the batch on each side.
// B_s = phi_s followed by theta_s; likewise B_t.
struct TrainingBatch {
  std::vector<int> b_s;  // entity ids in kg_s; first n_pairs are positives
  std::vector<int> b_t;  // entity ids in kg_t; first n_pairs are positives
  int n_pairs = 0;       // b_s[i] aligns with b_t[i] for i < n_pairs
};

// Draws n_p aligned seed pairs and min(n_n, available) negatives per side,
// negatives disjoint from the drawn positives. Throws if n_p > |seed|.
TrainingBatch sample_training_batch(const AlignmentSet& seed, int n_entities_s,
                                    int n_entities_t, int n_p, int n_n, Rng& rng);

// Samples a computation block for `targets`: per layer each node keeps its
// self-loop plus at most `fanout` of its non-self in-neighbors, chosen
// uniformly without replacement with weights preserved from adj.
SampledBlock neighborhood_sample(const WeightedAdjacency& adj, const std::vector<int>& targets,
                                 int fanout, int layers, Rng& rng);

// Degenerate block covering every entity with its full neighborhood; used for
// the final non-sampled inference pass.
SampledBlock full_block(const WeightedAdjacency& adj, int layers);

}  // namespace kgalign
