#pragma once
// Mini-batch samplers: split both entity sets into K co-batches so that
// aligned entities tend to share a batch id. CMCS (cluster seed embeddings,
// classify the rest) and ISCS (partition one side, learn the other) are the
// primary strategies; VPS (uniform random) and METIS-CPS (coupled graph
// partitions) are the baselines they are measured against.

#include <cstdint>
#include <string>
#include <vector>

#include "kgalign/adjacency.hpp"
#include "kgalign/classifier.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/train.hpp"

namespace kgalign {

// One batch id per entity per side; ids lie in 0..K-1 and every entity gets
// exactly one (batches partition each side; a batch may be empty).
struct BatchAssignment {
  int K = 0;
  std::vector<int> source_labels;
  std::vector<int> target_labels;
};

struct PartitionerConfig {
  int K = 10;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-4;
  int gcn_classifier_epochs = 150;
  double gcn_classifier_lr = 0.01;
  int gcn_classifier_hidden = 128;
  double metis_seed_weight = 100.0;  // vertex weight for seed-aligned targets
  ClassifierConfig classifier;       // CMCS per-side classifier
  uint64_t rng_seed = 0;
};

enum class IscsDirection { SourceToTarget, TargetToSource };

// Fraction of reference pairs whose two entities share a batch id.
double overlap(const BatchAssignment& assignment, const AlignmentSet& reference);

// Cluster-Merge-Classify: k-means over the concatenated (per-column
// standardized) seed-pair embeddings fixes one batch id per seed pair; a
// per-side classifier extends the labeling to all remaining entities. Seed
// entities always keep their cluster label, so every seed pair is co-batched.
BatchAssignment cmcs(const EmbeddingMatrix& f, const AlignmentSet& seed, int K,
                     const PartitionerConfig& cfg);

// Isomorphic-Subgraph-Classify: graph-partition one side, copy labels to the
// other side's seed entities, then train a 2-layer GCN node classifier (on
// that side's adjacency, embedding rows as input features) to label the rest.
BatchAssignment iscs(const WeightedAdjacency& adj_s, const WeightedAdjacency& adj_t,
                     const EmbeddingMatrix& f, const AlignmentSet& seed, int K,
                     const PartitionerConfig& cfg, IscsDirection direction);

// Vanilla Partition Sampler: each seed pair lands in one uniform batch (both
// sides), every other entity in an independent uniform batch.
BatchAssignment vps(const AlignmentSet& seed, int n_source, int n_target, int K,
                    uint64_t rng_seed);

// Coupled graph partitions: plain partition of the source side; target side
// partitioned with inflated vertex weights on seed-aligned entities, then
// target part ids matched to source part ids by maximum seed-vote assignment
// and seed entities re-anchored to their partner's label.
BatchAssignment metis_cps(const WeightedAdjacency& adj_s, const WeightedAdjacency& adj_t,
                          const AlignmentSet& seed, int K, const PartitionerConfig& cfg);

// Two-column text per side: "entity-id<TAB>batch-id", one line per entity.
void save_assignment(const BatchAssignment& a, const std::string& path_s,
                     const std::string& path_t);
BatchAssignment load_assignment(const std::string& path_s, const std::string& path_t);

}  // namespace kgalign
