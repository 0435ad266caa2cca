#pragma once
// Stochastic Siamese training of the GCN encoder, full-graph inference, and
// the embedding container persisted between pipeline stages.
//
// On disk: magic "KGALEMB1", u64 rows, u64 dim, u64 n_source, then rows*dim
// f32 little-endian values; sidecar "<path>.ids.txt" maps each row to its
// (side, local entity id).

#include <cstdint>
#include <string>
#include <vector>

#include "kgalign/adjacency.hpp"
#include "kgalign/encoder.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/mat.hpp"

namespace kgalign {

struct TrainConfig {
  int dim = 128;
  int layers = 2;
  int fanout = 8;        // F: sampled in-neighbors per node per layer
  int n_p = 2000;        // positive pairs per batch
  int n_n = 4000;        // negative entities per side per batch
  double gamma = 1.0;   // margin
  double lambda = 1.5;  // smoothing factor; soft values keep gradients alive
                        // after the batch ranking is solved, which is what
                        // lets unanchored entities keep improving
  int epochs = 40;
  double lr = 0.02;
  uint64_t rng_seed = 0;
};

// Final inference embeddings for all entities: source rows first (local id ==
// row), then target rows at offset n_source. Rows are L2-normalized, so dot
// products are cosine similarities.
struct EmbeddingMatrix {
  Mat<float> f;
  int n_source = 0;

  int n_target() const { return f.rows() - n_source; }
  const float* source_row(int e) const { return f.row(e); }
  const float* target_row(int e) const { return f.row(n_source + e); }

  // Dense copies of each side's rows.
  Mat<float> source_block() const;
  Mat<float> target_block() const;
};

void save_embeddings(const EmbeddingMatrix& emb, const std::string& path);
EmbeddingMatrix load_embeddings(const std::string& path);

// Runs epochs x ceil(|seed| / n_p) steps of sampled forward / NHSM loss /
// backward / Adam, then a full (non-sampled) inference pass per side.
// Deterministic for a fixed cfg.rng_seed. Throws on NaN loss with a step
// diagnostic. With epochs == 0 the encoder is left at its Glorot
// initialization and only inference runs. If epoch_losses is non-null it
// receives the mean batch loss of each epoch.
EmbeddingMatrix train_embeddings(const WeightedAdjacency& adj_s, const WeightedAdjacency& adj_t,
                                 const AlignmentSet& seed, const TrainConfig& cfg,
                                 std::vector<double>* epoch_losses = nullptr);

// Verification harness: compares reverse-mode gradients of the NHSM loss on a
// sampled block against central finite differences in double precision.
// Returns the max relative error |a-f| / max(|a|, |f|, 1e-6) over every
// parameter of the (small) model.
double gradient_check(const WeightedAdjacency& adj_s, const WeightedAdjacency& adj_t,
                      const AlignmentSet& seed, const TrainConfig& cfg, double epsilon);

}  // namespace kgalign
