#pragma once
// Sparse similarity fusion. Local view: each co-batch's dense dot-product
// block is Sinkhorn-normalized and embedded at global coordinates; the three
// sampler views are summed into M_L. Global view: exact top-K dot-product
// neighbours in both directions, mutual pairs keeping doubled mass (M_G).
// Final matrix: M_F = SpCSLS(M_L + M_G), a sparse-support variant of
// cross-domain similarity local scaling followed by min-max normalization.

#include <vector>

#include "kgalign/mat.hpp"
#include "kgalign/samplers.hpp"
#include "kgalign/sparse.hpp"
#include "kgalign/train.hpp"

namespace kgalign {

struct FusionConfig {
  int sinkhorn_rounds = 100;
  int topk = 50;      // per-direction global k-NN width
  int csls_k = 10;    // neighbourhood size for the CSLS correction terms
  double tau = 0.05;  // Sinkhorn temperature
};

// Dense dot-product similarities between the listed source and target
// entities (ids are per-side). Throws if either list is empty or out of range.
Mat<double> batch_local_sim(const EmbeddingMatrix& f, const std::vector<int>& batch_s,
                            const std::vector<int>& batch_t);

// Exact k-nearest-neighbour selection by dot product: for every row of
// `queries` the min(k, keys.rows()) best rows of `keys`, ties to the lower key
// id. Computed in row blocks so memory stays linear in keys.
SparseSim knn_topk(const Mat<float>& queries, const Mat<float>& keys, int k);

// Sinkhorn-normalizes every batch block and scatters it into one sparse
// matrix. Batches empty on either side contribute nothing. Verifies that no
// two batches produced the same coordinate (labels must partition each side).
SparseSim assemble_local(const BatchAssignment& batches, const EmbeddingMatrix& f,
                         const FusionConfig& cfg);

// M_L = M_C + M_I_st + transpose(M_I_ts), coalesced.
SparseSim fuse_local(const SparseSim& m_c, const SparseSim& m_i_st, const SparseSim& m_i_ts);

// Union of both k-NN directions (k clamped to each side's size); pairs present
// in both directions keep the summed, i.e. doubled, similarity.
SparseSim topk_global(const EmbeddingMatrix& f, int topk);

// On the existing support: value' = 2*value - rS(col) - rT(row), where rT/rS
// are each entity's mean top-csls_k dot-product similarity against the other
// side, then min-max normalized over the support (all-equal input collapses
// to 1.0). Support is preserved exactly, including the entry mapped to 0.
SparseSim sp_csls(const SparseSim& m, const EmbeddingMatrix& f, int csls_k);

// M_F = sp_csls(M_L + M_G); an empty M_G (no entries) is treated as absent.
SparseSim fuse_final(const SparseSim& m_l, const SparseSim& m_g, const EmbeddingMatrix& f,
                     int csls_k);

}  // namespace kgalign
