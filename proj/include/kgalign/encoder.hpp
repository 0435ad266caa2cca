#pragma once
// Siamese GCN encoder over the functionality-weighted adjacency.
//
// Layer k:  a_v = weighted mean of sampled in-neighbor features (self-loop
//           included in the neighborhood); h_v' = act(W_k * ((a_v + h_v)/2) + b_k)
// Hidden layers use tanh by default; the output layer is linear so embedding
// dot products keep their full dynamic range. Both KGs share one parameter set
// and one embedding table (source rows first, then target rows).

#include <string>
#include <vector>

#include "kgalign/autodiff.hpp"
#include "kgalign/mat.hpp"
#include "kgalign/rng.hpp"
#include "kgalign/sampling.hpp"

namespace kgalign {

enum class Activation { Linear, Tanh, Relu };

template <class T>
struct GcnModel {
  int dim = 0;
  Mat<T> emb;              // (n_source + n_target) x dim
  std::vector<Mat<T>> w;   // per layer, dim x dim
  std::vector<Mat<T>> b;   // per layer, 1 x dim
  Activation hidden_act = Activation::Tanh;
  Activation out_act = Activation::Linear;

  int layers() const { return static_cast<int>(w.size()); }

  static GcnModel glorot(int n_total, int dim, int layers, Rng& rng) {
    GcnModel m;
    m.dim = dim;
    m.emb = Mat<T>(n_total, dim);
    glorot_fill(m.emb, n_total, dim, rng);
    for (int k = 0; k < layers; ++k) {
      Mat<T> wk(dim, dim);
      glorot_fill(wk, dim, dim, rng);
      m.w.push_back(std::move(wk));
      m.b.emplace_back(1, dim);
    }
    return m;
  }

  static void glorot_fill(Mat<T>& m, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (size_t i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(u(rng));
  }
};

// Parameter leaves registered on a tape for one training step.
struct ModelLeaves {
  int emb = -1;
  std::vector<int> w;
  std::vector<int> b;
};

template <class T>
ModelLeaves bind_model(Tape<T>& tape, const GcnModel<T>& model) {
  ModelLeaves l;
  l.emb = tape.leaf(model.emb);
  for (int k = 0; k < model.layers(); ++k) {
    l.w.push_back(tape.leaf(model.w[k]));
    l.b.push_back(tape.leaf(model.b[k]));
  }
  return l;
}

template <class T>
int apply_activation(Tape<T>& tape, int x, Activation act) {
  switch (act) {
    case Activation::Linear: return x;
    case Activation::Tanh: return tape.tanh_op(x);
    case Activation::Relu: return tape.relu_op(x);
  }
  throw std::runtime_error("unknown activation");
}

// Forward pass over a sampled block. `id_offset` shifts the block's entity ids
// into rows of the shared embedding table (0 for source, n_source for target).
// Returns the tape id of a matrix whose rows follow block.out_nodes().
template <class T>
int block_forward(Tape<T>& tape, const ModelLeaves& leaves, const GcnModel<T>& model,
                  const SampledBlock& block, int id_offset) {
  std::vector<int> emb_rows;
  emb_rows.reserve(block.in_nodes().size());
  for (int v : block.in_nodes()) emb_rows.push_back(v + id_offset);
  int h = tape.gather_rows(leaves.emb, emb_rows);
  for (int k = 0; k < block.layers(); ++k) {
    int agg = tape.spmm_mean(block.adj[k], h);
    int self = tape.gather_rows(h, block.self_pos[k]);
    int comb = tape.scale(tape.add(agg, self), T(0.5));
    int lin = tape.add_rowvec(tape.matmul_op(comb, leaves.w[k]), leaves.b[k]);
    h = apply_activation(tape, lin,
                         k + 1 == block.layers() ? model.out_act : model.hidden_act);
  }
  return h;
}

// Plain (tape-free) forward used for full-graph inference.
template <class T>
Mat<T> forward_inference(const GcnModel<T>& model, const SampledBlock& block, int id_offset) {
  Tape<T> tape;
  ModelLeaves leaves = bind_model(tape, model);
  return tape.val(block_forward(tape, leaves, model, block, id_offset));
}

}  // namespace kgalign
