#include "kgalign/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "kgalign/adam.hpp"
#include "kgalign/loss.hpp"
#include "kgalign/sampling.hpp"

namespace kgalign {

namespace {

constexpr uint64_t kSeedInit = 0xE0;
constexpr uint64_t kSeedBatches = 0xE1;

std::vector<int> positions_in_sorted(const std::vector<int>& values,
                                     const std::vector<int>& sorted) {
  std::vector<int> pos(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), values[i]);
    pos[i] = static_cast<int>(it - sorted.begin());
  }
  return pos;
}

// Forward both sides on one tape and return the 1x1 NHSM loss id. Outputs are
// reordered so rows follow the batch's entity order (positives first).
template <class T>
int batch_loss(Tape<T>& tape, const ModelLeaves& leaves, const GcnModel<T>& model,
               const SampledBlock& block_s, const SampledBlock& block_t,
               const TrainingBatch& batch, int n_source, T gamma, T lambda) {
  int hs = tape.gather_rows(block_forward(tape, leaves, model, block_s, 0),
                            positions_in_sorted(batch.b_s, block_s.out_nodes()));
  int ht = tape.gather_rows(block_forward(tape, leaves, model, block_t, n_source),
                            positions_in_sorted(batch.b_t, block_t.out_nodes()));
  return nhsm_loss(tape, hs, ht, batch.n_pairs, gamma, lambda);
}

template <class T>
GcnModel<T> init_model(int n_total, const TrainConfig& cfg) {
  Rng rng(derive_seed(cfg.rng_seed, kSeedInit));
  return GcnModel<T>::glorot(n_total, cfg.dim, cfg.layers, rng);
}

}  // namespace

Mat<float> EmbeddingMatrix::source_block() const {
  Mat<float> out(n_source, f.cols());
  std::copy(f.data(), f.data() + out.size(), out.data());
  return out;
}

Mat<float> EmbeddingMatrix::target_block() const {
  Mat<float> out(n_target(), f.cols());
  std::copy(f.row(n_source), f.row(n_source) + out.size(), out.data());
  return out;
}

void save_embeddings(const EmbeddingMatrix& emb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const char magic[8] = {'K', 'G', 'A', 'L', 'E', 'M', 'B', '1'};
  uint64_t rows = emb.f.rows(), dim = emb.f.cols(), ns = emb.n_source;
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&dim), 8);
  out.write(reinterpret_cast<const char*>(&ns), 8);
  out.write(reinterpret_cast<const char*>(emb.f.data()),
            static_cast<std::streamsize>(emb.f.size() * sizeof(float)));
  if (!out) throw std::runtime_error("short write to " + path);

  std::ofstream ids(path + ".ids.txt");
  if (!ids) throw std::runtime_error("cannot write " + path + ".ids.txt");
  for (int r = 0; r < emb.f.rows(); ++r) {
    const bool src = r < emb.n_source;
    ids << r << "\t" << (src ? "s" : "t") << "\t" << (src ? r : r - emb.n_source) << "\n";
  }
}

EmbeddingMatrix load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  uint64_t rows = 0, dim = 0, ns = 0;
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "KGALEMB1", 8) != 0)
    throw std::runtime_error(path + ": not an embedding file (bad magic)");
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&dim), 8);
  in.read(reinterpret_cast<char*>(&ns), 8);
  if (!in || ns > rows) throw std::runtime_error(path + ": corrupt embedding header");
  EmbeddingMatrix emb;
  emb.n_source = static_cast<int>(ns);
  emb.f = Mat<float>(static_cast<int>(rows), static_cast<int>(dim));
  in.read(reinterpret_cast<char*>(emb.f.data()),
          static_cast<std::streamsize>(emb.f.size() * sizeof(float)));
  if (!in) throw std::runtime_error(path + ": truncated embedding data");
  return emb;
}

EmbeddingMatrix train_embeddings(const WeightedAdjacency& adj_s, const WeightedAdjacency& adj_t,
                                 const AlignmentSet& seed, const TrainConfig& cfg,
                                 std::vector<double>* epoch_losses) {
  if (seed.size() == 0) throw std::runtime_error("train_embeddings: empty seed alignment");
  if (cfg.dim < 1 || cfg.layers < 1 || cfg.fanout < 1)
    throw std::runtime_error("train_embeddings: dim, layers, fanout must be >= 1");
  if (!(cfg.lambda > 0.0)) throw std::runtime_error("train_embeddings: lambda must be > 0");
  if (cfg.n_p > seed.size())
    throw std::runtime_error("train_embeddings: N_p exceeds seed size (" +
                             std::to_string(cfg.n_p) + " > " + std::to_string(seed.size()) +
                             ")");

  const int n_s = adj_s.n, n_t = adj_t.n;
  GcnModel<float> model = init_model<float>(n_s + n_t, cfg);

  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  AdamState<float> emb_state(model.emb);
  std::vector<AdamState<float>> w_states, b_states;
  for (int k = 0; k < cfg.layers; ++k) {
    w_states.emplace_back(model.w[k]);
    b_states.emplace_back(model.b[k]);
  }

  Rng rng(derive_seed(cfg.rng_seed, kSeedBatches));
  const int steps_per_epoch = (seed.size() + cfg.n_p - 1) / cfg.n_p;
  int t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (int step = 0; step < steps_per_epoch; ++step) {
      TrainingBatch batch = sample_training_batch(seed, n_s, n_t, cfg.n_p, cfg.n_n, rng);
      SampledBlock block_s = neighborhood_sample(adj_s, batch.b_s, cfg.fanout, cfg.layers, rng);
      SampledBlock block_t = neighborhood_sample(adj_t, batch.b_t, cfg.fanout, cfg.layers, rng);

      Tape<float> tape;
      ModelLeaves leaves = bind_model(tape, model);
      int loss = batch_loss(tape, leaves, model, block_s, block_t, batch, n_s,
                            static_cast<float>(cfg.gamma), static_cast<float>(cfg.lambda));
      const double loss_value = tape.val(loss)(0, 0);
      if (!std::isfinite(loss_value))
        throw std::runtime_error(
            "train_embeddings: loss became non-finite at epoch " + std::to_string(epoch) +
            " step " + std::to_string(step) + " (lr=" + std::to_string(cfg.lr) +
            ", lambda=" + std::to_string(cfg.lambda) + "); lower lr or lambda");
      epoch_loss += loss_value;

      tape.backward(loss);
      ++t;
      emb_state.step(model.emb, tape.grad(leaves.emb), adam_cfg, t);
      for (int k = 0; k < cfg.layers; ++k) {
        w_states[k].step(model.w[k], tape.grad(leaves.w[k]), adam_cfg, t);
        b_states[k].step(model.b[k], tape.grad(leaves.b[k]), adam_cfg, t);
      }
    }
    if (epoch_losses) epoch_losses->push_back(epoch_loss / steps_per_epoch);
  }

  // Full-graph inference removes sampling noise from the deliverable rows.
  SampledBlock full_s = full_block(adj_s, cfg.layers);
  SampledBlock full_t = full_block(adj_t, cfg.layers);
  Mat<float> hs = forward_inference(model, full_s, 0);
  Mat<float> ht = forward_inference(model, full_t, n_s);

  EmbeddingMatrix emb;
  emb.n_source = n_s;
  emb.f = Mat<float>(n_s + n_t, cfg.dim);
  std::copy(hs.data(), hs.data() + hs.size(), emb.f.data());
  std::copy(ht.data(), ht.data() + ht.size(), emb.f.row(n_s));
  l2_normalize_rows(emb.f);
  if (!all_finite(emb.f))
    throw std::runtime_error("train_embeddings: non-finite embedding after inference");
  return emb;
}

double gradient_check(const WeightedAdjacency& adj_s, const WeightedAdjacency& adj_t,
                      const AlignmentSet& seed, const TrainConfig& cfg, double epsilon) {
  GcnModel<double> model = init_model<double>(adj_s.n + adj_t.n, cfg);

  Rng rng(derive_seed(cfg.rng_seed, kSeedBatches));
  TrainingBatch batch = sample_training_batch(seed, adj_s.n, adj_t.n, cfg.n_p, cfg.n_n, rng);
  SampledBlock block_s = neighborhood_sample(adj_s, batch.b_s, cfg.fanout, cfg.layers, rng);
  SampledBlock block_t = neighborhood_sample(adj_t, batch.b_t, cfg.fanout, cfg.layers, rng);

  auto loss_of = [&](const GcnModel<double>& m) {
    Tape<double> tape;
    ModelLeaves leaves = bind_model(tape, m);
    return tape.val(batch_loss(tape, leaves, m, block_s, block_t, batch, adj_s.n, cfg.gamma,
                               cfg.lambda))(0, 0);
  };

  Tape<double> tape;
  ModelLeaves leaves = bind_model(tape, model);
  int loss = batch_loss(tape, leaves, model, block_s, block_t, batch, adj_s.n, cfg.gamma,
                        cfg.lambda);
  tape.backward(loss);

  std::vector<std::pair<Mat<double>*, const Mat<double>*>> params;
  params.push_back({&model.emb, &tape.grad(leaves.emb)});
  for (int k = 0; k < cfg.layers; ++k) {
    params.push_back({&model.w[k], &tape.grad(leaves.w[k])});
    params.push_back({&model.b[k], &tape.grad(leaves.b[k])});
  }

  double worst = 0.0;
  for (auto& [param, grad] : params) {
    for (size_t i = 0; i < param->size(); ++i) {
      const double keep = param->data()[i];
      param->data()[i] = keep + epsilon;
      const double up = loss_of(model);
      param->data()[i] = keep - epsilon;
      const double down = loss_of(model);
      param->data()[i] = keep;
      const double fd = (up - down) / (2.0 * epsilon);
      const double an = grad->data()[i];
      const double err = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace kgalign
