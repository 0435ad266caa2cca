#include "kgalign/samplers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kgalign/adam.hpp"
#include "kgalign/autodiff.hpp"
#include "kgalign/encoder.hpp"
#include "kgalign/eval.hpp"
#include "kgalign/kmeans.hpp"
#include "kgalign/metis.hpp"
#include "kgalign/rng.hpp"
#include "kgalign/sampling.hpp"

namespace kgalign {
namespace {

constexpr uint64_t kTagKmeans = 0xC1;
constexpr uint64_t kTagClsSource = 0xC2;
constexpr uint64_t kTagClsTarget = 0xC3;
constexpr uint64_t kTagVps = 0xC4;
constexpr uint64_t kTagIscsS2T = 0xC5;
constexpr uint64_t kTagIscsT2S = 0xC6;

void check_k(int K) {
  if (K < 1) throw std::invalid_argument("sampler: K must be >= 1");
}

void check_seed(const AlignmentSet& seed, int n_s, int n_t) {
  if (seed.pairs.empty()) throw std::invalid_argument("sampler: empty seed alignment");
  for (const auto& [s, t] : seed.pairs) {
    if (s < 0 || s >= n_s || t < 0 || t >= n_t)
      throw std::invalid_argument("sampler: seed pair references an unknown entity");
  }
}

// Per-column mean/sd fitted on the seed rows only; non-seed rows are scaled
// with the same statistics so both populations live in one feature space.
struct ColumnScaler {
  std::vector<double> mean, inv_sd;

  ColumnScaler(const Mat<float>& x, int lo_col, int hi_col,
               const std::vector<int>& fit_rows) {
    const int d = hi_col - lo_col;
    mean.assign(d, 0.0);
    inv_sd.assign(d, 1.0);
    const double n = static_cast<double>(fit_rows.size());
    for (int r : fit_rows)
      for (int j = 0; j < d; ++j) mean[j] += x(r, lo_col + j);
    for (int j = 0; j < d; ++j) mean[j] /= n;
    std::vector<double> var(d, 0.0);
    for (int r : fit_rows)
      for (int j = 0; j < d; ++j) {
        const double c = x(r, lo_col + j) - mean[j];
        var[j] += c * c;
      }
    for (int j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[j] / n);
      inv_sd[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
  }

  void apply_row(const float* src, float* dst, int lo_col) const {
    for (size_t j = 0; j < mean.size(); ++j)
      dst[j] = static_cast<float>((src[lo_col + j] - mean[j]) * inv_sd[j]);
  }
};

// Stacks the scaled feature rows of `ids` (side rows of emb, offset applied).
Mat<float> gather_scaled(const Mat<float>& emb, int row_offset, const std::vector<int>& ids,
                         const ColumnScaler& scaler) {
  Mat<float> out(static_cast<int>(ids.size()), static_cast<int>(scaler.mean.size()));
  for (size_t i = 0; i < ids.size(); ++i)
    scaler.apply_row(emb.row(row_offset + ids[i]), out.row(static_cast<int>(i)), 0);
  return out;
}

void check_assignment_sides(const BatchAssignment& a) {
  for (const std::vector<int>* side : {&a.source_labels, &a.target_labels})
    for (int l : *side)
      if (l < 0 || l >= a.K) throw std::runtime_error("sampler: produced an out-of-range label");
}

// 2-layer GCN node classifier used by ISCS: fixed input features (one
// embedding row per entity), full-graph forward, trained with softmax
// cross-entropy on the seeded entities only.
std::vector<int> gcn_node_classifier(const WeightedAdjacency& adj, const Mat<float>& features,
                                     const std::vector<int>& train_ids,
                                     const std::vector<int>& train_labels, int n_classes,
                                     const PartitionerConfig& cfg, uint64_t rng_seed) {
  if (train_ids.empty()) throw std::runtime_error("iscs: no labeled entities to train on");
  const int d = features.cols();
  const int hidden = cfg.gcn_classifier_hidden;
  Rng rng(rng_seed);
  Mat<float> w1(d, hidden), b1(1, hidden), w2(hidden, n_classes), b2(1, n_classes);
  GcnModel<float>::glorot_fill(w1, d, hidden, rng);
  GcnModel<float>::glorot_fill(w2, hidden, n_classes, rng);

  const SampledBlock block = full_block(adj, 2);
  AdamState<float> aw1(w1), ab1(b1), aw2(w2), ab2(b2);
  AdamConfig acfg;
  acfg.lr = cfg.gcn_classifier_lr;

  auto forward = [&](Tape<float>& tape, int& logits) {
    const int h0 = tape.leaf(features);
    const int lw1 = tape.leaf(w1), lb1 = tape.leaf(b1);
    const int lw2 = tape.leaf(w2), lb2 = tape.leaf(b2);
    int agg = tape.spmm_mean(block.adj[0], h0);
    int comb = tape.scale(tape.add(agg, tape.gather_rows(h0, block.self_pos[0])), 0.5f);
    const int z = tape.tanh_op(tape.add_rowvec(tape.matmul_op(comb, lw1), lb1));
    agg = tape.spmm_mean(block.adj[1], z);
    comb = tape.scale(tape.add(agg, tape.gather_rows(z, block.self_pos[1])), 0.5f);
    logits = tape.add_rowvec(tape.matmul_op(comb, lw2), lb2);
    return std::array<int, 4>{lw1, lb1, lw2, lb2};
  };

  for (int epoch = 0; epoch < cfg.gcn_classifier_epochs; ++epoch) {
    Tape<float> tape;
    int logits = -1;
    const auto leaves = forward(tape, logits);
    const int loss = tape.softmax_xent(logits, train_ids, train_labels);
    tape.backward(loss);
    const int t = epoch + 1;
    aw1.step(w1, tape.grad(leaves[0]), acfg, t);
    ab1.step(b1, tape.grad(leaves[1]), acfg, t);
    aw2.step(w2, tape.grad(leaves[2]), acfg, t);
    ab2.step(b2, tape.grad(leaves[3]), acfg, t);
  }

  Tape<float> tape;
  int logits = -1;
  forward(tape, logits);
  const Mat<float>& out = tape.val(logits);
  std::vector<int> pred(out.rows());
  for (int i = 0; i < out.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < n_classes; ++j)
      if (out(i, j) > out(i, best)) best = j;
    pred[i] = best;
  }
  return pred;
}

}  // namespace

double overlap(const BatchAssignment& assignment, const AlignmentSet& reference) {
  if (reference.pairs.empty()) throw std::invalid_argument("overlap: empty reference alignment");
  check_seed(reference, static_cast<int>(assignment.source_labels.size()),
             static_cast<int>(assignment.target_labels.size()));
  int hit = 0;
  for (const auto& [s, t] : reference.pairs)
    if (assignment.source_labels[s] == assignment.target_labels[t]) ++hit;
  return static_cast<double>(hit) / reference.size();
}

BatchAssignment cmcs(const EmbeddingMatrix& f, const AlignmentSet& seed, int K,
                     const PartitionerConfig& cfg) {
  check_k(K);
  const int n_s = f.n_source, n_t = f.n_target(), d = f.f.cols();
  check_seed(seed, n_s, n_t);
  const int n_seed = seed.size();
  if (K > n_seed) throw std::invalid_argument("cmcs: K exceeds the number of seed pairs");

  // Column statistics come from the seed pairs; each side reuses its half.
  std::vector<int> seed_rows_s, seed_rows_t;
  seed_rows_s.reserve(n_seed);
  seed_rows_t.reserve(n_seed);
  for (const auto& [s, t] : seed.pairs) {
    seed_rows_s.push_back(s);
    seed_rows_t.push_back(n_s + t);
  }
  const ColumnScaler scale_s(f.f, 0, d, seed_rows_s);
  const ColumnScaler scale_t(f.f, 0, d, seed_rows_t);

  Mat<float> pair_x(n_seed, 2 * d);
  for (int i = 0; i < n_seed; ++i) {
    scale_s.apply_row(f.f.row(seed_rows_s[i]), pair_x.row(i), 0);
    scale_t.apply_row(f.f.row(seed_rows_t[i]), pair_x.row(i) + d, 0);
  }

  Rng km_rng(derive_seed(cfg.rng_seed, kTagKmeans));
  const KmeansResult km = kmeans(pair_x, K, cfg.kmeans_max_iter, cfg.kmeans_tol, km_rng);

  BatchAssignment a;
  a.K = K;
  a.source_labels.assign(n_s, -1);
  a.target_labels.assign(n_t, -1);
  for (int i = 0; i < n_seed; ++i) {
    a.source_labels[seed.pairs[i].first] = km.labels[i];
    a.target_labels[seed.pairs[i].second] = km.labels[i];
  }

  auto classify_side = [&](std::vector<int>& labels, int row_offset, const ColumnScaler& scaler,
                           const std::vector<int>& seed_ids, uint64_t tag) {
    std::vector<int> rest;
    for (int e = 0; e < static_cast<int>(labels.size()); ++e)
      if (labels[e] < 0) rest.push_back(e);
    if (rest.empty()) return;
    std::vector<int> train_labels(n_seed);
    for (int i = 0; i < n_seed; ++i) train_labels[i] = km.labels[i];
    Mat<float> train_x = gather_scaled(f.f, 0, seed_ids, scaler);
    Mat<float> rest_x(static_cast<int>(rest.size()), d);
    for (size_t i = 0; i < rest.size(); ++i)
      scaler.apply_row(f.f.row(row_offset + rest[i]), rest_x.row(static_cast<int>(i)), 0);
    ClassifierConfig ccfg = cfg.classifier;
    ccfg.rng_seed = derive_seed(cfg.rng_seed, tag);
    const std::vector<int> pred = train_classifier(train_x, train_labels, K, rest_x, ccfg);
    for (size_t i = 0; i < rest.size(); ++i) labels[rest[i]] = pred[i];
  };
  classify_side(a.source_labels, 0, scale_s, seed_rows_s, kTagClsSource);
  classify_side(a.target_labels, n_s, scale_t, seed_rows_t, kTagClsTarget);
  check_assignment_sides(a);
  return a;
}

BatchAssignment iscs(const WeightedAdjacency& adj_s, const WeightedAdjacency& adj_t,
                     const EmbeddingMatrix& f, const AlignmentSet& seed, int K,
                     const PartitionerConfig& cfg, IscsDirection direction) {
  check_k(K);
  const int n_s = f.n_source, n_t = f.n_target();
  if (adj_s.n != n_s || adj_t.n != n_t)
    throw std::invalid_argument("iscs: adjacency/embedding size mismatch");
  check_seed(seed, n_s, n_t);

  const bool s2t = direction == IscsDirection::SourceToTarget;
  const WeightedAdjacency& part_adj = s2t ? adj_s : adj_t;
  const WeightedAdjacency& learn_adj = s2t ? adj_t : adj_s;
  const int learn_offset = s2t ? n_s : 0;

  std::vector<int> part_labels = metis_partition(part_adj, K);

  // Seed partners on the learned side inherit their partition label and act as
  // the classifier's training set. A pair may map two seeds to one entity only
  // if the alignment is malformed; make_alignment already rejects that.
  std::vector<int> train_ids, train_labels;
  train_ids.reserve(seed.size());
  train_labels.reserve(seed.size());
  std::vector<int> learn_labels(learn_adj.n, -1);
  for (const auto& [s, t] : seed.pairs) {
    const int part_entity = s2t ? s : t;
    const int learn_entity = s2t ? t : s;
    learn_labels[learn_entity] = part_labels[part_entity];
    train_ids.push_back(learn_entity);
    train_labels.push_back(part_labels[part_entity]);
  }

  Mat<float> features(learn_adj.n, f.f.cols());
  for (int e = 0; e < learn_adj.n; ++e) {
    const float* src = f.f.row(learn_offset + e);
    std::copy(src, src + f.f.cols(), features.row(e));
  }
  const uint64_t rng_seed = derive_seed(cfg.rng_seed, s2t ? kTagIscsS2T : kTagIscsT2S);
  const std::vector<int> pred =
      gcn_node_classifier(learn_adj, features, train_ids, train_labels, K, cfg, rng_seed);
  for (int e = 0; e < learn_adj.n; ++e)
    if (learn_labels[e] < 0) learn_labels[e] = pred[e];

  BatchAssignment a;
  a.K = K;
  a.source_labels = s2t ? std::move(part_labels) : std::move(learn_labels);
  a.target_labels = s2t ? std::move(learn_labels) : std::move(part_labels);
  check_assignment_sides(a);
  return a;
}

BatchAssignment vps(const AlignmentSet& seed, int n_source, int n_target, int K,
                    uint64_t rng_seed) {
  check_k(K);
  check_seed(seed, n_source, n_target);
  Rng rng(derive_seed(rng_seed, kTagVps));
  std::uniform_int_distribution<int> pick(0, K - 1);

  BatchAssignment a;
  a.K = K;
  a.source_labels.assign(n_source, -1);
  a.target_labels.assign(n_target, -1);
  for (const auto& [s, t] : seed.pairs) {
    const int b = pick(rng);
    a.source_labels[s] = b;
    a.target_labels[t] = b;
  }
  for (int e = 0; e < n_source; ++e)
    if (a.source_labels[e] < 0) a.source_labels[e] = pick(rng);
  for (int e = 0; e < n_target; ++e)
    if (a.target_labels[e] < 0) a.target_labels[e] = pick(rng);
  return a;
}

BatchAssignment metis_cps(const WeightedAdjacency& adj_s, const WeightedAdjacency& adj_t,
                          const AlignmentSet& seed, int K, const PartitionerConfig& cfg) {
  check_k(K);
  check_seed(seed, adj_s.n, adj_t.n);

  BatchAssignment a;
  a.K = K;
  a.source_labels = metis_partition(adj_s, K);

  std::vector<double> vw(adj_t.n, 1.0);
  for (const auto& [s, t] : seed.pairs) vw[t] = cfg.metis_seed_weight;
  const std::vector<int> tgt_raw = metis_partition(adj_t, K, &vw);

  // Target part ids are arbitrary; rename them by maximizing seed votes with a
  // one-to-one assignment over the K x K contingency table.
  Mat<double> votes(K, K);
  votes.fill(0.0);
  for (const auto& [s, t] : seed.pairs) votes(tgt_raw[t], a.source_labels[s]) += 1.0;
  const std::vector<int> renamed = hungarian(votes);

  a.target_labels.resize(adj_t.n);
  for (int t = 0; t < adj_t.n; ++t) a.target_labels[t] = renamed[tgt_raw[t]];
  // Seeds are anchored outright: the partition vote already paid its weight,
  // and co-batching known pairs is the whole point of the coupling.
  for (const auto& [s, t] : seed.pairs) a.target_labels[t] = a.source_labels[s];
  check_assignment_sides(a);
  return a;
}

void save_assignment(const BatchAssignment& a, const std::string& path_s,
                     const std::string& path_t) {
  check_assignment_sides(a);
  for (const auto& [path, labels] :
       {std::pair<const std::string&, const std::vector<int>&>{path_s, a.source_labels},
        {path_t, a.target_labels}}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_assignment: cannot open " + path);
    for (size_t e = 0; e < labels.size(); ++e) out << e << '\t' << labels[e] << '\n';
    if (!out) throw std::runtime_error("save_assignment: write failed on " + path);
  }
}

BatchAssignment load_assignment(const std::string& path_s, const std::string& path_t) {
  auto load_side = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_assignment: cannot open " + path);
    std::vector<std::pair<long long, int>> rows;
    long long e;
    int b;
    while (in >> e >> b) rows.emplace_back(e, b);
    if (!in.eof()) throw std::runtime_error("load_assignment: malformed line in " + path);
    std::vector<int> labels(rows.size(), -1);
    for (const auto& [id, batch] : rows) {
      if (id < 0 || id >= static_cast<long long>(rows.size()) || labels[id] != -1 || batch < 0)
        throw std::runtime_error("load_assignment: ids must cover 0..n-1 once in " + path);
      labels[id] = batch;
    }
    return labels;
  };
  BatchAssignment a;
  a.source_labels = load_side(path_s);
  a.target_labels = load_side(path_t);
  for (const std::vector<int>* side : {&a.source_labels, &a.target_labels})
    for (int l : *side) a.K = std::max(a.K, l + 1);
  if (a.K == 0) throw std::runtime_error("load_assignment: empty assignment");
  return a;
}

}  // namespace kgalign
