#include "kgalign/sampling.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace kgalign {

TrainingBatch sample_training_batch(const AlignmentSet& seed, int n_entities_s,
                                    int n_entities_t, int n_p, int n_n, Rng& rng) {
  if (n_p < 1) throw std::runtime_error("sample_training_batch: n_p must be >= 1");
  if (n_p > seed.size())
    throw std::runtime_error("sample_training_batch: N_p exceeds seed size (" +
                             std::to_string(n_p) + " > " + std::to_string(seed.size()) + ")");
  if (n_n < 0) throw std::runtime_error("sample_training_batch: n_n must be >= 0");

  TrainingBatch batch;
  batch.n_pairs = n_p;
  std::vector<int> pick = sample_without_replacement(seed.size(), n_p, rng);
  std::vector<char> used_s(n_entities_s, 0), used_t(n_entities_t, 0);
  for (int idx : pick) {
    const auto& [s, t] = seed.pairs[idx];
    batch.b_s.push_back(s);
    batch.b_t.push_back(t);
    used_s[s] = 1;
    used_t[t] = 1;
  }

  auto draw_negatives = [&](int n_entities, const std::vector<char>& used,
                            std::vector<int>& out) {
    std::vector<int> pool;
    pool.reserve(n_entities - n_p);
    for (int e = 0; e < n_entities; ++e)
      if (!used[e]) pool.push_back(e);
    const int k = std::min<int>(n_n, static_cast<int>(pool.size()));
    for (int pos : sample_without_replacement(static_cast<int>(pool.size()), k, rng))
      out.push_back(pool[pos]);
  };
  draw_negatives(n_entities_s, used_s, batch.b_s);
  draw_negatives(n_entities_t, used_t, batch.b_t);
  return batch;
}

namespace {

// Position of each value of `sub` inside sorted vector `super`.
std::vector<int> positions_in(const std::vector<int>& sub, const std::vector<int>& super) {
  std::vector<int> pos(sub.size());
  for (size_t i = 0; i < sub.size(); ++i) {
    auto it = std::lower_bound(super.begin(), super.end(), sub[i]);
    pos[i] = static_cast<int>(it - super.begin());
  }
  return pos;
}

}  // namespace

SampledBlock neighborhood_sample(const WeightedAdjacency& adj, const std::vector<int>& targets,
                                 int fanout, int layers, Rng& rng) {
  if (targets.empty()) throw std::runtime_error("neighborhood_sample: empty target list");
  if (fanout < 1) throw std::runtime_error("neighborhood_sample: fanout must be >= 1");
  if (layers < 1) throw std::runtime_error("neighborhood_sample: layers must be >= 1");

  SampledBlock block;
  block.nodes.resize(layers + 1);
  block.adj.resize(layers);
  block.self_pos.resize(layers);

  std::vector<int> frontier = targets;
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
  block.nodes[layers] = frontier;

  // Walk from the output layer toward the input, expanding frontiers.
  for (int k = layers - 1; k >= 0; --k) {
    const std::vector<int>& out = block.nodes[k + 1];
    // kept[i] = (neighbor id, weight) list for out[i]; self-loop always kept.
    std::vector<std::vector<std::pair<int, double>>> kept(out.size());
    std::vector<int> next;
    for (size_t i = 0; i < out.size(); ++i) {
      const int v = out[i];
      auto row = adj.row(v);
      std::vector<int> non_self;
      double self_w = 0.0;
      for (int e = 0; e < row.len; ++e) {
        if (row.src[e] == v)
          self_w = row.weight[e];
        else
          non_self.push_back(e);
      }
      kept[i].emplace_back(v, self_w);
      const int take = std::min<int>(fanout, static_cast<int>(non_self.size()));
      if (take == static_cast<int>(non_self.size())) {
        for (int e : non_self) kept[i].emplace_back(row.src[e], row.weight[e]);
      } else {
        for (int p : sample_without_replacement(static_cast<int>(non_self.size()), take, rng)) {
          int e = non_self[p];
          kept[i].emplace_back(row.src[e], row.weight[e]);
        }
      }
      for (const auto& [u, w] : kept[i]) next.push_back(u);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    block.nodes[k] = std::move(next);

    BlockCsr& csr = block.adj[k];
    csr.nrows = static_cast<int>(out.size());
    csr.indptr.push_back(0);
    for (size_t i = 0; i < out.size(); ++i) {
      // Sort kept edges by neighbor id so the CSR layout is deterministic
      // regardless of sampling order.
      std::sort(kept[i].begin(), kept[i].end());
      double rowsum = 0.0;
      for (const auto& [u, w] : kept[i]) {
        auto it = std::lower_bound(block.nodes[k].begin(), block.nodes[k].end(), u);
        csr.col.push_back(static_cast<int>(it - block.nodes[k].begin()));
        csr.w.push_back(w);
        rowsum += w;
      }
      csr.indptr.push_back(static_cast<int>(csr.col.size()));
      csr.rowsum.push_back(rowsum);
    }
    block.self_pos[k] = positions_in(out, block.nodes[k]);
  }
  return block;
}

SampledBlock full_block(const WeightedAdjacency& adj, int layers) {
  if (layers < 1) throw std::runtime_error("full_block: layers must be >= 1");
  SampledBlock block;
  block.nodes.assign(layers + 1, {});
  block.adj.resize(layers);
  block.self_pos.resize(layers);

  std::vector<int> all(adj.n);
  for (int v = 0; v < adj.n; ++v) all[v] = v;

  BlockCsr csr;
  csr.nrows = adj.n;
  csr.indptr.assign(adj.indptr.begin(), adj.indptr.end());
  csr.col.assign(adj.src.begin(), adj.src.end());
  csr.w.assign(adj.weight.begin(), adj.weight.end());
  for (int v = 0; v < adj.n; ++v) {
    double s = 0.0;
    for (int e = adj.indptr[v]; e < adj.indptr[v + 1]; ++e) s += adj.weight[e];
    csr.rowsum.push_back(s);
  }

  for (int k = 0; k <= layers; ++k) block.nodes[k] = all;
  for (int k = 0; k < layers; ++k) {
    block.adj[k] = csr;
    block.self_pos[k] = all;
  }
  return block;
}

}  // namespace kgalign
