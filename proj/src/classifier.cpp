#include "kgalign/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kgalign/adam.hpp"

namespace kgalign {

namespace {

int argmax_row(const float* row, int k) {
  int best = 0;
  for (int j = 1; j < k; ++j)
    if (row[j] > row[best]) best = j;
  return best;
}

// Row-wise softmax in place, max-subtracted.
void softmax_rows(Mat<float>& m) {
  for (int i = 0; i < m.rows(); ++i) {
    float* r = m.row(i);
    float mx = r[0];
    for (int j = 1; j < m.cols(); ++j) mx = std::max(mx, r[j]);
    float s = 0.0f;
    for (int j = 0; j < m.cols(); ++j) {
      r[j] = std::exp(r[j] - mx);
      s += r[j];
    }
    for (int j = 0; j < m.cols(); ++j) r[j] /= s;
  }
}

std::vector<int> logreg(const Mat<float>& tx, const std::vector<int>& ty, int K,
                        const Mat<float>& x, const ClassifierConfig& cfg) {
  const int n = tx.rows(), d = tx.cols();
  Mat<float> w(d, K), b(1, K);
  AdamConfig ac;
  ac.lr = cfg.logreg_lr;
  AdamState<float> sw(w), sb(b);
  const float inv_n = 1.0f / static_cast<float>(n);

  for (int it = 1; it <= cfg.logreg_iters; ++it) {
    Mat<float> delta = matmul(tx, w);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < K; ++j) delta(i, j) += b(0, j);
    softmax_rows(delta);
    for (int i = 0; i < n; ++i) delta(i, ty[i]) -= 1.0f;
    for (size_t i = 0; i < delta.size(); ++i) delta.data()[i] *= inv_n;

    Mat<float> gw = matmul_tn(tx, delta);
    Mat<float> gb(1, K);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < K; ++j) gb(0, j) += delta(i, j);
    sw.step(w, gw, ac, it);
    sb.step(b, gb, ac, it);
  }

  std::vector<int> out(x.rows());
  Mat<float> logits = matmul(x, w);
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < K; ++j) logits(i, j) += b(0, j);
    out[i] = argmax_row(logits.row(i), K);
  }
  return out;
}

// ---- histogram gradient boosting ------------------------------------------

struct TreeNode {
  int feature = -1;  // -1: leaf
  int split_bin = 0; // go left if bin <= split_bin
  int left = -1, right = -1;
  float weight = 0.0f;
};
using Tree = std::vector<TreeNode>;

struct BinnedData {
  int bins;
  std::vector<std::vector<float>> edges;  // per feature, ascending thresholds
  Mat<uint8_t> codes;                     // n x d bin indices
};

uint8_t bin_of(const std::vector<float>& edges, float v) {
  return static_cast<uint8_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

BinnedData bin_features(const Mat<float>& tx, int bins) {
  BinnedData bd;
  bd.bins = bins;
  const int n = tx.rows(), d = tx.cols();
  bd.edges.resize(d);
  bd.codes = Mat<uint8_t>(n, d);
  std::vector<float> col(n);
  for (int f = 0; f < d; ++f) {
    for (int i = 0; i < n; ++i) col[i] = tx(i, f);
    std::sort(col.begin(), col.end());
    std::vector<float>& e = bd.edges[f];
    for (int q = 1; q < bins; ++q) {
      float v = col[static_cast<size_t>(q) * n / bins];
      if (e.empty() || v > e.back()) e.push_back(v);
    }
    for (int i = 0; i < n; ++i) bd.codes(i, f) = bin_of(e, tx(i, f));
  }
  return bd;
}

// One regression tree on per-row gradient/hessian pairs, XGBoost-style gain.
Tree fit_tree(const BinnedData& bd, const std::vector<float>& g, const std::vector<float>& h,
              int max_depth, double l2) {
  const int d = bd.codes.cols();
  Tree tree;
  struct Work {
    int node;
    int depth;
    std::vector<int> rows;
  };
  std::vector<Work> stack;
  std::vector<int> all(bd.codes.rows());
  for (int i = 0; i < bd.codes.rows(); ++i) all[i] = i;
  tree.push_back({});
  stack.push_back({0, 0, std::move(all)});

  while (!stack.empty()) {
    Work wk = std::move(stack.back());
    stack.pop_back();
    double gs = 0.0, hs = 0.0;
    for (int i : wk.rows) {
      gs += g[i];
      hs += h[i];
    }
    TreeNode& node = tree[wk.node];
    node.weight = static_cast<float>(-gs / (hs + l2));
    if (wk.depth >= max_depth || wk.rows.size() < 2) continue;

    const double parent = gs * gs / (hs + l2);
    double best_gain = 1e-12;
    int best_f = -1, best_bin = 0;
    std::vector<double> hg(bd.bins), hh(bd.bins);
    for (int f = 0; f < d; ++f) {
      const int nb = static_cast<int>(bd.edges[f].size()) + 1;
      if (nb < 2) continue;
      std::fill(hg.begin(), hg.begin() + nb, 0.0);
      std::fill(hh.begin(), hh.begin() + nb, 0.0);
      for (int i : wk.rows) {
        const int c = bd.codes(i, f);
        hg[c] += g[i];
        hh[c] += h[i];
      }
      double gl = 0.0, hl = 0.0;
      for (int cut = 0; cut < nb - 1; ++cut) {
        gl += hg[cut];
        hl += hh[cut];
        const double gr = gs - gl, hr = hs - hl;
        if (hl <= 0.0 || hr <= 0.0) continue;
        const double gain = gl * gl / (hl + l2) + gr * gr / (hr + l2) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_f = f;
          best_bin = cut;
        }
      }
    }
    if (best_f < 0) continue;

    std::vector<int> lrows, rrows;
    for (int i : wk.rows)
      (bd.codes(i, best_f) <= best_bin ? lrows : rrows).push_back(i);
    if (lrows.empty() || rrows.empty()) continue;
    const int left = static_cast<int>(tree.size());
    tree.push_back({});
    tree.push_back({});
    tree[wk.node].feature = best_f;
    tree[wk.node].split_bin = best_bin;
    tree[wk.node].left = left;
    tree[wk.node].right = left + 1;
    stack.push_back({left, wk.depth + 1, std::move(lrows)});
    stack.push_back({left + 1, wk.depth + 1, std::move(rrows)});
  }
  return tree;
}

float tree_value(const Tree& tree, const BinnedData& bd, const Mat<float>& x, int row) {
  int node = 0;
  while (tree[node].feature >= 0) {
    const int f = tree[node].feature;
    const int c = bin_of(bd.edges[f], x(row, f));
    node = (c <= tree[node].split_bin) ? tree[node].left : tree[node].right;
  }
  return tree[node].weight;
}

std::vector<int> gbt(const Mat<float>& tx, const std::vector<int>& ty, int K,
                     const Mat<float>& x, const ClassifierConfig& cfg) {
  const int n = tx.rows();
  BinnedData bd = bin_features(tx, cfg.gbt_bins);
  Mat<float> scores(n, K);
  std::vector<std::vector<Tree>> rounds;
  std::vector<float> g(n), h(n);

  for (int r = 0; r < cfg.gbt_rounds; ++r) {
    Mat<float> p = scores;
    softmax_rows(p);
    rounds.emplace_back();
    for (int k = 0; k < K; ++k) {
      for (int i = 0; i < n; ++i) {
        const float pik = p(i, k);
        g[i] = pik - (ty[i] == k ? 1.0f : 0.0f);
        h[i] = std::max(pik * (1.0f - pik), 1e-6f);
      }
      Tree t = fit_tree(bd, g, h, cfg.gbt_depth, cfg.gbt_l2);
      for (int i = 0; i < n; ++i)
        scores(i, k) += static_cast<float>(cfg.gbt_eta) * tree_value(t, bd, tx, i);
      rounds.back().push_back(std::move(t));
    }
  }

  std::vector<int> out(x.rows());
  std::vector<float> acc(K);
  for (int i = 0; i < x.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0f);
    for (const auto& round : rounds)
      for (int k = 0; k < K; ++k)
        acc[k] += static_cast<float>(cfg.gbt_eta) * tree_value(round[k], bd, x, i);
    out[i] = argmax_row(acc.data(), K);
  }
  return out;
}

}  // namespace

std::vector<int> train_classifier(const Mat<float>& train_x, const std::vector<int>& train_labels,
                                  int n_classes, const Mat<float>& x,
                                  const ClassifierConfig& cfg) {
  if (n_classes < 1) throw std::invalid_argument("train_classifier: n_classes must be >= 1");
  if (static_cast<size_t>(train_x.rows()) != train_labels.size())
    throw std::invalid_argument("train_classifier: features/labels row mismatch");
  if (!x.empty() && !train_x.empty() && x.cols() != train_x.cols())
    throw std::invalid_argument("train_classifier: query feature width mismatch");

  std::vector<int> count(n_classes, 0);
  for (int y : train_labels) {
    if (y < 0 || y >= n_classes)
      throw std::invalid_argument("train_classifier: label out of range");
    ++count[y];
  }
  for (int k = 0; k < n_classes; ++k)
    if (count[k] == 0)
      throw std::runtime_error("train_classifier: class " + std::to_string(k) +
                               " absent from training data");

  if (x.rows() == 0) return {};
  if (n_classes == 1) return std::vector<int>(x.rows(), 0);

  return cfg.kind == ClassifierKind::Logreg ? logreg(train_x, train_labels, n_classes, x, cfg)
                                            : gbt(train_x, train_labels, n_classes, x, cfg);
}

}  // namespace kgalign
