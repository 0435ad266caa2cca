#include "kgalign/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "kgalign/sinkhorn.hpp"

namespace kgalign {
namespace {

constexpr int kKnnBlock = 256;  // query rows per dense block

Mat<float> gather_rows(const Mat<float>& f, const std::vector<int>& ids, int offset, int limit) {
  Mat<float> out(static_cast<int>(ids.size()), f.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= limit)
      throw std::invalid_argument("batch_local_sim: entity id out of range");
    const float* src = f.row(offset + ids[i]);
    std::copy(src, src + f.cols(), out.row(static_cast<int>(i)));
  }
  return out;
}

// Mean of each query row's top-k dot products against keys; the r terms of
// the CSLS correction.
std::vector<double> knn_means(const Mat<float>& queries, const Mat<float>& keys, int k) {
  const int nq = queries.rows(), nk = keys.rows();
  const int kk = std::min(k, nk);
  std::vector<double> means(nq, 0.0);
  std::vector<float> vals(nk);
  for (int lo = 0; lo < nq; lo += kKnnBlock) {
    const int hi = std::min(lo + kKnnBlock, nq);
    Mat<float> block(hi - lo, queries.cols());
    for (int i = lo; i < hi; ++i)
      std::copy(queries.row(i), queries.row(i) + queries.cols(), block.row(i - lo));
    Mat<float> sims = matmul_nt(block, keys);
    for (int i = 0; i < sims.rows(); ++i) {
      std::copy(sims.row(i), sims.row(i) + nk, vals.begin());
      std::partial_sort(vals.begin(), vals.begin() + kk, vals.end(), std::greater<float>());
      double s = 0.0;
      for (int j = 0; j < kk; ++j) s += vals[j];
      means[lo + i] = s / kk;
    }
  }
  return means;
}

}  // namespace

Mat<double> batch_local_sim(const EmbeddingMatrix& f, const std::vector<int>& batch_s,
                            const std::vector<int>& batch_t) {
  if (batch_s.empty() || batch_t.empty())
    throw std::invalid_argument("batch_local_sim: empty batch side");
  Mat<float> hs = gather_rows(f.f, batch_s, 0, f.n_source);
  Mat<float> ht = gather_rows(f.f, batch_t, f.n_source, f.n_target());
  return matmul_nt(hs, ht).cast<double>();
}

SparseSim knn_topk(const Mat<float>& queries, const Mat<float>& keys, int k) {
  if (k < 1) throw std::invalid_argument("knn_topk: k must be >= 1");
  if (queries.cols() != keys.cols())
    throw std::invalid_argument("knn_topk: dimension mismatch");
  if (keys.rows() == 0) throw std::invalid_argument("knn_topk: no keys");
  const int nq = queries.rows(), nk = keys.rows();
  const int kk = std::min(k, nk);

  std::vector<SparseEntry> entries;
  entries.reserve(static_cast<size_t>(nq) * kk);
  std::vector<int> order(nk);
  for (int lo = 0; lo < nq; lo += kKnnBlock) {
    const int hi = std::min(lo + kKnnBlock, nq);
    Mat<float> block(hi - lo, queries.cols());
    for (int i = lo; i < hi; ++i)
      std::copy(queries.row(i), queries.row(i) + queries.cols(), block.row(i - lo));
    Mat<float> sims = matmul_nt(block, keys);
    for (int i = 0; i < sims.rows(); ++i) {
      const float* row = sims.row(i);
      std::iota(order.begin(), order.end(), 0);
      std::partial_sort(order.begin(), order.begin() + kk, order.end(), [&](int a, int b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return a < b;
      });
      for (int j = 0; j < kk; ++j)
        entries.push_back({lo + i, order[j], static_cast<double>(row[order[j]])});
    }
  }
  return SparseSim::from_triplets(nq, nk, std::move(entries));
}

SparseSim assemble_local(const BatchAssignment& batches, const EmbeddingMatrix& f,
                         const FusionConfig& cfg) {
  const int n_s = f.n_source, n_t = f.n_target();
  if (static_cast<int>(batches.source_labels.size()) != n_s ||
      static_cast<int>(batches.target_labels.size()) != n_t)
    throw std::invalid_argument("assemble_local: assignment/embedding size mismatch");
  if (batches.K < 1) throw std::invalid_argument("assemble_local: K must be >= 1");

  std::vector<std::vector<int>> bs(batches.K), bt(batches.K);
  for (int e = 0; e < n_s; ++e) bs[batches.source_labels[e]].push_back(e);
  for (int e = 0; e < n_t; ++e) bt[batches.target_labels[e]].push_back(e);

  std::vector<SparseEntry> entries;
  size_t expected = 0;
  for (int i = 0; i < batches.K; ++i) {
    if (bs[i].empty() || bt[i].empty()) continue;
    Mat<double> sim = batch_local_sim(f, bs[i], bt[i]);
    Mat<double> p = sinkhorn(sim, cfg.sinkhorn_rounds, cfg.tau);
    expected += bs[i].size() * bt[i].size();
    for (size_t a = 0; a < bs[i].size(); ++a)
      for (size_t b = 0; b < bt[i].size(); ++b)
        entries.push_back({bs[i][a], bt[i][b], p(static_cast<int>(a), static_cast<int>(b))});
  }
  SparseSim m = SparseSim::from_triplets(n_s, n_t, std::move(entries));
  // Sinkhorn entries are strictly positive and a valid partition cannot place
  // one coordinate in two batches, so any shrinkage means collided blocks.
  if (m.nnz() != expected)
    throw std::logic_error("assemble_local: batch blocks collided (labels not a partition)");
  return m;
}

SparseSim fuse_local(const SparseSim& m_c, const SparseSim& m_i_st, const SparseSim& m_i_ts) {
  if (m_i_ts.rows() != m_c.cols() || m_i_ts.cols() != m_c.rows())
    throw std::runtime_error("fuse_local: transposed view has mismatched shape");
  return m_c.plus(m_i_st).plus(m_i_ts.transposed());
}

SparseSim topk_global(const EmbeddingMatrix& f, int topk) {
  if (topk < 1) throw std::invalid_argument("topk_global: topk must be >= 1");
  const Mat<float> src = f.source_block();
  const Mat<float> tgt = f.target_block();
  SparseSim st = knn_topk(src, tgt, topk);
  SparseSim ts = knn_topk(tgt, src, topk);
  return st.plus(ts.transposed());
}

SparseSim sp_csls(const SparseSim& m, const EmbeddingMatrix& f, int csls_k) {
  if (csls_k < 1) throw std::invalid_argument("sp_csls: csls_k must be >= 1");
  if (m.nnz() == 0) throw std::invalid_argument("sp_csls: empty similarity matrix");
  if (m.rows() != f.n_source || m.cols() != f.n_target())
    throw std::invalid_argument("sp_csls: matrix/embedding shape mismatch");

  const Mat<float> src = f.source_block();
  const Mat<float> tgt = f.target_block();
  const std::vector<double> r_t = knn_means(src, tgt, csls_k);  // per source entity
  const std::vector<double> r_s = knn_means(tgt, src, csls_k);  // per target entity

  std::vector<double> values;
  values.reserve(m.nnz());
  for (const SparseEntry& e : m.entries())
    values.push_back(2.0 * e.value - r_s[e.col] - r_t[e.row]);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double vmin = *lo, vmax = *hi;
  if (vmax - vmin <= 0.0) {
    std::fill(values.begin(), values.end(), 1.0);
  } else {
    const double inv = 1.0 / (vmax - vmin);
    for (double& v : values) v = (v - vmin) * inv;
  }
  return m.with_values(std::move(values));
}

SparseSim fuse_final(const SparseSim& m_l, const SparseSim& m_g, const EmbeddingMatrix& f,
                     int csls_k) {
  if (m_g.nnz() == 0) return sp_csls(m_l, f, csls_k);
  return sp_csls(m_l.plus(m_g), f, csls_k);
}

}  // namespace kgalign
