#pragma once
// Reverse-mode autodiff over dense matrices. A Tape owns value/grad nodes;
// each op records a closure that scatters its output gradient back to its
// inputs. Templated on the scalar so training runs in single precision while
// the verification harness runs the identical graph in double.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kgalign/mat.hpp"

namespace kgalign {

// Sparse aggregation operand: rows of the output, columns indexing rows of the
// dense input. rowsum holds each row's total weight for the mean.
struct BlockCsr {
  int nrows = 0;
  std::vector<int> indptr;
  std::vector<int> col;
  std::vector<double> w;
  std::vector<double> rowsum;
};

template <class T>
class Tape {
 public:
  using Id = int;

  Id leaf(Mat<T> value) {
    values_.push_back(std::move(value));
    grads_.emplace_back();
    return static_cast<Id>(values_.size()) - 1;
  }

  const Mat<T>& val(Id id) const { return values_[id]; }
  Mat<T>& grad(Id id) {
    if (grads_[id].empty()) grads_[id] = Mat<T>(values_[id].rows(), values_[id].cols());
    return grads_[id];
  }

  void backward(Id loss) {
    if (val(loss).rows() != 1 || val(loss).cols() != 1)
      throw std::runtime_error("backward: loss must be 1x1");
    grad(loss)(0, 0) = T(1);
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
  }

  // --- ops -----------------------------------------------------------------

  Id matmul_op(Id a, Id b) {
    Id out = leaf(matmul(val(a), val(b)));
    ops_.push_back([this, a, b, out] {
      accumulate(a, matmul_nt(grads_[out], val(b)));
      accumulate(b, matmul_tn(val(a), grads_[out]));
    });
    return out;
  }

  Id matmul_nt_op(Id a, Id b) {
    Id out = leaf(matmul_nt(val(a), val(b)));
    ops_.push_back([this, a, b, out] {
      accumulate(a, matmul(grads_[out], val(b)));
      accumulate(b, matmul_tn(grads_[out], val(a)));
    });
    return out;
  }

  Id transpose_op(Id a) {
    Id out = leaf(transpose(val(a)));
    ops_.push_back([this, a, out] { accumulate(a, transpose(grads_[out])); });
    return out;
  }

  Id add(Id a, Id b) {
    check_same_shape(a, b);
    Mat<T> v = val(a);
    for (size_t i = 0; i < v.size(); ++i) v.data()[i] += val(b).data()[i];
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, b, out] {
      accumulate(a, grads_[out]);
      accumulate(b, grads_[out]);
    });
    return out;
  }

  Id sub(Id a, Id b) {
    check_same_shape(a, b);
    Mat<T> v = val(a);
    for (size_t i = 0; i < v.size(); ++i) v.data()[i] -= val(b).data()[i];
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, b, out] {
      accumulate(a, grads_[out]);
      Mat<T> neg = grads_[out];
      for (size_t i = 0; i < neg.size(); ++i) neg.data()[i] = -neg.data()[i];
      accumulate(b, neg);
    });
    return out;
  }

  Id scale(Id a, T c) {
    Mat<T> v = val(a);
    for (size_t i = 0; i < v.size(); ++i) v.data()[i] *= c;
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, c, out] {
      Mat<T> g = grads_[out];
      for (size_t i = 0; i < g.size(); ++i) g.data()[i] *= c;
      accumulate(a, g);
    });
    return out;
  }

  Id add_scalar(Id a, T c) {
    Mat<T> v = val(a);
    for (size_t i = 0; i < v.size(); ++i) v.data()[i] += c;
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, out] { accumulate(a, grads_[out]); });
    return out;
  }

  Id gather_rows(Id a, std::vector<int> idx) {
    Mat<T> v(static_cast<int>(idx.size()), val(a).cols());
    for (size_t i = 0; i < idx.size(); ++i)
      std::copy(val(a).row(idx[i]), val(a).row(idx[i]) + v.cols(), v.row(static_cast<int>(i)));
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, idx = std::move(idx), out] {
      Mat<T>& ga = grad(a);
      const Mat<T>& go = grads_[out];
      for (size_t i = 0; i < idx.size(); ++i) {
        T* dst = ga.row(idx[i]);
        const T* s = go.row(static_cast<int>(i));
        for (int j = 0; j < go.cols(); ++j) dst[j] += s[j];
      }
    });
    return out;
  }

  // (rows[i], cols[i]) entries as an n x 1 column.
  Id gather_elems(Id a, std::vector<int> rows, std::vector<int> cols) {
    Mat<T> v(static_cast<int>(rows.size()), 1);
    for (size_t i = 0; i < rows.size(); ++i) v(static_cast<int>(i), 0) = val(a)(rows[i], cols[i]);
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, rows = std::move(rows), cols = std::move(cols), out] {
      Mat<T>& ga = grad(a);
      for (size_t i = 0; i < rows.size(); ++i)
        ga(rows[i], cols[i]) += grads_[out](static_cast<int>(i), 0);
    });
    return out;
  }

  // n x 1 -> n x cols.
  Id broadcast_col(Id a, int cols) {
    if (val(a).cols() != 1) throw std::runtime_error("broadcast_col: input must be n x 1");
    Mat<T> v(val(a).rows(), cols);
    for (int i = 0; i < v.rows(); ++i)
      std::fill(v.row(i), v.row(i) + cols, val(a)(i, 0));
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, out] {
      Mat<T>& ga = grad(a);
      const Mat<T>& go = grads_[out];
      for (int i = 0; i < go.rows(); ++i) {
        T s = T(0);
        for (int j = 0; j < go.cols(); ++j) s += go(i, j);
        ga(i, 0) += s;
      }
    });
    return out;
  }

  // a: n x m, bias: 1 x m.
  Id add_rowvec(Id a, Id bias) {
    if (val(bias).rows() != 1 || val(bias).cols() != val(a).cols())
      throw std::runtime_error("add_rowvec: bias shape mismatch");
    Mat<T> v = val(a);
    for (int i = 0; i < v.rows(); ++i)
      for (int j = 0; j < v.cols(); ++j) v(i, j) += val(bias)(0, j);
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, bias, out] {
      accumulate(a, grads_[out]);
      Mat<T>& gb = grad(bias);
      const Mat<T>& go = grads_[out];
      for (int i = 0; i < go.rows(); ++i)
        for (int j = 0; j < go.cols(); ++j) gb(0, j) += go(i, j);
    });
    return out;
  }

  Id slice_rows(Id a, int lo, int hi) {
    Mat<T> v(hi - lo, val(a).cols());
    for (int i = lo; i < hi; ++i)
      std::copy(val(a).row(i), val(a).row(i) + v.cols(), v.row(i - lo));
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, lo, out] {
      Mat<T>& ga = grad(a);
      const Mat<T>& go = grads_[out];
      for (int i = 0; i < go.rows(); ++i) {
        T* dst = ga.row(lo + i);
        for (int j = 0; j < go.cols(); ++j) dst[j] += go.row(i)[j];
      }
    });
    return out;
  }

  Id tanh_op(Id a) {
    Mat<T> v = val(a);
    for (size_t i = 0; i < v.size(); ++i) v.data()[i] = std::tanh(v.data()[i]);
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, out] {
      Mat<T> g = grads_[out];
      const Mat<T>& y = val(out);
      for (size_t i = 0; i < g.size(); ++i) g.data()[i] *= (T(1) - y.data()[i] * y.data()[i]);
      accumulate(a, g);
    });
    return out;
  }

  Id relu_op(Id a) {
    Mat<T> v = val(a);
    for (size_t i = 0; i < v.size(); ++i) v.data()[i] = std::max(v.data()[i], T(0));
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, out] {
      Mat<T> g = grads_[out];
      const Mat<T>& x = val(a);
      for (size_t i = 0; i < g.size(); ++i)
        if (x.data()[i] <= T(0)) g.data()[i] = T(0);
      accumulate(a, g);
    });
    return out;
  }

  // Weighted mean over each CSR row: out_i = sum_e w_e * h[col_e] / rowsum_i.
  // The BlockCsr must outlive backward().
  Id spmm_mean(const BlockCsr& adj, Id h) {
    Mat<T> v(adj.nrows, val(h).cols());
    const Mat<T>& hm = val(h);
    for (int i = 0; i < adj.nrows; ++i) {
      T* out_row = v.row(i);
      const T inv = static_cast<T>(1.0 / adj.rowsum[i]);
      for (int e = adj.indptr[i]; e < adj.indptr[i + 1]; ++e) {
        const T w = static_cast<T>(adj.w[e]) * inv;
        const T* src = hm.row(adj.col[e]);
        for (int j = 0; j < hm.cols(); ++j) out_row[j] += w * src[j];
      }
    }
    Id out = leaf(std::move(v));
    ops_.push_back([this, &adj, h, out] {
      Mat<T>& gh = grad(h);
      const Mat<T>& go = grads_[out];
      for (int i = 0; i < adj.nrows; ++i) {
        const T inv = static_cast<T>(1.0 / adj.rowsum[i]);
        const T* grow = go.row(i);
        for (int e = adj.indptr[i]; e < adj.indptr[i + 1]; ++e) {
          const T w = static_cast<T>(adj.w[e]) * inv;
          T* dst = gh.row(adj.col[e]);
          for (int j = 0; j < go.cols(); ++j) dst[j] += w * grow[j];
        }
      }
    });
    return out;
  }

  // Per-row standard score with population std. Throws if any row's std falls
  // below eps — a degenerate batch, surfaced rather than silently flattened.
  Id row_zscore(Id a, T eps = T(1e-12)) {
    const Mat<T>& x = val(a);
    const int m = x.cols();
    Mat<T> z(x.rows(), m);
    Mat<T> sigma(x.rows(), 1);
    for (int i = 0; i < x.rows(); ++i) {
      T mu = T(0);
      for (int j = 0; j < m; ++j) mu += x(i, j);
      mu /= static_cast<T>(m);
      T var = T(0);
      for (int j = 0; j < m; ++j) var += (x(i, j) - mu) * (x(i, j) - mu);
      T sd = std::sqrt(var / static_cast<T>(m));
      if (!(sd > eps))
        throw std::runtime_error("row_zscore: zero standard deviation (degenerate batch)");
      sigma(i, 0) = sd;
      for (int j = 0; j < m; ++j) z(i, j) = (x(i, j) - mu) / sd;
    }
    Id out = leaf(std::move(z));
    ops_.push_back([this, a, out, sigma = std::move(sigma)] {
      const Mat<T>& zv = val(out);
      const Mat<T>& g = grads_[out];
      Mat<T>& ga = grad(a);
      const int m = zv.cols();
      for (int i = 0; i < zv.rows(); ++i) {
        T gbar = T(0), gz = T(0);
        for (int j = 0; j < m; ++j) {
          gbar += g(i, j);
          gz += g(i, j) * zv(i, j);
        }
        gbar /= static_cast<T>(m);
        gz /= static_cast<T>(m);
        const T inv_sd = T(1) / sigma(i, 0);
        for (int j = 0; j < m; ++j)
          ga(i, j) += inv_sd * (g(i, j) - gbar - zv(i, j) * gz);
      }
    });
    return out;
  }

  // Per-row log-sum-exp with max subtraction -> n x 1.
  Id row_lse(Id a) {
    const Mat<T>& x = val(a);
    Mat<T> v(x.rows(), 1);
    for (int i = 0; i < x.rows(); ++i) {
      T mx = x(i, 0);
      for (int j = 1; j < x.cols(); ++j) mx = std::max(mx, x(i, j));
      T s = T(0);
      for (int j = 0; j < x.cols(); ++j) s += std::exp(x(i, j) - mx);
      v(i, 0) = mx + std::log(s);
    }
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, out] {
      const Mat<T>& x = val(a);
      const Mat<T>& y = val(out);
      const Mat<T>& g = grads_[out];
      Mat<T>& ga = grad(a);
      for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j)
          ga(i, j) += g(i, 0) * std::exp(x(i, j) - y(i, 0));
    });
    return out;
  }

  // Fused normalized-margin log-sum-exp over one matching direction. For each
  // pair row i < n_pairs (rows of sim, or columns when transposed):
  //   z   = standard score of that row's candidate similarities,
  //   l_j = gamma + z_j - z_i      (index i holds the aligned candidate),
  //   out_i = log sum_j exp(lambda * l_j).
  // Fusing the chain keeps the tape free of candidate-matrix-sized temporaries;
  // only the similarity matrix itself and its gradient are ever materialized.
  Id nhsm_direction(Id sim, int n_pairs, T gamma, T lambda, bool transposed,
                    T eps = T(1e-12)) {
    const Mat<T>& s = val(sim);
    const int m = transposed ? s.rows() : s.cols();  // candidates per pair
    if (n_pairs > (transposed ? s.cols() : s.rows()))
      throw std::runtime_error("nhsm_direction: more pairs than rows");
    if (n_pairs > m)
      throw std::runtime_error("nhsm_direction: more pairs than candidates");
    auto at = [&s, transposed](int i, int j) -> T {
      return transposed ? s(j, i) : s(i, j);
    };
    Mat<T> v(n_pairs, 1);
    Mat<T> mu(n_pairs, 1), sd(n_pairs, 1);
    std::vector<T> z(m);
    for (int i = 0; i < n_pairs; ++i) {
      T m1 = T(0);
      for (int j = 0; j < m; ++j) m1 += at(i, j);
      m1 /= static_cast<T>(m);
      T var = T(0);
      for (int j = 0; j < m; ++j) var += (at(i, j) - m1) * (at(i, j) - m1);
      T dev = std::sqrt(var / static_cast<T>(m));
      if (!(dev > eps))
        throw std::runtime_error("nhsm_direction: zero standard deviation (degenerate batch)");
      mu(i, 0) = m1;
      sd(i, 0) = dev;
      for (int j = 0; j < m; ++j) z[j] = (at(i, j) - m1) / dev;
      T mx = -std::numeric_limits<T>::infinity();
      for (int j = 0; j < m; ++j) mx = std::max(mx, lambda * (gamma + z[j] - z[i]));
      T acc = T(0);
      for (int j = 0; j < m; ++j) acc += std::exp(lambda * (gamma + z[j] - z[i]) - mx);
      v(i, 0) = mx + std::log(acc);
    }
    Id out = leaf(std::move(v));
    ops_.push_back([this, sim, out, n_pairs, gamma, lambda, transposed, mu = std::move(mu),
                    sd = std::move(sd)] {
      const Mat<T>& s = val(sim);
      Mat<T>& gs = grad(sim);
      const Mat<T>& y = val(out);
      const Mat<T>& gy = grads_[out];
      const int m = transposed ? s.rows() : s.cols();
      auto at = [&s, transposed](int i, int j) -> T {
        return transposed ? s(j, i) : s(i, j);
      };
      std::vector<T> z(m), soft(m);
      for (int i = 0; i < n_pairs; ++i) {
        const T g = gy(i, 0);
        if (g == T(0)) continue;
        const T inv_sd = T(1) / sd(i, 0);
        for (int j = 0; j < m; ++j) z[j] = (at(i, j) - mu(i, 0)) * inv_sd;
        T sum_s = T(0), sz = T(0);
        for (int j = 0; j < m; ++j) {
          soft[j] = std::exp(lambda * (gamma + z[j] - z[i]) - y(i, 0));
          sum_s += soft[j];
          sz += soft[j] * z[j];
        }
        // dz_j = lambda*g*(soft_j - [j==i]*sum_s); the dz mean vanishes by
        // construction, so the standard-score backward needs only the z-dot.
        const T gz = lambda * g * (sz - sum_s * z[i]) / static_cast<T>(m);
        for (int j = 0; j < m; ++j) {
          const T dz = lambda * g * (soft[j] - (j == i ? sum_s : T(0)));
          const T dx = inv_sd * (dz - z[j] * gz);
          if (transposed)
            gs(j, i) += dx;
          else
            gs(i, j) += dx;
        }
      }
    });
    return out;
  }

  Id sum_all(Id a) {
    T s = T(0);
    for (size_t i = 0; i < val(a).size(); ++i) s += val(a).data()[i];
    Mat<T> v(1, 1);
    v(0, 0) = s;
    Id out = leaf(std::move(v));
    ops_.push_back([this, a, out] {
      const T g = grads_[out](0, 0);
      Mat<T>& ga = grad(a);
      for (size_t i = 0; i < ga.size(); ++i) ga.data()[i] += g;
    });
    return out;
  }

  // Mean cross-entropy over the rows listed in `active`; labels index columns.
  Id softmax_xent(Id logits, std::vector<int> active, std::vector<int> labels) {
    if (active.size() != labels.size())
      throw std::runtime_error("softmax_xent: active/labels size mismatch");
    const Mat<T>& x = val(logits);
    const int nc = x.cols();
    Mat<T> probs(static_cast<int>(active.size()), nc);
    T loss = T(0);
    for (size_t i = 0; i < active.size(); ++i) {
      const T* row = x.row(active[i]);
      T mx = row[0];
      for (int j = 1; j < nc; ++j) mx = std::max(mx, row[j]);
      T s = T(0);
      for (int j = 0; j < nc; ++j) s += std::exp(row[j] - mx);
      const T lse = mx + std::log(s);
      for (int j = 0; j < nc; ++j) probs(static_cast<int>(i), j) = std::exp(row[j] - lse);
      loss -= row[labels[i]] - lse;
    }
    loss /= static_cast<T>(active.size());
    Mat<T> v(1, 1);
    v(0, 0) = loss;
    Id out = leaf(std::move(v));
    ops_.push_back([this, logits, out, active = std::move(active), labels = std::move(labels),
                    probs = std::move(probs)] {
      const T g = grads_[out](0, 0) / static_cast<T>(active.size());
      Mat<T>& gl = grad(logits);
      for (size_t i = 0; i < active.size(); ++i) {
        T* dst = gl.row(active[i]);
        for (int j = 0; j < gl.cols(); ++j) dst[j] += g * probs(static_cast<int>(i), j);
        dst[labels[i]] -= g;
      }
    });
    return out;
  }

 private:
  void check_same_shape(Id a, Id b) const {
    if (!values_[a].same_shape(values_[b]))
      throw std::runtime_error("tape op: shape mismatch");
  }
  void accumulate(Id id, const Mat<T>& g) {
    Mat<T>& dst = grad(id);
    for (size_t i = 0; i < dst.size(); ++i) dst.data()[i] += g.data()[i];
  }

  std::vector<Mat<T>> values_;
  std::vector<Mat<T>> grads_;
  std::vector<std::function<void()>> ops_;
};

}  // namespace kgalign
