#pragma once
// Row-major dense matrix and the handful of kernels the pipeline is built on.
// Kept deliberately small: matmul variants, transpose, row reductions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kgalign {

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  T operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  T* row(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const T* row(int r) const { return data_.data() + static_cast<size_t>(r) * cols_; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  template <class U>
  Mat<U> cast() const {
    Mat<U> out(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
    return out;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Mat<T> transpose(const Mat<T>& a) {
  Mat<T> out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

// C = A * B. ikj order so the inner loop runs over contiguous rows of B and C;
// j is tiled so the touched slice of B stays cache-resident across rows of A.
template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Mat<T> c(a.rows(), b.cols());
  const int n = b.cols(), k = a.cols();
  constexpr int jb = 256;
  for (int j0 = 0; j0 < n; j0 += jb) {
    const int j1 = std::min(j0 + jb, n);
    for (int i = 0; i < a.rows(); ++i) {
      T* ci = c.row(i);
      const T* ai = a.row(i);
      for (int p = 0; p < k; ++p) {
        const T av = ai[p];
        if (av == T(0)) continue;
        const T* bp = b.row(p);
        for (int j = j0; j < j1; ++j) ci[j] += av * bp[j];
      }
    }
  }
  return c;
}

// C = A * B^T. Goes through transpose(b) so the inner loop is a contiguous
// axpy over columns of C, which vectorizes; a per-row dot would be a serial
// reduction the compiler cannot reorder.
template <class T>
Mat<T> matmul_nt(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: inner dimensions differ");
  Mat<T> bt = transpose(b);
  Mat<T> c(a.rows(), b.rows());
  const int n = b.rows(), k = a.cols();
  constexpr int jb = 256;
  for (int j0 = 0; j0 < n; j0 += jb) {
    const int j1 = std::min(j0 + jb, n);
    for (int i = 0; i < a.rows(); ++i) {
      T* ci = c.row(i);
      const T* ai = a.row(i);
      for (int p = 0; p < k; ++p) {
        const T av = ai[p];
        if (av == T(0)) continue;
        const T* bp = bt.row(p);
        for (int j = j0; j < j1; ++j) ci[j] += av * bp[j];
      }
    }
  }
  return c;
}

// C = A^T * B (A is m*k used as k*m). Goes through an explicit transpose;
// at the sizes this project handles the copy is noise next to the multiply.
template <class T>
Mat<T> matmul_tn(const Mat<T>& a, const Mat<T>& b) {
  return matmul(transpose(a), b);
}

template <class T>
T dot_rows(const Mat<T>& a, int i, const Mat<T>& b, int j) {
  const T* x = a.row(i);
  const T* y = b.row(j);
  T acc = T(0);
  for (int p = 0; p < a.cols(); ++p) acc += x[p] * y[p];
  return acc;
}

template <class T>
void l2_normalize_rows(Mat<T>& a, T eps = T(1e-12)) {
  for (int i = 0; i < a.rows(); ++i) {
    T* r = a.row(i);
    T s = T(0);
    for (int j = 0; j < a.cols(); ++j) s += r[j] * r[j];
    T inv = T(1) / std::max(std::sqrt(s), eps);
    for (int j = 0; j < a.cols(); ++j) r[j] *= inv;
  }
}

template <class T>
bool all_finite(const Mat<T>& a) {
  for (size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.data()[i])) return false;
  return true;
}

}  // namespace kgalign
