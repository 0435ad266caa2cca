#pragma once
// Sinkhorn iteration on the entropic kernel exp(M / tau).
//
// Square inputs converge toward a doubly stochastic matrix. Rectangular m*n
// inputs alternate against uniform marginals scaled to total mass min(m,n):
// rows are scaled to sum min(m,n)/m, columns to min(m,n)/n, so the square case
// degenerates to the usual all-ones marginals. Per-row max subtraction keeps
// the exponential finite at small tau.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kgalign/mat.hpp"

namespace kgalign {

template <class T>
Mat<T> sinkhorn(const Mat<T>& m, int rounds, double tau) {
  if (rounds < 1) throw std::runtime_error("sinkhorn: rounds must be >= 1");
  if (!(tau > 0.0)) throw std::runtime_error("sinkhorn: tau must be positive");
  if (!all_finite(m)) throw std::runtime_error("sinkhorn: non-finite input");

  const int nr = m.rows(), nc = m.cols();
  Mat<T> k(nr, nc);
  for (int i = 0; i < nr; ++i) {
    T rmax = m(i, 0);
    for (int j = 1; j < nc; ++j) rmax = std::max(rmax, m(i, j));
    for (int j = 0; j < nc; ++j)
      k(i, j) = std::exp(static_cast<T>((m(i, j) - rmax) / tau));
  }
  if (!all_finite(k)) throw std::runtime_error("sinkhorn: kernel overflow");

  const T mass = static_cast<T>(std::min(nr, nc));
  const T row_target = mass / static_cast<T>(nr);
  const T col_target = mass / static_cast<T>(nc);

  std::vector<T> colsum(nc);
  for (int it = 0; it < rounds; ++it) {
    for (int i = 0; i < nr; ++i) {
      T* row = k.row(i);
      T s = T(0);
      for (int j = 0; j < nc; ++j) s += row[j];
      const T scale = row_target / s;
      for (int j = 0; j < nc; ++j) row[j] *= scale;
    }
    std::fill(colsum.begin(), colsum.end(), T(0));
    for (int i = 0; i < nr; ++i) {
      const T* row = k.row(i);
      for (int j = 0; j < nc; ++j) colsum[j] += row[j];
    }
    for (int j = 0; j < nc; ++j) colsum[j] = col_target / colsum[j];
    for (int i = 0; i < nr; ++i) {
      T* row = k.row(i);
      for (int j = 0; j < nc; ++j) row[j] *= colsum[j];
    }
  }
  if (!all_finite(k)) throw std::runtime_error("sinkhorn: diverged to non-finite values");
  return k;
}

// Marginal violation diagnostic: max |rowsum - row_target| + max |colsum - col_target|.
template <class T>
double sinkhorn_marginal_violation(const Mat<T>& k) {
  const int nr = k.rows(), nc = k.cols();
  const double mass = std::min(nr, nc);
  const double row_target = mass / nr, col_target = mass / nc;
  double worst_row = 0.0;
  std::vector<double> colsum(nc, 0.0);
  for (int i = 0; i < nr; ++i) {
    double s = 0.0;
    for (int j = 0; j < nc; ++j) {
      s += k(i, j);
      colsum[j] += k(i, j);
    }
    worst_row = std::max(worst_row, std::abs(s - row_target));
  }
  double worst_col = 0.0;
  for (int j = 0; j < nc; ++j) worst_col = std::max(worst_col, std::abs(colsum[j] - col_target));
  return worst_row + worst_col;
}

}  // namespace kgalign
