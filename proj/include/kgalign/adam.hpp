#pragma once
// Adam optimizer state for one dense parameter matrix.

#include <cmath>

#include "kgalign/mat.hpp"

namespace kgalign {

struct AdamConfig {
  double lr = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class T>
struct AdamState {
  Mat<T> m, v;

  explicit AdamState(const Mat<T>& param) : m(param.rows(), param.cols()),
                                            v(param.rows(), param.cols()) {}

  // t is the 1-based global step count shared by all parameters.
  void step(Mat<T>& param, const Mat<T>& grad, const AdamConfig& cfg, int t) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (size_t i = 0; i < param.size(); ++i) {
      const double g = static_cast<double>(grad.data()[i]);
      const double mi = cfg.beta1 * m.data()[i] + (1.0 - cfg.beta1) * g;
      const double vi = cfg.beta2 * v.data()[i] + (1.0 - cfg.beta2) * g * g;
      m.data()[i] = static_cast<T>(mi);
      v.data()[i] = static_cast<T>(vi);
      param.data()[i] -= static_cast<T>(cfg.lr * (mi / bc1) /
                                        (std::sqrt(vi / bc2) + cfg.eps));
    }
  }
};

}  // namespace kgalign
