#pragma once
// Pluggable batch classifiers: fit on labeled feature rows, predict a label
// for every query row. Reference implementation is multinomial logistic
// regression; a compact histogram gradient-boosted-tree model is a drop-in
// behind the same call.

#include <cstdint>
#include <vector>

#include "kgalign/mat.hpp"

namespace kgalign {

enum class ClassifierKind { Logreg, Gbt };

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::Logreg;
  // Logistic regression: full-batch Adam.
  int logreg_iters = 300;
  double logreg_lr = 0.1;
  // Gradient-boosted trees: softmax objective, one depth-limited tree per
  // class per round, histogram splits.
  int gbt_rounds = 40;
  int gbt_depth = 3;
  double gbt_eta = 0.3;
  double gbt_l2 = 1.0;
  int gbt_bins = 32;
  uint64_t rng_seed = 0;
};

// Fits on (train_x, train_labels) with labels in 0..n_classes-1 and returns a
// predicted label for every row of x. Throws if any class in that range has
// no training rows — the caller decides whether to merge or remap batches.
// Deterministic for fixed inputs and config.
std::vector<int> train_classifier(const Mat<float>& train_x, const std::vector<int>& train_labels,
                                  int n_classes, const Mat<float>& x,
                                  const ClassifierConfig& cfg = {});

}  // namespace kgalign
