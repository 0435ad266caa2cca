#pragma once
// Lloyd's k-means with k-means++ seeding, euclidean metric.

#include <vector>

#include "kgalign/mat.hpp"
#include "kgalign/rng.hpp"

namespace kgalign {

struct KmeansResult {
  std::vector<int> labels;   // per point, in 0..K-1
  Mat<float> centroids;      // K x dim
  int iterations = 0;
};

// Stops when every centroid moves less than tol (euclidean) or after max_iter
// sweeps. An empty cluster is re-seeded at the point farthest from its own
// centroid, at most 10 times per run before erroring out. Ties in assignment
// go to the lowest cluster index; the result is a function of (points, K,
// rng state) only.
KmeansResult kmeans(const Mat<float>& points, int K, int max_iter, double tol, Rng& rng);

}  // namespace kgalign
