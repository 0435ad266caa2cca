#include "kgalign/kmeans.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace kgalign {

namespace {

double sq_dist(const float* a, const float* b, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    const double diff = double(a[j]) - double(b[j]);
    s += diff * diff;
  }
  return s;
}

// k-means++: first centroid uniform, each next proportional to the squared
// distance to the nearest centroid chosen so far.
Mat<float> plus_plus_seed(const Mat<float>& pts, int K, Rng& rng) {
  const int n = pts.rows(), d = pts.cols();
  Mat<float> c(K, d);
  std::uniform_int_distribution<int> uni(0, n - 1);
  int first = uni(rng);
  std::copy(pts.row(first), pts.row(first) + d, c.row(0));

  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = sq_dist(pts.row(i), c.row(0), d);
  for (int k = 1; k < K; ++k) {
    double total = 0.0;
    for (double v : d2) total += v;
    int pick;
    if (total <= 0.0) {
      pick = uni(rng);  // all points coincide with chosen centroids
    } else {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng), acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    }
    std::copy(pts.row(pick), pts.row(pick) + d, c.row(k));
    for (int i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(pts.row(i), c.row(k), d));
  }
  return c;
}

}  // namespace

KmeansResult kmeans(const Mat<float>& points, int K, int max_iter, double tol, Rng& rng) {
  const int n = points.rows(), d = points.cols();
  if (K < 1) throw std::invalid_argument("kmeans: K must be >= 1");
  if (K > n) throw std::invalid_argument("kmeans: K exceeds number of points");
  if (max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");

  KmeansResult res;
  res.centroids = plus_plus_seed(points, K, rng);
  res.labels.assign(n, 0);
  int reseeds = 0;

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    // Assignment step: nearest centroid, ties to the lowest index.
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int k = 0; k < K; ++k) {
        const double dist = sq_dist(points.row(i), res.centroids.row(k), d);
        if (dist < best) {
          best = dist;
          arg = k;
        }
      }
      res.labels[i] = arg;
    }

    // Update step.
    Mat<float> next(K, d);
    std::vector<int> count(K, 0);
    for (int i = 0; i < n; ++i) {
      float* dst = next.row(res.labels[i]);
      const float* src = points.row(i);
      for (int j = 0; j < d; ++j) dst[j] += src[j];
      ++count[res.labels[i]];
    }
    bool reseeded = false;
    for (int k = 0; k < K; ++k) {
      if (count[k] > 0) {
        float* row = next.row(k);
        for (int j = 0; j < d; ++j) row[j] /= static_cast<float>(count[k]);
        continue;
      }
      if (++reseeds > 10)
        throw std::runtime_error(
            "kmeans: empty cluster persisted after 10 re-seeds (degenerate points)");
      // Re-seed at the point farthest from its assigned centroid.
      double far_d = -1.0;
      int far_i = 0;
      for (int i = 0; i < n; ++i) {
        const double dist = sq_dist(points.row(i), res.centroids.row(res.labels[i]), d);
        if (dist > far_d) {
          far_d = dist;
          far_i = i;
        }
      }
      std::copy(points.row(far_i), points.row(far_i) + d, next.row(k));
      reseeded = true;
    }

    double shift = 0.0;
    for (int k = 0; k < K; ++k)
      shift = std::max(shift, std::sqrt(sq_dist(res.centroids.row(k), next.row(k), d)));
    res.centroids = std::move(next);
    // Returned centroids are always the means of the returned assignment
    // (Lloyd fixed point), so convergence is judged after adopting them.
    if (!reseeded && shift < tol) break;
  }
  return res;
}

}  // namespace kgalign
