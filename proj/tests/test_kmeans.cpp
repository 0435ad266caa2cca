#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "kgalign/kmeans.hpp"

using namespace kgalign;

namespace {

// `per_blob` points around each center, gaussian noise sigma.
Mat<float> blobs(const std::vector<std::vector<float>>& centers, int per_blob, float sigma,
                 uint64_t seed) {
  const int d = static_cast<int>(centers[0].size());
  Mat<float> pts(static_cast<int>(centers.size()) * per_blob, d);
  Rng rng(seed);
  std::normal_distribution<float> noise(0.0f, sigma);
  int r = 0;
  for (const auto& c : centers)
    for (int i = 0; i < per_blob; ++i, ++r)
      for (int j = 0; j < d; ++j) pts(r, j) = c[j] + noise(rng);
  return pts;
}

}  // namespace

TEST_CASE("two separated blobs are recovered exactly") {
  const int per = 40;
  Mat<float> pts = blobs({{0.0f, 0.0f}, {10.0f, 10.0f}}, per, 0.5f, 11);
  Rng rng(1);
  KmeansResult res = kmeans(pts, 2, 100, 1e-6, rng);

  REQUIRE(static_cast<int>(res.labels.size()) == pts.rows());
  // All points of a blob share one label and the two blobs differ.
  for (int i = 1; i < per; ++i) CHECK(res.labels[i] == res.labels[0]);
  for (int i = per + 1; i < 2 * per; ++i) CHECK(res.labels[i] == res.labels[per]);
  CHECK(res.labels[0] != res.labels[per]);
}

TEST_CASE("K=1 returns the global mean") {
  Mat<float> pts(4, 1);
  pts(0, 0) = 1.0f;
  pts(1, 0) = 2.0f;
  pts(2, 0) = 3.0f;
  pts(3, 0) = 6.0f;
  Rng rng(0);
  KmeansResult res = kmeans(pts, 1, 50, 1e-9, rng);
  for (int l : res.labels) CHECK(l == 0);
  CHECK(res.centroids(0, 0) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("returned centroids are the means of the returned assignment") {
  Mat<float> pts = blobs({{0.0f, 0.0f}, {4.0f, 0.0f}, {0.0f, 4.0f}}, 30, 1.0f, 5);
  Rng rng(7);
  KmeansResult res = kmeans(pts, 3, 200, 1e-7, rng);

  Mat<float> mean(3, 2);
  std::vector<int> count(3, 0);
  for (int i = 0; i < pts.rows(); ++i) {
    for (int j = 0; j < 2; ++j) mean(res.labels[i], j) += pts(i, j);
    ++count[res.labels[i]];
  }
  for (int k = 0; k < 3; ++k) {
    REQUIRE(count[k] > 0);
    for (int j = 0; j < 2; ++j)
      CHECK(res.centroids(k, j) == doctest::Approx(mean(k, j) / count[k]).epsilon(1e-4));
  }
}

TEST_CASE("deterministic for a fixed rng seed") {
  Mat<float> pts = blobs({{0.0f, 0.0f}, {3.0f, 3.0f}}, 25, 1.2f, 3);
  Rng rng_a(42), rng_b(42);
  KmeansResult a = kmeans(pts, 4, 100, 1e-6, rng_a);
  KmeansResult b = kmeans(pts, 4, 100, 1e-6, rng_b);
  CHECK(a.labels == b.labels);
  CHECK(a.iterations == b.iterations);
  for (size_t i = 0; i < a.centroids.size(); ++i)
    CHECK(a.centroids.data()[i] == b.centroids.data()[i]);
}

TEST_CASE("argument validation") {
  Mat<float> pts(3, 2);
  Rng rng(0);
  CHECK_THROWS_WITH_AS(kmeans(pts, 0, 10, 1e-4, rng), doctest::Contains("K must be >= 1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(kmeans(pts, 4, 10, 1e-4, rng), doctest::Contains("K exceeds"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(kmeans(pts, 2, 0, 1e-4, rng), doctest::Contains("max_iter"),
                       std::invalid_argument);
}

TEST_CASE("coincident points with K>1 hit the re-seed limit") {
  Mat<float> pts(6, 2);
  for (int i = 0; i < 6; ++i) {
    pts(i, 0) = 1.5f;
    pts(i, 1) = -2.0f;
  }
  Rng rng(9);
  CHECK_THROWS_WITH_AS(kmeans(pts, 2, 100, 1e-6, rng),
                       doctest::Contains("empty cluster persisted"), std::runtime_error);
}
