#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "kgalign/classifier.hpp"
#include "kgalign/rng.hpp"

using namespace kgalign;

namespace {

struct Labeled {
  Mat<float> x;
  std::vector<int> y;
};

// Gaussian blobs, one class per center.
Labeled blobs(const std::vector<std::vector<float>>& centers, int per_blob, float sigma,
              uint64_t seed) {
  const int d = static_cast<int>(centers[0].size());
  Labeled out{Mat<float>(static_cast<int>(centers.size()) * per_blob, d), {}};
  Rng rng(seed);
  std::normal_distribution<float> noise(0.0f, sigma);
  int r = 0;
  for (size_t c = 0; c < centers.size(); ++c)
    for (int i = 0; i < per_blob; ++i, ++r) {
      for (int j = 0; j < d; ++j) out.x(r, j) = centers[c][j] + noise(rng);
      out.y.push_back(static_cast<int>(c));
    }
  return out;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  int hit = 0;
  for (size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i];
  return static_cast<double>(hit) / pred.size();
}

const std::vector<std::vector<float>> kCenters = {
    {0.0f, 0.0f, 0.0f}, {5.0f, 0.0f, 1.0f}, {0.0f, 5.0f, -1.0f}};

}  // namespace

TEST_CASE("logistic regression separates three blobs") {
  Labeled train = blobs(kCenters, 50, 0.8f, 21);
  Labeled test = blobs(kCenters, 30, 0.8f, 22);
  ClassifierConfig cfg;
  cfg.kind = ClassifierKind::Logreg;
  std::vector<int> pred = train_classifier(train.x, train.y, 3, test.x, cfg);
  CHECK(accuracy(pred, test.y) >= 0.95);
}

TEST_CASE("gradient-boosted trees separate three blobs") {
  Labeled train = blobs(kCenters, 50, 0.8f, 31);
  Labeled test = blobs(kCenters, 30, 0.8f, 32);
  ClassifierConfig cfg;
  cfg.kind = ClassifierKind::Gbt;
  std::vector<int> pred = train_classifier(train.x, train.y, 3, test.x, cfg);
  CHECK(accuracy(pred, test.y) >= 0.95);
}

TEST_CASE("single-class problems predict class zero without training") {
  Labeled train = blobs({{0.0f, 0.0f, 0.0f}}, 10, 1.0f, 4);
  Mat<float> query(5, 3);
  std::vector<int> pred = train_classifier(train.x, std::vector<int>(10, 0), 1, query);
  REQUIRE(pred.size() == 5);
  for (int p : pred) CHECK(p == 0);
}

TEST_CASE("empty query returns an empty prediction") {
  Labeled train = blobs(kCenters, 5, 0.3f, 6);
  Mat<float> query(0, 3);
  CHECK(train_classifier(train.x, train.y, 3, query).empty());
}

TEST_CASE("deterministic predictions for both kinds") {
  Labeled train = blobs(kCenters, 40, 1.0f, 17);
  Labeled test = blobs(kCenters, 20, 1.0f, 18);
  for (ClassifierKind kind : {ClassifierKind::Logreg, ClassifierKind::Gbt}) {
    ClassifierConfig cfg;
    cfg.kind = kind;
    std::vector<int> a = train_classifier(train.x, train.y, 3, test.x, cfg);
    std::vector<int> b = train_classifier(train.x, train.y, 3, test.x, cfg);
    CHECK(a == b);
  }
}

TEST_CASE("argument validation") {
  Labeled train = blobs(kCenters, 4, 0.3f, 8);
  Mat<float> query(2, 3);

  CHECK_THROWS_WITH_AS(train_classifier(train.x, train.y, 0, query),
                       doctest::Contains("n_classes"), std::invalid_argument);
  std::vector<int> short_y(train.y.begin(), train.y.end() - 1);
  CHECK_THROWS_WITH_AS(train_classifier(train.x, short_y, 3, query),
                       doctest::Contains("row mismatch"), std::invalid_argument);
  Mat<float> narrow(2, 2);
  CHECK_THROWS_WITH_AS(train_classifier(train.x, train.y, 3, narrow),
                       doctest::Contains("width mismatch"), std::invalid_argument);
  std::vector<int> bad_y = train.y;
  bad_y[0] = 3;
  CHECK_THROWS_WITH_AS(train_classifier(train.x, bad_y, 3, query),
                       doctest::Contains("label out of range"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(train_classifier(train.x, train.y, 4, query),
                       doctest::Contains("absent from training data"), std::runtime_error);
}
