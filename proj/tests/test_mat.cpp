#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <random>
#include <set>

#include "kgalign/mat.hpp"
#include "kgalign/rng.hpp"

using namespace kgalign;

namespace {

Mat<double> random_mat(int r, int c, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat<double> m(r, c);
  for (size_t i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// Naive triple-loop product used as the oracle for the blocked kernels.
Mat<double> naive_matmul(const Mat<double>& a, const Mat<double>& b) {
  Mat<double> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

}  // namespace

TEST_CASE("matmul matches naive oracle on random shapes") {
  Rng rng(7);
  for (auto [m, k, n] : {std::array{3, 4, 5}, std::array{1, 1, 1}, std::array{7, 2, 9}}) {
    Mat<double> a = random_mat(m, k, rng), b = random_mat(k, n, rng);
    Mat<double> got = matmul(a, b), want = naive_matmul(a, b);
    for (size_t i = 0; i < got.size(); ++i)
      CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("matmul_nt equals A * transpose(B)") {
  Rng rng(11);
  Mat<double> a = random_mat(4, 6, rng), b = random_mat(5, 6, rng);
  Mat<double> got = matmul_nt(a, b), want = naive_matmul(a, transpose(b));
  REQUIRE(got.rows() == 4);
  REQUIRE(got.cols() == 5);
  for (size_t i = 0; i < got.size(); ++i)
    CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
}

TEST_CASE("matmul_tn equals transpose(A) * B") {
  Rng rng(13);
  Mat<double> a = random_mat(6, 4, rng), b = random_mat(6, 5, rng);
  Mat<double> got = matmul_tn(a, b), want = naive_matmul(transpose(a), b);
  for (size_t i = 0; i < got.size(); ++i)
    CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
}

TEST_CASE("transpose is an involution") {
  Rng rng(17);
  Mat<double> a = random_mat(5, 3, rng);
  Mat<double> back = transpose(transpose(a));
  REQUIRE(back.same_shape(a));
  for (size_t i = 0; i < a.size(); ++i) CHECK(back.data()[i] == a.data()[i]);
}

TEST_CASE("matmul rejects inner-dimension mismatch") {
  Mat<double> a(2, 3), b(4, 2);
  CHECK_THROWS(matmul(a, b));
}

TEST_CASE("l2_normalize_rows yields unit rows and preserves direction") {
  Mat<double> m(2, 3);
  m(0, 0) = 3.0; m(0, 1) = 4.0; m(0, 2) = 0.0;
  m(1, 0) = 0.0; m(1, 1) = 0.0; m(1, 2) = -2.0;
  l2_normalize_rows(m);
  CHECK(m(0, 0) == doctest::Approx(0.6));
  CHECK(m(0, 1) == doctest::Approx(0.8));
  CHECK(m(1, 2) == doctest::Approx(-1.0));
  double n0 = std::sqrt(m(0, 0) * m(0, 0) + m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2));
  CHECK(n0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("l2_normalize_rows leaves an all-zero row at zero instead of dividing by zero") {
  Mat<double> m(1, 4);
  l2_normalize_rows(m);
  for (size_t i = 0; i < m.size(); ++i) CHECK(m.data()[i] == 0.0);
  CHECK(all_finite(m));
}

TEST_CASE("dot_rows computes the row inner product") {
  Mat<double> a(2, 2), b(2, 2);
  a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = -1; a(1, 1) = 0.5;
  b(0, 0) = 3; b(0, 1) = -1; b(1, 0) = 2; b(1, 1) = 4;
  CHECK(dot_rows(a, 0, b, 0) == doctest::Approx(1.0));
  CHECK(dot_rows(a, 1, b, 1) == doctest::Approx(0.0));
}

TEST_CASE("all_finite detects NaN and infinity") {
  Mat<double> m(2, 2);
  CHECK(all_finite(m));
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(all_finite(m));
  m(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(all_finite(m));
}

TEST_CASE("cast converts element type with rounding at float precision") {
  Mat<double> d(1, 2);
  d(0, 0) = 0.1;
  d(0, 1) = -2.5;
  Mat<float> f = d.cast<float>();
  CHECK(f(0, 0) == doctest::Approx(0.1f));
  CHECK(f(0, 1) == -2.5f);
  Mat<double> back = f.cast<double>();
  CHECK(back(0, 1) == -2.5);
}

TEST_CASE("sample_without_replacement draws distinct indices within range") {
  Rng rng(23);
  auto idx = sample_without_replacement(10, 4, rng);
  REQUIRE(idx.size() == 4);
  std::set<int> seen(idx.begin(), idx.end());
  CHECK(seen.size() == 4);
  for (int i : idx) {
    CHECK(i >= 0);
    CHECK(i < 10);
  }
  // Drawing all n indices yields a permutation.
  Rng rng2(23);
  auto all = sample_without_replacement(6, 6, rng2);
  std::set<int> s(all.begin(), all.end());
  CHECK(s.size() == 6);
}

TEST_CASE("derive_seed separates component streams deterministically") {
  CHECK(derive_seed(42, 1) == derive_seed(42, 1));
  CHECK(derive_seed(42, 1) != derive_seed(42, 2));
  CHECK(derive_seed(42, 1) != derive_seed(43, 1));
}
