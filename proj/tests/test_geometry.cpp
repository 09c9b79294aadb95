#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "topiclabel/geometry.hpp"

namespace tl = topiclabel;

namespace {

std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, double zero_rate = 0.2) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> p(n);
  double s = 0;
  for (auto& x : p) s += (x = u(rng) < zero_rate ? 0.0 : u(rng));
  if (s == 0) {
    p[0] = 1;
    s = 1;
  }
  for (auto& x : p) x /= s;
  return p;
}

tl::Matrix pairwise(const std::vector<std::array<double, 2>>& pts) {
  tl::Matrix d(pts.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      d(i, j) = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
  return d;
}

double max_reconstruction_error(const tl::Matrix& d, const tl::Matrix& x) {
  double worst = 0;
  for (std::size_t i = 0; i < d.rows; ++i)
    for (std::size_t j = 0; j < d.rows; ++j)
      worst = std::max(worst, std::abs(std::hypot(x(i, 0) - x(j, 0), x(i, 1) - x(j, 1)) - d(i, j)));
  return worst;
}

}  // namespace

TEST(Geometry, JsdKnownValues) {
  const std::vector<double> p = {0.5, 0.5, 0.0}, q = {0.0, 0.5, 0.5};
  // 0.5 * (0.5 log2(0.5/0.25) + 0.5 log2(0.5/0.5)) * 2 = 0.5
  EXPECT_NEAR(tl::jsd(p, q), 0.5, 1e-15);
  const std::vector<double> a = {1.0, 0.0}, b = {0.0, 1.0};
  EXPECT_EQ(tl::jsd(a, b), 1.0);
  EXPECT_EQ(tl::jsd(p, p), 0.0);
  const std::vector<double> r = {0.8, 0.2}, s = {0.4, 0.6};
  const double m0 = 0.6, m1 = 0.4;
  const double oracle = 0.5 * (0.8 * std::log2(0.8 / m0) + 0.2 * std::log2(0.2 / m1)) +
                        0.5 * (0.4 * std::log2(0.4 / m0) + 0.6 * std::log2(0.6 / m1));
  EXPECT_NEAR(tl::jsd(r, s), oracle, 1e-15);
}

TEST(Geometry, JsdRejectsInvalidInput) {
  const std::vector<double> p = {0.5, 0.5}, bad = {0.5, 0.6}, neg = {1.5, -0.5}, shorter = {1.0};
  EXPECT_THROW(tl::jsd(p, bad), tl::Error);
  EXPECT_THROW(tl::jsd(p, neg), tl::Error);
  EXPECT_THROW(tl::jsd(p, shorter), tl::Error);
}

TEST(Geometry, JsdProperties) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const auto n = 2 + rng() % 30;
    const auto p = random_distribution(rng, n), q = random_distribution(rng, n);
    const double d = tl::jsd(p, q);
    ASSERT_GE(d, 0.0);
    ASSERT_LE(d, 1.0);
    ASSERT_EQ(d, tl::jsd(q, p));
    ASSERT_EQ(tl::jsd(p, p), 0.0);
  }
}

TEST(Geometry, SymmetricEigen) {
  tl::Matrix a(3, 3);
  const double v[9] = {4, 1, 2, 1, 3, 0, 2, 0, 5};
  std::copy(v, v + 9, a.data.begin());
  const auto e = tl::symmetric_eigen(a);
  ASSERT_EQ(e.values.size(), 3u);
  EXPECT_GE(e.values[0], e.values[1]);
  EXPECT_GE(e.values[1], e.values[2]);
  EXPECT_NEAR(e.values[0] + e.values[1] + e.values[2], 12.0, 1e-12);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t r = 0; r < 3; ++r) {
      double av = 0;
      for (std::size_t k = 0; k < 3; ++k) av += a(r, k) * e.vectors(k, c);
      EXPECT_NEAR(av, e.values[c] * e.vectors(r, c), 1e-12);
    }
  }
}

TEST(Geometry, MdsRecoversPlanarConfigurations) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::array<double, 2>> pts(20);
    for (auto& p : pts) p = {g(rng), g(rng)};
    const auto d = pairwise(pts);
    const auto x = tl::classical_mds(d, 2);
    EXPECT_LE(max_reconstruction_error(d, x), 1e-6);
    double cx = 0, cy = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      cx += x(i, 0);
      cy += x(i, 1);
    }
    EXPECT_NEAR(cx, 0.0, 1e-9);
    EXPECT_NEAR(cy, 0.0, 1e-9);
  }
}

TEST(Geometry, MdsOfCollinearPoints) {
  const auto d = pairwise({{0, 0}, {1, 0}, {3, 0}});
  const auto x = tl::classical_mds(d, 2);
  EXPECT_LE(max_reconstruction_error(d, x), 1e-9);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(x(i, 1), 0.0, 1e-7);
}

TEST(Geometry, MdsRejectsBadMatrices) {
  tl::Matrix d(2, 2);
  d(0, 1) = 1;
  d(1, 0) = 2;
  EXPECT_THROW(tl::classical_mds(d), tl::Error);
  tl::Matrix diag(2, 2);
  diag(0, 0) = 1;
  EXPECT_THROW(tl::classical_mds(diag), tl::Error);
  EXPECT_THROW(tl::classical_mds(tl::Matrix(2, 3)), tl::Error);
}

TEST(Geometry, IntertopicMap) {
  const auto pc = tltest::planted_corpus(4, 40, 120, 30, 6);
  const auto m = tl::train_lda(pc.corpus, pc.vocab, {4, 5.0, 0.01, 40, 3});
  const auto map = tl::intertopic_map(m);
  ASSERT_EQ(map.distance.rows, 4u);
  ASSERT_EQ(map.coords.rows, 4u);
  ASSERT_EQ(map.coords.cols, 2u);
  // prevalence oracle: token mass of each topic over all documents
  double total = 0;
  for (double p : map.prevalence) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (std::size_t k = 0; k < 4; ++k) {
    double mass = 0, tokens = 0;
    for (std::size_t d = 0; d < m.num_docs(); ++d) {
      mass += m.theta_row(d)[k] * static_cast<double>(m.doc_lengths[d]);
      tokens += static_cast<double>(m.doc_lengths[d]);
    }
    EXPECT_NEAR(map.prevalence[k], mass / tokens, 1e-12);
    EXPECT_EQ(map.distance(k, k), 0.0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(map.distance(k, j), map.distance(j, k));
  }
}
