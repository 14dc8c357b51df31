#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "rilab/gff.hpp"
#include "rilab/stats.hpp"

using namespace rilab;

namespace {
GreenTable& table3() {
  static GreenTable G(3);
  return G;
}
}  // namespace

TEST_CASE("single-site factorization is the square root of the variance") {
  const CovFactorization f = factorize(Window(Point::zero(3), 0), table3());
  REQUIRE(f.chol.rows() == 1);
  CHECK(f.chol(0, 0) == doctest::Approx(std::sqrt(table3().g0())).epsilon(1e-12));
  CHECK(f.has_window);
}

TEST_CASE("pair factorization reproduces the Gram matrix in any order") {
  GreenTable& G = table3();
  const double g0 = G.g0(), g1 = G({1, 0, 0});
  for (const auto& sites : {std::vector<Point>{Point::zero(3), Point{1, 0, 0}},
                            std::vector<Point>{Point{1, 0, 0}, Point::zero(3)}}) {
    const CovFactorization f = factorize(sites, G);
    const Eigen::MatrixXd gram = f.chol * f.chol.transpose();
    CHECK(gram(0, 0) == doctest::Approx(g0).epsilon(1e-10));
    CHECK(gram(1, 1) == doctest::Approx(g0).epsilon(1e-10));
    CHECK(gram(0, 1) == doctest::Approx(g1).epsilon(1e-10));
    CHECK_FALSE(f.jittered);
  }
}

TEST_CASE("factorization reconstruction on a window, spot-checked") {
  GreenTable& G = table3();
  const Window w(Point::zero(3), 1);
  const CovFactorization f = factorize(w, G);
  const Eigen::MatrixXd gram = f.chol * f.chol.transpose();
  for (std::size_t i = 0; i < f.sites.size(); i += 7)
    for (std::size_t j = 0; j <= i; j += 5)
      CHECK(std::abs(gram(i, j) - G(f.sites[i] - f.sites[j])) < 1e-8);
}

TEST_CASE("factorization rejects oversized and degenerate input") {
  GreenTable& G = table3();
  CHECK_THROWS_AS(factorize(Window(Point::zero(3), 6), G), std::length_error);  // 2197 > 1331
  CHECK_THROWS_AS(factorize(std::vector<Point>{Point::zero(3), Point::zero(3)}, G),
                  std::invalid_argument);
  CHECK_THROWS_AS(factorize(std::vector<Point>{}, G), std::invalid_argument);
  CHECK(factorize(Window(Point::zero(3), 6), G, 3000).sites.size() == 2197);
}

TEST_CASE("sampling is deterministic in the seed") {
  const CovFactorization f = factorize(Window(Point::zero(3), 1), table3());
  const auto a = sample(f, 3, 42);
  const auto b = sample(f, 3, 42);
  const auto c = sample(f, 3, 43);
  REQUIRE(a.size() == 3);
  CHECK(sample(f, 0, 42).empty());
  for (int i = 0; i < 3; ++i) {
    CHECK(a[i].values == b[i].values);
    CHECK(a[i].seed == b[i].seed);
  }
  CHECK(a[0].values != c[0].values);
  // batch boundaries must not change the draws
  const Eigen::MatrixXd m = sample_matrix(f, 300, 42);
  for (std::size_t j = 0; j < a[2].values.size(); ++j)
    CHECK(m(static_cast<Eigen::Index>(j), 2) == a[2].values[j]);
}

TEST_CASE("sample variance matches g(0) at a single site") {
  GreenTable& G = table3();
  const CovFactorization f = factorize(Window(Point::zero(3), 0), G);
  const Eigen::MatrixXd m = sample_matrix(f, 100000, 2026);
  const std::vector<double> xs(m.data(), m.data() + m.cols());
  const Moments mom = moments(xs);
  CHECK(std::abs(mom.mean) < 3.0 * mom.se_mean);
  CHECK(std::abs(mom.var - G.g0()) < 3.0 * std::sqrt(2.0 / 100000.0) * G.g0());
}

TEST_CASE("sample covariance matches g(e1) on a pair") {
  GreenTable& G = table3();
  const std::vector<Point> pair{Point::zero(3), Point{1, 0, 0}};
  const CovFactorization f = factorize(pair, G);
  const std::int64_t n = 100000;
  const Eigen::MatrixXd m = sample_matrix(f, n, 77);
  std::vector<double> xs(n), ys(n);
  for (std::int64_t i = 0; i < n; ++i) {
    xs[i] = m(0, i);
    ys[i] = m(1, i);
  }
  const CovEstimate ce = covariance_est(xs, ys);
  const double g1 = G({1, 0, 0});
  const double se_oracle = std::sqrt((g1 * g1 + G.g0() * G.g0()) / static_cast<double>(n));
  CHECK(std::abs(ce.cov - g1) < 3.0 * se_oracle);
}

TEST_CASE("field is symmetric in law at a fixed site") {
  const CovFactorization f = factorize(Window(Point::zero(3), 1), table3());
  const std::int64_t n = 10000;
  const Eigen::MatrixXd m = sample_matrix(f, n, 555);
  const Eigen::Index site = 13;  // some interior row
  std::vector<double> first, second;
  for (std::int64_t i = 0; i < n; ++i)
    (i < n / 2 ? first : second).push_back(i < n / 2 ? m(site, i) : -m(site, i));
  const KsResult ks = ks_two_sample(first, second);
  CHECK(ks.p > 0.01);
}

TEST_CASE("maximum over a small box obeys the union tail bound") {
  GreenTable& G = table3();
  const Window w(Point::zero(3), 2);
  const CovFactorization f = factorize(w, G);
  const std::int64_t n = 2000;
  const Eigen::MatrixXd m = sample_matrix(f, n, 31);
  const double sigma = std::sqrt(G.g0());
  for (double h : {2.0, 3.0, 4.0}) {
    std::int64_t exceed = 0;
    for (std::int64_t i = 0; i < n; ++i)
      if (m.col(i).maxCoeff() >= h) ++exceed;
    const double p = static_cast<double>(exceed) / static_cast<double>(n);
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
    const double bound = static_cast<double>(w.site_count()) * normal_tail(h / sigma);
    CHECK(p <= bound + 3.0 * se + 1e-12);
  }
}

TEST_CASE("level sets: thresholds, nesting, one- vs two-sided") {
  const CovFactorization f = factorize(Window(Point::zero(3), 1), table3());
  const FieldSample fs = sample(f, 1, 9)[0];

  const SiteConfig all = two_sided_level_set(fs, 0.0);
  CHECK(all.open_count() == 27);

  double maxabs = 0;
  for (double v : fs.values) maxabs = std::max(maxabs, std::abs(v));
  CHECK(two_sided_level_set(fs, maxabs + 1.0).open_count() == 0);
  CHECK_THROWS_AS(two_sided_level_set(fs, -0.5), std::invalid_argument);

  const SiteConfig lo = two_sided_level_set(fs, 0.4), hi = two_sided_level_set(fs, 1.1);
  for (std::size_t i = 0; i < lo.bits.size(); ++i) CHECK(hi.bits[i] <= lo.bits[i]);

  const SiteConfig one = one_sided_level_set(fs, 0.4);
  for (std::size_t i = 0; i < lo.bits.size(); ++i) CHECK(one.bits[i] <= lo.bits[i]);

  CHECK(one_sided_level_set(fs, -std::numeric_limits<double>::infinity()).open_count() == 27);

  FieldSample neg = fs;
  for (double& v : neg.values) v = -v;
  const SiteConfig flipped = one_sided_level_set(neg, 0.4);
  for (std::size_t i = 0; i < flipped.bits.size(); ++i)
    CHECK(flipped.bits[i] == (fs.values[i] <= -0.4 ? 1 : 0));
}
