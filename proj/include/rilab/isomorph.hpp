#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rilab/gff.hpp"
#include "rilab/interlacements.hpp"
#include "rilab/lattice.hpp"
#include "rilab/potential.hpp"

namespace rilab {

// A batch of i.i.d. samples of a site-indexed functional over a window.
// Column j of values is sample j, rows follow the window's lex site order.
// bias_bound caps the per-site distributional error introduced by walk
// truncation (zero for purely Gaussian batches).
struct IsoBatch {
  Window window;
  double u = 0;
  Eigen::MatrixXd values;
  double bias_bound = 0;
  std::uint64_t seed_walks = 0;  // zero when no walks were involved
  std::uint64_t seed_field = 0;

  std::vector<double> row(const Point& x) const;
};

// Samples of x -> L_x + phi_x^2 / 2 where L is an occupation field at level u
// and phi an independent centered Gaussian field with Green covariance.
// seed_walks and seed_field drive the two independent factors; passing the
// same value for both is a configuration error.
IsoBatch sample_lhs(const Window& w, double u, std::int64_t n,
                    std::uint64_t seed_walks, std::uint64_t seed_field,
                    const EquilibriumMeasure& em, std::int64_t kill_radius,
                    const CovFactorization& fact, const GreenTable& G);

// Samples of x -> (phi_x + sqrt(2u))^2 / 2.
IsoBatch sample_rhs(const Window& w, double u, std::int64_t n,
                    std::uint64_t seed_field, const CovFactorization& fact);

struct SiteTest {
  Point site;
  double ks_d = 0, ks_p = 0;
  double mean_a = 0, se_a = 0;
  double mean_b = 0, se_b = 0;
  bool ks_pass = false;
  bool mean_pass = false;
};

struct PairTest {
  Point x, y;
  double cov_a = 0, se_a = 0;
  double cov_b = 0, se_b = 0;
  bool pass = false;
};

// Two-sample comparison of batches a and b.
//  - per site: two-sample KS; a site passes when p > significance or when
//    the statistic is within the critical value plus the truncation bias.
//  - per site: mean intervals widened to familywise level ~ significance/2
//    across all tested sites, plus bias.
//  - per pair: covariance intervals at the same familywise level; the walk
//    truncation enters covariances through products, bounded by
//    cov_bias_factor * bias.
// Overall pass requires >= min_site_rate of KS passes and every moment
// interval to overlap.
struct IsoReport {
  double significance = 0.01;
  double min_site_rate = 0.95;
  std::int64_t n = 0;
  double bias_bound = 0;
  bool low_power = false;  // n below 1000: results are advisory
  std::vector<SiteTest> sites;
  std::vector<PairTest> pairs;
  double site_pass_rate = 0;
  bool ks_pass = false;
  bool moments_pass = false;
  bool pass = false;
  std::uint64_t seeds[4] = {0, 0, 0, 0};  // a walks/field, b walks/field
};

IsoReport iso_test(const IsoBatch& a, const IsoBatch& b,
                   const std::vector<Point>& sites,
                   const std::vector<std::pair<Point, Point>>& pairs,
                   double significance = 0.01);

std::string iso_report_json(const IsoReport& r);

// Stochastic-ordering checks between occupation level sets and two-sided
// Gaussian level sets at height h = sqrt(2 alpha) - sqrt(2u) (needs
// alpha >= u).
//  - inclusion_occupation: {L + phi^2/2 > alpha} contains {L > alpha}
//    sitewise on coupled samples.
//  - inclusion_gaussian: {(phi + sqrt(2u))^2/2 > alpha} is contained in
//    {|phi| > h} sitewise.
//  - ordering: box-to-sphere crossing probability at scale cross_scale is
//    no larger for the occupation set than for the two-sided set, up to
//    three joint standard errors.  Walk truncation only thins the
//    occupation side, so it cannot mask a violation.
struct DominationReport {
  double u = 0, alpha = 0, h = 0;
  std::int64_t n = 0;
  std::int64_t cross_scale = 0;
  bool inclusion_occupation = false;
  bool inclusion_gaussian = false;
  double p_cross_occupation = 0, se_occupation = 0;
  double p_cross_gaussian = 0, se_gaussian = 0;
  bool ordering = false;
  bool pass = false;
};

DominationReport domination_check(const Window& w, double u, double alpha,
                                  std::int64_t cross_scale, std::int64_t n,
                                  std::uint64_t seed_walks,
                                  std::uint64_t seed_field,
                                  const EquilibriumMeasure& em,
                                  std::int64_t kill_radius,
                                  const CovFactorization& fact,
                                  const GreenTable& G);

std::string domination_json(const DominationReport& r);

}  // namespace rilab
