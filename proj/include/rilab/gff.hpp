#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rilab/lattice.hpp"
#include "rilab/percolation.hpp"
#include "rilab/potential.hpp"

namespace rilab {

// Cholesky factor of the covariance (g(x-y)) over an ordered site list.
// The ordering is part of the object: samples come out in the same order.
struct CovFactorization {
  std::vector<Point> sites;
  Eigen::MatrixXd chol;  // lower triangular, chol * chol^T = Gram
  bool jittered = false;
  Window window;          // meaningful only when built from a window
  bool has_window = false;
};

// Dense factorization of the free-field covariance. Site count is capped:
// larger studies should tile statistics over translated windows instead.
CovFactorization factorize(const std::vector<Point>& sites, const GreenTable& G,
                           std::int64_t max_sites = 1331);
CovFactorization factorize(const Window& w, const GreenTable& G, std::int64_t max_sites = 1331);

// One centered Gaussian field on a window, values in window site order.
struct FieldSample {
  Window window;
  std::vector<double> values;
  std::uint64_t seed = 0;

  double at(const Point& p) const { return values[static_cast<std::size_t>(window.index_of(p))]; }
};

// i.i.d. field samples; sample i is fully determined by (fact, seed, i).
std::vector<FieldSample> sample(const CovFactorization& fact, std::int64_t n, std::uint64_t seed);

// Same draws as a sites-by-n matrix; works for factorization over bare site
// lists too, and is the cheap path for bulk statistics.
Eigen::MatrixXd sample_matrix(const CovFactorization& fact, std::int64_t n, std::uint64_t seed);

// {x : |phi_x| >= h}, h >= 0.
SiteConfig two_sided_level_set(const FieldSample& f, double h);

// {x : phi_x >= h}; h = -infinity gives the all-ones config.
SiteConfig one_sided_level_set(const FieldSample& f, double h);

}  // namespace rilab
