#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "rilab/lattice.hpp"
#include "rilab/stats.hpp"

namespace rilab {

// Green function of simple random walk on Z^d (d >= 3), evaluated as a
// Fourier integral over [0,pi]^d with dyadic shell refinement toward the
// integrable singularity at k = 0. base_order 0 picks a default per dim.
double green(const Point& x, int dim, double tol = 1e-10, int base_order = 0);

// Leading far-field behaviour C_d |x|_2^(2-d).
double green_asymptotic(const Point& x, int dim);
double green_asymptotic_radial(double r, int dim);

// Pointwise bound: g(x) <= green_upper_radial(r, d) whenever |x|_2 >= r.
// Used when accounting for walk-truncation bias.
double green_upper_radial(double r, int dim);

// Memoizing Green-function table, canonical under coordinate permutations
// and sign flips. Computes on miss; preload() tabulates a window up front
// (required before sharing across threads, since misses mutate the memo).
class GreenTable {
 public:
  explicit GreenTable(int dim, double tol = 1e-10, int quadrature_order = 0);

  int dim() const { return dim_; }
  double tolerance() const { return tol_; }
  int quadrature_order() const { return order_; }

  double operator()(const Point& x) const;
  double g0() const { return g0_; }
  double return_probability() const { return 1.0 - 1.0 / g0_; }

  // Upper bound on g(x), exact for small |x|, radial bound far out.
  double upper(const Point& x) const;

  void preload(std::int64_t radius);
  std::size_t size() const { return values_.size(); }
  const std::unordered_map<Point, double, PointHash>& entries() const { return values_; }

 private:
  Point canonical(const Point& x) const;

  int dim_;
  double tol_;
  int order_;
  double g0_ = 0.0;
  mutable std::unordered_map<Point, double, PointHash> values_;
};

struct EquilibriumMeasure {
  std::vector<Point> sites;                        // all of K, lexicographic
  std::unordered_map<Point, double, PointHash> e;  // weight per site, 0 off the inner boundary
  double cap = 0.0;
  bool jittered = false;  // diagonal jitter was needed to factor the Gram matrix
};

// Solve sum_{y in K} g(x-y) e(y) = 1 on the inner boundary of K. Sites whose
// neighbours all lie in K cannot escape without re-entering, so their weight
// is 0 and the maximum principle extends the identity to the interior.
EquilibriumMeasure equilibrium(const std::vector<Point>& K, const GreenTable& G);

// Same measure for an axis-aligned ball, via the symmetry-orbit reduction of
// the boundary system (weights are translation-covariant, so any center works).
EquilibriumMeasure equilibrium(const Window& w, const GreenTable& G);

double capacity(const std::vector<Point>& K, const GreenTable& G);
double capacity(const Window& w, const GreenTable& G);

// P_y[walk ever hits K] = sum_x g(y-x) e(x).
double hitting_probability(const Point& y, const EquilibriumMeasure& em, const GreenTable& G);

// Monte Carlo estimate of e_K(x): the fraction of walks from x that do not
// return to K before leaving B(0, kill_radius). If tail_hit is set it must
// return P_y[hit K] for exit sites y; surviving walks then score
// 1 - tail_hit(y) instead of 1, which removes the truncation bias at the
// price of trusting the supplied hitting probability.
McEstimate escape_probability_mc(const Point& x, const std::vector<Point>& K,
                                 std::int64_t kill_radius, std::int64_t n, std::uint64_t seed,
                                 const GreenTable& G,
                                 const std::function<double(const Point&)>& tail_hit = {},
                                 double max_bias = 1.0);

// Monte Carlo estimate of P_0[walk revisits the origin at least n times].
// The target value is rho^n with rho the return probability.
McEstimate visit_probability_check(int n, std::int64_t samples, std::uint64_t seed, int dim,
                                   std::int64_t kill_radius, const GreenTable& G);

// Smallest kill radius whose truncation-bias bound
// capacity_bound * green_upper_radial(R - k_radius) is at most max_bias.
std::int64_t default_kill_radius(double capacity_bound, std::int64_t k_radius, int dim,
                                 double max_bias = 1e-4);

// Independent oracle: solve (I - P) v = delta_0 on the box B(0, radius - 1)
// with the far-field asymptote as Dirichlet data on the sphere of radius
// `radius`, by conjugate gradients. Returns v at the requested points.
std::vector<double> green_box_solve(const std::vector<Point>& eval, int dim, std::int64_t radius,
                                    double cg_tol = 1e-10);

}  // namespace rilab
