#include "rilab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Dense>

#include "rilab/rng.hpp"

namespace rilab {

namespace {

struct GlRule {
  std::vector<double> x, w;  // nodes and weights on [0,1]
};

// Gauss-Legendre nodes by Newton iteration on P_n; cached per order.
// The cache mutates on miss, so quadrature is single-threaded by design.
const GlRule& gl_rule(int n) {
  static std::unordered_map<int, GlRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GlRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    {  // refresh dp at the converged node for the weight
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
    }
    double w = 2.0 / ((1.0 - t * t) * dp * dp);
    r.x[i] = 0.5 * (1.0 - t);
    r.w[i] = 0.5 * w;
    r.x[n - 1 - i] = 0.5 * (1.0 + t);
    r.w[n - 1 - i] = 0.5 * w;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

int default_order(int dim) {
  switch (dim) {
    case 3: return 10;
    case 4: return 8;
    case 5: return 8;
    default: return 7;
  }
}

// Integral of prod_j cos(k_j x_j) / (1 - (1/d) sum_j cos k_j) over the box
// with axis j spanning [s/2, s] if bit j of mask is set, [0, s/2] otherwise.
double shell_box_integral(const Point& x, int dim, double s, unsigned mask, int base_order) {
  std::array<std::vector<double>, kMaxDim> cx, vs, wt;
  std::array<int, kMaxDim> nn{};
  for (int j = 0; j < dim; ++j) {
    const double a = (mask >> j & 1u) ? 0.5 * s : 0.0;
    const double width = 0.5 * s;
    const double ax = static_cast<double>(std::llabs(x[j]));
    int order = base_order + static_cast<int>(std::ceil(0.65 * width * ax));
    if (order > 2000) throw std::runtime_error("green: oscillation order out of range");
    const GlRule& rule = gl_rule(order);
    nn[j] = order;
    cx[j].resize(order);
    vs[j].resize(order);
    wt[j].resize(order);
    for (int i = 0; i < order; ++i) {
      const double k = a + width * rule.x[i];
      cx[j][i] = std::cos(k * static_cast<double>(x[j]));
      // 1 - cos k without cancellation: the denominator is their mean over axes
      const double sh = std::sin(0.5 * k);
      vs[j][i] = 2.0 * sh * sh;
      wt[j][i] = width * rule.w[i];
    }
  }
  const double inv_d = 1.0 / dim;
  // recurse over leading axes, accumulate along the last one
  auto rec = [&](auto&& self, int axis, double prod, double vsum) -> double {
    if (axis == dim - 1) {
      double acc = 0;
      const auto& cxa = cx[axis];
      const auto& vsa = vs[axis];
      const auto& wta = wt[axis];
      for (int i = 0; i < nn[axis]; ++i)
        acc += prod * cxa[i] * wta[i] / (inv_d * (vsum + vsa[i]));
      return acc;
    }
    double acc = 0;
    for (int i = 0; i < nn[axis]; ++i)
      acc += self(self, axis + 1, prod * cx[axis][i] * wt[axis][i], vsum + vs[axis][i]);
    return acc;
  };
  return rec(rec, 0, 1.0, 0.0);
}

}  // namespace

double green(const Point& x, int dim, double tol, int base_order) {
  if (dim < 3) throw std::domain_error("green: requires d >= 3, the walk is recurrent below");
  if (dim > kMaxDim) throw std::invalid_argument("green: dimension exceeds kMaxDim");
  if (x.dim != dim) throw std::invalid_argument("green: point dimension mismatch");
  if (tol <= 0) throw std::invalid_argument("green: tolerance must be positive");
  if (base_order == 0) base_order = default_order(dim);
  const double pi = std::numbers::pi;

  double total = 0.0;
  double s = pi;
  for (int level = 0;; ++level, s *= 0.5) {
    for (unsigned mask = 1; mask < (1u << dim); ++mask)
      total += shell_box_integral(x, dim, s, mask, base_order);
    // what remains is [0, s/2]^d; bound the integrand by d*pi^2 / (2|k|^2)
    // and |k|^{-2} by |k|_inf^{-2}, giving eps^{d-2} * d/(d-2) for the cube
    const double eps = 0.5 * s;
    const double tail = std::pow(pi, -dim) * (dim * pi * pi / 2.0) *
                        (static_cast<double>(dim) / (dim - 2)) * std::pow(eps, dim - 2);
    if (tail < 0.1 * tol) break;
    if (level > 400) throw std::runtime_error("green: shell refinement failed to converge");
  }
  return total * std::pow(pi, -dim);
}

double green_asymptotic_radial(double r, int dim) {
  if (dim < 3) throw std::domain_error("green_asymptotic_radial: requires d >= 3");
  if (r <= 0) throw std::invalid_argument("green_asymptotic_radial: radius must be positive");
  const double cd = std::tgamma(0.5 * dim - 1.0) * dim / (2.0 * std::pow(std::numbers::pi, 0.5 * dim));
  return cd * std::pow(r, 2.0 - dim);
}

double green_asymptotic(const Point& x, int dim) {
  if (x.dim != dim) throw std::invalid_argument("green_asymptotic: point dimension mismatch");
  return green_asymptotic_radial(x.norm_l2(), dim);
}

double green_upper_radial(double r, int dim) {
  if (dim < 3) throw std::domain_error("green_upper_radial: requires d >= 3");
  // g(0) is largest at d = 3 (about 1.5164), so 1.6 covers every r below 1.
  if (r < 1.0) return 1.6;
  // Lattice corrections to the asymptote decay like r^{-2}; the factors are
  // checked against tabulated values in the tests.
  const double safety = (r < 10.0) ? 1.35 : 1.02;
  return safety * green_asymptotic_radial(r, dim);
}

GreenTable::GreenTable(int dim, double tol, int quadrature_order)
    : dim_(dim), tol_(tol), order_(quadrature_order == 0 ? default_order(dim) : quadrature_order) {
  g0_ = green(Point::zero(dim), dim, tol, order_);
  values_.emplace(Point::zero(dim), g0_);
}

Point GreenTable::canonical(const Point& x) const {
  Point c = Point::zero(dim_);
  for (int i = 0; i < dim_; ++i) c[i] = std::llabs(x[i]);
  std::sort(c.v.begin(), c.v.begin() + dim_, std::greater<std::int64_t>());
  return c;
}

double GreenTable::operator()(const Point& x) const {
  if (x.dim != dim_) throw std::invalid_argument("GreenTable: point dimension mismatch");
  const Point c = canonical(x);
  auto it = values_.find(c);
  if (it != values_.end()) return it->second;
  const double v = green(c, dim_, tol_, order_);
  values_.emplace(c, v);
  return v;
}

double GreenTable::upper(const Point& x) const {
  if (x.dim != dim_) throw std::invalid_argument("GreenTable: point dimension mismatch");
  if (x.norm_linf() <= 8) return (*this)(x);
  return green_upper_radial(x.norm_l2(), dim_);
}

void GreenTable::preload(std::int64_t radius) {
  Point c = Point::zero(dim_);
  // canonical tuples r >= c_0 >= c_1 >= ... >= c_{d-1} >= 0
  auto rec = [&](auto&& self, int axis, std::int64_t hi) -> void {
    if (axis == dim_) {
      (*this)(c);
      return;
    }
    for (std::int64_t v = 0; v <= hi; ++v) {
      c[axis] = v;
      self(self, axis + 1, v);
    }
  };
  rec(rec, 0, radius);
}

namespace {

// Shared dense boundary solve: Gram matrix from row/column point sets already
// reduced as the caller requires. Returns the solution of  A w = b.
Eigen::VectorXd solve_spd(Eigen::MatrixXd A, const Eigen::VectorXd& b, bool* jittered) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    A.diagonal().array() += 1e-12 * A.diagonal().mean();
    if (jittered) *jittered = true;
    llt.compute(A);
    if (llt.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
      const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
      throw std::runtime_error("equilibrium: Gram matrix failed to factor, eigenvalue range [" +
                               std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  }
  return llt.solve(b);
}

double clip_weight(double w) {
  if (w < -1e-6) throw std::runtime_error("equilibrium: substantially negative weight " + std::to_string(w));
  return (w < 1e-10) ? 0.0 : w;
}

}  // namespace

EquilibriumMeasure equilibrium(const std::vector<Point>& K, const GreenTable& G) {
  if (K.empty()) throw std::invalid_argument("equilibrium: empty set");
  const int d = G.dim();
  std::vector<Point> sites = K;
  for (const Point& p : sites)
    if (p.dim != d) throw std::invalid_argument("equilibrium: point dimension mismatch");
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());

  std::unordered_set<Point, PointHash> in_k(sites.begin(), sites.end());
  std::vector<Point> boundary;
  for (const Point& p : sites) {
    bool buried = true;
    for (const Point& q : neighbors(p))
      if (!in_k.count(q)) {
        buried = false;
        break;
      }
    if (!buried) boundary.push_back(p);
  }
  const std::size_t nb = boundary.size();
  if (nb > 4000)
    throw std::invalid_argument("equilibrium: boundary too large for a dense solve; use the window overload");

  Eigen::MatrixXd A(nb, nb);
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = G(boundary[i] - boundary[j]);
      A(i, j) = v;
      A(j, i) = v;
    }

  EquilibriumMeasure em;
  Eigen::VectorXd w = solve_spd(std::move(A), Eigen::VectorXd::Ones(nb), &em.jittered);

  em.sites = std::move(sites);
  for (const Point& p : em.sites) em.e.emplace(p, 0.0);
  double cap = 0;
  for (std::size_t i = 0; i < nb; ++i) {
    const double wi = clip_weight(w[i]);
    em.e[boundary[i]] = wi;
    cap += wi;
  }
  em.cap = cap;
  return em;
}

EquilibriumMeasure equilibrium(const Window& win, const GreenTable& G) {
  const int d = G.dim();
  if (win.dim() != d) throw std::invalid_argument("equilibrium: window dimension mismatch");
  if (win.radius == 0) {
    EquilibriumMeasure em = equilibrium(std::vector<Point>{Point::zero(d)}, G);
    if (!(win.center == Point::zero(d))) {
      em.sites[0] = win.center;
      em.e.clear();
      em.e.emplace(win.center, em.cap);
    }
    return em;
  }

  // centered problem; orbits of the boundary under permutations/sign flips
  const std::vector<Point> boundary = sphere_points(d, win.radius);
  auto canon = [&](const Point& p) {
    Point c = Point::zero(d);
    for (int i = 0; i < d; ++i) c[i] = std::llabs(p[i]);
    std::sort(c.v.begin(), c.v.begin() + d, std::greater<std::int64_t>());
    return c;
  };
  std::vector<Point> reps;
  std::unordered_map<Point, int, PointHash> rep_index;
  std::vector<double> orbit_size;
  std::vector<int> orbit_of(boundary.size());
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const Point c = canon(boundary[i]);
    auto [it, inserted] = rep_index.emplace(c, static_cast<int>(reps.size()));
    if (inserted) {
      reps.push_back(c);
      orbit_size.push_back(0);
    }
    orbit_of[i] = it->second;
    orbit_size[it->second] += 1;
  }
  const std::size_t nr = reps.size();

  // M(i,j) = sum over the j-th orbit of g(rep_i - y); row-scaling by the
  // orbit sizes makes the system the SPD Gram matrix of orbit indicators.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nr, nr);
  for (std::size_t yi = 0; yi < boundary.size(); ++yi) {
    const int j = orbit_of[yi];
    for (std::size_t i = 0; i < nr; ++i) M(i, j) += G(reps[i] - boundary[yi]);
  }
  Eigen::MatrixXd S(nr, nr);
  Eigen::VectorXd b(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    b[i] = orbit_size[i];
    for (std::size_t j = 0; j < nr; ++j) S(i, j) = orbit_size[i] * M(i, j);
  }
  S = 0.5 * (S + S.transpose()).eval();

  EquilibriumMeasure em;
  Eigen::VectorXd c = solve_spd(std::move(S), b, &em.jittered);

  const Window centered(Point::zero(d), win.radius);
  em.sites.reserve(static_cast<std::size_t>(centered.site_count()));
  double cap = 0;
  for (std::int64_t idx = 0; idx < centered.site_count(); ++idx) {
    const Point p = centered.site(idx);
    double w = 0.0;
    if (p.norm_linf() == win.radius) w = clip_weight(c[rep_index.at(canon(p))]);
    const Point shifted = p + win.center;
    em.sites.push_back(shifted);
    em.e.emplace(shifted, w);
    cap += w;
  }
  std::sort(em.sites.begin(), em.sites.end());
  em.cap = cap;
  return em;
}

double capacity(const std::vector<Point>& K, const GreenTable& G) { return equilibrium(K, G).cap; }
double capacity(const Window& w, const GreenTable& G) { return equilibrium(w, G).cap; }

double hitting_probability(const Point& y, const EquilibriumMeasure& em, const GreenTable& G) {
  if (y.dim != G.dim()) throw std::invalid_argument("hitting_probability: dimension mismatch");
  double h = 0;
  for (const auto& [x, w] : em.e)
    if (w > 0) h += G(y - x) * w;
  return h;
}

McEstimate escape_probability_mc(const Point& x, const std::vector<Point>& K,
                                 std::int64_t kill_radius, std::int64_t n, std::uint64_t seed,
                                 const GreenTable& G,
                                 const std::function<double(const Point&)>& tail_hit,
                                 double max_bias) {
  const int d = G.dim();
  std::unordered_set<Point, PointHash> in_k;
  std::int64_t k_extent = 0;
  for (const Point& p : K) {
    if (p.dim != d) throw std::invalid_argument("escape_probability_mc: dimension mismatch");
    in_k.insert(p);
    k_extent = std::max(k_extent, p.norm_linf());
  }
  if (!in_k.count(x)) throw std::invalid_argument("escape_probability_mc: start point must lie in K");
  if (kill_radius <= k_extent)
    throw std::invalid_argument("escape_probability_mc: kill radius must exceed the extent of K");
  if (n < 1) throw std::invalid_argument("escape_probability_mc: need at least one walk");

  // union bound over sites of K for a surviving walk to come back
  double bias = 0.0;
  if (!tail_hit) {
    const double sep = static_cast<double>(kill_radius - k_extent);
    bias = static_cast<double>(in_k.size()) / G.g0() * green_upper_radial(sep, d);
    if (bias > max_bias)
      throw std::invalid_argument("escape_probability_mc: kill radius too small for requested bias");
  }

  double sum = 0, sumsq = 0;
  for (std::int64_t walk = 0; walk < n; ++walk) {
    Rng rng(derive_seed(seed, "escape", static_cast<std::uint64_t>(walk)));
    Point pos = x;
    double score = 0.0;
    for (;;) {
      const std::uint64_t t = rng.uniform_int(2 * static_cast<std::uint64_t>(d));
      const int axis = static_cast<int>(t >> 1);
      pos[axis] += (t & 1) ? 1 : -1;
      if (pos.norm_linf() >= kill_radius) {
        score = tail_hit ? 1.0 - tail_hit(pos) : 1.0;
        break;
      }
      if (in_k.count(pos)) break;
    }
    sum += score;
    sumsq += score * score;
  }
  McEstimate est;
  est.n = n;
  est.value = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sumsq - sum * sum / n) / std::max<std::int64_t>(1, n - 1));
  est.se = std::sqrt(var / static_cast<double>(n));
  est.bias_bound = bias;
  return est;
}

McEstimate visit_probability_check(int n, std::int64_t samples, std::uint64_t seed, int dim,
                                   std::int64_t kill_radius, const GreenTable& G) {
  if (n < 0) throw std::invalid_argument("visit_probability_check: n must be non-negative");
  if (dim != G.dim()) throw std::invalid_argument("visit_probability_check: dimension mismatch");
  if (kill_radius < 1) throw std::invalid_argument("visit_probability_check: kill radius must be positive");
  McEstimate est;
  est.n = samples;
  if (n == 0) {  // the walk starts at the origin, the first visit is immediate
    est.value = 1.0;
    return est;
  }
  const Point origin = Point::zero(dim);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, "visit", static_cast<std::uint64_t>(i)));
    Point pos = origin;
    int returns = 0;
    for (;;) {
      const std::uint64_t t = rng.uniform_int(2 * static_cast<std::uint64_t>(dim));
      const int axis = static_cast<int>(t >> 1);
      pos[axis] += (t & 1) ? 1 : -1;
      if (pos == origin) {
        if (++returns >= n) {
          ++hits;
          break;
        }
      } else if (pos.norm_linf() >= kill_radius) {
        break;
      }
    }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  est.value = p;
  est.se = std::sqrt(std::max(0.0, p * (1 - p)) / static_cast<double>(samples));
  // a killed walk could still have returned once more
  est.bias_bound = green_upper_radial(static_cast<double>(kill_radius), dim) / G.g0();
  return est;
}

std::int64_t default_kill_radius(double capacity_bound, std::int64_t k_radius, int dim,
                                 double max_bias) {
  if (capacity_bound <= 0 || max_bias <= 0)
    throw std::invalid_argument("default_kill_radius: bounds must be positive");
  if (dim < 3) throw std::domain_error("default_kill_radius: requires d >= 3");
  // closed-form guess from the far branch of the radial bound, then settle
  const double cd = 1.02 * std::tgamma(0.5 * dim - 1.0) * dim / (2.0 * std::pow(std::numbers::pi, 0.5 * dim));
  double sep_guess = std::pow(capacity_bound * cd / max_bias, 1.0 / (dim - 2));
  std::int64_t sep = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(sep_guess)) - 2);
  while (capacity_bound * green_upper_radial(static_cast<double>(sep), dim) > max_bias) ++sep;
  return k_radius + sep;
}

std::vector<double> green_box_solve(const std::vector<Point>& eval, int dim, std::int64_t radius,
                                    double cg_tol) {
  if (dim < 3) throw std::domain_error("green_box_solve: requires d >= 3");
  if (radius < 2) throw std::invalid_argument("green_box_solve: radius too small");
  const std::int64_t half = radius - 1;
  const std::int64_t side = 2 * half + 1;
  const std::int64_t total = checked_pow(side, dim, "green_box_solve size");
  if (total > 30'000'000) throw std::invalid_argument("green_box_solve: box too large");
  const std::size_t nsz = static_cast<std::size_t>(total);

  std::array<std::int64_t, kMaxDim> stride{};
  stride[dim - 1] = 1;
  for (int j = dim - 2; j >= 0; --j) stride[j] = stride[j + 1] * side;

  auto site_index = [&](const Point& p) -> std::int64_t {
    std::int64_t idx = 0;
    for (int j = 0; j < dim; ++j) idx += (p[j] + half) * stride[j];
    return idx;
  };
  for (const Point& p : eval) {
    if (p.dim != dim) throw std::invalid_argument("green_box_solve: point dimension mismatch");
    if (p.norm_linf() > half) throw std::invalid_argument("green_box_solve: evaluation point outside box");
  }

  const double inv2d = 1.0 / (2.0 * dim);

  // right-hand side: delta at the origin plus the Dirichlet data carried in
  // from the sphere at |x|_inf = radius via the asymptote
  std::vector<double> b(nsz, 0.0);
  b[static_cast<std::size_t>(site_index(Point::zero(dim)))] = 1.0;
  {
    Point p = Point::zero(dim);
    for (int j = 0; j < dim; ++j) p[j] = -half;
    for (std::size_t idx = 0; idx < nsz; ++idx) {
      for (int j = 0; j < dim; ++j) {
        if (p[j] == -half || p[j] == half) {
          Point q = p;
          q[j] = (p[j] < 0) ? -radius : radius;
          b[idx] += inv2d * green_asymptotic(q, dim);
        }
      }
      for (int j = dim - 1; j >= 0; --j) {
        if (++p[j] <= half) break;
        p[j] = -half;
      }
    }
  }

  // A v = v - (1/2d) * sum of in-box neighbors; rows indexed like b.
  // The inner axis is contiguous, so walk row by row.
  const std::int64_t rows = total / side;
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    Point p = Point::zero(dim);  // leading dim-1 coordinates of the row
    for (int j = 0; j + 1 < dim; ++j) p[j] = -half;
    for (std::int64_t row = 0; row < rows; ++row) {
      const std::size_t base = static_cast<std::size_t>(row) * static_cast<std::size_t>(side);
      for (std::int64_t i = 0; i < side; ++i) {
        double s = 0;
        if (i > 0) s += v[base + i - 1];
        if (i < side - 1) s += v[base + i + 1];
        for (int j = 0; j + 1 < dim; ++j) {
          if (p[j] > -half) s += v[base + i - stride[j]];
          if (p[j] < half) s += v[base + i + stride[j]];
        }
        out[base + i] = v[base + i] - inv2d * s;
      }
      for (int j = dim - 2; j >= 0; --j) {
        if (++p[j] <= half) break;
        p[j] = -half;
      }
    }
  };

  auto dot = [nsz](const std::vector<double>& a, const std::vector<double>& c) {
    long double acc = 0;
    for (std::size_t i = 0; i < nsz; ++i) acc += static_cast<long double>(a[i]) * c[i];
    return static_cast<double>(acc);
  };

  std::vector<double> v(nsz, 0.0), r = b, pdir = b, ap(nsz);
  const double bnorm = std::sqrt(dot(b, b));
  double rr = dot(r, r);
  const double stop = cg_tol * bnorm;
  int it = 0;
  for (; it < 50000 && std::sqrt(rr) > stop; ++it) {
    apply(pdir, ap);
    const double alpha = rr / dot(pdir, ap);
    for (std::size_t i = 0; i < nsz; ++i) v[i] += alpha * pdir[i];
    for (std::size_t i = 0; i < nsz; ++i) r[i] -= alpha * ap[i];
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < nsz; ++i) pdir[i] = r[i] + beta * pdir[i];
  }
  if (std::sqrt(rr) > stop) throw std::runtime_error("green_box_solve: conjugate gradients did not converge");

  std::vector<double> out;
  out.reserve(eval.size());
  for (const Point& p : eval) out.push_back(v[static_cast<std::size_t>(site_index(p))]);
  return out;
}

}  // namespace rilab
