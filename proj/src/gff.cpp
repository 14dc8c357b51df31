#include "rilab/gff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "rilab/rng.hpp"

namespace rilab {

namespace {

// Dense displacement cache spanning all pairwise differences of the sites,
// so Gram assembly is array reads instead of hash lookups.
struct DispCache {
  std::array<std::int64_t, kMaxDim> lo{}, stride{};
  std::vector<double> vals;
  int dim = 0;

  DispCache(const std::vector<Point>& sites, const GreenTable& G) {
    dim = G.dim();
    std::array<std::int64_t, kMaxDim> hi{};
    for (int j = 0; j < dim; ++j) {
      lo[j] = hi[j] = sites[0][j];
      for (const Point& p : sites) {
        lo[j] = std::min(lo[j], p[j]);
        hi[j] = std::max(hi[j], p[j]);
      }
    }
    std::int64_t total = 1;
    std::array<std::int64_t, kMaxDim> span{};
    for (int j = dim - 1; j >= 0; --j) {
      span[j] = hi[j] - lo[j];
      stride[j] = total;
      total = checked_mul(total, 2 * span[j] + 1, "displacement cache");
    }
    if (total > 80'000'000) throw std::length_error("factorize: site spread too large to cache");
    vals.resize(static_cast<std::size_t>(total));
    Point d = Point::zero(dim);
    auto rec = [&](auto&& self, int axis, std::int64_t idx) -> void {
      if (axis == dim) {
        vals[static_cast<std::size_t>(idx)] = G(d);
        return;
      }
      for (std::int64_t v = -span[axis]; v <= span[axis]; ++v) {
        d[axis] = v;
        self(self, axis + 1, idx + (v + span[axis]) * stride[axis]);
      }
    };
    rec(rec, 0, 0);
    for (int j = 0; j < dim; ++j) lo[j] = -span[j];  // reuse lo as index offset
  }

  double at(const Point& a, const Point& b) const {
    std::int64_t idx = 0;
    for (int j = 0; j < dim; ++j) idx += (a[j] - b[j] - lo[j]) * stride[j];
    return vals[static_cast<std::size_t>(idx)];
  }
};

void fill_gram(Eigen::MatrixXd& A, const std::vector<Point>& sites, const DispCache& cache) {
  const std::size_t n = sites.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = cache.at(sites[i], sites[j]);
      A(i, j) = v;
      A(j, i) = v;
    }
  }
}

}  // namespace

CovFactorization factorize(const std::vector<Point>& sites, const GreenTable& G,
                           std::int64_t max_sites) {
  if (sites.empty()) throw std::invalid_argument("factorize: no sites");
  if (static_cast<std::int64_t>(sites.size()) > max_sites)
    throw std::length_error("factorize: site count exceeds the dense cap");
  std::unordered_set<Point, PointHash> seen;
  for (const Point& p : sites) {
    if (p.dim != G.dim()) throw std::invalid_argument("factorize: dimension mismatch");
    if (!seen.insert(p).second) throw std::invalid_argument("factorize: duplicate site");
  }

  const DispCache cache(sites, G);
  const std::size_t n = sites.size();
  CovFactorization fact;
  fact.sites = sites;
  fact.chol.resize(n, n);
  fill_gram(fact.chol, sites, cache);

  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(fact.chol);  // factors in place
  if (llt.info() != Eigen::Success) {
    fill_gram(fact.chol, sites, cache);
    fact.chol.diagonal().array() += 1e-12 * fact.chol.diagonal().mean();
    fact.jittered = true;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> retry(fact.chol);
    if (retry.info() != Eigen::Success)
      throw std::runtime_error("factorize: covariance failed to factor even with jitter");
  }
  fact.chol.triangularView<Eigen::StrictlyUpper>().setZero();
  return fact;
}

CovFactorization factorize(const Window& w, const GreenTable& G, std::int64_t max_sites) {
  if (w.site_count() > max_sites)
    throw std::length_error("factorize: window exceeds the dense cap");
  CovFactorization fact = factorize(w.sites(), G, max_sites);
  fact.window = w;
  fact.has_window = true;
  return fact;
}

Eigen::MatrixXd sample_matrix(const CovFactorization& fact, std::int64_t n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample_matrix: negative count");
  const std::int64_t m = static_cast<std::int64_t>(fact.sites.size());
  Eigen::MatrixXd out(m, n);
  const std::int64_t block = 256;
  for (std::int64_t start = 0; start < n; start += block) {
    const std::int64_t bs = std::min(block, n - start);
    Eigen::MatrixXd z(m, bs);
    for (std::int64_t c = 0; c < bs; ++c) {
      Rng rng(derive_seed(seed, "gff", static_cast<std::uint64_t>(start + c)));
      for (std::int64_t r = 0; r < m; ++r) z(r, c) = rng.normal();
    }
    out.middleCols(start, bs) = fact.chol.triangularView<Eigen::Lower>() * z;
  }
  return out;
}

std::vector<FieldSample> sample(const CovFactorization& fact, std::int64_t n, std::uint64_t seed) {
  if (!fact.has_window)
    throw std::logic_error("sample: factorization carries no window; use sample_matrix");
  const Eigen::MatrixXd draws = sample_matrix(fact, n, seed);
  std::vector<FieldSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    FieldSample f;
    f.window = fact.window;
    f.seed = derive_seed(seed, "gff", static_cast<std::uint64_t>(i));
    f.values.assign(draws.col(i).data(), draws.col(i).data() + draws.rows());
    out.push_back(std::move(f));
  }
  return out;
}

SiteConfig two_sided_level_set(const FieldSample& f, double h) {
  if (h < 0) throw std::invalid_argument("two_sided_level_set: level must be non-negative");
  SiteConfig c(f.window);
  for (std::size_t i = 0; i < f.values.size(); ++i) c.bits[i] = std::abs(f.values[i]) >= h ? 1 : 0;
  return c;
}

SiteConfig one_sided_level_set(const FieldSample& f, double h) {
  SiteConfig c(f.window);
  for (std::size_t i = 0; i < f.values.size(); ++i) c.bits[i] = f.values[i] >= h ? 1 : 0;
  return c;
}

}  // namespace rilab
