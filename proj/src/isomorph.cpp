#include "rilab/isomorph.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rilab/percolation.hpp"
#include "rilab/rng.hpp"
#include "rilab/stats.hpp"

namespace rilab {

namespace {

// Familywise-calibrated z for m simultaneous intervals: each interval gets
// tail mass significance/(2m) per side, so a true-null batch trips some
// moment interval with probability about `significance`.
double family_z(double significance, std::size_t m) {
  const double per = significance / (2.0 * static_cast<double>(m == 0 ? 1 : m));
  return normal_quantile(1.0 - 0.5 * per);
}

// Two-sample KS critical value at level `sig` (asymptotic).
double ks_critical(double sig, std::int64_t n1, std::int64_t n2) {
  const double c = std::sqrt(-0.5 * std::log(0.5 * sig));
  return c * std::sqrt(static_cast<double>(n1 + n2) /
                       (static_cast<double>(n1) * static_cast<double>(n2)));
}

// A truncated walk that would have re-entered the window perturbs products
// of two occupation-carrying coordinates by O(g(0) * field level); this
// factor converts the event-level bias bound into a covariance allowance.
constexpr double cov_bias_factor = 10.0;

void require_same_shape(const IsoBatch& a, const IsoBatch& b) {
  if (!(a.window.center == b.window.center) || a.window.radius != b.window.radius)
    throw std::invalid_argument("iso_test: batches live on different windows");
  if (a.values.cols() != b.values.cols())
    throw std::invalid_argument("iso_test: batches must hold equal sample counts");
  if (a.values.rows() != a.window.site_count() || b.values.rows() != b.window.site_count())
    throw std::invalid_argument("iso_test: batch rows do not match the window");
}

}  // namespace

std::vector<double> IsoBatch::row(const Point& x) const {
  const std::int64_t i = window.index_of(x);
  std::vector<double> out(static_cast<std::size_t>(values.cols()));
  for (std::int64_t j = 0; j < values.cols(); ++j)
    out[static_cast<std::size_t>(j)] = values(i, j);
  return out;
}

IsoBatch sample_lhs(const Window& w, double u, std::int64_t n,
                    std::uint64_t seed_walks, std::uint64_t seed_field,
                    const EquilibriumMeasure& em, std::int64_t kill_radius,
                    const CovFactorization& fact, const GreenTable& G) {
  if (n <= 0) throw std::invalid_argument("sample_lhs: n must be positive");
  if (seed_walks == seed_field)
    throw std::invalid_argument(
        "sample_lhs: walk and field seeds coincide; the factors must be independent");
  if (!fact.has_window || !(fact.window.center == w.center) || fact.window.radius != w.radius)
    throw std::invalid_argument("sample_lhs: factorization window mismatch");

  IsoBatch out;
  out.window = w;
  out.u = u;
  out.seed_walks = seed_walks;
  out.seed_field = seed_field;
  out.values = 0.5 * sample_matrix(fact, n, seed_field).array().square().matrix();
  if (u > 0) {
    out.bias_bound = u * kill_bias(w, kill_radius, em, G);
    for (std::int64_t j = 0; j < n; ++j) {
      const InterlacementSample s =
          sample_interlacement(w, u, em, kill_radius, derive_seed(seed_walks, "iso-walks", j));
      const ScalarField occ = occupation_field(s);
      for (std::int64_t i = 0; i < out.values.rows(); ++i)
        out.values(i, j) += occ.values[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

IsoBatch sample_rhs(const Window& w, double u, std::int64_t n,
                    std::uint64_t seed_field, const CovFactorization& fact) {
  if (n <= 0) throw std::invalid_argument("sample_rhs: n must be positive");
  if (u < 0) throw std::invalid_argument("sample_rhs: level must be nonnegative");
  if (!fact.has_window || !(fact.window.center == w.center) || fact.window.radius != w.radius)
    throw std::invalid_argument("sample_rhs: factorization window mismatch");

  IsoBatch out;
  out.window = w;
  out.u = u;
  out.seed_field = seed_field;
  const double shift = std::sqrt(2.0 * u);
  out.values =
      0.5 * (sample_matrix(fact, n, seed_field).array() + shift).square().matrix();
  return out;
}

IsoReport iso_test(const IsoBatch& a, const IsoBatch& b,
                   const std::vector<Point>& sites,
                   const std::vector<std::pair<Point, Point>>& pairs,
                   double significance) {
  require_same_shape(a, b);
  if (!(significance > 0 && significance < 1))
    throw std::invalid_argument("iso_test: significance must lie in (0,1)");

  IsoReport r;
  r.significance = significance;
  r.n = a.values.cols();
  r.bias_bound = a.bias_bound + b.bias_bound;
  r.low_power = r.n < 1000;
  r.seeds[0] = a.seed_walks;
  r.seeds[1] = a.seed_field;
  r.seeds[2] = b.seed_walks;
  r.seeds[3] = b.seed_field;

  std::vector<Point> use_sites = sites;
  if (use_sites.empty()) use_sites = a.window.sites();

  const double z = family_z(significance, use_sites.size() + pairs.size());
  const double d_crit = ks_critical(significance, r.n, r.n);

  std::int64_t ks_ok = 0;
  for (const Point& x : use_sites) {
    SiteTest st;
    st.site = x;
    const std::vector<double> va = a.row(x), vb = b.row(x);
    const KsResult ks = ks_two_sample(va, vb);
    st.ks_d = ks.d;
    st.ks_p = ks.p;
    st.ks_pass = ks.p > significance || ks.d <= d_crit + r.bias_bound;
    const Moments ma = moments(va), mb = moments(vb);
    st.mean_a = ma.mean;
    st.se_a = ma.se_mean;
    st.mean_b = mb.mean;
    st.se_b = mb.se_mean;
    st.mean_pass =
        std::abs(ma.mean - mb.mean) <= z * (ma.se_mean + mb.se_mean) + r.bias_bound;
    ks_ok += st.ks_pass ? 1 : 0;
    r.sites.push_back(st);
  }

  bool moments_ok = true;
  for (const SiteTest& st : r.sites) moments_ok = moments_ok && st.mean_pass;

  for (const auto& [x, y] : pairs) {
    PairTest pt;
    pt.x = x;
    pt.y = y;
    const CovEstimate ca = covariance_est(a.row(x), a.row(y));
    const CovEstimate cb = covariance_est(b.row(x), b.row(y));
    pt.cov_a = ca.cov;
    pt.se_a = ca.se;
    pt.cov_b = cb.cov;
    pt.se_b = cb.se;
    pt.pass = std::abs(ca.cov - cb.cov) <=
              z * (ca.se + cb.se) + cov_bias_factor * r.bias_bound;
    moments_ok = moments_ok && pt.pass;
    r.pairs.push_back(pt);
  }

  r.site_pass_rate = r.sites.empty()
                         ? 1.0
                         : static_cast<double>(ks_ok) / static_cast<double>(r.sites.size());
  r.ks_pass = r.site_pass_rate >= r.min_site_rate;
  r.moments_pass = moments_ok;
  r.pass = r.ks_pass && r.moments_pass;
  return r;
}

DominationReport domination_check(const Window& w, double u, double alpha,
                                  std::int64_t cross_scale, std::int64_t n,
                                  std::uint64_t seed_walks, std::uint64_t seed_field,
                                  const EquilibriumMeasure& em, std::int64_t kill_radius,
                                  const CovFactorization& fact, const GreenTable& G) {
  (void)G;  // the one-sided check needs no truncation allowance
  if (alpha < u)
    throw std::invalid_argument("domination_check: needs alpha >= u for a real height");
  if (u < 0) throw std::invalid_argument("domination_check: level must be nonnegative");
  if (n <= 0) throw std::invalid_argument("domination_check: n must be positive");
  if (w.radius < 2 * cross_scale || cross_scale <= 0)
    throw std::invalid_argument("domination_check: window too small for the crossing scale");
  if (seed_walks == seed_field)
    throw std::invalid_argument("domination_check: walk and field seeds coincide");
  if (!fact.has_window || !(fact.window.center == w.center) || fact.window.radius != w.radius)
    throw std::invalid_argument("domination_check: factorization window mismatch");

  DominationReport r;
  r.u = u;
  r.alpha = alpha;
  r.h = std::sqrt(2.0 * alpha) - std::sqrt(2.0 * u);
  r.n = n;
  r.cross_scale = cross_scale;

  const std::vector<FieldSample> fields = sample(fact, n, seed_field);
  const double shift = std::sqrt(2.0 * u);
  const std::size_t m = static_cast<std::size_t>(w.site_count());

  bool incl_occ = true, incl_gauss = true;
  std::int64_t cross_occ = 0, cross_gauss = 0;
  for (std::int64_t j = 0; j < n; ++j) {
    const InterlacementSample s =
        sample_interlacement(w, u, em, kill_radius, derive_seed(seed_walks, "dom-walks", j));
    const ScalarField occ = occupation_field(s);
    const FieldSample& f = fields[static_cast<std::size_t>(j)];

    for (std::size_t i = 0; i < m; ++i) {
      const double L = occ.values[i];
      const double phi = f.values[i];
      if (L > alpha && !(L + 0.5 * phi * phi > alpha)) incl_occ = false;
      if (0.5 * (phi + shift) * (phi + shift) > alpha && !(std::abs(phi) > r.h))
        incl_gauss = false;
    }

    if (crossing(threshold_sets(occ, alpha).first, cross_scale)) ++cross_occ;
    if (crossing(two_sided_level_set(f, r.h), cross_scale)) ++cross_gauss;
  }

  r.inclusion_occupation = incl_occ;
  r.inclusion_gaussian = incl_gauss;
  const double nn = static_cast<double>(n);
  r.p_cross_occupation = cross_occ / nn;
  r.p_cross_gaussian = cross_gauss / nn;
  r.se_occupation = std::sqrt(r.p_cross_occupation * (1.0 - r.p_cross_occupation) / nn);
  r.se_gaussian = std::sqrt(r.p_cross_gaussian * (1.0 - r.p_cross_gaussian) / nn);
  r.ordering = r.p_cross_occupation <=
               r.p_cross_gaussian + 3.0 * (r.se_occupation + r.se_gaussian);
  r.pass = incl_occ && incl_gauss && r.ordering;
  return r;
}

namespace {

nlohmann::json point_json(const Point& p) {
  nlohmann::json j = nlohmann::json::array();
  for (int k = 0; k < p.dim; ++k) j.push_back(p.v[k]);
  return j;
}

}  // namespace

std::string iso_report_json(const IsoReport& r) {
  nlohmann::json j;
  j["significance"] = r.significance;
  j["min_site_rate"] = r.min_site_rate;
  j["n"] = r.n;
  j["bias_bound"] = r.bias_bound;
  j["low_power"] = r.low_power;
  j["seeds"] = {r.seeds[0], r.seeds[1], r.seeds[2], r.seeds[3]};
  nlohmann::json sites = nlohmann::json::array();
  for (const SiteTest& st : r.sites) {
    nlohmann::json s;
    s["site"] = point_json(st.site);
    s["ks_d"] = st.ks_d;
    s["ks_p"] = st.ks_p;
    s["mean_a"] = st.mean_a;
    s["se_a"] = st.se_a;
    s["mean_b"] = st.mean_b;
    s["se_b"] = st.se_b;
    s["ks_pass"] = st.ks_pass;
    s["mean_pass"] = st.mean_pass;
    sites.push_back(s);
  }
  j["sites"] = sites;
  nlohmann::json pairs = nlohmann::json::array();
  for (const PairTest& pt : r.pairs) {
    nlohmann::json p;
    p["x"] = point_json(pt.x);
    p["y"] = point_json(pt.y);
    p["cov_a"] = pt.cov_a;
    p["se_a"] = pt.se_a;
    p["cov_b"] = pt.cov_b;
    p["se_b"] = pt.se_b;
    p["pass"] = pt.pass;
    pairs.push_back(p);
  }
  j["pairs"] = pairs;
  j["site_pass_rate"] = r.site_pass_rate;
  j["ks_pass"] = r.ks_pass;
  j["moments_pass"] = r.moments_pass;
  j["pass"] = r.pass;
  return j.dump(2);
}

std::string domination_json(const DominationReport& r) {
  nlohmann::json j;
  j["u"] = r.u;
  j["alpha"] = r.alpha;
  j["h"] = r.h;
  j["n"] = r.n;
  j["cross_scale"] = r.cross_scale;
  j["inclusion_occupation"] = r.inclusion_occupation;
  j["inclusion_gaussian"] = r.inclusion_gaussian;
  j["p_cross_occupation"] = r.p_cross_occupation;
  j["se_occupation"] = r.se_occupation;
  j["p_cross_gaussian"] = r.p_cross_gaussian;
  j["se_gaussian"] = r.se_gaussian;
  j["ordering"] = r.ordering;
  j["pass"] = r.pass;
  return j.dump(2);
}

}  // namespace rilab
