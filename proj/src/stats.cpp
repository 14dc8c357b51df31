#include "rilab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace rilab {

Moments moments(const std::vector<double>& xs) {
  const auto n = static_cast<std::int64_t>(xs.size());
  if (n < 2) throw std::invalid_argument("moments: need at least 2 samples");
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0, m4 = 0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  Moments out;
  out.n = n;
  out.mean = mean;
  out.var = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
  out.se_mean = std::sqrt(out.var / static_cast<double>(n));
  out.se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / static_cast<double>(n));
  return out;
}

CovEstimate covariance_est(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("covariance_est: length mismatch");
  const auto n = static_cast<std::int64_t>(xs.size());
  if (n < 2) throw std::invalid_argument("covariance_est: need at least 2 samples");
  double mx = 0, my = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    mx += xs[static_cast<std::size_t>(i)];
    my += ys[static_cast<std::size_t>(i)];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double c = 0, c2 = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double px = xs[static_cast<std::size_t>(i)] - mx;
    const double py = ys[static_cast<std::size_t>(i)] - my;
    c += px * py;
    c2 += px * py * px * py;
  }
  c /= static_cast<double>(n);
  c2 /= static_cast<double>(n);
  CovEstimate out;
  out.n = n;
  out.cov = c * static_cast<double>(n) / static_cast<double>(n - 1);
  out.se = std::sqrt(std::max(0.0, c2 - c * c) / static_cast<double>(n));
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Acklam's rational approximation followed by one Halley refinement step.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1 + 0.5 * x * u);
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0) || x < 0) throw std::domain_error("gamma_q: need a>0, x>=0");
  if (x == 0) return 1.0;
  return (x < a + 1) ? 1.0 - gamma_p_series(a, x) : gamma_q_cfrac(a, x);
}

namespace {

// Kolmogorov tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)
double kolmogorov_q(double lambda) {
  double sum = 0, sign = 1, prev = 1e300;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16 || term >= prev) break;  // converged (terms decrease monotonically)
    prev = term;
    sign = -sign;
  }
  return std::min(1.0, std::max(0.0, 2 * sum));
}

double ks_p_from(double d, double ne) {
  const double sq = std::sqrt(ne);
  return kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0, fa = 0, fb = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    fa = static_cast<double>(i) / na;
    fb = static_cast<double>(j) / nb;
    d = std::max(d, std::abs(fa - fb));
  }
  KsResult out;
  out.d = d;
  out.n1 = static_cast<std::int64_t>(a.size());
  out.n2 = static_cast<std::int64_t>(b.size());
  // The two-sample statistic is discrete (atoms spaced gcd/(n1*n2)); the
  // mid-p average over one atom keeps null p-values close to uniform.
  const double ne = na * nb / (na + nb);
  const double atom = static_cast<double>(std::gcd(a.size(), b.size())) / (na * nb);
  out.p = 0.5 * (ks_p_from(d, ne) + ks_p_from(d + atom, ne));
  return out;
}

KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  KsResult out;
  out.d = d;
  out.n1 = static_cast<std::int64_t>(a.size());
  out.n2 = 0;
  out.p = ks_p_from(d, n);
  return out;
}

Interval binomial_ci(std::int64_t successes, std::int64_t n, double level) {
  if (n <= 0 || successes < 0 || successes > n)
    throw std::invalid_argument("binomial_ci: need 0 <= successes <= n, n > 0");
  if (!(level > 0 && level < 1)) throw std::invalid_argument("binomial_ci: level must be in (0,1)");
  const double z = normal_quantile(0.5 + level / 2);
  const double nn = static_cast<double>(n), k = static_cast<double>(successes);
  const double z2 = z * z;
  const double denom = nn + z2;
  const double center = (k + z2 / 2) / denom;
  const double hw = z * std::sqrt(k * (nn - k) / nn + z2 / 4) / denom;
  return {std::max(0.0, center - hw), std::min(1.0, center + hw)};
}

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_power: need >= 2 matched points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)], yi = y[static_cast<std::size_t>(i)];
    if (!(xi > 0) || !(yi > 0)) throw std::domain_error("fit_power: values must be positive");
    A(i, 0) = std::log(xi);
    A(i, 1) = 1.0;
    b(i) = std::log(yi);
  }
  Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  PowerFit out;
  out.exponent = coef(0);
  out.log_prefactor = coef(1);
  out.rss = (A * coef - b).squaredNorm();
  return out;
}

StretchedExpFit fit_stretched_exp(const std::vector<double>& L, const std::vector<double>& p,
                                  double rho_min, double rho_max, double rho_step) {
  if (L.size() != p.size()) throw std::invalid_argument("fit_stretched_exp: length mismatch");
  if (!(rho_min > 0 && rho_max >= rho_min && rho_step > 0))
    throw std::invalid_argument("fit_stretched_exp: bad rho grid");
  std::vector<double> ls, ys;
  int censored = 0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (!(L[i] > 0)) throw std::domain_error("fit_stretched_exp: scales must be positive");
    if (p[i] > 0) {
      ls.push_back(L[i]);
      ys.push_back(std::log(p[i]));
    } else {
      ++censored;  // empirical zero: no information about the decay rate
    }
  }
  if (ls.size() < 3) throw std::invalid_argument("fit_stretched_exp: need >= 3 positive points");

  StretchedExpFit best;
  best.censored = censored;
  double ymin = ys[0], ymax = ys[0];
  for (double y : ys) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (ymax - ymin < 1e-12) {
    best.degenerate = true;
    best.rho = rho_min;
    best.cp = 0;
    best.log_c = ymax;
    best.rss = 0;
    return best;
  }

  best.rss = std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(ls.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = ys[static_cast<std::size_t>(i)];
  const int steps = static_cast<int>(std::floor((rho_max - rho_min) / rho_step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double rho = rho_min + k * rho_step;
    for (Eigen::Index i = 0; i < n; ++i) {
      A(i, 0) = -std::pow(ls[static_cast<std::size_t>(i)], rho);
      A(i, 1) = 1.0;
    }
    Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
    const double rss = (A * coef - b).squaredNorm();
    if (rss < best.rss) {
      best.rss = rss;
      best.rho = rho;
      best.cp = coef(0);
      best.log_c = coef(1);
    }
  }
  return best;
}

}  // namespace rilab
