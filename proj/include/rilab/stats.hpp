#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace rilab {

// Sample moments with standard errors.  var is the unbiased sample variance;
// se_var comes from the asymptotic formula Var(s^2) ~ (m4 - var^2)/n.
struct Moments {
  double mean = 0, var = 0, se_mean = 0, se_var = 0;
  std::int64_t n = 0;
};
Moments moments(const std::vector<double>& xs);

struct CovEstimate {
  double cov = 0, se = 0;
  std::int64_t n = 0;
};
CovEstimate covariance_est(const std::vector<double>& xs, const std::vector<double>& ys);

// Monte Carlo estimate with its standard error and, where the sampler
// truncates something, a bound on the systematic part.
struct McEstimate {
  double value = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
  double bias_bound = 0.0;
};

double normal_cdf(double x);
double normal_tail(double x);      // P[N(0,1) >= x]
double normal_quantile(double p);  // inverse cdf, p in (0,1)

// regularized incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a)
double gamma_q(double a, double x);
inline double chi_square_p(double stat, int dof) { return gamma_q(0.5 * dof, 0.5 * stat); }

struct KsResult {
  double d = 0;  // sup |F1 - F2|
  double p = 0;  // asymptotic p-value
  std::int64_t n1 = 0, n2 = 0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

struct Interval {
  double lo = 0, hi = 0;
};
// Wilson score interval for a binomial proportion
Interval binomial_ci(std::int64_t successes, std::int64_t n, double level);

// least squares of log y = log_prefactor + exponent * log x
struct PowerFit {
  double exponent = 0, log_prefactor = 0, rss = 0;
};
PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y);

// least squares of log p = log_c - cp * L^rho with rho profiled on a grid.
// Nonpositive p entries are censored (dropped and counted); flat data are
// flagged degenerate since rho is then unidentified.
struct StretchedExpFit {
  double log_c = 0, cp = 0, rho = 0, rss = 0;
  int censored = 0;
  bool degenerate = false;
};
StretchedExpFit fit_stretched_exp(const std::vector<double>& L, const std::vector<double>& p,
                                  double rho_min = 0.05, double rho_max = 1.0,
                                  double rho_step = 0.01);

}  // namespace rilab
