#pragma once

#include <span>

namespace rcu {

double normal_cdf(double z);
double normal_quantile(double u);
// 2 (1 - Phi(|z|))
double two_sided_p(double z);

// Smallest k with P(Poisson(mu) <= k) >= u.
long poisson_quantile(double mu, double u);

// Gamma(shape, scale) quantile; slow but exact.
double gamma_quantile(double shape, double scale, double u);

double beta_quantile(double a, double b, double u);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

// One-sample KS against N(0,1).
KsResult ks_test_normal(std::span<const double> sample);
// Asymptotic Kolmogorov tail with the usual small-sample correction.
double kolmogorov_p_value(double d, std::size_t n);

}  // namespace rcu
