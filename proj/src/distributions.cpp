#include "rcu/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace rcu {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    if (u == 0.0) return -INFINITY;
    if (u == 1.0) return INFINITY;
    throw std::domain_error("normal_quantile: argument outside [0,1]");
  }
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

long poisson_quantile(double mu, double u) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::domain_error("poisson_quantile: bad mean");
  if (mu == 0.0) return 0;
  if (mu > 500.0) {
    boost::math::poisson_distribution<double> d(mu);
    // discrete quantile policy rounds up, matching the inversion rule
    return static_cast<long>(boost::math::quantile(d, u));
  }
  double p = std::exp(-mu);
  double cdf = p;
  long k = 0;
  const long cap = static_cast<long>(mu + 40.0 * std::sqrt(mu) + 60.0);
  while (cdf < u && k < cap) {
    ++k;
    p *= mu / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

double gamma_quantile(double shape, double scale, double u) {
  return scale * boost::math::gamma_p_inv(shape, u);
}

double beta_quantile(double a, double b, double u) { return boost::math::ibeta_inv(a, b, u); }

double kolmogorov_p_value(double d, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::span<const double> sample) {
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = normal_cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, kolmogorov_p_value(d, x.size())};
}

}  // namespace rcu
