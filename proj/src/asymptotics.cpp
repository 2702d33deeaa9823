#include "rcu/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcu/decomposition.hpp"
#include "rcu/distributions.hpp"
#include "rcu/ustat.hpp"

namespace rcu {

SizeRegime SizeRegime::balanced(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("balanced regime needs 0 < rho < 1");
  SizeRegime r;
  r.rho = rho;
  return r;
}

SizeRegime SizeRegime::power(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("power regime needs a, b > 0");
  SizeRegime r;
  r.kind = Kind::power;
  r.a = a;
  r.b = b;
  return r;
}

std::pair<int, int> SizeRegime::sizes(int n_total) const {
  if (kind == Kind::balanced) {
    const int m = static_cast<int>(std::lround(rho * n_total));
    return {m, n_total - m};
  }
  return {static_cast<int>(std::ceil(std::pow(double(n_total), a))),
          static_cast<int>(std::ceil(std::pow(double(n_total), b)))};
}

VTable::VTable(int p_, int q_)
    : p(p_), q(q_), value(Eigen::ArrayXXd::Zero(p_ + 1, q_ + 1)), std_error(Eigen::ArrayXXd::Zero(p_ + 1, q_ + 1)),
      exact(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(p_ + 1, q_ + 1, false)) {}

bool VTable::nonzero(int r, int c, double z_threshold) const {
  if (r == 0 && c == 0) return false;
  if (exact(r, c)) return value(r, c) > 0.0;
  return value(r, c) > z_threshold * std_error(r, c) && value(r, c) > 0.0;
}

double v_prefactor(int p, int q, int r, int c) {
  const double a = double(factorial(p)) / double(factorial(p - r));
  const double b = double(factorial(q)) / double(factorial(q - c));
  return a * a * b * b;
}

namespace {

bool alpha_zero_poisson(const ModelSpec& m) {
  return m.variant == ModelVariant::poisson_bedd ||
         (m.variant == ModelVariant::overdispersed_poisson_bedd && m.alpha == 0.0);
}

// Entries known in closed form for the running examples; returns false when the
// (model, kernel) pair is not one of them.
bool closed_form_entry(const ModelSpec& model, const KernelSpec& k, int r, int c, double& out) {
  const std::string& name = k.name();
  if (name == "h1" && k.p() == 1 && k.q() == 2 && model.variant == ModelVariant::gaussian_iid) {
    // only K_{1,2} survives, with E[(p^G)^2] = E[Y11^2 Y12^2] = 1 and |Aut| = 2
    out = (r == 1 && c == 2) ? v_prefactor(1, 2, 1, 2) * 0.5 : 0.0;
    return true;
  }
  if (name == "h3" && alpha_zero_poisson(model) && model.f.family == DegreeFunction::Family::constant) {
    if (r + c <= 2 || (r == 2 && c == 1)) {
      out = 0.0;
      return true;
    }
    if (r == 1 && c == 2) {
      out = v_prefactor(2, 2, 1, 2) * 0.5 * model.lambda * model.lambda / 4.0;
      return true;
    }
    return false;
  }
  if (name == "h6" && alpha_zero_poisson(model)) {
    if (r + c == 1 || (r == 2 && c == 0) || (r == 0 && c == 2)) {
      out = 0.0;
      return true;
    }
    if (r == 1 && c == 1) {
      const double l = model.lambda;
      const double F2 = moment(model.f, 2), F3 = moment(model.f, 3), G2 = moment(model.g, 2), G3 = moment(model.g, 3);
      out = v_prefactor(2, 2, 1, 1) * std::pow(l, 4) / 16.0 * (l * (F3 - F2 * F2) * (G3 - G2 * G2) + 2 * F2 * G2);
      return true;
    }
    return false;
  }
  return false;
}

}  // namespace

VTable v_table(const ModelSpec& model, const KernelSpec& k, const VTableBudget& budget) {
  VTable vt(k.p(), k.q());
  for (int r = 0; r <= k.p(); ++r)
    for (int c = 0; c <= k.q(); ++c) {
      if (r == 0 && c == 0) continue;
      double closed = 0.0;
      if (budget.use_closed_forms && closed_form_entry(model, k, r, c, closed)) {
        vt.value(r, c) = closed;
        vt.exact(r, c) = true;
        continue;
      }
      const double pre = v_prefactor(k.p(), k.q(), r, c);
      double sum = 0.0, var = 0.0;
      for (const auto& gc : enumerate_gamma(r, c)) {
        const auto est = projection_second_moment(
            model, k, gc, budget.samples_per_class,
            derive(budget.seed, {std::uint64_t(r), std::uint64_t(c), std::uint64_t(gc.representative.edges())}),
            budget.inner_completions);
        const double w = pre / static_cast<double>(gc.aut_count);
        sum += w * est.value;
        var += w * w * est.std_error * est.std_error;
      }
      vt.value(r, c) = sum;
      vt.std_error(r, c) = std::sqrt(var);
    }
  return vt;
}

double finite_variance(const VTable& vt, int m, int n) {
  if (m < vt.p || n < vt.q) throw std::invalid_argument("finite_variance: m, n below the kernel arity");
  double total = 0.0;
  for (int r = 0; r <= vt.p; ++r)
    for (int c = 0; c <= vt.q; ++c) {
      if (r == 0 && c == 0) continue;
      // (m-r)!/m! (n-c)!/n!
      total += vt.value(r, c) / (double(falling(m, r)) * double(falling(n, c)));
    }
  return total;
}

double sigma_squared_balanced(const VTable& vt, int d, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  if (d < 1 || d > vt.p + vt.q) throw std::invalid_argument("degree outside 1..p+q");
  double s = 0.0;
  for (int r = 0; r <= std::min(d, vt.p); ++r) {
    const int c = d - r;
    if (c > vt.q) continue;
    s += std::pow(rho, -r) * std::pow(1.0 - rho, -c) * vt.value(r, c);
  }
  return s;
}

UnbalancedPrincipal unbalanced_principal(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& nonzero,
                                         const Eigen::ArrayXXd& values, const SizeRegime& regime) {
  if (regime.kind != SizeRegime::Kind::power) throw std::invalid_argument("unbalanced_principal needs a power regime");
  double best = INFINITY;
  for (Eigen::Index r = 0; r < nonzero.rows(); ++r)
    for (Eigen::Index c = 0; c < nonzero.cols(); ++c)
      if (nonzero(r, c) && (r > 0 || c > 0)) best = std::min(best, regime.a * r + regime.b * c);
  if (!std::isfinite(best)) throw std::invalid_argument("unbalanced_principal: no nonzero entry");
  UnbalancedPrincipal out;
  out.gamma_exponent = best;
  for (Eigen::Index r = 0; r < nonzero.rows(); ++r)
    for (Eigen::Index c = 0; c < nonzero.cols(); ++c)
      if (nonzero(r, c) && (r > 0 || c > 0) && std::fabs(regime.a * r + regime.b * c - best) <= 1e-12) {
        out.degrees.emplace_back(int(r), int(c));
        out.alpha_weights.push_back(1.0);
        out.sigma_squared += values(r, c);
      }
  return out;
}

UnbalancedPrincipal unbalanced_principal(const VTable& vt, const SizeRegime& regime) {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> nz(vt.p + 1, vt.q + 1);
  for (int r = 0; r <= vt.p; ++r)
    for (int c = 0; c <= vt.q; ++c) nz(r, c) = vt.nonzero(r, c);
  return unbalanced_principal(nz, vt.value, regime);
}

double sigma1_squared(double rho) { return 2.0 / (rho * (1 - rho) * (1 - rho)); }

double sigma3_squared(double lambda, double rho) { return 2.0 * lambda * lambda / (rho * (1 - rho) * (1 - rho)); }

double sigma6_squared(double lambda, const DegreeFunction& f, const DegreeFunction& g, double rho) {
  const double F2 = moment(f, 2), F3 = moment(f, 3), G2 = moment(g, 2), G3 = moment(g, 3);
  return std::pow(lambda, 4) / (rho * (1 - rho)) * (lambda * (F3 - F2 * F2) * (G3 - G2 * G2) + 2 * F2 * G2);
}

StatisticName parse_statistic(std::string_view s) {
  if (s == "ZA") return StatisticName::ZA;
  if (s == "ZB") return StatisticName::ZB;
  if (s == "ZBprime" || s == "ZB'") return StatisticName::ZBprime;
  if (s == "ZC") return StatisticName::ZC;
  throw std::invalid_argument("statistic must be ZA, ZB, ZBprime or ZC");
}

std::string_view statistic_name(StatisticName s) {
  switch (s) {
    case StatisticName::ZA: return "ZA";
    case StatisticName::ZB: return "ZB";
    case StatisticName::ZBprime: return "ZBprime";
    case StatisticName::ZC: return "ZC";
  }
  return "?";
}

TestStatistic test_statistic(StatisticName name, const Eigen::Ref<const Eigen::MatrixXd>& y,
                             const StatisticParams& params) {
  const double m = static_cast<double>(y.rows()), n = static_cast<double>(y.cols());
  const double N = m + n, rho = m / N;
  TestStatistic t;
  t.name = name;
  switch (name) {
    case StatisticName::ZA:
      t.variance_used = sigma1_squared(rho);
      t.value = std::pow(N, 1.5) * u_h1(y) / std::sqrt(t.variance_used);
      break;
    case StatisticName::ZB:
      t.variance_used = sigma3_squared(params.lambda, rho);
      t.value = std::pow(N, 1.5) * u_h3(y) / std::sqrt(t.variance_used);
      break;
    case StatisticName::ZBprime: {
      const double u2 = u_h2(y);
      if (!(u2 > 0.0)) throw DegeneratePlugIn("ZBprime: U^{h2} <= 0, plug-in variance undefined");
      t.variance_used = 2.0 * u2 / (rho * (1 - rho) * (1 - rho));
      t.value = std::pow(N, 1.5) * u_h3(y) / std::sqrt(t.variance_used);
      break;
    }
    case StatisticName::ZC:
      t.variance_used = sigma6_squared(params.lambda, params.f, params.g, rho);
      t.value = N * u_h6(y) / std::sqrt(t.variance_used);
      break;
  }
  t.two_sided_p = two_sided_p(t.value);
  return t;
}

}  // namespace rcu
