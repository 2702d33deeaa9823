#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rcu/kernels.hpp"
#include "rcu/models.hpp"

namespace rcu {

struct SizeRegime {
  enum class Kind { balanced, power };
  Kind kind = Kind::balanced;
  double rho = 0.5;
  double a = 1.0, b = 1.0;

  static SizeRegime balanced(double rho);
  static SizeRegime power(double a, double b);
  // (m, n) for total size N under a balanced regime, or (ceil N^a, ceil N^b)
  std::pair<int, int> sizes(int n_total) const;
};

// V^{(r,c)} for (0,0) < (r,c) <= (p,q); entry (0,0) unused.
struct VTable {
  int p = 0, q = 0;
  Eigen::ArrayXXd value;
  Eigen::ArrayXXd std_error;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> exact;

  VTable() = default;
  VTable(int p, int q);
  // Entry is nonzero: exact and > 0, or more than z_threshold standard errors above 0.
  bool nonzero(int r, int c, double z_threshold = 3.0) const;
};

struct VTableBudget {
  std::uint64_t samples_per_class = 20000;
  std::uint64_t seed = 1;
  bool use_closed_forms = true;
  int inner_completions = 4;
};

// p!^2 q!^2 / ((p-r)!^2 (q-c)!^2)
double v_prefactor(int p, int q, int r, int c);

VTable v_table(const ModelSpec& model, const KernelSpec& k, const VTableBudget& budget);
double finite_variance(const VTable& vt, int m, int n);
double sigma_squared_balanced(const VTable& vt, int d, double rho);

struct UnbalancedPrincipal {
  std::vector<std::pair<int, int>> degrees;
  double gamma_exponent = 0.0;
  std::vector<double> alpha_weights;
  double sigma_squared = 0.0;
};

// nonzero(r, c) pattern over (0,0) < (r,c) <= (p,q), with values for sigma^2.
UnbalancedPrincipal unbalanced_principal(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& nonzero,
                                         const Eigen::ArrayXXd& values, const SizeRegime& regime);
UnbalancedPrincipal unbalanced_principal(const VTable& vt, const SizeRegime& regime);

// Closed-form asymptotic variances of the running examples.
double sigma1_squared(double rho);
double sigma3_squared(double lambda, double rho);
double sigma6_squared(double lambda, const DegreeFunction& f, const DegreeFunction& g, double rho);

enum class StatisticName { ZA, ZB, ZBprime, ZC };
StatisticName parse_statistic(std::string_view s);
std::string_view statistic_name(StatisticName s);

struct StatisticParams {
  double lambda = 1.0;
  DegreeFunction f = DegreeFunction::power(1.0), g = DegreeFunction::power(1.0);
};

struct TestStatistic {
  StatisticName name = StatisticName::ZA;
  double value = 0.0;
  double variance_used = 0.0;
  double two_sided_p = 1.0;
};

struct DegeneratePlugIn : std::domain_error {
  using std::domain_error::domain_error;
};

TestStatistic test_statistic(StatisticName name, const Eigen::Ref<const Eigen::MatrixXd>& y,
                             const StatisticParams& params);

}  // namespace rcu
