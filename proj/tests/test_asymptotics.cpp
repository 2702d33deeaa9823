#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rcu/accumulate.hpp"
#include "rcu/asymptotics.hpp"
#include "rcu/ustat.hpp"

using namespace rcu;

TEST_CASE("size regimes") {
  CHECK(SizeRegime::balanced(0.5).sizes(256) == std::pair{128, 128});
  CHECK(SizeRegime::balanced(0.25).sizes(100) == std::pair{25, 75});
  CHECK(SizeRegime::power(1.0, 0.5).sizes(100) == std::pair{100, 10});
  CHECK_THROWS(SizeRegime::balanced(1.0));
  CHECK_THROWS(SizeRegime::power(0.0, 1.0));
}

TEST_CASE("finite variance sum") {
  VTable vt(1, 2);
  CHECK(finite_variance(vt, 10, 10) == 0.0);
  vt.value(1, 2) = 2.0;
  CHECK(finite_variance(vt, 10, 10) == doctest::Approx(1.0 / 450.0).epsilon(1e-15));
  CHECK_THROWS(finite_variance(vt, 10, 1));
  CHECK(v_prefactor(2, 2, 1, 1) == 16.0);
  CHECK(v_prefactor(1, 2, 1, 2) == 4.0);
}

TEST_CASE("closed-form asymptotic variances") {
  CHECK(sigma1_squared(0.5) == 16.0);
  CHECK(sigma3_squared(1.0, 0.5) == 16.0);
  const auto p1 = DegreeFunction::power(1.0);
  CHECK(std::fabs(sigma6_squared(1.0, p1, p1, 0.5) - 1168.0 / 81.0) <= 1e-12);
  VTable vt(1, 2);
  vt.value(1, 2) = 2.0;
  CHECK(sigma_squared_balanced(vt, 3, 0.5) == 16.0);
  CHECK_THROWS(sigma_squared_balanced(vt, 4, 0.5));
}

TEST_CASE("v tables from closed forms") {
  const VTable a = v_table(ModelSpec::gaussian_iid(), builtin("h1"), VTableBudget{});
  CHECK(a.exact.count() == a.exact.size() - 1);  // all but the unused (0,0) slot
  CHECK(a.value(1, 2) == 2.0);
  CHECK(a.value(1, 1) == 0.0);
  CHECK(a.nonzero(1, 2));
  CHECK_FALSE(a.nonzero(0, 2));
  CHECK(sigma_squared_balanced(a, 3, 0.3) == doctest::Approx(sigma1_squared(0.3)).epsilon(1e-14));

  const auto p1 = DegreeFunction::power(1.0);
  const VTable c = v_table(ModelSpec::overdispersed(1.0, p1, p1, 0.0), builtin("h6"), VTableBudget{2000, 1, true});
  CHECK(sigma_squared_balanced(c, 2, 0.5) == doctest::Approx(1168.0 / 81.0).epsilon(1e-14));
}

TEST_CASE("Monte Carlo v table of a constant kernel vanishes") {
  const VTable vt = v_table(ModelSpec::gaussian_iid(), constant_kernel(1, 2, 3.0), VTableBudget{2000, 1, true});
  for (int r = 0; r <= 1; ++r)
    for (int c = 0; c <= 2; ++c) {
      CHECK(vt.value(r, c) == 0.0);
      CHECK_FALSE(vt.nonzero(r, c));
    }
}

TEST_CASE("Monte Carlo v table matches the h1 closed form") {
  const VTable vt = v_table(ModelSpec::gaussian_iid(), builtin("h1"), VTableBudget{40000, 3, false});
  CHECK(std::fabs(vt.value(1, 2) - 2.0) <= 3 * vt.std_error(1, 2));
  CHECK(std::fabs(vt.value(1, 1)) <= 3 * vt.std_error(1, 1) + 1e-12);
}

TEST_CASE("finite variance of h6 against simulation") {
  const auto p1 = DegreeFunction::power(1.0);
  const ModelSpec om = ModelSpec::overdispersed(1.0, p1, p1, 0.0);
  const VTable vt = v_table(om, builtin("h6"), VTableBudget{20000, 4, true});
  const double predicted = finite_variance(vt, 30, 30);
  RunningMoments sq;  // E[h6] = 0 at alpha = 0
  for (int r = 0; r < 2000; ++r) {
    const double u = u_h6(sample_matrix(om, 30, 30, derive(9, r)));
    sq.add(u * u);
  }
  // Monte Carlo error of the table propagates through the same weights
  double table_var = 0.0;
  for (int r = 0; r <= 2; ++r)
    for (int c = 0; c <= 2; ++c) {
      const double w = 1.0 / (double(falling(30, r)) * double(falling(30, c)));
      table_var += w * w * vt.std_error(r, c) * vt.std_error(r, c);
    }
  const double se = std::sqrt(sq.std_error() * sq.std_error() + table_var);
  INFO("predicted " << predicted << " empirical " << sq.mean() << " +- " << se);
  CHECK(std::fabs(sq.mean() - predicted) <= 3 * se);
}

TEST_CASE("unbalanced principal parts") {
  using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
  const auto regime = SizeRegime::power(1.0, 0.5);
  Mask a = Mask::Constant(2, 4, false);
  a(1, 0) = a(0, 2) = true;
  const auto pa = unbalanced_principal(a, Eigen::ArrayXXd::Ones(2, 4), regime);
  CHECK(pa.gamma_exponent == 1.0);
  CHECK(pa.degrees == std::vector<std::pair<int, int>>{{0, 2}, {1, 0}});
  CHECK(pa.sigma_squared == 2.0);

  Mask b = Mask::Constant(2, 4, false);
  b(1, 1) = b(0, 3) = true;
  const auto pb = unbalanced_principal(b, Eigen::ArrayXXd::Ones(2, 4), regime);
  CHECK(pb.gamma_exponent == 1.5);
  CHECK(pb.degrees == std::vector<std::pair<int, int>>{{0, 3}, {1, 1}});

  Mask c = Mask::Constant(3, 3, false);
  c(1, 1) = c(2, 0) = c(0, 2) = c(2, 2) = true;
  const auto pc = unbalanced_principal(c, Eigen::ArrayXXd::Ones(3, 3), SizeRegime::power(1.0, 1.0));
  CHECK(pc.gamma_exponent == 2.0);
  CHECK(pc.degrees.size() == 3);

  CHECK_THROWS(unbalanced_principal(Mask::Constant(2, 2, false), Eigen::ArrayXXd::Ones(2, 2), regime));
  CHECK_THROWS(unbalanced_principal(a, Eigen::ArrayXXd::Ones(2, 4), SizeRegime::balanced(0.5)));
}

TEST_CASE("test statistics") {
  const auto z = test_statistic(StatisticName::ZA, Eigen::MatrixXd::Zero(6, 6), {});
  CHECK(z.value == 0.0);
  CHECK(z.two_sided_p == 1.0);
  CHECK_THROWS_AS(test_statistic(StatisticName::ZBprime, Eigen::MatrixXd::Zero(6, 6), {}), DegeneratePlugIn);
  CHECK(parse_statistic("ZB'") == StatisticName::ZBprime);
  CHECK_THROWS(parse_statistic("ZD"));

  RunningMoments za;
  for (int r = 0; r < 500; ++r)
    za.add(test_statistic(StatisticName::ZA, sample_matrix(ModelSpec::gaussian_iid(), 128, 128, derive(2, r)), {}).value);
  CHECK(std::fabs(std::sqrt(za.variance()) - 1.0) <= 0.15);
}

TEST_CASE("ZB drifts upward under heterogeneous rows") {
  const double a = power_exponent_for_f2(1.2);
  const ModelSpec alt = ModelSpec::poisson_bedd(1.0, DegreeFunction::power(a), DegreeFunction::power(1.0 + std::sqrt(2.0)));
  auto mean_zb = [&](int n_total) {
    RunningMoments acc;
    for (int r = 0; r < 100; ++r)
      acc.add(test_statistic(StatisticName::ZB, sample_matrix(alt, n_total / 2, n_total / 2, derive(n_total, r)), {}).value);
    return acc.mean();
  };
  const double m64 = mean_zb(64), m256 = mean_zb(256);
  CHECK(m64 > 0.0);
  CHECK(m256 > m64);
}
