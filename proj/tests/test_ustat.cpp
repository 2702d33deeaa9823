#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rcu/models.hpp"
#include "rcu/ustat.hpp"

using namespace rcu;

namespace {

Eigen::MatrixXd random_matrix(std::uint64_t seed, int m, int n) {
  KeyedStream rng(seed);
  Eigen::MatrixXd y(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) y(i, j) = rng.normal();
  return y;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("exact path small cases") {
  const Eigen::MatrixXd y = (Eigen::MatrixXd(2, 2) << 1, 2, 3, 4).finished();
  CHECK(u_exact(builtin("h1"), y).value == 7.0);
  CHECK(u_fast("h1", y).value == 7.0);
  // m = p, n = q gives h itself
  CHECK(u_exact(builtin("h5"), y).value == 12.5);
  const Eigen::MatrixXd z = random_matrix(3, 5, 6);
  CHECK(u_exact(constant_kernel(2, 2, 1.25), z).value == 1.25);
  CHECK(u_fast("h3", Eigen::MatrixXd::Constant(6, 7, 2.5)).value == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("fast formulas match enumeration") {
  for (int b = 0; b < 6; ++b)
    for (int t = 0; t < 5; ++t) {
      const Eigen::MatrixXd y = random_matrix(100 + t, 3 + t, 9 - t);
      const auto bi = static_cast<Builtin>(b);
      CHECK(rel(u_fast(bi, y).value, u_exact(builtin(bi), y).value) <= 1e-10);
    }
  const ModelSpec pm = ModelSpec::poisson_bedd(1.0, DegreeFunction::power(1.0), DegreeFunction::power(1.0));
  const Eigen::MatrixXd y = sample_matrix(pm, 30, 30, 4);
  CHECK(rel(u_fast(Builtin::h6, y).value, u_exact(builtin("h6"), y).value) <= 1e-10);
}

TEST_CASE("ordered path") {
  const Eigen::MatrixXd y = random_matrix(9, 4, 4);
  // symmetric kernels: both averages are exact sums of the same multiset, scaled
  for (const char* name : {"h1", "h2", "h3"})
    CHECK(u_ordered(builtin(name), y).value == doctest::Approx(u_exact(builtin(name), y).value).epsilon(1e-14));
  const KernelSpec one = make_kernel("y11", 1, 1, [](const SubMatrix& s) { return s(0, 0); });
  CHECK(u_ordered(one, y).value == doctest::Approx(y.mean()).epsilon(1e-14));
  const KernelSpec corner = make_kernel("y11", 2, 2, [](const SubMatrix& s) { return s(0, 0); });
  CHECK(std::fabs(u_ordered(corner, y).value - u_exact(symmetrize(corner), y).value) <= 1e-12);
  CHECK_THROWS_AS(u_exact(corner, y), std::invalid_argument);
}

TEST_CASE("dimension checks") {
  const Eigen::MatrixXd y = random_matrix(1, 1, 3);
  CHECK_THROWS_AS(u_exact(builtin("h2"), y), std::invalid_argument);
  CHECK_THROWS_AS(u_fast("h3", y), std::invalid_argument);
  CHECK_THROWS_AS(u_ordered(builtin("h2"), y), std::invalid_argument);
  CHECK_NOTHROW(u_fast("h1", y));
  CHECK_THROWS_AS(u_fast("nope", y), std::invalid_argument);
}

TEST_CASE("permutation invariance is exact on integer data") {
  const ModelSpec pm = ModelSpec::poisson_bedd(2.0, DegreeFunction::power(1.0), DegreeFunction::constant());
  const Eigen::MatrixXd y = sample_matrix(pm, 4, 3, 8);
  for (const char* name : {"h2", "h6"}) {
    const double base = u_exact(builtin(name), y).value;
    for (const auto& rp : permutations(4))
      for (const auto& cp : permutations(3)) {
        Eigen::MatrixXd z(4, 3);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 3; ++j) z(rp[i], cp[j]) = y(i, j);
        CHECK(u_exact(builtin(name), z).value == base);
      }
  }
}

TEST_CASE("h3 is the difference of the h1 lift and h2") {
  const Eigen::MatrixXd y = random_matrix(21, 6, 7);
  CHECK(std::fabs(u_h3(y) - (u_h1(y) - u_h2(y))) <= 1e-12);
  const KernelSpec lift = make_kernel("h1lift", 2, 2, [](const SubMatrix& s) {
    return (s(0, 0) * s(0, 1) + s(1, 0) * s(1, 1)) / 2;
  });
  CHECK(u_exact(lift, y).value == doctest::Approx(u_exact(builtin("h1"), y).value).epsilon(1e-14));
}

TEST_CASE("exact summation is order independent") {
  ExactSum a, b;
  const double xs[] = {1e100, 1.0, -1e100, 1e-20, 3.0};
  for (double x : xs) a.add(x);
  for (int i = 4; i >= 0; --i) b.add(xs[i]);
  CHECK(a.value() == b.value());
  CHECK(a.value() == 4.0);
}

TEST_CASE("path names") {
  CHECK(parse_path("fast") == UStatPath::fast);
  CHECK(path_name(UStatPath::ordered) == "ordered");
  CHECK_THROWS(parse_path("slow"));
}
