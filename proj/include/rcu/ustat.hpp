#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rcu/accumulate.hpp"
#include "rcu/kernels.hpp"

namespace rcu {

enum class UStatPath { exact, fast, ordered };

UStatPath parse_path(std::string_view s);
std::string_view path_name(UStatPath p);

struct UStatResult {
  double value = 0.0;
  std::string kernel;
  int m = 0, n = 0, p = 0, q = 0;
  UStatPath path = UStatPath::exact;
};

// Correctly rounded sum of doubles, independent of the order of additions.
class ExactSum {
 public:
  void add(double x);
  double value() const;

 private:
  std::vector<double> partials_;
};

inline constexpr double kExactTermBudget = 1e8;

UStatResult u_exact(const KernelSpec& k, const Eigen::Ref<const Eigen::MatrixXd>& y);
UStatResult u_ordered(const KernelSpec& k, const Eigen::Ref<const Eigen::MatrixXd>& y);
UStatResult u_fast(Builtin b, const Eigen::Ref<const Eigen::MatrixXd>& y);
UStatResult u_fast(std::string_view name, const Eigen::Ref<const Eigen::MatrixXd>& y);

namespace detail {

template <typename Derived>
void require_dims(const Eigen::MatrixBase<Derived>& y, int p, int q) {
  if (y.rows() < p || y.cols() < q)
    throw std::invalid_argument("U-statistic needs at least " + std::to_string(p) + " rows and " +
                                std::to_string(q) + " columns");
}

template <typename Derived>
double pair_denominator(const Eigen::MatrixBase<Derived>& y) {
  const double m = static_cast<double>(y.rows()), n = static_cast<double>(y.cols());
  return m * (m - 1) * n * (n - 1);
}

// Row sums, column sums and total of an entrywise expression, compensated.
struct Margins {
  Eigen::VectorXd row, col;
  double total = 0;
};

template <typename Derived>
Margins margins(const Eigen::MatrixBase<Derived>& y) {
  Margins mg;
  mg.row.resize(y.rows());
  mg.col.resize(y.cols());
  std::vector<CompensatedSum<double>> rs(y.rows());
  CompensatedSum<double> tot;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    CompensatedSum<double> cs;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double v = y(i, j);
      cs.add(v);
      rs[i].add(v);
    }
    mg.col(j) = cs.value();
  }
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    mg.row(i) = rs[i].value();
    tot.add(mg.row(i));
  }
  mg.total = tot.value();
  return mg;
}

// sum_i (R_i^2 - sum_j Y_ij^2): ordered pairs of distinct columns within a row.
template <typename Derived>
double within_row_pairs(const Eigen::MatrixBase<Derived>& y, const Margins& mg) {
  CompensatedSum<double> s;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    s.add(mg.row(i) * mg.row(i));
    for (Eigen::Index j = 0; j < y.cols(); ++j) s.add(-y(i, j) * y(i, j));
  }
  return s.value();
}

// sum over i != i', j != j' of A_ij B_i'j'
template <typename DA, typename DB>
double cross_pairs(const Eigen::MatrixBase<DA>& a, const Margins& ma, const Eigen::MatrixBase<DB>& b,
                   const Margins& mb) {
  CompensatedSum<double> s;
  s.add(ma.total * mb.total);
  for (Eigen::Index i = 0; i < a.rows(); ++i) s.add(-ma.row(i) * mb.row(i));
  for (Eigen::Index j = 0; j < a.cols(); ++j) s.add(-ma.col(j) * mb.col(j));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) s.add(a(i, j) * b(i, j));
  return s.value();
}

}  // namespace detail

// O(mn) U-statistics of the built-in kernels.
template <typename Derived>
double u_h1(const Eigen::MatrixBase<Derived>& y) {
  detail::require_dims(y, 1, 2);
  const auto mg = detail::margins(y);
  const double m = static_cast<double>(y.rows()), n = static_cast<double>(y.cols());
  return detail::within_row_pairs(y, mg) / (m * n * (n - 1));
}

template <typename Derived>
double u_h2(const Eigen::MatrixBase<Derived>& y) {
  detail::require_dims(y, 2, 2);
  const auto mg = detail::margins(y);
  return detail::cross_pairs(y, mg, y, mg) / detail::pair_denominator(y);
}

template <typename Derived>
double u_h3(const Eigen::MatrixBase<Derived>& y) {
  detail::require_dims(y, 2, 2);
  const auto mg = detail::margins(y);
  const double m = static_cast<double>(y.rows());
  CompensatedSum<double> s;
  s.add((m - 1) * detail::within_row_pairs(y, mg));
  s.add(-detail::cross_pairs(y, mg, y, mg));
  return s.value() / detail::pair_denominator(y);
}

template <typename Derived>
double u_h4(const Eigen::MatrixBase<Derived>& y) {
  detail::require_dims(y, 2, 2);
  const Eigen::MatrixXd z = y.array() * (y.array() - 1.0);
  const auto my = detail::margins(y), mz = detail::margins(z);
  return detail::cross_pairs(z, mz, y, my) / detail::pair_denominator(y);
}

template <typename Derived>
double u_h5(const Eigen::MatrixBase<Derived>& y) {
  detail::require_dims(y, 2, 2);
  const auto mg = detail::margins(y);
  CompensatedSum<double> s;
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double v = y(i, j);
      s.add(v * (mg.row(i) - v) * (mg.col(j) - v));
    }
  return s.value() / detail::pair_denominator(y);
}

template <typename Derived>
double u_h6(const Eigen::MatrixBase<Derived>& y) {
  detail::require_dims(y, 2, 2);
  const Eigen::MatrixXd z = y.array() * (y.array() - 1.0);
  const auto my = detail::margins(y), mz = detail::margins(z);
  CompensatedSum<double> s;
  s.add(detail::cross_pairs(z, mz, y, my));
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double v = y(i, j);
      s.add(-v * (my.row(i) - v) * (my.col(j) - v));
    }
  return s.value() / detail::pair_denominator(y);
}

template <typename Derived>
double u_builtin(Builtin b, const Eigen::MatrixBase<Derived>& y) {
  switch (b) {
    case Builtin::h1: return u_h1(y);
    case Builtin::h2: return u_h2(y);
    case Builtin::h3: return u_h3(y);
    case Builtin::h4: return u_h4(y);
    case Builtin::h5: return u_h5(y);
    case Builtin::h6: return u_h6(y);
  }
  return 0.0;
}

}  // namespace rcu
