#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "rcu/graph_catalog.hpp"

namespace rcu {

// p x q block of Y, stored inline (p, q <= 4).
using SubMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxRows, kMaxCols>;

class KernelSpec {
 public:
  using Evaluator = std::function<double(const SubMatrix&)>;

  KernelSpec() = default;
  KernelSpec(std::string name, int p, int q, Evaluator fn, bool symmetric);

  const std::string& name() const { return name_; }
  int p() const { return p_; }
  int q() const { return q_; }
  bool symmetric() const { return symmetric_; }
  // No shape check; hot path.
  double operator()(const SubMatrix& y) const { return fn_(y); }

 private:
  std::string name_;
  int p_ = 0, q_ = 0;
  Evaluator fn_;
  bool symmetric_ = false;
};

// Shape-checked evaluation.
double evaluate(const KernelSpec& k, const Eigen::Ref<const Eigen::MatrixXd>& sub);

enum class Builtin { h1, h2, h3, h4, h5, h6 };

Builtin parse_builtin(std::string_view name);
std::string_view builtin_name(Builtin b);
KernelSpec builtin(Builtin b);
KernelSpec builtin(std::string_view name);

// User kernel; the symmetric flag is set by running check_symmetry.
KernelSpec make_kernel(std::string name, int p, int q, KernelSpec::Evaluator fn);
KernelSpec constant_kernel(int p, int q, double value);

KernelSpec symmetrize(const KernelSpec& k);
bool check_symmetry(const KernelSpec& k, int trials = 32, std::uint64_t seed = 1);

// Built-in kernels as plain functions of a 2x2 (or 1x2) block.
template <typename Derived>
double h1_value(const Eigen::MatrixBase<Derived>& y) {
  return y(0, 0) * y(0, 1);
}
template <typename Derived>
double h2_value(const Eigen::MatrixBase<Derived>& y) {
  return (y(0, 0) * y(1, 1) + y(0, 1) * y(1, 0)) / 2;
}
template <typename Derived>
double h3_value(const Eigen::MatrixBase<Derived>& y) {
  return (y(0, 0) * y(0, 1) + y(1, 0) * y(1, 1)) / 2 - h2_value(y);
}
template <typename Derived>
double h4_value(const Eigen::MatrixBase<Derived>& y) {
  const double a = y(0, 0), b = y(0, 1), c = y(1, 0), d = y(1, 1);
  return (a * (a - 1) * d + b * (b - 1) * c + c * (c - 1) * b + d * (d - 1) * a) / 4;
}
template <typename Derived>
double h5_value(const Eigen::MatrixBase<Derived>& y) {
  const double a = y(0, 0), b = y(0, 1), c = y(1, 0), d = y(1, 1);
  return (a * b * d + b * d * c + d * c * a + c * a * b) / 4;
}
template <typename Derived>
double h6_value(const Eigen::MatrixBase<Derived>& y) {
  return h4_value(y) - h5_value(y);
}

}  // namespace rcu
