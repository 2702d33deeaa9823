#include "rcu/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "rcu/rng.hpp"

namespace rcu {

KernelSpec::KernelSpec(std::string name, int p, int q, Evaluator fn, bool symmetric)
    : name_(std::move(name)), p_(p), q_(q), fn_(std::move(fn)), symmetric_(symmetric) {
  if (p < 0 || q < 0 || p > kMaxRows || q > kMaxCols) throw SizeLimitError("kernel arity beyond 4x4");
  if (!fn_) throw std::invalid_argument("kernel without evaluator");
}

double evaluate(const KernelSpec& k, const Eigen::Ref<const Eigen::MatrixXd>& sub) {
  if (sub.rows() != k.p() || sub.cols() != k.q())
    throw std::invalid_argument("kernel " + k.name() + " expects a " + std::to_string(k.p()) + "x" +
                                std::to_string(k.q()) + " block, got " + std::to_string(sub.rows()) + "x" +
                                std::to_string(sub.cols()));
  SubMatrix y = sub;
  return k(y);
}

Builtin parse_builtin(std::string_view name) {
  if (name == "h1") return Builtin::h1;
  if (name == "h2") return Builtin::h2;
  if (name == "h3") return Builtin::h3;
  if (name == "h4") return Builtin::h4;
  if (name == "h5") return Builtin::h5;
  if (name == "h6") return Builtin::h6;
  throw std::invalid_argument("unknown builtin kernel '" + std::string(name) + "'");
}

std::string_view builtin_name(Builtin b) {
  static constexpr std::string_view names[] = {"h1", "h2", "h3", "h4", "h5", "h6"};
  return names[static_cast<int>(b)];
}

KernelSpec builtin(Builtin b) {
  const std::string name(builtin_name(b));
  switch (b) {
    case Builtin::h1:
      return KernelSpec(name, 1, 2, [](const SubMatrix& y) { return h1_value(y); }, true);
    case Builtin::h2:
      return KernelSpec(name, 2, 2, [](const SubMatrix& y) { return h2_value(y); }, true);
    case Builtin::h3:
      return KernelSpec(name, 2, 2, [](const SubMatrix& y) { return h3_value(y); }, true);
    case Builtin::h4:
      return KernelSpec(name, 2, 2, [](const SubMatrix& y) { return h4_value(y); }, true);
    case Builtin::h5:
      return KernelSpec(name, 2, 2, [](const SubMatrix& y) { return h5_value(y); }, true);
    case Builtin::h6:
      return KernelSpec(name, 2, 2, [](const SubMatrix& y) { return h6_value(y); }, true);
  }
  throw std::invalid_argument("bad builtin");
}

KernelSpec builtin(std::string_view name) { return builtin(parse_builtin(name)); }

KernelSpec make_kernel(std::string name, int p, int q, KernelSpec::Evaluator fn) {
  KernelSpec probe(name, p, q, fn, false);
  bool sym = check_symmetry(probe);
  return KernelSpec(std::move(name), p, q, std::move(fn), sym);
}

KernelSpec constant_kernel(int p, int q, double value) {
  return KernelSpec("const", p, q, [value](const SubMatrix&) { return value; }, true);
}

namespace {

SubMatrix permute_block(const SubMatrix& y, const SmallPerm& rp, const SmallPerm& cp) {
  SubMatrix out(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j) out(rp[i], cp[j]) = y(i, j);
  return out;
}

}  // namespace

KernelSpec symmetrize(const KernelSpec& k) {
  const auto rps = permutations(k.p()), cps = permutations(k.q());
  const double norm = static_cast<double>(rps.size() * cps.size());
  auto fn = [k, rps, cps, norm](const SubMatrix& y) {
    double s = 0;
    for (const auto& rp : rps)
      for (const auto& cp : cps) s += k(permute_block(y, rp, cp));
    return s / norm;
  };
  return KernelSpec(k.name() + "^s", k.p(), k.q(), fn, true);
}

bool check_symmetry(const KernelSpec& k, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("check_symmetry needs at least one trial");
  const auto rps = permutations(k.p()), cps = permutations(k.q());
  KeyedStream rng(derive(seed, tag_hash("check_symmetry")));
  for (int t = 0; t < trials; ++t) {
    SubMatrix y(k.p(), k.q());
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) = 6.0 * rng.uniform() - 3.0;
    const double base = k(y);
    for (const auto& rp : rps)
      for (const auto& cp : cps)
        if (!(std::fabs(k(permute_block(y, rp, cp)) - base) <= 1e-12)) return false;
  }
  return true;
}

}  // namespace rcu
