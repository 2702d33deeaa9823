#include "rcu/ustat.hpp"

#include <numeric>

#include "rcu/combinatorics.hpp"

namespace rcu {

UStatPath parse_path(std::string_view s) {
  if (s == "exact") return UStatPath::exact;
  if (s == "fast") return UStatPath::fast;
  if (s == "ordered") return UStatPath::ordered;
  throw std::invalid_argument("path must be exact, fast or ordered");
}

std::string_view path_name(UStatPath p) {
  switch (p) {
    case UStatPath::exact: return "exact";
    case UStatPath::fast: return "fast";
    case UStatPath::ordered: return "ordered";
  }
  return "?";
}

// Shewchuk's non-overlapping partials, as in Python's math.fsum.
void ExactSum::add(double x) {
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

double ExactSum::value() const {
  if (partials_.empty()) return 0.0;
  std::size_t n = partials_.size() - 1;
  double hi = partials_[n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    lo = y - (hi - x);
    if (lo != 0.0) break;
  }
  // round half-even across the remaining partials
  if (n > 0 && ((lo < 0 && partials_[n - 1] < 0) || (lo > 0 && partials_[n - 1] > 0))) {
    const double y = lo * 2;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

namespace {

void check_budget(int m, int n, int p, int q, double extra) {
  const double terms = double(binomial(m, p)) * double(binomial(n, q)) * extra;
  if (terms > kExactTermBudget)
    throw std::length_error("exact enumeration over " + std::to_string(terms) + " terms exceeds the 1e8 budget");
}

template <typename Visit>
void for_each_block(const Eigen::Ref<const Eigen::MatrixXd>& y, int p, int q, Visit&& visit) {
  const int m = static_cast<int>(y.rows()), n = static_cast<int>(y.cols());
  std::vector<int> ib(p), jb(q);
  std::iota(ib.begin(), ib.end(), 0);
  do {
    std::iota(jb.begin(), jb.end(), 0);
    do {
      visit(ib, jb);
    } while (next_combination(jb.begin(), q, n));
  } while (next_combination(ib.begin(), p, m));
}

}  // namespace

UStatResult u_exact(const KernelSpec& k, const Eigen::Ref<const Eigen::MatrixXd>& y) {
  if (!k.symmetric()) throw std::invalid_argument("u_exact needs a symmetric kernel; use u_ordered");
  detail::require_dims(y, k.p(), k.q());
  const int m = static_cast<int>(y.rows()), n = static_cast<int>(y.cols());
  check_budget(m, n, k.p(), k.q(), 1.0);
  ExactSum sum;
  SubMatrix block(k.p(), k.q());
  for_each_block(y, k.p(), k.q(), [&](const std::vector<int>& ib, const std::vector<int>& jb) {
    for (int a = 0; a < k.p(); ++a)
      for (int b = 0; b < k.q(); ++b) block(a, b) = y(ib[a], jb[b]);
    sum.add(k(block));
  });
  const double count = double(binomial(m, k.p())) * double(binomial(n, k.q()));
  return {sum.value() / count, k.name(), m, n, k.p(), k.q(), UStatPath::exact};
}

UStatResult u_ordered(const KernelSpec& k, const Eigen::Ref<const Eigen::MatrixXd>& y) {
  detail::require_dims(y, k.p(), k.q());
  const int m = static_cast<int>(y.rows()), n = static_cast<int>(y.cols());
  const auto rps = permutations(k.p()), cps = permutations(k.q());
  check_budget(m, n, k.p(), k.q(), double(rps.size() * cps.size()));
  ExactSum sum;
  SubMatrix block(k.p(), k.q());
  for_each_block(y, k.p(), k.q(), [&](const std::vector<int>& ib, const std::vector<int>& jb) {
    for (const auto& rp : rps)
      for (const auto& cp : cps) {
        for (int a = 0; a < k.p(); ++a)
          for (int b = 0; b < k.q(); ++b) block(a, b) = y(ib[rp[a]], jb[cp[b]]);
        sum.add(k(block));
      }
  });
  const double count = double(falling(m, k.p())) * double(falling(n, k.q()));
  return {sum.value() / count, k.name(), m, n, k.p(), k.q(), UStatPath::ordered};
}

UStatResult u_fast(Builtin b, const Eigen::Ref<const Eigen::MatrixXd>& y) {
  const KernelSpec k = builtin(b);
  const double v = u_builtin(b, y);
  return {v, k.name(), static_cast<int>(y.rows()), static_cast<int>(y.cols()), k.p(), k.q(), UStatPath::fast};
}

UStatResult u_fast(std::string_view name, const Eigen::Ref<const Eigen::MatrixXd>& y) {
  return u_fast(parse_builtin(name), y);
}

}  // namespace rcu
