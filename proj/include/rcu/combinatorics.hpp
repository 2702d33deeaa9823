#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

namespace rcu {

constexpr std::uint64_t factorial(int n) {
  std::uint64_t r = 1;
  for (int k = 2; k <= n; ++k) r *= static_cast<std::uint64_t>(k);
  return r;
}

// n (n-1) ... (n-k+1)
constexpr std::uint64_t falling(int n, int k) {
  if (k > n || k < 0) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<std::uint64_t>(n - i);
  return r;
}

constexpr std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

using SmallPerm = std::array<int, 4>;

// All permutations of {0..n-1}, n <= 4, in lexicographic order.
inline std::vector<SmallPerm> permutations(int n) {
  std::vector<SmallPerm> out;
  SmallPerm p{0, 1, 2, 3};
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.begin() + n));
  return out;
}

// Advance a sorted k-subset of {0..n-1}; returns false after the last one.
template <typename It>
bool next_combination(It first, int k, int n) {
  int i = k - 1;
  while (i >= 0 && first[i] == n - k + i) --i;
  if (i < 0) return false;
  ++first[i];
  for (int j = i + 1; j < k; ++j) first[j] = first[j - 1] + 1;
  return true;
}

inline std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k > n || k < 0) return out;
  std::vector<int> c(k);
  std::iota(c.begin(), c.end(), 0);
  do {
    out.push_back(c);
  } while (next_combination(c.begin(), k, n));
  return out;
}

}  // namespace rcu
