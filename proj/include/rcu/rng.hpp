#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace rcu {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t a) {
  return mix64(key ^ mix64(a ^ 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive(std::uint64_t key, std::initializer_list<std::uint64_t> parts) {
  for (auto p : parts) key = derive(key, p);
  return key;
}

std::uint64_t tag_hash(std::string_view tag);

// Maps 64 random bits to the open interval (0,1).
constexpr double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;  // 53 bits would round the top value to 1
}

// Counter-based stream; draw k is a pure function of (key, k).
class KeyedStream {
 public:
  explicit KeyedStream(std::uint64_t key) : key_(key) {}
  std::uint64_t bits() { return derive(key_, counter_++); }
  double uniform() { return to_unit(bits()); }
  double normal();
  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class LatentRole : std::uint64_t { row = 0x11, col = 0x22, edge = 0x33, mixing = 0x44 };

inline double row_latent(std::uint64_t seed, std::uint64_t i) {
  return to_unit(derive(seed, {static_cast<std::uint64_t>(LatentRole::row), i}));
}
inline double col_latent(std::uint64_t seed, std::uint64_t j) {
  return to_unit(derive(seed, {static_cast<std::uint64_t>(LatentRole::col), j}));
}
inline double edge_latent(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  return to_unit(derive(seed, {static_cast<std::uint64_t>(LatentRole::edge), i, j}));
}

}  // namespace rcu
