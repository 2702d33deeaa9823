#include "rcu/rng.hpp"

#include "rcu/distributions.hpp"

namespace rcu {

std::uint64_t tag_hash(std::string_view tag) {
  // FNV-1a, then mixed
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

double KeyedStream::normal() { return normal_quantile(uniform()); }

}  // namespace rcu
