#include "netdecomp/rng.hpp"

namespace netdecomp {

double Stream::uniform_open0() {
  // 53 random bits mapped to {1, ..., 2^53} / 2^53.
  const std::uint64_t x = (next() >> 11) + 1;
  return static_cast<double>(x) * 0x1.0p-53;
}

double Stream::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t Stream::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t x = next();
    if (x < limit) return x % bound;
  }
}

}  // namespace netdecomp
