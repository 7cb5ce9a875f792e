#pragma once

#include <cmath>

#include "chincl/channel.hpp"

namespace chincl::testutil {

// golden 5x5 circulant / non-circulant doubly stochastic pair with equal
// entry multisets but different singular values
inline Channel golden_k1() {
  Mat m(5, 5);
  m << 1, 2, 3, 4, 5, 5, 1, 2, 3, 4, 4, 5, 1, 2, 3, 3, 4, 5, 1, 2, 2, 3, 4, 5, 1;
  return Channel::validate(m / 15.0);
}

inline Channel golden_k2() {
  Mat m(5, 5);
  m << 1, 2, 3, 4, 5, 5, 1, 2, 3, 4, 3, 4, 1, 5, 2, 2, 5, 4, 1, 3, 4, 3, 5, 2, 1;
  return Channel::validate(m / 15.0);
}

inline double binary_entropy_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

}  // namespace chincl::testutil
