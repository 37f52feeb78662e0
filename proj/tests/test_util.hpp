#pragma once

#include <random>

#include "geolab/hyperbolic.hpp"

namespace geolab::rnd {

// Random word in the generators T^{+-1}, S.
inline GroupElement random_word(std::mt19937_64& rng, int length) {
  std::uniform_int_distribution<int> pick(0, 2);
  GroupElement g;
  const GroupElement T = GroupElement::translation(1), Ti = GroupElement::translation(-1),
                     S = GroupElement::inversion();
  for (int i = 0; i < length; ++i) {
    int p = pick(rng);
    g = g * (p == 0 ? T : p == 1 ? Ti : S);
  }
  return g;
}

inline GroupElement random_hyperbolic(std::mt19937_64& rng, int length) {
  for (;;) {
    GroupElement g = random_word(rng, length);
    if (g.is_hyperbolic()) return g;
  }
}

// Random element with entries bounded by roughly max_entry.
inline GroupElement random_bounded(std::mt19937_64& rng, std::int64_t max_entry) {
  std::uniform_int_distribution<std::int64_t> dist(-max_entry, max_entry);
  for (;;) {
    std::int64_t a = dist(rng), c = dist(rng);
    if (c == 0) continue;
    i128 x, y;
    if (ext_gcd(a, c, x, y) != 1) continue;
    // a*x + c*y = 1, so [[a, -y], [c, x]] has determinant 1; shift to keep entries small.
    i128 d = x, b = -y;
    i128 shift = (d - static_cast<i128>(dist(rng) % (std::abs(c) + 1))) / c;
    d -= shift * c;
    b -= shift * a;
    return GroupElement::normalize(a, b, c, d);
  }
}

}  // namespace geolab::rnd
