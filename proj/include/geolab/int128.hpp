#pragma once

#include <cstdint>
#include <string>
#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace geolab {

using i128 = __int128;
using u128 = unsigned __int128;

inline i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("128-bit multiplication overflow");
  return r;
}

inline i128 checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("128-bit addition overflow");
  return r;
}

inline i128 checked_sub(i128 a, i128 b) {
  i128 r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("128-bit subtraction overflow");
  return r;
}

inline i128 abs128(i128 a) { return a < 0 ? -a : a; }

// Floor division and nonnegative remainder.
inline i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline i128 mod_floor(i128 a, i128 m) {
  i128 r = a % m;
  return r < 0 ? r + m : r;
}

inline i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Returns g = gcd(a, b) >= 0 with x*a + y*b = g.
inline i128 ext_gcd(i128 a, i128 b, i128& x, i128& y) {
  i128 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    i128 q = floor_div(a, b);
    i128 r = a - q * b;
    a = b;
    b = r;
    i128 t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

inline i128 mod_inverse(i128 a, i128 m) {
  if (m == 1) return 0;
  i128 x, y;
  i128 g = ext_gcd(mod_floor(a, m), m, x, y);
  if (g != 1) throw DomainError("not invertible modulo m");
  return mod_floor(x, m);
}

inline u128 isqrt128(u128 n) {
  if (n == 0) return 0;
  long double approx = std::sqrt(static_cast<long double>(n));
  u128 r = static_cast<u128>(approx);
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline i128 floor_sqrt(i128 n) {
  if (n < 0) throw DomainError("square root of negative integer");
  return static_cast<i128>(isqrt128(static_cast<u128>(n)));
}

inline bool is_square(i128 n, i128* root = nullptr) {
  if (n < 0) return false;
  i128 r = floor_sqrt(n);
  if (root) *root = r;
  return r * r == n;
}

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

inline i128 parse_i128(const std::string& s) {
  if (s.empty()) throw FormatError("empty integer");
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw FormatError("bad integer: " + s);
  i128 v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw FormatError("bad integer: " + s);
    v = checked_add(checked_mul(v, 10), s[i] - '0');
  }
  return neg ? -v : v;
}

}  // namespace geolab
