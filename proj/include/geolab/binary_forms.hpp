#pragma once

#include <algorithm>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "int128.hpp"

namespace geolab {

// Indefinite integral binary quadratic form A x^2 + B xy + C y^2 with non-square discriminant.
struct QuadForm {
  i128 A = 0, B = 0, C = 0;

  i128 disc() const { return checked_sub(checked_mul(B, B), checked_mul(checked_mul(4, A), C)); }
  i128 content() const { return gcd128(gcd128(A, B), C); }
  QuadForm operator-() const { return {-A, -B, -C}; }
  bool operator==(const QuadForm& o) const { return A == o.A && B == o.B && C == o.C; }
  bool operator!=(const QuadForm& o) const { return !(*this == o); }
  bool operator<(const QuadForm& o) const {
    return std::tie(A, B, C) < std::tie(o.A, o.B, o.C);
  }
};

// s = floor(sqrt(D)); reduced means |sqrt(D) - 2|A|| < B < sqrt(D).
inline bool is_reduced(const QuadForm& f, i128 s) {
  if (f.B <= 0 || f.B > s) return false;
  i128 twoA = 2 * abs128(f.A);
  if (twoA <= s) return f.B >= s - twoA + 1;
  return f.B + s >= twoA;
}

// Right neighbour (C, B', *) with B' = -B mod 2C in the normalizing window.
inline QuadForm rho(const QuadForm& f, i128 D, i128 s) {
  const i128 c = abs128(f.C);
  if (c == 0) throw DomainError("degenerate form (square discriminant)");
  i128 b;
  if (c <= s)
    b = s - mod_floor(s + f.B, 2 * c);
  else
    b = c - mod_floor(c + f.B, 2 * c);
  i128 num = checked_sub(checked_mul(b, b), D);
  return {f.C, b, num / (4 * f.C)};
}

inline QuadForm reduce_form(QuadForm f, int max_steps = 100000) {
  const i128 D = f.disc();
  if (D <= 0 || is_square(D)) throw DomainError("form is not indefinite with non-square discriminant");
  const i128 s = floor_sqrt(D);
  for (int i = 0; i < max_steps; ++i) {
    if (is_reduced(f, s)) return f;
    f = rho(f, D, s);
  }
  throw NumericalError("form reduction did not terminate");
}

// Reduced forms in the proper equivalence class of a reduced form, in rho order.
inline std::vector<QuadForm> reduction_cycle(const QuadForm& reduced) {
  const i128 D = reduced.disc();
  const i128 s = floor_sqrt(D);
  std::vector<QuadForm> out{reduced};
  QuadForm f = rho(reduced, D, s);
  while (f != reduced) {
    out.push_back(f);
    f = rho(f, D, s);
    if (out.size() > 100000000u) throw NumericalError("reduction cycle too long");
  }
  return out;
}

inline QuadForm canonical_form(const QuadForm& f) {
  auto cyc = reduction_cycle(reduce_form(f));
  return *std::min_element(cyc.begin(), cyc.end());
}

// Smallest-prime-factor table for divisor enumeration.
class SpfSieve {
 public:
  explicit SpfSieve(std::uint64_t limit = 1) { extend(limit); }

  void extend(std::uint64_t limit) {
    if (limit < spf_.size()) return;
    std::uint64_t n = std::max<std::uint64_t>(limit + 1, 2);
    spf_.assign(n, 0);
    for (std::uint64_t i = 2; i < n; ++i) {
      if (spf_[i] != 0) continue;
      for (std::uint64_t j = i; j < n; j += i)
        if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
    }
  }

  std::uint64_t limit() const { return spf_.empty() ? 0 : spf_.size() - 1; }

  void divisors(std::uint64_t m, std::vector<std::uint64_t>& out) const {
    out.clear();
    out.push_back(1);
    while (m > 1) {
      std::uint64_t p = spf_[m], e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      std::size_t base = out.size();
      std::uint64_t pk = 1;
      for (std::uint64_t k = 0; k < e; ++k) {
        pk *= p;
        for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
      }
    }
  }

 private:
  std::vector<std::uint32_t> spf_;
};

// All reduced forms of discriminant D, sorted; primitive ones only if requested.
inline std::vector<QuadForm> reduced_forms(i128 D, bool primitive_only, const SpfSieve& sieve) {
  if (D <= 0 || is_square(D) || (mod_floor(D, 4) != 0 && mod_floor(D, 4) != 1))
    throw DomainError("not a non-square positive discriminant");
  const i128 s = floor_sqrt(D);
  if (static_cast<std::uint64_t>(D / 4) > sieve.limit()) throw PreconditionError("sieve too small");
  std::vector<QuadForm> out;
  std::vector<std::uint64_t> divs;
  for (i128 B = (D % 2 == 0) ? 2 : 1; B <= s; B += 2) {
    i128 m = (D - B * B) / 4;
    sieve.divisors(static_cast<std::uint64_t>(m), divs);
    for (std::uint64_t dv : divs) {
      i128 a = static_cast<i128>(dv);
      i128 twoA = 2 * a;
      bool ok = twoA <= s ? B >= s - twoA + 1 : B + s >= twoA;
      if (!ok) continue;
      i128 c = m / a;
      for (int sign : {1, -1}) {
        QuadForm f{sign * a, B, -sign * c};
        if (primitive_only && f.content() != 1) continue;
        out.push_back(f);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Cycle minima of all proper classes of primitive forms of discriminant D, sorted.
inline std::vector<QuadForm> class_minima(i128 D, const SpfSieve& sieve) {
  auto forms = reduced_forms(D, true, sieve);
  std::vector<char> seen(forms.size(), 0);
  std::vector<QuadForm> out;
  const i128 s = floor_sqrt(D);
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (seen[i]) continue;
    out.push_back(forms[i]);
    QuadForm f = forms[i];
    do {
      auto it = std::lower_bound(forms.begin(), forms.end(), f);
      seen[static_cast<std::size_t>(it - forms.begin())] = 1;
      f = rho(f, D, s);
    } while (f != forms[i]);
  }
  return out;
}

}  // namespace geolab
