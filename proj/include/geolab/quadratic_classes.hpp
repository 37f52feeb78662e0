#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "automorphic.hpp"
#include "binary_forms.hpp"
#include "enumeration.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "periods.hpp"
#include "quadrature.hpp"
#include "statistics.hpp"

namespace geolab {

inline bool is_discriminant(i128 D) {
  if (D <= 0 || is_square(D)) return false;
  const i128 r = mod_floor(D, 4);
  return r == 0 || r == 1;
}

inline bool is_squarefree(i128 n) {
  if (n < 0) n = -n;
  for (i128 p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
    if (n % p == 0) n /= p;
  }
  return true;
}

inline bool is_fundamental_discriminant(i128 D) {
  if (!is_discriminant(D)) return false;
  if (D % 4 == 1) return is_squarefree(D);
  const i128 m = D / 4;
  return (m % 4 == 2 || m % 4 == 3) && is_squarefree(m);
}

inline QuadForm principal_form(i128 D) {
  if (!is_discriminant(D)) throw DomainError("not a positive non-square discriminant");
  const i128 b = D % 2;
  return reduce_form(QuadForm{1, b, (b * b - D) / 4});
}

// Minimal positive solution of t^2 - D u^2 = 4.
struct PellUnit {
  BigInt t = 0;
  BigInt u = 0;
};

namespace detail {

struct BigMatrix {
  BigInt a = 1, b = 0, c = 0, d = 1;
  BigMatrix operator*(const BigMatrix& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

inline BigInt to_big(i128 v) {
  const bool neg = v < 0;
  u128 m = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  BigInt r = static_cast<std::uint64_t>(m >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(m);
  return neg ? BigInt(-r) : r;
}

// f o M = f for M the product of the rho steps around the reduction cycle of f.
inline BigMatrix cycle_automorph(const QuadForm& reduced) {
  const i128 D = reduced.disc(), s = floor_sqrt(D);
  BigMatrix M;
  QuadForm f = reduced;
  do {
    QuadForm g = rho(f, D, s);
    const i128 delta = (g.B + f.B) / (2 * f.C);
    M = M * BigMatrix{0, -1, 1, to_big(delta)};
    f = g;
  } while (f != reduced);
  return M;
}

}  // namespace detail

inline PellUnit pell_unit(i128 D) {
  const QuadForm p = principal_form(D);
  const detail::BigMatrix M = detail::cycle_automorph(p);
  PellUnit r;
  r.t = abs(M.a + M.d);
  r.u = abs(M.c) / detail::to_big(abs128(p.A));
  if (r.t * r.t - detail::to_big(D) * r.u * r.u != 4) throw std::logic_error("cycle automorph is not a unit");
  return r;
}

// Exact test of (t + u sqrt(D)) / 2 <= X.
inline bool unit_at_most(const PellUnit& e, i128 D, double X) {
  using boost::multiprecision::cpp_rational;
  const cpp_rational rhs = 2 * cpp_rational(X) - cpp_rational(e.t);
  if (rhs < 0) return false;
  return cpp_rational(detail::to_big(D) * e.u * e.u) <= rhs * rhs;
}

inline double log_unit(const PellUnit& e, i128 D) {
  const double lt = std::log(static_cast<double>(e.t)), lu = std::log(static_cast<double>(e.u));
  const double sd = std::sqrt(static_cast<double>(D));
  // log((t + u sqrt D) / 2) without forming t when it exceeds double range
  return lt + std::log1p(std::exp(lu - lt) * sd) - std::log(2.0);
}

struct Discriminant {
  i128 D = 0;
  bool is_fundamental = false;
  PellUnit epsilon;
  std::int64_t h_plus = 0;
  bool has_norm_minus_one_unit = false;

  double log_epsilon() const { return log_unit(epsilon, D); }
};

// A unit of norm -1 exists iff eps = eta^2 with N(eta) = -1, i.e. t - 2 and (t + 2) / D are squares.
inline bool norm_minus_one_unit(const PellUnit& e, i128 D) {
  const BigInt m = e.t - 2;
  const BigInt r = sqrt(m);
  if (r * r != m) return false;
  const BigInt n = e.t + 2, bd = detail::to_big(D);
  if (n % bd != 0) return false;
  const BigInt q = n / bd, s = sqrt(q);
  return s * s == q;
}

inline Discriminant make_discriminant(i128 D, const SpfSieve* sieve = nullptr) {
  Discriminant d;
  d.D = D;
  d.is_fundamental = is_fundamental_discriminant(D);
  d.epsilon = pell_unit(D);
  d.has_norm_minus_one_unit = norm_minus_one_unit(d.epsilon, D);
  if (sieve && sieve->limit() >= static_cast<std::uint64_t>(D / 4 + 1)) {
    d.h_plus = static_cast<std::int64_t>(class_minima(D, *sieve).size());
  } else {
    SpfSieve local(static_cast<std::uint64_t>(D / 4 + 1));
    d.h_plus = static_cast<std::int64_t>(class_minima(D, local).size());
  }
  return d;
}

// Fundamental D with eps_D <= X, sorted by D. Candidates come from traces t <= X + 1;
// the first trace met for a given D is its minimal solution.
inline std::vector<Discriminant> fundamental_discriminants_by_unit(double X, unsigned threads = 1) {
  if (!(X >= 0.5 * (1.0 + std::sqrt(5.0)))) throw PreconditionError("X must be at least the golden ratio");
  if (X > 1e6) throw PreconditionError("X exceeds the supported range");
  const std::int64_t tmax = static_cast<std::int64_t>(std::floor(X + 1.0));
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> first;
  for (std::int64_t t = 3; t <= tmax; ++t) {
    const std::int64_t n = t * t - 4;
    for (std::int64_t u = 1; u * u <= n; ++u) {
      if (n % (u * u)) continue;
      const std::int64_t D = n / (u * u);
      if (!is_fundamental_discriminant(D)) continue;
      first.emplace(D, std::make_pair(t, u));
    }
  }
  std::vector<Discriminant> out;
  std::int64_t dmax = 0;
  for (const auto& [D, tu] : first) {
    PellUnit e{tu.first, tu.second};
    if (!unit_at_most(e, D, X)) continue;
    Discriminant d;
    d.D = D;
    d.is_fundamental = true;
    d.epsilon = e;
    d.has_norm_minus_one_unit = norm_minus_one_unit(e, D);
    out.push_back(d);
    dmax = std::max(dmax, D);
  }
  const SpfSieve sieve(static_cast<std::uint64_t>(dmax / 4 + 1));
  parallel_for(out.size(), threads,
               [&](std::size_t i) { out[i].h_plus = static_cast<std::int64_t>(class_minima(out[i].D, sieve).size()); });
  return out;
}

struct FormClass {
  QuadForm form;
  std::size_t index = 0;
};

// values[chi][A]
struct CharacterTable {
  std::vector<std::vector<cplx>> values;
  std::size_t size() const { return values.size(); }
};

struct ClassGroup {
  i128 D = 0;
  std::vector<FormClass> classes;
  std::vector<std::vector<std::uint32_t>> product;
  std::vector<std::uint32_t> inverse;
  std::vector<std::uint32_t> order;
  std::size_t identity = 0;
  CharacterTable characters;

  std::size_t h() const { return classes.size(); }
  std::size_t find(const QuadForm& f) const {
    const QuadForm c = canonical_form(f);
    for (const auto& k : classes)
      if (k.form == c) return k.index;
    throw std::logic_error("form class not in the group");
  }
};

// Properly equivalent form with A > 0 (f reduced, so A C < 0).
inline QuadForm positive_leading(QuadForm f) {
  if (f.A > 0) return f;
  f = reduce_form(f);
  if (f.A > 0) return f;
  return {f.C, -f.B, f.A};
}

// Dirichlet composition (Cohen, Algorithm 5.4.7), returned canonical.
inline QuadForm compose_forms(const QuadForm& f, const QuadForm& g) {
  if (f.disc() != g.disc()) throw DomainError("composition needs equal discriminants");
  QuadForm f1 = positive_leading(f), f2 = positive_leading(g);
  if (f1.A > f2.A) std::swap(f1, f2);
  const i128 s = (f1.B + f2.B) / 2, n = f2.B - s;
  i128 y1, d;
  if (f2.A % f1.A == 0) {
    y1 = 0;
    d = f1.A;
  } else {
    i128 u, v;
    d = ext_gcd(f2.A, f1.A, u, v);
    y1 = u;
  }
  i128 x2, y2, d1;
  if (s % d == 0) {
    y2 = -1;
    x2 = 0;
    d1 = d;
  } else {
    i128 xx, yy;
    d1 = ext_gcd(s, d, xx, yy);
    x2 = xx;
    y2 = -yy;
  }
  const i128 v1 = f1.A / d1, v2 = f2.A / d1;
  const i128 r = mod_floor(checked_sub(checked_mul(checked_mul(y1, y2), n), checked_mul(x2, f2.C)), v1);
  const i128 b3 = checked_add(f2.B, checked_mul(2 * v2, r));
  const i128 a3 = checked_mul(v1, v2);
  const i128 c3 = checked_add(checked_mul(f2.C, d1), checked_mul(r, checked_add(f2.B, checked_mul(v2, r)))) / v1;
  QuadForm h{a3, b3, c3};
  if (h.disc() != f.disc()) throw std::logic_error("composition changed the discriminant");
  return canonical_form(h);
}

namespace detail {

// Characters built by adjoining one cyclic extension at a time.
inline CharacterTable build_characters(const std::vector<std::vector<std::uint32_t>>& mul, std::size_t e) {
  const std::size_t h = mul.size();
  std::vector<int> in_sub(h, 0);
  std::vector<std::size_t> sub{e};
  in_sub[e] = 1;
  // chars[k][element] over the current subgroup
  std::vector<std::vector<cplx>> chars(1, std::vector<cplx>(h, 0.0));
  chars[0][e] = 1.0;
  while (sub.size() < h) {
    std::size_t g = 0;
    while (in_sub[g]) ++g;
    std::size_t m = 1, p = g;
    while (!in_sub[p]) {
      p = mul[p][g];
      ++m;
    }
    // p = g^m lies in the subgroup
    std::vector<std::size_t> powers{e};
    for (std::size_t i = 1; i < m; ++i) powers.push_back(mul[powers.back()][g]);
    std::vector<std::size_t> grown;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t s : sub) grown.push_back(mul[powers[i]][s]);
    std::vector<std::vector<cplx>> next;
    for (const auto& chi : chars) {
      const double base = std::arg(chi[p]) / static_cast<double>(m);
      for (std::size_t j = 0; j < m; ++j) {
        const cplx lam = std::polar(1.0, base + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
        std::vector<cplx> row(h, 0.0);
        cplx li = 1.0;
        for (std::size_t i = 0; i < m; ++i, li *= lam)
          for (std::size_t s : sub) row[mul[powers[i]][s]] = li * chi[s];
        next.push_back(std::move(row));
      }
    }
    chars.swap(next);
    for (std::size_t x : grown) in_sub[x] = 1;
    sub.swap(grown);
  }
  return {chars};
}

}  // namespace detail

inline ClassGroup narrow_class_group(i128 D) {
  if (!is_discriminant(D)) throw DomainError("not a positive non-square discriminant");
  if (D > 100000000) throw PreconditionError("discriminant exceeds the supported range");
  const SpfSieve sieve(static_cast<std::uint64_t>(D / 4 + 1));
  ClassGroup G;
  G.D = D;
  const auto minima = class_minima(D, sieve);
  for (std::size_t i = 0; i < minima.size(); ++i) G.classes.push_back({minima[i], i});
  const std::size_t h = G.h();
  std::map<QuadForm, std::uint32_t> index;
  for (const auto& c : G.classes) index.emplace(c.form, static_cast<std::uint32_t>(c.index));
  auto lookup = [&](const QuadForm& f) {
    auto it = index.find(f);
    if (it == index.end()) throw std::logic_error("composition left the class set");
    return it->second;
  };
  G.identity = lookup(canonical_form(principal_form(D)));
  G.product.assign(h, std::vector<std::uint32_t>(h, 0));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = i; j < h; ++j)
      G.product[i][j] = G.product[j][i] = lookup(compose_forms(G.classes[i].form, G.classes[j].form));
  G.inverse.resize(h);
  G.order.resize(h);
  for (std::size_t i = 0; i < h; ++i) {
    const QuadForm& f = G.classes[i].form;
    G.inverse[i] = lookup(canonical_form(QuadForm{f.A, -f.B, f.C}));
    if (G.product[i][G.inverse[i]] != G.identity) throw std::logic_error("inverse class check failed");
    std::uint32_t o = 1;
    for (std::size_t p = i; p != G.identity; p = G.product[p][i]) ++o;
    G.order[i] = o;
  }
  G.characters = detail::build_characters(G.product, G.identity);
  return G;
}

// Oriented primitive geodesic of a form class: the axis of its fundamental automorph.
inline GeodesicClass geodesic_of_class(const FormClass& A, const Discriminant& d) {
  if (A.form.disc() != d.D) throw DomainError("form and discriminant disagree");
  if (A.form.content() != 1) throw DomainError("form is not primitive");
  if (d.epsilon.t > BigInt(std::int64_t{1} << 62)) throw OverflowError("fundamental unit exceeds the 128-bit matrix range");
  const i128 t = static_cast<std::int64_t>(d.epsilon.t), u = static_cast<std::int64_t>(d.epsilon.u);
  return make_class(t, u, canonical_form(A.form), true);
}

// [[(t - Bu)/2, -Cu], [Au, (t + Bu)/2]] in exact arithmetic, with no size limit.
struct ExactAutomorph {
  BigInt a, b, c, d;
  BigInt trace() const { return a + d; }
  BigInt det() const { return a * d - b * c; }
};

inline ExactAutomorph exact_automorph(const QuadForm& f, const PellUnit& e) {
  const BigInt A = detail::to_big(f.A), B = detail::to_big(f.B), C = detail::to_big(f.C);
  const BigInt num_a = e.t - B * e.u, num_d = e.t + B * e.u;
  if (num_a % 2 != 0) throw std::logic_error("automorph is not integral");
  return {num_a / 2, -C * e.u, A * e.u, num_d / 2};
}

struct WaldspurgerReport {
  std::int64_t D = 0;
  std::size_t h = 0;
  std::vector<QuadForm> forms;
  std::vector<cplx> periods;
  std::vector<double> wide_moments;
  double lhs = 0.0;
  double rhs = 0.0;
  double difference = 0.0;
  double threshold = 0.0;
  bool some_character_nonzero = false;
  bool some_period_nonzero = false;
};

// (1/h) sum_chi |sum_A chi(A) P_A|^2 against sum_A |P_A|^2.
inline WaldspurgerReport plancherel_identity(const std::vector<cplx>& P, const CharacterTable& X,
                                             double threshold = 1e-7) {
  const std::size_t h = P.size();
  if (X.size() != h) throw PreconditionError("character table and periods disagree in size");
  WaldspurgerReport r;
  r.h = h;
  r.periods = P;
  r.threshold = threshold;
  for (const auto& chi : X.values) {
    cplx s = 0.0;
    for (std::size_t a = 0; a < h; ++a) s += chi[a] * P[a];
    r.wide_moments.push_back(std::norm(s));
    r.lhs += std::norm(s);
    if (std::abs(s) > threshold) r.some_character_nonzero = true;
  }
  r.lhs /= static_cast<double>(h);
  for (const auto& p : P) {
    r.rhs += std::norm(p);
    if (std::abs(p) > threshold) r.some_period_nonzero = true;
  }
  r.difference = std::abs(r.lhs - r.rhs);
  return r;
}

inline WaldspurgerReport waldspurger_moment(const AutomorphicForm& f, const Discriminant& d, double tol,
                                            unsigned threads = 1) {
  check_tolerance(tol);
  const ClassGroup G = narrow_class_group(d.D);
  std::vector<cplx> P(G.h());
  parallel_for(G.h(), threads, [&](std::size_t i) {
    P[i] = geodesic_period(f, geodesic_of_class(G.classes[i], d), tol).value;
  });
  WaldspurgerReport r = plancherel_identity(P, G.characters, std::max(1e-7, 100.0 * tol));
  r.D = static_cast<std::int64_t>(d.D);
  for (const auto& c : G.classes) r.forms.push_back(c.form);
  return r;
}

struct ClassNumberMoment {
  double X = 0.0;
  int k = 0;
  std::size_t count = 0;
  double sum = 0.0;
  double main_term = 0.0;
  double ratio = 0.0;
};

// sum of h^k over fundamental D with eps_D <= X, against Li(X^2) for k = 1 and int_2^X (t / log t)^k dt otherwise.
inline ClassNumberMoment class_number_moments(double X, int k, unsigned threads = 1) {
  if (k < 0 || k > 2) throw PreconditionError("moment order must be 0, 1 or 2");
  if (X > 1e4) throw PreconditionError("X exceeds the supported range");
  ClassNumberMoment m;
  m.X = X;
  m.k = k;
  if (X < 0.5 * (3.0 + std::sqrt(5.0))) return m;
  for (const auto& d : fundamental_discriminants_by_unit(X, threads)) {
    ++m.count;
    m.sum += std::pow(static_cast<double>(d.h_plus), k);
  }
  if (k == 1) {
    m.main_term = logarithmic_integral(X * X);
  } else {
    auto w = [k](double t) { return std::pow(t / std::log(t), k); };
    m.main_term = adaptive_gauss(w, 2.0, X, 1e-10 * std::pow(X, k + 1)).value;
  }
  m.ratio = m.sum / m.main_term;
  return m;
}

}  // namespace geolab
