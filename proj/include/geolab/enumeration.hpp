#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <vector>

#include "binary_forms.hpp"
#include "errors.hpp"
#include "hyperbolic.hpp"
#include "int128.hpp"
#include "parallel.hpp"

namespace geolab {

struct DoubleCoset {
  std::int64_t c = 1;
  std::int64_t a_mod_c = 0;
  std::int64_t theta_mod_c = 0;

  bool operator==(const DoubleCoset& o) const { return c == o.c && a_mod_c == o.a_mod_c; }
  bool operator<(const DoubleCoset& o) const {
    return std::tie(c, a_mod_c) < std::tie(o.c, o.a_mod_c);
  }
};

inline DoubleCoset make_coset(std::int64_t c, std::int64_t a) {
  if (c <= 0) throw DomainError("coset requires c > 0");
  DoubleCoset x;
  x.c = c;
  x.a_mod_c = static_cast<std::int64_t>(mod_floor(a, c));
  if (gcd128(x.a_mod_c, c) != 1) throw DomainError("a is not coprime to c");
  x.theta_mod_c = static_cast<std::int64_t>(mod_floor(x.a_mod_c + mod_inverse(x.a_mod_c, c), c));
  return x;
}

inline DoubleCoset coset_key(const GroupElement& g) {
  if (g.c() == 0) throw DomainError("element of the cusp stabilizer has no double coset key");
  if (g.c() > INT64_MAX) throw OverflowError("c exceeds 64 bits");
  return make_coset(static_cast<std::int64_t>(g.c()), static_cast<std::int64_t>(mod_floor(g.a(), g.c())));
}

inline std::vector<DoubleCoset> enumerate_cosets(std::int64_t N) {
  std::vector<DoubleCoset> out;
  for (std::int64_t c = 1; c <= N; ++c)
    for (std::int64_t a = 0; a < c; ++a)
      if (std::gcd(a, c) == 1) out.push_back(make_coset(c, a));
  return out;
}

// The matrix [[a, (a(t-a)-1)/c], [c, t-a]] with t = theta + k c.
inline GroupElement edge_matrix(const DoubleCoset& x, std::int64_t k) {
  const i128 c = x.c, a = x.a_mod_c;
  const i128 t = checked_add(x.theta_mod_c, checked_mul(k, c));
  const i128 num = checked_sub(checked_mul(a, t - a), 1);
  if (num % c != 0) throw DomainError("trace residue inconsistent with coset");
  return GroupElement::normalize(a, num / c, c, t - a);
}

inline std::int64_t edge_trace(const DoubleCoset& x, std::int64_t k) { return x.theta_mod_c + k * x.c; }

struct ClassKey {
  i128 trace = 0;
  i128 u = 0;
  QuadForm form;

  bool operator==(const ClassKey& o) const { return trace == o.trace && u == o.u && form == o.form; }
  bool operator!=(const ClassKey& o) const { return !(*this == o); }
  bool operator<(const ClassKey& o) const {
    return std::tie(trace, u, form.A, form.B, form.C) < std::tie(o.trace, o.u, o.form.A, o.form.B, o.form.C);
  }
};

struct GeodesicClass {
  GroupElement canonical_rep;
  i128 trace = 0;
  i128 discriminant = 0;
  i128 u = 0;
  QuadForm form;
  double length = 0.0;
  bool is_primitive = true;
  GeodesicAxis axis;

  ClassKey key() const { return {trace, u, form}; }
};

// Positive-trace fixed-point form u*(A,B,C) of g, returned primitive.
inline QuadForm associated_form(const GroupElement& g, i128& trace, i128& content) {
  i128 a = g.a(), b = g.b(), c = g.c(), d = g.d();
  if (a + d < 0) {
    a = -a;
    b = -b;
    c = -c;
    d = -d;
  }
  trace = a + d;
  QuadForm q{c, d - a, -b};
  content = q.content();
  return {q.A / content, q.B / content, q.C / content};
}

inline GroupElement automorph(const QuadForm& f, i128 t, i128 u) {
  i128 bu = checked_mul(f.B, u);
  if ((t - bu) % 2 != 0) throw DomainError("automorph is not integral");
  return GroupElement::normalize((t - bu) / 2, -checked_mul(f.C, u), checked_mul(f.A, u), (t + bu) / 2);
}

namespace detail {

// V_m(t) = trace of delta^m for trace(delta) = t, saturating above cap.
inline i128 power_trace(i128 t, int m, i128 cap) {
  i128 v0 = 2, v1 = t;
  for (int i = 1; i < m; ++i) {
    i128 v2;
    if (__builtin_mul_overflow(t, v1, &v2)) return cap + 1;
    v2 -= v0;
    if (v2 > cap) return cap + 1;
    v0 = v1;
    v1 = v2;
  }
  return v1;
}

}  // namespace detail

// Exact root extraction: g = delta^m forces g = U_{m-1} delta - U_{m-2} I for trace(delta) = t_m.
inline bool is_primitive(const GroupElement& g) {
  if (!g.is_hyperbolic()) throw DomainError("primitivity requires a hyperbolic element");
  i128 a = g.a(), b = g.b(), c = g.c(), d = g.d();
  if (a + d < 0) {
    a = -a;
    b = -b;
    c = -c;
    d = -d;
  }
  const i128 T = a + d;
  for (int m = 2; m < 200; ++m) {
    if (detail::power_trace(3, m, T) > T) break;
    i128 lo = 3, hi = T;
    while (lo < hi) {
      i128 mid = lo + (hi - lo) / 2;
      if (detail::power_trace(mid, m, T) >= T)
        hi = mid;
      else
        lo = mid + 1;
    }
    if (detail::power_trace(lo, m, T) != T) continue;
    i128 u_prev = 0, u_cur = 1;  // U_{-1}, U_0
    for (int i = 0; i < m - 1; ++i) {
      i128 nxt = checked_sub(checked_mul(lo, u_cur), u_prev);
      u_prev = u_cur;
      u_cur = nxt;
    }
    // u_cur = U_{m-1}, u_prev = U_{m-2}
    i128 da = a + u_prev, dd = d + u_prev;
    if (da % u_cur || dd % u_cur || b % u_cur || c % u_cur) continue;
    i128 ra = da / u_cur, rb = b / u_cur, rc = c / u_cur, rd = dd / u_cur;
    if (checked_sub(checked_mul(ra, rd), checked_mul(rb, rc)) == 1) return false;
  }
  return true;
}

inline GeodesicClass make_class(i128 trace, i128 u, const QuadForm& canonical, bool primitive) {
  GeodesicClass y;
  y.trace = trace;
  y.u = u;
  y.form = canonical;
  y.discriminant = checked_sub(checked_mul(trace, trace), 4);
  y.canonical_rep = automorph(canonical, trace, u);
  y.length = length_from_trace(trace);
  y.is_primitive = primitive;
  y.axis = axis(y.canonical_rep);
  return y;
}

inline GeodesicClass canonical_class(const GroupElement& g) {
  if (!g.is_hyperbolic()) throw DomainError("canonical_class requires a hyperbolic element");
  i128 T, u;
  QuadForm q = associated_form(g, T, u);
  return make_class(T, u, canonical_form(q), is_primitive(g));
}

struct ClassRecord {
  std::int64_t trace;
  std::int64_t u;
  std::int64_t A, B, C;
  std::int32_t cycle_length;
  std::int32_t primitive;
};

inline GeodesicClass to_class(const ClassRecord& r) {
  return make_class(r.trace, r.u, QuadForm{r.A, r.B, r.C}, r.primitive != 0);
}

inline ClassKey record_key(const ClassRecord& r) { return {r.trace, r.u, QuadForm{r.A, r.B, r.C}}; }

// Y_N with a reduced-form index for O(log) class lookup.
class ClassTable {
 public:
  std::int64_t N = 0;
  std::vector<ClassRecord> classes;

  ClassTable() = default;
  ClassTable(std::int64_t n, std::vector<ClassRecord> recs) : N(n), classes(std::move(recs)) { build_index(); }

  std::size_t size() const { return classes.size(); }

  std::size_t primitive_count() const {
    return static_cast<std::size_t>(std::count_if(classes.begin(), classes.end(),
                                                  [](const ClassRecord& r) { return r.primitive != 0; }));
  }

  // Class id of a reduced primitive form (trace T, content u); -1 when absent.
  std::int64_t find(std::int64_t T, std::int64_t u, const QuadForm& reduced) const {
    if (T < 3 || T > N) return -1;
    for (std::uint32_t g = trace_begin_[T]; g < trace_begin_[T + 1]; ++g) {
      if (groups_[g].u != u) continue;
      IndexEntry key{static_cast<std::int32_t>(reduced.A), static_cast<std::int32_t>(reduced.B), 0};
      auto first = entries_.begin() + groups_[g].begin, last = entries_.begin() + groups_[g].end;
      auto it = std::lower_bound(first, last, key, entry_less);
      if (it != last && it->A == key.A && it->B == key.B) return it->id;
      return -1;
    }
    return -1;
  }

  std::int64_t find(const GroupElement& g) const {
    i128 T, u;
    QuadForm q = associated_form(g, T, u);
    if (T > N) return -1;
    return find(static_cast<std::int64_t>(T), static_cast<std::int64_t>(u), reduce_form(q));
  }

  void build_index() {
    entries_.clear();
    groups_.clear();
    trace_begin_.assign(static_cast<std::size_t>(std::max<std::int64_t>(N, 2)) + 2, 0);
    std::size_t i = 0;
    for (std::int64_t T = 0; T <= N + 0; ++T) {
      trace_begin_[static_cast<std::size_t>(T)] = static_cast<std::uint32_t>(groups_.size());
      while (i < classes.size() && classes[i].trace == T) {
        const std::int64_t u = classes[i].u;
        Group grp{u, static_cast<std::uint32_t>(entries_.size()), 0};
        while (i < classes.size() && classes[i].trace == T && classes[i].u == u) {
          const ClassRecord& r = classes[i];
          for (const QuadForm& f : reduction_cycle(QuadForm{r.A, r.B, r.C}))
            entries_.push_back({static_cast<std::int32_t>(f.A), static_cast<std::int32_t>(f.B),
                                static_cast<std::uint32_t>(i)});
          ++i;
        }
        grp.end = static_cast<std::uint32_t>(entries_.size());
        std::sort(entries_.begin() + grp.begin, entries_.begin() + grp.end, entry_less);
        groups_.push_back(grp);
      }
    }
    trace_begin_[static_cast<std::size_t>(N) + 1] = static_cast<std::uint32_t>(groups_.size());
    if (i != classes.size()) throw PreconditionError("class records are not sorted by trace");
  }

 private:
  struct IndexEntry {
    std::int32_t A, B;
    std::uint32_t id;
  };
  struct Group {
    std::int64_t u;
    std::uint32_t begin, end;
  };
  static bool entry_less(const IndexEntry& x, const IndexEntry& y) {
    return std::tie(x.A, x.B) < std::tie(y.A, y.B);
  }
  std::vector<IndexEntry> entries_;
  std::vector<Group> groups_;
  std::vector<std::uint32_t> trace_begin_;
};

// All classes of positive trace T, sorted by (u, canonical form).
inline std::vector<ClassRecord> classes_with_trace(std::int64_t T, const SpfSieve& sieve) {
  std::vector<ClassRecord> out;
  const std::int64_t n = T * T - 4;
  for (std::int64_t u = 1; u * u <= n; ++u) {
    if (n % (u * u) != 0) continue;
    const std::int64_t D = n / (u * u);
    if (D % 4 != 0 && D % 4 != 1) continue;
    auto minima = class_minima(D, sieve);
    if (minima.empty()) continue;
    const bool prim = is_primitive(automorph(minima.front(), T, u));
    for (const QuadForm& f : minima) {
      ClassRecord r{};
      r.trace = T;
      r.u = u;
      r.A = static_cast<std::int64_t>(f.A);
      r.B = static_cast<std::int64_t>(f.B);
      r.C = static_cast<std::int64_t>(f.C);
      r.cycle_length = static_cast<std::int32_t>(reduction_cycle(f).size());
      r.primitive = prim ? 1 : 0;
      out.push_back(r);
    }
  }
  return out;
}

inline ClassTable enumerate_class_table(std::int64_t N, unsigned threads = 1) {
  if (N > 100000) throw PreconditionError("N exceeds the supported range");
  std::vector<ClassRecord> all;
  if (N >= 3) {
    SpfSieve sieve(static_cast<std::uint64_t>((N * N) / 4 + 1));
    std::vector<std::vector<ClassRecord>> per_trace(static_cast<std::size_t>(N - 2));
    parallel_for(per_trace.size(), threads,
                 [&](std::size_t i) { per_trace[i] = classes_with_trace(static_cast<std::int64_t>(i) + 3, sieve); });
    for (auto& v : per_trace) all.insert(all.end(), v.begin(), v.end());
  }
  return ClassTable(N, std::move(all));
}

inline std::vector<GeodesicClass> enumerate_classes(std::int64_t N, bool primitive_only, unsigned threads = 1) {
  ClassTable table = enumerate_class_table(N, threads);
  std::vector<GeodesicClass> out;
  for (const auto& r : table.classes)
    if (!primitive_only || r.primitive) out.push_back(to_class(r));
  return out;
}

struct EdgeRecord {
  std::uint32_t x;
  std::uint32_t y;
  std::int32_t k;
};

struct EdgeList {
  std::int64_t N = 0;
  std::vector<DoubleCoset> cosets;
  std::vector<EdgeRecord> edges;
  std::vector<std::uint32_t> deg_x, deg_y;
  std::vector<std::uint32_t> distinct_deg_x, distinct_deg_y;

  std::int64_t trace(const EdgeRecord& e) const { return edge_trace(cosets[e.x], e.k); }
  GroupElement matrix(const EdgeRecord& e) const { return edge_matrix(cosets[e.x], e.k); }

  void build_degrees(std::size_t class_count) {
    deg_x.assign(cosets.size(), 0);
    deg_y.assign(class_count, 0);
    distinct_deg_x.assign(cosets.size(), 0);
    distinct_deg_y.assign(class_count, 0);
    for (const auto& e : edges) {
      ++deg_x[e.x];
      ++deg_y[e.y];
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(edges.size());
    for (const auto& e : edges) pairs.emplace_back(e.x, e.y);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& p : pairs) {
      ++distinct_deg_x[p.first];
      ++distinct_deg_y[p.second];
    }
  }
};

inline std::vector<std::int64_t> coset_offsets(const std::vector<DoubleCoset>& cosets, std::int64_t N) {
  std::vector<std::int64_t> first(static_cast<std::size_t>(N) + 2, static_cast<std::int64_t>(cosets.size()));
  for (std::size_t i = cosets.size(); i-- > 0;) first[static_cast<std::size_t>(cosets[i].c)] = static_cast<std::int64_t>(i);
  return first;
}

inline EdgeList enumerate_edges(std::int64_t N, const ClassTable& table, unsigned threads = 1) {
  if (table.N < N) throw PreconditionError("class table does not cover N");
  EdgeList out;
  out.N = N;
  out.cosets = enumerate_cosets(N);
  const auto first = coset_offsets(out.cosets, N);
  std::vector<std::vector<EdgeRecord>> per_c(static_cast<std::size_t>(std::max<std::int64_t>(N, 0)));
  parallel_for(per_c.size(), threads, [&](std::size_t ci) {
    const std::int64_t c = static_cast<std::int64_t>(ci) + 1;
    auto& bucket = per_c[ci];
    for (std::int64_t xi = first[static_cast<std::size_t>(c)]; xi < first[static_cast<std::size_t>(c) + 1]; ++xi) {
      const DoubleCoset& x = out.cosets[static_cast<std::size_t>(xi)];
      const std::int64_t th = x.theta_mod_c;
      std::int64_t kmin = -((N + th) / c);
      for (std::int64_t k = kmin;; ++k) {
        const std::int64_t t = th + k * c;
        if (t > N) break;
        if (t < -N || (t >= -2 && t <= 2)) continue;
        std::int64_t id = table.find(edge_matrix(x, k));
        if (id < 0) throw NumericalError("edge class missing from class table");
        bucket.push_back({static_cast<std::uint32_t>(xi), static_cast<std::uint32_t>(id), static_cast<std::int32_t>(k)});
      }
    }
  });
  for (auto& b : per_c) out.edges.insert(out.edges.end(), b.begin(), b.end());
  out.build_degrees(table.size());
  return out;
}

struct DegreeCheck {
  std::int64_t deg = 0;
  double error_term = 0.0;
  std::int64_t stated_bound = 0;      // 1 + floor(5/c)
  std::int64_t corrected_bound = 0;  // 1 + ceil(5/c)
  bool within_stated_bound = true;
  bool within_corrected_bound = true;
};

inline std::int64_t multiplicity_degree(const DoubleCoset& x, std::int64_t N) {
  std::int64_t count = 0;
  for (std::int64_t t = x.theta_mod_c - ((N + x.theta_mod_c) / x.c) * x.c; t <= N; t += x.c)
    if (t >= -N && (t > 2 || t < -2)) ++count;
  return count;
}

inline DegreeCheck degree_formula_check(const DoubleCoset& x, std::int64_t N, std::int64_t deg) {
  DegreeCheck r;
  r.deg = deg;
  r.error_term = static_cast<double>(deg) - static_cast<double>(2 * N + 1) / static_cast<double>(x.c);
  r.stated_bound = 1 + 5 / x.c;
  r.corrected_bound = 1 + (5 + x.c - 1) / x.c;
  // |E| compared exactly through c*E = c*deg - (2N+1).
  const std::int64_t scaled = std::abs(x.c * deg - (2 * N + 1));
  r.within_stated_bound = scaled <= r.stated_bound * x.c;
  r.within_corrected_bound = scaled < r.corrected_bound * x.c;
  return r;
}

inline DegreeCheck degree_formula_check(const DoubleCoset& x, std::int64_t N) {
  return degree_formula_check(x, N, multiplicity_degree(x, N));
}

}  // namespace geolab
