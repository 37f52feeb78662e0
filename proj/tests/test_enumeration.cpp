#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "geolab/enumeration.hpp"
#include "test_util.hpp"

using namespace geolab;

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// All matrices of the given signed trace with entries bounded by B (sign-normalized).
std::vector<GroupElement> bounded_with_trace(std::int64_t t, std::int64_t B) {
  std::vector<GroupElement> out;
  for (std::int64_t c = 1; c <= B; ++c)
    for (std::int64_t a = -B; a <= B; ++a) {
      std::int64_t d = t - a;
      if (std::abs(d) > B) continue;
      std::int64_t num = a * d - 1;
      if (num % c) continue;
      std::int64_t b = num / c;
      if (std::abs(b) > B) continue;
      out.push_back(GroupElement::normalize(a, b, c, d));
    }
  return out;
}

// Union-find partition of bounded matrices with |trace| = t under conjugation by S and T.
std::size_t brute_force_class_count(std::int64_t t, std::int64_t B, std::vector<GroupElement>* reps = nullptr) {
  auto mats = bounded_with_trace(t, B);
  auto neg = bounded_with_trace(-t, B);
  mats.insert(mats.end(), neg.begin(), neg.end());
  std::unordered_map<GroupElement, int, GroupElementHash> index;
  for (std::size_t i = 0; i < mats.size(); ++i) index.emplace(mats[i], static_cast<int>(i));
  UnionFind uf(mats.size());
  const GroupElement S = GroupElement::inversion(), T = GroupElement::translation(1);
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (const auto& s : {S, T}) {
      auto it = index.find(s * mats[i] * s.inverse());
      if (it != index.end()) uf.unite(static_cast<int>(i), it->second);
    }
  std::set<int> roots;
  for (std::size_t i = 0; i < mats.size(); ++i)
    if (roots.insert(uf.find(static_cast<int>(i))).second && reps) reps->push_back(mats[i]);
  return roots.size();
}

// Pell oracle: (T, u) is primitive iff it is the smallest solution of t^2 - D u^2 = 4.
bool pell_primitive(std::int64_t T, std::int64_t u) {
  std::int64_t D = (T * T - 4) / (u * u);
  for (std::int64_t t = 3; t < T; ++t) {
    std::int64_t n = t * t - 4;
    if (n % D) continue;
    i128 r;
    if (is_square(n / D, &r)) return false;
  }
  return true;
}

}  // namespace

TEST(Cosets, Counts) {
  EXPECT_EQ(enumerate_cosets(0).size(), 0u);
  EXPECT_EQ(enumerate_cosets(1).size(), 1u);
  EXPECT_EQ(enumerate_cosets(2).size(), 2u);
  EXPECT_EQ(enumerate_cosets(4).size(), 6u);
  for (std::int64_t N : {10, 57, 300}) {
    std::int64_t phi_sum = 0;
    for (std::int64_t c = 1; c <= N; ++c)
      for (std::int64_t a = 1; a <= c; ++a)
        if (std::gcd(a, c) == 1) ++phi_sum;
    EXPECT_EQ(static_cast<std::int64_t>(enumerate_cosets(N).size()), phi_sum);
  }
}

TEST(Cosets, BruteForceDoubleCosetsAtTwo) {
  // Matrices with |entries| <= 10 and 0 < c <= 2, joined under left and right translation.
  std::vector<GroupElement> mats;
  for (std::int64_t c = 1; c <= 2; ++c)
    for (std::int64_t a = -10; a <= 10; ++a)
      for (std::int64_t d = -10; d <= 10; ++d) {
        std::int64_t num = a * d - 1;
        if (num % c || std::abs(num / c) > 10) continue;
        mats.push_back(GroupElement::normalize(a, num / c, c, d));
      }
  std::unordered_map<GroupElement, int, GroupElementHash> index;
  for (std::size_t i = 0; i < mats.size(); ++i) index.emplace(mats[i], static_cast<int>(i));
  UnionFind uf(mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (int s : {1, -1}) {
      auto T = GroupElement::translation(s);
      for (const auto& m : {T * mats[i], mats[i] * T}) {
        auto it = index.find(m);
        if (it != index.end()) uf.unite(static_cast<int>(i), it->second);
      }
    }
  std::set<int> roots;
  for (std::size_t i = 0; i < mats.size(); ++i) roots.insert(uf.find(static_cast<int>(i)));
  EXPECT_EQ(roots.size(), 2u);
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = 0; j < mats.size(); ++j)
      EXPECT_EQ(uf.find(static_cast<int>(i)) == uf.find(static_cast<int>(j)),
                coset_key(mats[i]) == coset_key(mats[j]));
}

TEST(Cosets, KeyExamplesAndInvariance) {
  auto x = coset_key(GroupElement::inversion());
  EXPECT_EQ(x.c, 1);
  EXPECT_EQ(x.a_mod_c, 0);
  auto L = GroupElement::normalize(1, 0, 1, 1), T = GroupElement::translation(1);
  EXPECT_EQ(coset_key(L), coset_key(T * L * T));
  x = coset_key(GroupElement::normalize(2, 1, 1, 1));
  EXPECT_EQ(x.c, 1);
  EXPECT_EQ(x.a_mod_c, 0);
  EXPECT_THROW(coset_key(T), DomainError);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    auto g = rnd::random_word(rng, 10);
    if (g.c() == 0) continue;
    for (int s : {1, -1, 5}) {
      auto Ts = GroupElement::translation(s);
      EXPECT_EQ(coset_key(Ts * g), coset_key(g));
      EXPECT_EQ(coset_key(g * Ts), coset_key(g));
    }
    EXPECT_EQ(coset_key(g).c, static_cast<std::int64_t>(g.c()));
    auto k = coset_key(g);
    EXPECT_EQ(mod_floor(g.trace(), k.c), k.theta_mod_c);
  }
}

TEST(Classes, TraceThreeSingleClass) {
  std::vector<GroupElement> reps;
  EXPECT_EQ(brute_force_class_count(3, 50, &reps), 1u);
  auto key = canonical_class(GroupElement::normalize(2, 1, 1, 1)).key();
  for (const auto& g : bounded_with_trace(3, 50)) EXPECT_EQ(canonical_class(g).key(), key);
  for (const auto& g : bounded_with_trace(-3, 50)) EXPECT_EQ(canonical_class(g).key(), key);
  EXPECT_TRUE(enumerate_classes(2, false).empty());
  EXPECT_EQ(enumerate_classes(3, false).size(), 1u);
}

TEST(Classes, BruteForcePartitionSmallTraces) {
  auto classes = enumerate_classes(12, false);
  for (std::int64_t t = 3; t <= 12; ++t) {
    std::vector<GroupElement> reps;
    std::size_t count = brute_force_class_count(t, 150, &reps);
    std::set<ClassKey> keys;
    for (const auto& g : reps) keys.insert(canonical_class(g).key());
    std::size_t enumerated = static_cast<std::size_t>(std::count_if(
        classes.begin(), classes.end(), [&](const GeodesicClass& y) { return y.trace == t; }));
    EXPECT_EQ(count, enumerated) << "trace " << t;
    EXPECT_EQ(keys.size(), enumerated) << "trace " << t;
  }
}

TEST(Classes, ConjugationInvariance) {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int i = 0; i < 100000; ++i) {
    GroupElement g = i % 2 ? rnd::random_bounded(rng, 1000) : rnd::random_hyperbolic(rng, 12);
    if (!g.is_hyperbolic()) continue;
    auto s = rnd::random_bounded(rng, i % 10 == 0 ? 1000000 : 1000);
    GroupElement h;
    try {
      h = s * g * s.inverse();
    } catch (const OverflowError&) {
      continue;
    }
    auto y = canonical_class(g);
    ASSERT_EQ(canonical_class(h).key(), y.key());
    ASSERT_EQ(canonical_class(y.canonical_rep).key(), y.key());
    ASSERT_EQ(y.trace, g.abs_trace());
    ++checked;
  }
  EXPECT_GT(checked, 90000);
}

TEST(Classes, InverseIsOppositeOrientation) {
  auto g = GroupElement::normalize(2, 1, 1, 1);
  auto y = canonical_class(g), yi = canonical_class(g.inverse());
  EXPECT_EQ(y.trace, yi.trace);
  // Trace-3 class is conjugate to its inverse.
  EXPECT_EQ(y.key(), yi.key());
  auto f = QuadForm{1, 2, -2};  // D = 12
  auto h = automorph(f, 4, 1);
  EXPECT_EQ(canonical_class(h.inverse()).form, canonical_form(-f));
}

TEST(Primitivity, Examples) {
  auto g = GroupElement::normalize(2, 1, 1, 1);
  EXPECT_TRUE(is_primitive(g));
  EXPECT_FALSE(is_primitive(g * g));
  EXPECT_FALSE(is_primitive(g.pow(3)));
  EXPECT_TRUE(is_primitive(GroupElement::normalize(1, 1, 1, 2)));
  EXPECT_THROW(is_primitive(GroupElement::translation(1)), DomainError);
}

TEST(Primitivity, MatchesPellOracle) {
  auto table = enumerate_class_table(300);
  for (const auto& r : table.classes) {
    bool lib = is_primitive(to_class(r).canonical_rep);
    EXPECT_EQ(lib, r.primitive != 0);
    EXPECT_EQ(lib, pell_primitive(r.trace, r.u)) << r.trace << " " << r.u;
  }
}

TEST(Primitivity, BruteForceRootsForSmallTraces) {
  // Every matrix with trace <= 60 and entries <= 8 that is a square or cube of a small matrix.
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    auto d = rnd::random_hyperbolic(rng, 5);
    for (unsigned m : {2u, 3u}) {
      auto g = d.pow(m);
      EXPECT_FALSE(is_primitive(g));
      auto s = rnd::random_word(rng, 6);
      EXPECT_FALSE(is_primitive(s * g * s.inverse()));
    }
  }
}

TEST(Classes, NonPrimitiveAreLinear) {
  for (std::int64_t N : {200, 500, 1000}) {
    auto table = enumerate_class_table(N);
    double nonprim = static_cast<double>(table.size() - table.primitive_count());
    EXPECT_LE(nonprim, 2.0 * static_cast<double>(N)) << N;
  }
}

TEST(Edges, SmallDegreeExample) {
  auto table = enumerate_class_table(5);
  auto edges = enumerate_edges(5, table);
  ASSERT_EQ(edges.cosets.front().c, 1);
  EXPECT_EQ(edges.deg_x[0], 6u);
  auto chk = degree_formula_check(edges.cosets[0], 5, edges.deg_x[0]);
  EXPECT_DOUBLE_EQ(chk.error_term, -5.0);
  EXPECT_TRUE(chk.within_stated_bound);
  for (const auto& e : edges.edges) {
    auto t = edges.trace(e);
    EXPECT_LE(std::abs(t), 5);
    EXPECT_GT(std::abs(t), 2);
    EXPECT_EQ(table.classes[e.y].trace, std::abs(t));
  }
}

TEST(Edges, BruteForceCountAtFifty) {
  const std::int64_t N = 50, B = 2500;
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen;
  for (std::int64_t c = 1; c <= N; ++c)
    for (std::int64_t a = -B; a <= B; ++a)
      for (std::int64_t t = -N; t <= N; ++t) {
        if (std::abs(t) <= 2) continue;
        std::int64_t d = t - a;
        if (std::abs(d) > B) continue;
        std::int64_t num = a * d - 1;
        if (num % c || std::abs(num / c) > B) continue;
        seen.emplace(c, ((a % c) + c) % c, t);
      }
  auto table = enumerate_class_table(N);
  auto edges = enumerate_edges(N, table);
  EXPECT_EQ(edges.edges.size(), seen.size());
  std::uint64_t sum = 0;
  for (auto d : edges.deg_x) sum += d;
  EXPECT_EQ(sum, edges.edges.size());
}

TEST(Edges, EdgesLandInTheRightClass) {
  auto table = enumerate_class_table(60);
  auto edges = enumerate_edges(60, table);
  for (std::size_t i = 0; i < edges.edges.size(); i += 7) {
    const auto& e = edges.edges[i];
    auto g = edges.matrix(e);
    EXPECT_EQ(canonical_class(g).key(), record_key(table.classes[e.y]));
    EXPECT_EQ(coset_key(g), edges.cosets[e.x]);
  }
}

TEST(Edges, DegreeTablesAgreeWithCounting) {
  for (std::int64_t N : {10, 50, 200}) {
    auto table = enumerate_class_table(N);
    auto edges = enumerate_edges(N, table);
    for (std::size_t i = 0; i < edges.cosets.size(); ++i) {
      EXPECT_EQ(static_cast<std::int64_t>(edges.deg_x[i]), multiplicity_degree(edges.cosets[i], N));
      EXPECT_LE(edges.distinct_deg_x[i], edges.deg_x[i]);
    }
  }
}

TEST(Edges, StatedDegreeBoundFailsForSmallModuli) {
  // c = 4 and theta = 2: the k-values with |t| <= 2 are {-2, 2}, more than floor(5/4).
  auto x = make_coset(4, 1);
  auto chk = degree_formula_check(x, 200);
  EXPECT_EQ(chk.deg, 98);
  EXPECT_DOUBLE_EQ(chk.error_term, -2.25);
  EXPECT_FALSE(chk.within_stated_bound);
  EXPECT_TRUE(chk.within_corrected_bound);
  EXPECT_EQ(degree_formula_check(x, 5).deg, 0);
}

TEST(Edges, CorrectedBoundHoldsEverywhere) {
  for (std::int64_t N : {5, 10, 11, 50, 201, 1000}) {
    for (const auto& x : enumerate_cosets(N)) {
      auto chk = degree_formula_check(x, N);
      ASSERT_TRUE(chk.within_corrected_bound) << N << " " << x.c << " " << x.a_mod_c;
    }
  }
}

TEST(Edges, EveryPrimitiveClassHasAnEdgeAt200) {
  auto table = enumerate_class_table(200);
  auto edges = enumerate_edges(200, table);
  for (std::size_t y = 0; y < table.size(); ++y) {
    if (!table.classes[y].primitive) continue;
    // The representative from the reduced cycle minimum has 0 < c <= trace.
    auto g = to_class(table.classes[y]).canonical_rep;
    ASSERT_LE(g.c(), 200);
    EXPECT_GE(edges.deg_y[y], 1u);
  }
}

TEST(Edges, DeterministicAcrossThreadCounts) {
  auto t1 = enumerate_class_table(120, 1), t3 = enumerate_class_table(120, 3);
  ASSERT_EQ(t1.size(), t3.size());
  for (std::size_t i = 0; i < t1.size(); ++i) EXPECT_EQ(record_key(t1.classes[i]), record_key(t3.classes[i]));
  auto e1 = enumerate_edges(120, t1, 1), e3 = enumerate_edges(120, t3, 3);
  ASSERT_EQ(e1.edges.size(), e3.edges.size());
  for (std::size_t i = 0; i < e1.edges.size(); ++i) {
    EXPECT_EQ(e1.edges[i].x, e3.edges[i].x);
    EXPECT_EQ(e1.edges[i].y, e3.edges[i].y);
    EXPECT_EQ(e1.edges[i].k, e3.edges[i].k);
  }
}
