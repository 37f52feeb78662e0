#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "enumeration.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace geolab {

enum class Side { X, Y };

struct FiniteMeasure {
  std::vector<double> weights;

  static FiniteMeasure uniform(std::size_t n) {
    if (n == 0) throw PreconditionError("empty measure space");
    return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }

  static FiniteMeasure normalized(std::vector<double> w) {
    double s = 0.0;
    for (double v : w) {
      if (v < 0.0) throw PreconditionError("negative weight");
      s += v;
    }
    if (!(s > 0.0)) throw PreconditionError("zero total mass");
    for (double& v : w) v /= s;
    return {std::move(w)};
  }

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }

  double total() const {
    double s = 0.0;
    for (double v : weights) s += v;
    return s;
  }

  bool is_probability(double tol = 1e-12) const {
    for (double v : weights)
      if (v < 0.0) return false;
    return std::abs(total() - 1.0) <= tol;
  }

  double mass(const std::vector<char>& subset) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (subset[i]) s += weights[i];
    return s;
  }
};

// Bipartite multigraph in compressed adjacency form on both sides.
class BipartiteGraph {
 public:
  struct Incidence {
    std::uint32_t v;
    std::uint32_t mult;
  };

  BipartiteGraph() = default;
  BipartiteGraph(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {}

  void add_edge(std::size_t x, std::size_t y, std::uint32_t mult = 1) {
    if (x >= nx_ || y >= ny_) throw PreconditionError("edge references an unknown vertex");
    if (mult == 0) return;
    raw_.push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), mult});
    built_ = false;
  }

  void build() {
    std::sort(raw_.begin(), raw_.end(), [](const Raw& a, const Raw& b) {
      return std::tie(a.x, a.y) < std::tie(b.x, b.y);
    });
    std::vector<Raw> merged;
    for (const Raw& r : raw_) {
      if (!merged.empty() && merged.back().x == r.x && merged.back().y == r.y)
        merged.back().m += r.m;
      else
        merged.push_back(r);
    }
    raw_.swap(merged);
    fill(Side::X);
    fill(Side::Y);
    built_ = true;
  }

  std::size_t size(Side s) const { return s == Side::X ? nx_ : ny_; }
  std::size_t edge_count() const { return raw_.size(); }

  // Degree counted with multiplicity.
  std::uint64_t degree(Side s, std::size_t v) const {
    check(s, v);
    return (s == Side::X ? degx_ : degy_)[v];
  }

  std::size_t distinct_degree(Side s, std::size_t v) const {
    check(s, v);
    const auto& off = s == Side::X ? offx_ : offy_;
    return off[v + 1] - off[v];
  }

  const Incidence* begin(Side s, std::size_t v) const {
    return (s == Side::X ? adjx_ : adjy_).data() + (s == Side::X ? offx_ : offy_)[v];
  }
  const Incidence* end(Side s, std::size_t v) const {
    return (s == Side::X ? adjx_ : adjy_).data() + (s == Side::X ? offx_ : offy_)[v + 1];
  }

 private:
  struct Raw {
    std::uint32_t x, y, m;
  };

  void check(Side s, std::size_t v) const {
    if (!built_) throw PreconditionError("graph not built");
    if (v >= size(s)) throw PreconditionError("unknown vertex");
  }

  void fill(Side s) {
    const std::size_t n = size(s);
    auto& off = s == Side::X ? offx_ : offy_;
    auto& adj = s == Side::X ? adjx_ : adjy_;
    auto& deg = s == Side::X ? degx_ : degy_;
    off.assign(n + 1, 0);
    deg.assign(n, 0);
    for (const Raw& r : raw_) {
      std::uint32_t v = s == Side::X ? r.x : r.y;
      ++off[v + 1];
      deg[v] += r.m;
    }
    for (std::size_t i = 0; i < n; ++i) off[i + 1] += off[i];
    adj.assign(raw_.size(), {0, 0});
    std::vector<std::size_t> pos(off.begin(), off.end() - 1);
    for (const Raw& r : raw_) {
      std::uint32_t v = s == Side::X ? r.x : r.y, w = s == Side::X ? r.y : r.x;
      adj[pos[v]++] = {w, r.m};
    }
  }

  std::size_t nx_ = 0, ny_ = 0;
  bool built_ = false;
  std::vector<Raw> raw_;
  std::vector<std::size_t> offx_, offy_;
  std::vector<Incidence> adjx_, adjy_;
  std::vector<std::uint64_t> degx_, degy_;
};

inline std::vector<std::uint32_t> neighbors(const BipartiteGraph& G, Side s, std::size_t v) {
  std::vector<std::uint32_t> out;
  if (v >= G.size(s)) throw PreconditionError("unknown vertex");
  for (auto it = G.begin(s, v); it != G.end(s, v); ++it) out.push_back(it->v);
  return out;
}

// Vertices of the opposite side adjacent to some member of B (mask on side s).
inline std::vector<char> e_image(const BipartiteGraph& G, Side s, const std::vector<char>& B) {
  Side o = s == Side::X ? Side::Y : Side::X;
  if (B.size() != G.size(s)) throw PreconditionError("subset size mismatch");
  std::vector<char> out(G.size(o), 0);
  for (std::size_t v = 0; v < B.size(); ++v)
    if (B[v])
      for (auto it = G.begin(s, v); it != G.end(s, v); ++it) out[it->v] = 1;
  return out;
}

// e^{-1}(B) for B on side Y: non-isolated x with every neighbour in B.
inline std::vector<char> e_inverse(const BipartiteGraph& G, const std::vector<char>& B) {
  if (B.size() != G.size(Side::Y)) throw PreconditionError("subset size mismatch");
  std::vector<char> out(G.size(Side::X), 0);
  for (std::size_t x = 0; x < out.size(); ++x) {
    if (G.distinct_degree(Side::X, x) == 0) continue;
    bool all = true;
    for (auto it = G.begin(Side::X, x); it != G.end(Side::X, x) && all; ++it) all = B[it->v] != 0;
    out[x] = all ? 1 : 0;
  }
  return out;
}

inline FiniteMeasure g_transform(const BipartiteGraph& G, const FiniteMeasure& mu, unsigned threads = 1) {
  if (mu.size() != G.size(Side::X)) throw PreconditionError("measure size mismatch");
  for (std::size_t x = 0; x < mu.size(); ++x)
    if (mu[x] > 0.0 && G.degree(Side::X, x) == 0)
      throw PreconditionError("isolated vertex carries positive mass");
  std::vector<double> out(G.size(Side::Y), 0.0);
  parallel_for(
      out.size(), threads,
      [&](std::size_t y) {
        double s = 0.0;
        for (auto it = G.begin(Side::Y, y); it != G.end(Side::Y, y); ++it)
          s += mu[it->v] * static_cast<double>(it->mult) / static_cast<double>(G.degree(Side::X, it->v));
        out[y] = s;
      },
      4096);
  return {std::move(out)};
}

struct Sandwich {
  double lower = 0.0, value = 0.0, upper = 0.0;
  bool holds(double tol = 1e-12) const { return lower <= value + tol && value <= upper + tol; }
};

inline Sandwich sandwich_check(const BipartiteGraph& G, const FiniteMeasure& mu, const std::vector<char>& B,
                               const FiniteMeasure* transformed = nullptr) {
  FiniteMeasure local;
  if (!transformed) {
    local = g_transform(G, mu);
    transformed = &local;
  }
  Sandwich s;
  s.lower = mu.mass(e_inverse(G, B));
  s.value = transformed->mass(B);
  s.upper = mu.mass(e_image(G, Side::Y, B));
  return s;
}

// Graph of G_N, optionally restricted to edges whose signed trace passes the filter.
inline BipartiteGraph graph_from_edges(const EdgeList& E, std::size_t class_count,
                                       const std::function<bool(std::int64_t)>& keep_trace = nullptr) {
  BipartiteGraph G(E.cosets.size(), class_count);
  for (const auto& e : E.edges)
    if (!keep_trace || keep_trace(E.trace(e))) G.add_edge(e.x, e.y);
  G.build();
  return G;
}

}  // namespace geolab
