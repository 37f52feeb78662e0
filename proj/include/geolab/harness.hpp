#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "automorphic.hpp"
#include "binary_forms.hpp"
#include "enumeration.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "hyperbolic.hpp"
#include "parallel.hpp"
#include "periods.hpp"
#include "statistics.hpp"

namespace geolab {

// ---------------------------------------------------------------------------
// Strip lengths

// l(C_f ∩ B) for every primitive class of discriminant D, keyed by canonical form.
// Sums the strip length of each translation class of semicircles of forms properly equivalent to f.
inline std::map<QuadForm, double> strip_lengths_for_discriminant(i128 D, double T) {
  StripRegion region(T);
  std::map<QuadForm, double> out;
  const double sd = std::sqrt(static_cast<double>(D));
  const i128 amax = static_cast<i128>(std::floor(sd / (2.0 * region.T)));
  for (i128 A = 1; A <= amax; ++A) {
    const double len = strip_intersection_length(sd / (2.0 * static_cast<double>(A)), region.T);
    if (len == 0.0) continue;
    for (i128 B = D % 2; B < 2 * A; B += 2) {
      const i128 num = B * B - D;
      if (num % (4 * A) != 0) continue;
      const i128 C = num / (4 * A);
      if (gcd128(gcd128(A, B), C) != 1) continue;
      out[canonical_form(QuadForm{A, B, C})] += len;
      out[canonical_form(QuadForm{-A, B, -C})] += len;
    }
  }
  return out;
}

inline double strip_length_of_class(const QuadForm& f, double T) {
  const auto m = strip_lengths_for_discriminant(f.disc(), T);
  auto it = m.find(canonical_form(f));
  return it == m.end() ? 0.0 : it->second;
}

// Per-class strip lengths over a class table; a non-primitive class counts its root m times.
inline std::vector<double> strip_lengths(const ClassTable& table, double T, unsigned threads = 1) {
  std::map<std::int64_t, std::vector<std::size_t>> by_disc;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& r = table.classes[i];
    by_disc[QuadForm{r.A, r.B, r.C}.disc()].push_back(i);
  }
  std::vector<std::pair<std::int64_t, std::vector<std::size_t>>> groups(by_disc.begin(), by_disc.end());
  std::vector<double> out(table.size(), 0.0);
  parallel_for(groups.size(), threads, [&](std::size_t g) {
    const auto lengths = strip_lengths_for_discriminant(groups[g].first, T);
    double root_length = 0.0;
    for (std::size_t i : groups[g].second)
      if (table.classes[i].primitive) root_length = length_from_trace(table.classes[i].trace);
    for (std::size_t i : groups[g].second) {
      const auto& r = table.classes[i];
      auto it = lengths.find(QuadForm{r.A, r.B, r.C});
      const double base = it == lengths.end() ? 0.0 : it->second;
      double m = 1.0;
      if (!r.primitive) {
        if (root_length == 0.0) throw PreconditionError("primitive root missing from the class table");
        m = std::round(length_from_trace(r.trace) / root_length);
      }
      out[i] = m * base;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Distribution reports

struct DistributionReport {
  std::int64_t N = 0;
  std::size_t samples = 0;
  double mean_re = 0.0, mean_im = 0.0;
  double var_re = 0.0, var_im = 0.0;
  double C_hat = 0.0;
  double delta_f = 0.0;
  double scale = 0.0;  // C_hat sqrt(log N) (log log N)^delta_f
  double ks_real = 1.0, ks_imag = 1.0, ks_modulus = 1.0;
  Band ks_band;
  Histogram histogram;
  bool degenerate = false;
};

inline double clt_delta(const AutomorphicForm& f) { return f.kind() == FormKind::Eisenstein ? 1.5 : 0.0; }

inline double clt_normalizer(const AutomorphicForm& f, std::int64_t N) {
  if (N < 3) throw PreconditionError("the CLT normalization needs N >= 3");
  const double l = std::log(static_cast<double>(N));
  return std::sqrt(l) * std::pow(std::log(l), clt_delta(f));
}

// Standardizes values by C_hat (estimated as sd(Re)/normalizer when C_hat <= 0) and fills the report.
inline DistributionReport distribution_report(const AutomorphicForm& f, std::int64_t N, const std::vector<cplx>& values,
                                              const std::vector<double>* weights, double C_hat,
                                              std::uint64_t seed, int bootstrap = 200) {
  DistributionReport r;
  r.N = N;
  r.samples = values.size();
  r.delta_f = clt_delta(f);
  if (values.empty()) throw PreconditionError("empty sample");
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  const Moments mr = moments(re, weights), mi = moments(im, weights);
  r.mean_re = mr.mean;
  r.mean_im = mi.mean;
  r.var_re = mr.variance;
  r.var_im = mi.variance;
  const double norm = clt_normalizer(f, N);
  if (!(C_hat > 0.0)) C_hat = mr.sd() / norm;
  r.C_hat = C_hat;
  r.scale = C_hat * norm;
  if (!(r.scale > 0.0) || !std::isfinite(r.scale)) {
    r.degenerate = true;
    return r;
  }
  std::vector<double> zr(values.size()), zi(values.size()), rad(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    zr[i] = re[i] / r.scale;
    zi[i] = im[i] / r.scale;
    rad[i] = 0.5 * (zr[i] * zr[i] + zi[i] * zi[i]);
  }
  r.ks_real = ks_normal(zr, weights);
  if (mi.variance > 0.0) {
    r.ks_imag = ks_normal(zi, weights);
    r.ks_modulus = ks_distance(rad, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }, weights);
  }
  r.histogram = histogram(zr, 40, -4.0, 4.0, weights);
  if (bootstrap > 0) r.ks_band = bootstrap_ks(zr, weights, bootstrap, seed);
  return r;
}

// Vertical periods over X_N: exhaustive when samples is 0 or covers X_N, otherwise a seeded uniform sample.
inline std::vector<cplx> vertical_period_sample(const AutomorphicForm& f, std::int64_t N, std::size_t samples,
                                                std::uint64_t seed, double tol, unsigned threads = 1) {
  if (N < 1 || N > 5000) throw PreconditionError("vertical CLT needs 1 <= N <= 5000");
  const auto cosets = enumerate_cosets(N);
  if (samples == 0 || samples >= cosets.size()) {
    std::vector<std::vector<cplx>> per_c(static_cast<std::size_t>(N));
    parallel_for(per_c.size(), threads, [&](std::size_t i) {
      per_c[i] = vertical_periods_for_denominator(f, static_cast<std::int64_t>(i) + 1, tol);
    });
    std::vector<cplx> out;
    out.reserve(cosets.size());
    for (auto& v : per_c) out.insert(out.end(), v.begin(), v.end());
    return out;
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(cosets.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(samples);
  std::sort(idx.begin(), idx.end());
  std::vector<cplx> out(samples);
  parallel_for(samples, threads, [&](std::size_t i) { out[i] = vertical_period(f, cosets[idx[i]], tol).value; });
  return out;
}

inline DistributionReport vertical_clt_report(const AutomorphicForm& f, std::int64_t N, std::size_t samples = 0,
                                              std::uint64_t seed = 1, double tol = 1e-9, unsigned threads = 1,
                                              double C_hat = 0.0) {
  return distribution_report(f, N, vertical_period_sample(f, N, samples, seed, tol, threads), nullptr, C_hat, seed);
}

struct ThresholdRow {
  double a = 0.0;
  double lifted = 0.0;   // mu'_N(g <= a)
  double uniform = 0.0;  // counting measure on Y'_N
  double gaussian = 0.0;
  Sandwich sandwich;
};

struct LiftedReport {
  DistributionReport lifted;
  DistributionReport uniform;
  double isolated_mass = 0.0;
  std::size_t window_classes = 0;
  std::vector<ThresholdRow> table;
  std::size_t sandwich_violations = 0;
};

// Periods of mu'_N on the restricted graph N/2 <= |tr| <= N. mu_N is conditioned on the non-isolated cosets.
inline LiftedReport lifted_distribution_report(const AutomorphicForm& f, std::int64_t N, double C_hat, double tol,
                                               unsigned threads = 1, std::uint64_t seed = 1,
                                               const ClassTable* table_in = nullptr, const EdgeList* edges_in = nullptr) {
  if (N < 6 || N > 5000) throw PreconditionError("lifted distribution needs 6 <= N <= 5000");
  ClassTable table_local;
  EdgeList edges_local;
  if (!table_in) {
    table_local = enumerate_class_table(N, threads);
    table_in = &table_local;
  }
  if (!edges_in) {
    edges_local = enumerate_edges(N, *table_in, threads);
    edges_in = &edges_local;
  }
  const ClassTable& table = *table_in;
  const EdgeList& E = *edges_in;
  auto in_window = [N](std::int64_t t) { return 2 * std::abs(t) >= N && std::abs(t) <= N; };
  const BipartiteGraph G = graph_from_edges(E, table.size(), in_window);
  std::vector<double> w(G.size(Side::X), 0.0);
  std::size_t isolated = 0;
  for (std::size_t x = 0; x < w.size(); ++x) {
    if (G.degree(Side::X, x) == 0)
      ++isolated;
    else
      w[x] = 1.0;
  }
  LiftedReport out;
  out.isolated_mass = static_cast<double>(isolated) / static_cast<double>(w.size());
  const FiniteMeasure mu = FiniteMeasure::normalized(w);
  const FiniteMeasure mu_prime = g_transform(G, mu, threads);
  std::vector<std::size_t> window;
  for (std::size_t y = 0; y < table.size(); ++y)
    if (in_window(table.classes[y].trace)) window.push_back(y);
  out.window_classes = window.size();
  std::vector<cplx> P(window.size());
  parallel_for(window.size(), threads, [&](std::size_t i) {
    P[i] = bridge_sign(f.weight()) * geodesic_period(f, to_class(table.classes[window[i]]), tol).value;
  });
  std::vector<double> weight(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) weight[i] = mu_prime[window[i]];
  if (!(C_hat > 0.0)) throw PreconditionError("lifted distribution needs the frozen C_hat");
  out.lifted = distribution_report(f, N, P, &weight, C_hat, seed);
  out.uniform = distribution_report(f, N, P, nullptr, C_hat, seed);
  const double scale = out.lifted.scale;
  double total_w = 0.0;
  for (double v : weight) total_w += v;
  for (double a : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    ThresholdRow row;
    row.a = a;
    row.gaussian = normal_cdf(a);
    std::vector<char> B(table.size(), 0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
      if (P[i].real() / scale <= a) {
        B[window[i]] = 1;
        row.lifted += weight[i];
        ++count;
      }
    }
    row.lifted /= total_w;
    row.uniform = static_cast<double>(count) / static_cast<double>(window.size());
    row.sandwich = sandwich_check(G, mu, B, &mu_prime);
    if (!row.sandwich.holds()) ++out.sandwich_violations;
    out.table.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Small periods

struct NonvanishingReport {
  std::int64_t N = 0;
  std::size_t classes = 0;
  double C_hat = 0.0;
  double zero_threshold = 1e-7;
  std::size_t indistinguishable_from_zero = 0;
  std::vector<double> deltas;
  std::vector<double> thresholds;
  std::vector<std::size_t> below;
  std::vector<std::size_t> above;
  std::vector<std::size_t> below_noise;  // thresholds under the zero threshold: counts reported apart
  std::vector<double> bound_shape;       // N^2 / (log N)^{1 + min(delta, 1/4)}
};

// Census of |P_f(y)| <= C_hat (log N)^{1/2 - delta} over primitive classes with the given periods.
inline NonvanishingReport small_period_census(const std::vector<cplx>& periods, std::int64_t N, double C_hat,
                                              const std::vector<double>& deltas, double zero_threshold = 1e-7) {
  if (N < 3) throw PreconditionError("census needs N >= 3");
  NonvanishingReport r;
  r.N = N;
  r.classes = periods.size();
  r.C_hat = C_hat;
  r.zero_threshold = zero_threshold;
  r.deltas = deltas;
  std::sort(r.deltas.begin(), r.deltas.end());
  const double l = std::log(static_cast<double>(N));
  for (const auto& p : periods)
    if (std::abs(p) <= zero_threshold) ++r.indistinguishable_from_zero;
  for (double d : r.deltas) {
    const double thr = C_hat * std::pow(l, 0.5 - d);
    std::size_t b = 0;
    for (const auto& p : periods)
      if (std::abs(p) <= thr) ++b;
    r.thresholds.push_back(thr);
    if (thr <= zero_threshold) {
      r.below_noise.push_back(b);
      r.below.push_back(0);
      r.above.push_back(periods.size());
    } else {
      r.below_noise.push_back(0);
      r.below.push_back(b);
      r.above.push_back(periods.size() - b);
    }
    r.bound_shape.push_back(static_cast<double>(N) * static_cast<double>(N) / std::pow(l, 1.0 + std::min(d, 0.25)));
  }
  return r;
}

inline std::vector<cplx> primitive_class_periods(const AutomorphicForm& f, const ClassTable& table, double tol,
                                                 unsigned threads = 1) {
  if (tol > 1e-9) throw PreconditionError("census periods need tol <= 1e-9");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table.classes[i].primitive) idx.push_back(i);
  std::vector<cplx> out(idx.size());
  parallel_for(idx.size(), threads,
               [&](std::size_t i) { out[i] = geodesic_period(f, to_class(table.classes[idx[i]]), tol).value; });
  return out;
}

// Log-log slope of the census count against N for each delta.
inline std::vector<double> census_exponents(const std::vector<NonvanishingReport>& ladder) {
  if (ladder.size() < 2) throw PreconditionError("census fit needs two or more N");
  std::vector<double> out;
  for (std::size_t j = 0; j < ladder.front().deltas.size(); ++j) {
    std::vector<double> x, y;
    for (const auto& r : ladder) {
      if (r.below[j] == 0) continue;
      x.push_back(std::log(static_cast<double>(r.N)));
      y.push_back(std::log(static_cast<double>(r.below[j])));
    }
    out.push_back(x.size() >= 2 ? least_squares(x, y).slope : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Degrees, mass, counting

struct DegreeStripRow {
  std::size_t y = 0;
  std::int64_t trace = 0;
  std::uint32_t degree = 0;
  double strip_length = 0.0;
};

struct DegreeStripReport {
  std::int64_t N = 0;
  double T = 1.0;
  std::vector<DegreeStripRow> rows;
  std::size_t excluded = 0;
  double min_ratio = 0.0;
  std::size_t argmin = 0;
};

inline DegreeStripReport degree_vs_strip_report(const ClassTable& table, const EdgeList& E, double T,
                                                unsigned threads = 1) {
  DegreeStripReport r;
  r.N = E.N;
  r.T = T;
  const auto strip = strip_lengths(table, T, threads);
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < table.size(); ++y) {
    if (!table.classes[y].primitive) continue;
    DegreeStripRow row{y, table.classes[y].trace, E.deg_y[y], strip[y]};
    r.rows.push_back(row);
    if (row.strip_length <= 0.0) {
      ++r.excluded;
      continue;
    }
    const double ratio = static_cast<double>(row.degree) / row.strip_length;
    if (ratio < r.min_ratio) {
      r.min_ratio = ratio;
      r.argmin = r.rows.size() - 1;
    }
  }
  return r;
}

inline DegreeStripReport degree_vs_strip_report(std::int64_t N, double T, unsigned threads = 1) {
  const ClassTable table = enumerate_class_table(N, threads);
  const EdgeList E = enumerate_edges(N, table, threads);
  return degree_vs_strip_report(table, E, T, threads);
}

struct MassReport {
  std::size_t classes = 0;
  double strip_mass = 0.0;
  double total_length = 0.0;
  double ratio = 0.0;
  double target = 0.0;  // vol(B) / vol(X) = (1 / 2T) / (pi / 3)
  double relative_deviation() const { return std::abs(ratio / target - 1.0); }
};

inline MassReport equidistribution_mass_report(const ClassTable& table, const std::vector<double>& strip,
                                               const std::vector<std::size_t>& subset, double T) {
  if (subset.empty()) throw PreconditionError("empty class subset");
  MassReport r;
  r.classes = subset.size();
  for (std::size_t i : subset) {
    r.strip_mass += strip[i];
    r.total_length += length_from_trace(table.classes[i].trace);
  }
  r.ratio = r.strip_mass / r.total_length;
  r.target = (0.5 / T) / (std::numbers::pi / 3.0);
  return r;
}

// Random primitive classes until their total length reaches the given fraction of the whole.
inline std::vector<std::size_t> random_length_subset(const ClassTable& table, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx;
  double total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table.classes[i].primitive) {
      idx.push_back(i);
      total += length_from_trace(table.classes[i].trace);
    }
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::size_t> out;
  double acc = 0.0;
  for (std::size_t i : idx) {
    if (acc >= fraction * total) break;
    out.push_back(i);
    acc += length_from_trace(table.classes[i].trace);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::size_t> primitive_indices(const ClassTable& table) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table.classes[i].primitive) out.push_back(i);
  return out;
}

struct CountingReport {
  std::int64_t N = 0;
  std::uint64_t cosets = 0;
  std::uint64_t phi_sum = 0;
  double coset_density = 0.0;  // |X_N| / N^2, against 3 / pi^2
  std::uint64_t primitive_classes = 0;
  std::uint64_t classes = 0;
  double li = 0.0;             // Li(N^2)
};

inline std::uint64_t totient_sum(std::int64_t N) {
  std::vector<std::int64_t> phi(static_cast<std::size_t>(N) + 1);
  std::iota(phi.begin(), phi.end(), 0);
  std::uint64_t s = 0;
  for (std::int64_t p = 2; p <= N; ++p)
    if (phi[p] == p)
      for (std::int64_t m = p; m <= N; m += p) phi[m] -= phi[m] / p;
  for (std::int64_t c = 1; c <= N; ++c) s += static_cast<std::uint64_t>(phi[c]);
  return s;
}

inline CountingReport counting_report(std::int64_t N, bool with_classes, unsigned threads = 1) {
  if (N < 3) throw PreconditionError("counting needs N >= 3");
  CountingReport r;
  r.N = N;
  r.cosets = enumerate_cosets(N).size();
  r.phi_sum = totient_sum(N);
  r.coset_density = static_cast<double>(r.cosets) / (static_cast<double>(N) * static_cast<double>(N));
  r.li = logarithmic_integral(static_cast<double>(N) * static_cast<double>(N));
  if (with_classes) {
    const ClassTable t = enumerate_class_table(N, threads);
    r.classes = t.size();
    r.primitive_classes = t.primitive_count();
  }
  return r;
}

}  // namespace geolab
