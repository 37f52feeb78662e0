#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "errors.hpp"

namespace geolab {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double logarithmic_integral(double x) {
  if (!(x > 1.0)) throw DomainError("Li(x) needs x > 1");
  return boost::math::expint(std::log(x));
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double sd() const { return std::sqrt(variance); }
};

inline Moments moments(const std::vector<double>& v, const std::vector<double>* w = nullptr) {
  if (v.empty()) throw PreconditionError("empty sample");
  double sw = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double wi = w ? (*w)[i] : 1.0;
    sw += wi;
    s1 += wi * v[i];
  }
  Moments m;
  m.mean = s1 / sw;
  double s2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double wi = w ? (*w)[i] : 1.0, d = v[i] - m.mean;
    s2 += wi * d * d;
  }
  m.variance = s2 / sw;
  return m;
}

// sup |F_n - F| for a continuous reference CDF; w gives a weighted empirical law.
template <class Cdf>
double ks_distance(const std::vector<double>& v, Cdf cdf, const std::vector<double>* w = nullptr) {
  if (v.empty()) throw PreconditionError("empty sample");
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += w ? (*w)[i] : 1.0;
  double below = 0.0, d = 0.0;
  for (std::size_t k = 0; k < idx.size();) {
    // Ties are advanced together.
    std::size_t j = k;
    double here = 0.0;
    while (j < idx.size() && v[idx[j]] == v[idx[k]]) {
      here += w ? (*w)[idx[j]] : 1.0;
      ++j;
    }
    double F = cdf(v[idx[k]]);
    d = std::max(d, std::abs(F - below / total));
    below += here;
    d = std::max(d, std::abs(below / total - F));
    k = j;
  }
  return std::min(1.0, d);
}

inline double ks_normal(const std::vector<double>& v, const std::vector<double>* w = nullptr) {
  return ks_distance(v, normal_cdf, w);
}

struct Histogram {
  double lo = 0.0, hi = 0.0;
  std::vector<double> mass;
};

inline Histogram histogram(const std::vector<double>& v, std::size_t bins, double lo, double hi,
                           const std::vector<double>* w = nullptr) {
  Histogram h{lo, hi, std::vector<double>(bins, 0.0)};
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double wi = w ? (*w)[i] : 1.0;
    double t = (v[i] - lo) / (hi - lo) * static_cast<double>(bins);
    std::size_t b = t <= 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(t));
    h.mass[b] += wi;
    total += wi;
  }
  if (total > 0.0)
    for (double& m : h.mass) m /= total;
  return h;
}

struct Band {
  double lo = 0.0, hi = 0.0;
};

// Percentile bootstrap band of the KS statistic. Values are sorted once; each replicate only redraws counts.
inline Band bootstrap_ks(const std::vector<double>& v, const std::vector<double>* w, int reps, std::uint64_t seed,
                         double level = 0.9) {
  if (v.empty() || reps < 1) throw PreconditionError("bootstrap needs a sample and one or more replicates");
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> sorted(v.size()), F(v.size()), pw;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sorted[i] = v[idx[i]];
    F[i] = normal_cdf(sorted[i]);
  }
  if (w)
    for (std::size_t i : idx) pw.push_back((*w)[i]);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick_w;
  if (w) pick_w = std::discrete_distribution<std::size_t>(pw.begin(), pw.end());
  std::uniform_int_distribution<std::size_t> pick_u(0, v.size() - 1);
  std::vector<std::uint32_t> count(v.size());
  std::vector<double> stats;
  const double n = static_cast<double>(v.size());
  for (int r = 0; r < reps; ++r) {
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < v.size(); ++i) ++count[w ? pick_w(rng) : pick_u(rng)];
    double below = 0.0, d = 0.0;
    for (std::size_t k = 0; k < sorted.size();) {
      std::size_t j = k;
      double here = 0.0;
      while (j < sorted.size() && sorted[j] == sorted[k]) here += count[j++];
      if (here > 0.0) {
        d = std::max(d, std::abs(F[k] - below / n));
        below += here;
        d = std::max(d, std::abs(below / n - F[k]));
      }
      k = j;
    }
    stats.push_back(std::min(1.0, d));
  }
  std::sort(stats.begin(), stats.end());
  auto q = [&](double p) {
    std::size_t k = static_cast<std::size_t>(p * static_cast<double>(stats.size() - 1) + 0.5);
    return stats[std::min(k, stats.size() - 1)];
  };
  return {q((1.0 - level) / 2.0), q((1.0 + level) / 2.0)};
}

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("regression needs two or more points");
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 0.0;
  return f;
}

}  // namespace geolab
