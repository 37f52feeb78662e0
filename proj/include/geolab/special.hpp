#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "errors.hpp"

namespace geolab {

using cplx = std::complex<double>;

namespace detail {

// B_{2k} for k = 1..12.
inline constexpr std::array<double, 12> kBernoulli2k = {
    1.0 / 6.0,         -1.0 / 30.0,     1.0 / 42.0,        -1.0 / 30.0,
    5.0 / 66.0,        -691.0 / 2730.0, 7.0 / 6.0,         -3617.0 / 510.0,
    43867.0 / 798.0,   -174611.0 / 330.0, 854513.0 / 138.0, -236364091.0 / 2730.0};

}  // namespace detail

// log Gamma on Re z > 0 (principal branch not guaranteed; use exp of it).
inline cplx log_gamma(cplx z) {
  if (!(z.real() > 0.0)) throw DomainError("log_gamma needs Re z > 0");
  cplx shift = 0.0;
  while (z.real() < 12.0) {
    shift += std::log(z);
    z += 1.0;
  }
  cplx inv = 1.0 / z, inv2 = inv * inv, term = inv;
  cplx s = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi);
  for (int k = 1; k <= 9; ++k) {
    s += detail::kBernoulli2k[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * term;
    term *= inv2;
  }
  return s - shift;
}

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

// Riemann zeta by Euler-Maclaurin summation, s != 1.
inline cplx zeta(cplx s) {
  if (s == cplx(1.0, 0.0)) throw DomainError("zeta pole at s = 1");
  if (s.real() < 0.0) throw DomainError("zeta implemented for Re s >= 0");
  const int N = 20 + static_cast<int>(std::abs(s.imag()));
  cplx sum = 0.0;
  for (int n = 1; n < N; ++n) sum += std::exp(-s * std::log(static_cast<double>(n)));
  const double dN = N, lN = std::log(dN);
  cplx Ns = std::exp(-s * lN);
  sum += Ns * dN / (s - 1.0) + 0.5 * Ns;
  cplx rising = s, pw = Ns / dN;
  double fact = 2.0;
  for (int k = 1; k <= 12; ++k) {
    sum += detail::kBernoulli2k[k - 1] / fact * rising * pw;
    rising *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
    pw /= dN * dN;
    fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  return sum;
}

// Completed zeta pi^{-w/2} Gamma(w/2) zeta(w).
inline cplx completed_zeta(cplx w) {
  if (w.real() < 0.5) return completed_zeta(1.0 - w);
  return std::exp(-0.5 * w * std::log(std::numbers::pi) + log_gamma(0.5 * w)) * zeta(w);
}

// Constant c0 in completed_zeta(w) = 1/(w-1) + c0 + O(w-1).
inline double completed_zeta_c0() {
  return 0.5 * (std::numbers::egamma - std::log(4.0 * std::numbers::pi));
}

// Gamma(m, x) for integer m >= 1.
inline double upper_gamma_int(int m, double x) {
  if (m < 1) throw DomainError("upper_gamma_int needs m >= 1");
  double term = 1.0, s = 1.0;
  for (int j = 1; j < m; ++j) {
    term *= x / j;
    s += term;
  }
  return std::tgamma(static_cast<double>(m)) * std::exp(-x) * s;
}

// K_nu(x) for real order.
inline double bessel_k_real(double nu, double x) { return boost::math::cyl_bessel_k(nu, x); }

// Tabulated K_{iR}(x) on [x_min, x_max], with the tail integral
// G(x) = int_x^inf u^{-1/2} K_{iR}(u) du. The ODE in v = log x is integrated
// downward from x_max by Taylor steps; each node keeps its local series.
class KBesselImag {
 public:
  static constexpr int kTerms = 26;

  explicit KBesselImag(double R, double x_min = 1e-5, double step = 0.005) : R_(R), h_(step) {
    if (!(R >= 0.0) || R > 200.0) throw DomainError("K-Bessel order must satisfy 0 <= R <= 200");
    if (!(x_min > 0.0)) throw DomainError("x_min must be positive");
    x_max_ = std::max(110.0, R + 60.0);
    v_max_ = std::log(x_max_);
    v_min_ = std::log(x_min);
    const std::size_t n = static_cast<std::size_t>(std::ceil((v_max_ - v_min_) / h_)) + 1;
    kc_.resize(n);
    gc_.resize(n);
    double K = integral_K(x_max_), Kv = integral_Kv(x_max_), G = integral_G(x_max_);
    for (std::size_t j = 0; j < n; ++j) {
      const double v0 = v_max_ - h_ * static_cast<double>(j);
      series(v0, K, Kv, G, kc_[j], gc_[j]);
      K = Kv = G = 0.0;
      double p = 1.0;
      for (int m = 0; m < kTerms; ++m) {
        K += kc_[j][m] * p;
        if (m + 1 < kTerms) Kv += (m + 1) * kc_[j][m + 1] * p;
        G += gc_[j][m] * p;
        p *= -h_;
      }
    }
    v_min_ = v_max_ - h_ * static_cast<double>(n - 1);
  }

  double order() const { return R_; }
  double x_min() const { return std::exp(v_min_); }
  double x_max() const { return x_max_; }
  double scale() const { return std::exp(0.5 * std::numbers::pi * R_); }

  double operator()(double x) const {
    if (x > x_max_) return integral_K(x);
    return eval(kc_, x);
  }

  double tail(double x) const {
    if (x > x_max_) return integral_G(x);
    return eval(gc_, x);
  }

  // Upper bound |K_{iR}(x)| <= K_0(x) <= sqrt(pi / 2x) e^{-x}.
  static double magnitude_bound(double x) { return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x); }

 private:
  using Coeffs = std::array<double, kTerms>;

  double eval(const std::vector<Coeffs>& c, double x) const {
    if (!(x > 0.0)) throw DomainError("K-Bessel argument must be positive");
    const double v = std::log(x);
    if (v < v_min_ - 1e-12) throw DomainError("K-Bessel argument below table range");
    const std::size_t j = static_cast<std::size_t>(std::llround((v_max_ - v) / h_));
    const double s = v - (v_max_ - h_ * static_cast<double>(j));
    const Coeffs& a = c[std::min(j, c.size() - 1)];
    double r = 0.0;
    for (int m = kTerms - 1; m >= 0; --m) r = r * s + a[m];
    return r;
  }

  void series(double v0, double K, double Kv, double G, Coeffs& c, Coeffs& g) const {
    const double X = std::exp(v0), X2 = X * X, sX = std::exp(0.5 * v0), R2 = R_ * R_;
    std::array<double, kTerms> e{}, half{};
    double f = 1.0;
    for (int m = 0; m < kTerms; ++m) {
      e[m] = X2 * std::pow(2.0, m) / f;
      half[m] = sX / (std::pow(2.0, m) * f);
      f *= m + 1;
    }
    c[0] = K;
    c[1] = Kv;
    for (int n = 0; n + 2 < kTerms; ++n) {
      double s = -R2 * c[n];
      for (int m = 0; m <= n; ++m) s += e[m] * c[n - m];
      c[n + 2] = s / ((n + 2.0) * (n + 1.0));
    }
    g[0] = G;
    for (int n = 0; n + 1 < kTerms; ++n) {
      double p = 0.0;
      for (int m = 0; m <= n; ++m) p += half[m] * c[n - m];
      g[n + 1] = -p / (n + 1.0);
    }
  }

  // Trapezoid sums for the integral representations, accurate for x >= ~R.
  template <class F>
  double trapezoid(double x, F f) const {
    const double du = 0.004;
    double s = 0.5 * f(0.0);
    for (int i = 1;; ++i) {
      const double u = du * i;
      if (x * (std::cosh(u) - 1.0) > 46.0) break;
      s += f(u);
    }
    return s * du;
  }

  double integral_K(double x) const {
    return std::exp(-x) * trapezoid(x, [&](double u) { return std::exp(-x * (std::cosh(u) - 1.0)) * std::cos(R_ * u); });
  }

  double integral_Kv(double x) const {
    return -x * std::exp(-x) *
           trapezoid(x, [&](double u) { return std::cosh(u) * std::exp(-x * (std::cosh(u) - 1.0)) * std::cos(R_ * u); });
  }

  double integral_G(double x) const {
    return std::sqrt(std::numbers::pi) * trapezoid(x, [&](double w) {
             const double c = std::cosh(w);
             return std::cos(R_ * w) / std::sqrt(c) * std::erfc(std::sqrt(x * c));
           });
  }

  double R_, h_;
  double x_max_, v_max_, v_min_;
  std::vector<Coeffs> kc_, gc_;
};

}  // namespace geolab
