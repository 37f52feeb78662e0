#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "automorphic.hpp"
#include "enumeration.hpp"
#include "errors.hpp"
#include "hyperbolic.hpp"
#include "quadrature.hpp"
#include "statistics.hpp"

namespace geolab {

struct PeriodValue {
  cplx value = 0.0;
  double error = 0.0;
  std::string method;
};

enum class QuadratureScheme { Gauss, Simpson };

// Integral of the lift along the closed orbit of the axis, t in [t0, t0 + length].
inline PeriodValue geodesic_period(const AutomorphicForm& f, const GeodesicAxis& ax, double length, double tol,
                                   QuadratureScheme scheme = QuadratureScheme::Gauss, double t0 = 0.0) {
  check_tolerance(tol);
  if (!(length > 0.0)) throw DomainError("geodesic length must be positive");
  PeriodValue out;
  if (f.kind() == FormKind::Zero) {
    out.method = "zero";
    return out;
  }
  if (f.kind() == FormKind::Constant) {
    out.value = f.constant_value() * length;
    out.method = "constant";
    return out;
  }
  const RealMatrix g0 = base_frame(ax);
  const double pt_tol = std::max(1e-14, tol / (10.0 * length));
  auto F = [&](double t) { return eval_lift(f, g0 * flow(t), pt_tol); };
  if (scheme == QuadratureScheme::Gauss) {
    auto r = adaptive_gauss(F, t0, t0 + length, 0.5 * tol);
    out.value = r.value;
    out.error = r.error + pt_tol * length;
    out.method = "gauss-legendre-32";
  } else {
    auto r = adaptive_simpson(F, t0, t0 + length, 0.5 * tol);
    out.value = r.value;
    out.error = r.error + pt_tol * length;
    out.method = "adaptive-simpson";
  }
  return out;
}

inline PeriodValue geodesic_period(const AutomorphicForm& f, const GeodesicClass& y, double tol,
                                   QuadratureScheme scheme = QuadratureScheme::Gauss, double t0 = 0.0) {
  return geodesic_period(f, y.axis, y.length, tol, scheme, t0);
}

inline PeriodValue geodesic_period(const AutomorphicForm& f, const GroupElement& g, double tol,
                                   QuadratureScheme scheme = QuadratureScheme::Gauss, double t0 = 0.0) {
  return geodesic_period(f, axis(g), geodesic_length(g), tol, scheme, t0);
}

// Antiderivative Phi of f_infinity(y)/y with Phi(0) = 0 (continued from Re < 0 at infinity).
inline cplx constant_term_antiderivative(const AutomorphicForm& f, double y) {
  if (f.kind() != FormKind::Eisenstein || f.test_mode()) return 0.0;
  const double t = f.spectral_parameter();
  if (t == 0.0) {
    const double r = std::sqrt(y);
    return 2.0 * r * std::log(y) - 4.0 * r + 4.0 * completed_zeta_c0() * r;
  }
  const cplx al(0.5, -t), be(0.5, t);
  const double ly = std::log(y);
  return f.A() * std::exp(al * ly) / al + f.B() * std::exp(be * ly) / be;
}

// int_{Y0}^inf (f(x + iy) - f_infinity(y)) dy / y, termwise.
inline cplx vertical_upper(const AutomorphicForm& f, double x, double Y0, double tol) {
  const std::size_t N = f.vertical_truncation(Y0, tol);
  cplx s = 0.0;
  for (std::size_t n = 1; n <= N; ++n) s += f.a(n) * f.vertical_radial(n, Y0) * f.mode(n, x);
  return s;
}

// Vertical period over the cusp a/c, split at height Y0 (default 1/c).
inline PeriodValue vertical_period(const AutomorphicForm& f, std::int64_t a, std::int64_t c, double tol,
                                   double Y0 = 0.0) {
  check_tolerance(tol);
  if (c <= 0) throw DomainError("vertical period needs c > 0");
  if (std::gcd(a, c) != 1) throw DomainError("vertical period needs gcd(a, c) = 1");
  PeriodValue out;
  out.method = "split-fourier";
  if (f.kind() == FormKind::Zero) return out;
  if (f.kind() == FormKind::Constant) throw PreconditionError("vertical period of a constant diverges");
  if (Y0 == 0.0) Y0 = 1.0 / static_cast<double>(c);
  const std::int64_t am = static_cast<std::int64_t>(mod_floor(a, c));
  const std::int64_t d = c == 1 ? 0 : static_cast<std::int64_t>(mod_inverse(am, c));
  const double x_up = static_cast<double>(am) / static_cast<double>(c);
  const double x_low = static_cast<double>(mod_floor(-d, c)) / static_cast<double>(c);
  const double Y1 = 1.0 / (static_cast<double>(c) * static_cast<double>(c) * Y0);
  const double sign = (f.weight() / 2) % 2 ? -1.0 : 1.0;
  out.value = vertical_upper(f, x_up, Y0, 0.25 * tol) + sign * vertical_upper(f, x_low, Y1, 0.25 * tol);
  out.value -= constant_term_antiderivative(f, Y0) + constant_term_antiderivative(f, Y1);
  out.error = 0.5 * tol;
  return out;
}

inline PeriodValue vertical_period(const AutomorphicForm& f, const DoubleCoset& x, double tol) {
  return vertical_period(f, x.a_mod_c, x.c, tol);
}

// Vertical periods over a/c for every a coprime to c, ordered by a.
inline std::vector<cplx> vertical_periods_for_denominator(const AutomorphicForm& f, std::int64_t c, double tol) {
  check_tolerance(tol);
  if (c <= 0) throw DomainError("vertical period needs c > 0");
  if (f.kind() == FormKind::Constant) throw PreconditionError("vertical period of a constant diverges");
  std::vector<std::int64_t> as;
  for (std::int64_t a = 0; a < c; ++a)
    if (std::gcd(a, c) == 1) as.push_back(a);
  std::vector<cplx> out(as.size(), 0.0);
  if (f.kind() == FormKind::Zero) return out;
  const double Y0 = 1.0 / static_cast<double>(c);
  const std::size_t N = f.vertical_truncation(Y0, 0.25 * tol);
  const bool complex_modes = f.kind() == FormKind::HolomorphicCusp;
  const bool odd = f.kind() == FormKind::MaassCusp && f.parity() == Parity::Odd;
  // Fold a(n) V_n(Y0) into residues mod c.
  std::vector<double> fold(static_cast<std::size_t>(c), 0.0);
  for (std::size_t n = 1; n <= N; ++n) fold[n % c] += f.a(n) * f.vertical_radial(n, Y0);
  std::vector<double> cs(static_cast<std::size_t>(c)), sn(static_cast<std::size_t>(c));
  for (std::int64_t j = 0; j < c; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(c);
    cs[j] = std::cos(th);
    sn[j] = std::sin(th);
  }
  auto U = [&](std::int64_t x) {
    double re = 0.0, im = 0.0;
    std::int64_t idx = 0;
    for (std::int64_t r = 0; r < c; ++r) {
      re += fold[r] * cs[idx];
      im += fold[r] * sn[idx];
      idx += x;
      if (idx >= c) idx -= c;
    }
    if (complex_modes) return cplx(re, im);
    return odd ? cplx(im, 0.0) : cplx(re, 0.0);
  };
  std::vector<cplx> up(static_cast<std::size_t>(c), 0.0);
  for (auto a : as) up[a] = U(a);
  const double sign = (f.weight() / 2) % 2 ? -1.0 : 1.0;
  const cplx reg = 2.0 * constant_term_antiderivative(f, Y0);
  for (std::size_t i = 0; i < as.size(); ++i) {
    const std::int64_t a = as[i];
    const std::int64_t d = c == 1 ? 0 : static_cast<std::int64_t>(mod_inverse(a, c));
    const std::int64_t md = (c - d) % c;
    out[i] = up[a] + sign * up[md] - reg;
  }
  return out;
}

// 2 [A c^{-1/2-it} / (1/2+it) + B c^{-1/2+it} / (1/2-it)] for weight-0 Eisenstein series.
inline cplx eisenstein_explicit_terms(const AutomorphicForm& f, std::int64_t c) {
  if (f.kind() != FormKind::Eisenstein || f.test_mode()) return 0.0;
  const double t = f.spectral_parameter();
  if (t == 0.0) throw PreconditionError("explicit bridge terms need t > 0");
  const double lc = std::log(static_cast<double>(c));
  const cplx p(0.5, t), m(0.5, -t);
  const double factor = 1.0 + ((f.weight() / 2) % 2 ? -1.0 : 1.0);
  return factor * (f.A() * std::exp(-p * lc) / p + f.B() * std::exp(-m * lc) / m);
}

// Sign in front of the vertical period in the bridge identity, (-1)^{k/2+1}.
inline double bridge_sign(int weight) { return (weight / 2 + 1) % 2 ? -1.0 : 1.0; }

struct BridgeResult {
  cplx geodesic = 0.0;
  cplx vertical = 0.0;
  cplx explicit_terms = 0.0;
  int weight = 0;
  std::int64_t c = 0;
  std::int64_t trace = 0;
  double ratio = 0.0;

  cplx residual(double sign) const { return geodesic - (sign * vertical + explicit_terms); }
  cplx residual() const { return residual(bridge_sign(weight)); }
};

inline BridgeResult bridge_residual(const AutomorphicForm& f, const DoubleCoset& x, std::int64_t k, double tol,
                                    bool include_explicit = true) {
  const GroupElement g = edge_matrix(x, k);
  BridgeResult b;
  b.weight = f.weight();
  b.c = x.c;
  b.trace = edge_trace(x, k);
  b.ratio = static_cast<double>(b.c) / std::abs(static_cast<double>(b.trace));
  b.geodesic = geodesic_period(f, g, tol).value;
  b.vertical = vertical_period(f, x, tol).value;
  if (include_explicit) b.explicit_terms = eisenstein_explicit_terms(f, x.c);
  return b;
}

inline BridgeResult bridge_residual(const AutomorphicForm& f, const EdgeList& E, const EdgeRecord& e, double tol,
                                    bool include_explicit = true) {
  return bridge_residual(f, E.cosets[e.x], e.k, tol, include_explicit);
}

// |residual| ~ K + C ratio^beta: K profiled over a grid below min |residual|, then log-log least squares.
struct ResidualFit {
  double K = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
};

inline ResidualFit fit_residuals(const std::vector<double>& ratio, const std::vector<double>& residual,
                                 int grid = 200) {
  if (ratio.size() != residual.size() || ratio.size() < 3) throw PreconditionError("fit needs three or more points");
  double rmin = std::numeric_limits<double>::infinity();
  for (double r : residual) rmin = std::min(rmin, std::abs(r));
  std::vector<double> lx(ratio.size()), ly(ratio.size());
  for (std::size_t i = 0; i < ratio.size(); ++i) lx[i] = std::log(ratio[i]);
  ResidualFit best;
  best.sse = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid; ++g) {
    const double K = rmin * static_cast<double>(g) / static_cast<double>(grid);
    for (std::size_t i = 0; i < residual.size(); ++i) ly[i] = std::log(std::abs(residual[i]) - K);
    LinearFit lf = least_squares(lx, ly);
    double sse = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double e = ly[i] - (lf.intercept + lf.slope * lx[i]);
      sse += e * e;
    }
    if (sse < best.sse) best = {K, lf.slope, lf.intercept, sse};
  }
  return best;
}

}  // namespace geolab
