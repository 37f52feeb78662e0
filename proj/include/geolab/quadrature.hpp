#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace geolab {

struct GaussLegendre {
  std::vector<double> nodes, weights;

  explicit GaussLegendre(int n) {
    if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 1.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) p0 = 1.0, p1 = x;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  static const GaussLegendre& order32() {
    static const GaussLegendre g(32);
    return g;
  }

  template <class F>
  auto integrate(F&& f, double a, double b) const {
    const double m = 0.5 * (a + b), r = 0.5 * (b - a);
    decltype(f(a)) s{};
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(m + r * nodes[i]);
    return s * r;
  }
};

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  std::size_t panels = 0;
};

// Adaptive panels of 32-point Gauss-Legendre; a panel is accepted when it agrees with the
// sum over its halves to within its share of the tolerance.
template <class F>
auto adaptive_gauss(F&& f, double a, double b, double tol, int max_depth = 40) {
  using T = decltype(f(a));
  const auto& g = GaussLegendre::order32();
  QuadratureResult<T> out;
  const double len = b - a;
  if (len == 0.0) return out;
  struct Panel {
    double a, b;
    T whole;
    int depth;
  };
  std::vector<Panel> stack{{a, b, g.integrate(f, a, b), 0}};
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    T l = g.integrate(f, p.a, m), r = g.integrate(f, m, p.b);
    const double err = std::abs(l + r - p.whole);
    const double share = tol * std::abs(p.b - p.a) / std::abs(len);
    if (err <= share || p.depth >= max_depth) {
      if (err > share) throw NumericalError("adaptive quadrature did not converge");
      out.value += l + r;
      out.error += err;
      ++out.panels;
    } else {
      stack.push_back({p.a, m, l, p.depth + 1});
      stack.push_back({m, p.b, r, p.depth + 1});
    }
  }
  return out;
}

namespace detail {

template <class F, class T>
T simpson_step(F& f, double a, double b, T fa, T fm, T fb, T whole, double tol, int depth, double& err) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  T flm = f(lm), frm = f(rm);
  T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm), right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double d = std::abs(left + right - whole);
  if (d <= 15.0 * tol) {
    err += d / 15.0;
    return left + right + (left + right - whole) / 15.0;
  }
  if (depth <= 0) throw NumericalError("adaptive Simpson did not converge");
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err);
}

}  // namespace detail

template <class F>
auto adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 50) {
  using T = decltype(f(a));
  QuadratureResult<T> out;
  T fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  out.value = detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth, out.error);
  return out;
}

}  // namespace geolab
