#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <ostream>

#include "errors.hpp"
#include "int128.hpp"

namespace geolab {

using cplx = std::complex<double>;

struct UpperHalfPlanePoint {
  double x = 0.0;
  double y = 1.0;

  UpperHalfPlanePoint() = default;
  UpperHalfPlanePoint(double x_, double y_) : x(x_), y(y_) {
    if (!(y_ > 0.0)) throw DomainError("point not in the upper half-plane");
  }
  cplx z() const { return {x, y}; }
};

// Real 2x2 matrix acting by Mobius transformations.
struct RealMatrix {
  double a = 1, b = 0, c = 0, d = 1;

  RealMatrix operator*(const RealMatrix& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  double det() const { return a * d - b * c; }
};

inline RealMatrix rotation(double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

inline RealMatrix flow(double t) {
  return {std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t)};
}

class GroupElement {
 public:
  GroupElement() : a_(1), b_(0), c_(0), d_(1) {}

  // Throws DomainError unless ad - bc = 1; flips all signs so that c > 0, or c = 0 and d > 0.
  static GroupElement normalize(i128 a, i128 b, i128 c, i128 d) {
    i128 det = checked_sub(checked_mul(a, d), checked_mul(b, c));
    if (det != 1) throw DomainError("determinant is not 1");
    if (c < 0 || (c == 0 && d < 0)) {
      a = -a;
      b = -b;
      c = -c;
      d = -d;
    }
    GroupElement g;
    g.a_ = a;
    g.b_ = b;
    g.c_ = c;
    g.d_ = d;
    return g;
  }

  static GroupElement translation(i128 n) { return normalize(1, n, 0, 1); }
  static GroupElement inversion() { return normalize(0, -1, 1, 0); }

  i128 a() const { return a_; }
  i128 b() const { return b_; }
  i128 c() const { return c_; }
  i128 d() const { return d_; }

  // Signed trace of the normalized representative.
  i128 trace() const { return checked_add(a_, d_); }
  i128 abs_trace() const { return abs128(trace()); }
  bool is_hyperbolic() const { return abs_trace() > 2; }

  GroupElement operator*(const GroupElement& o) const {
    return normalize(checked_add(checked_mul(a_, o.a_), checked_mul(b_, o.c_)),
                     checked_add(checked_mul(a_, o.b_), checked_mul(b_, o.d_)),
                     checked_add(checked_mul(c_, o.a_), checked_mul(d_, o.c_)),
                     checked_add(checked_mul(c_, o.b_), checked_mul(d_, o.d_)));
  }

  GroupElement inverse() const { return normalize(d_, -b_, -c_, a_); }

  GroupElement pow(unsigned m) const {
    GroupElement r, base = *this;
    while (m) {
      if (m & 1u) r = r * base;
      m >>= 1u;
      if (m) base = base * base;
    }
    return r;
  }

  RealMatrix to_real() const {
    return {static_cast<double>(a_), static_cast<double>(b_), static_cast<double>(c_),
            static_cast<double>(d_)};
  }

  bool operator==(const GroupElement& o) const {
    return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
  }
  bool operator!=(const GroupElement& o) const { return !(*this == o); }

  std::size_t hash() const {
    auto h = [](i128 v) {
      u128 u = static_cast<u128>(v);
      return std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(u) ^
                                        (static_cast<std::uint64_t>(u >> 64) * 0x9E3779B97F4A7C15ull));
    };
    std::size_t s = h(a_);
    for (i128 v : {b_, c_, d_}) s ^= h(v) + 0x9E3779B97F4A7C15ull + (s << 6) + (s >> 2);
    return s;
  }

 private:
  i128 a_, b_, c_, d_;
};

inline std::ostream& operator<<(std::ostream& os, const GroupElement& g) {
  return os << "[[" << to_string(g.a()) << "," << to_string(g.b()) << "],[" << to_string(g.c())
            << "," << to_string(g.d()) << "]]";
}

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const { return g.hash(); }
};

inline double length_from_trace(i128 trace) {
  i128 t = abs128(trace);
  if (t <= 2) throw DomainError("not hyperbolic: |trace| <= 2");
  long double tl = static_cast<long double>(t);
  long double root = sqrtl(static_cast<long double>(t * t - 4));
  return static_cast<double>(2.0L * logl((tl + root) / 2.0L));
}

inline double geodesic_length(const GroupElement& g) { return length_from_trace(g.abs_trace()); }

// Endpoints (p - sqrt(D))/q < (p + sqrt(D))/q with q > 0.
// forward: the flow runs from endpoint_minus to endpoint_plus.
struct GeodesicAxis {
  i128 p = 0;
  i128 q = 1;
  i128 D = 0;
  bool forward = true;
  bool vertical = false;

  double sqrt_d() const { return std::sqrt(static_cast<double>(D)); }
  double endpoint_minus() const { return (static_cast<double>(p) - sqrt_d()) / static_cast<double>(q); }
  double endpoint_plus() const { return (static_cast<double>(p) + sqrt_d()) / static_cast<double>(q); }
  double center() const { return static_cast<double>(p) / static_cast<double>(q); }
  double radius() const { return sqrt_d() / static_cast<double>(q); }
  double source() const { return forward ? endpoint_minus() : endpoint_plus(); }
  double target() const { return forward ? endpoint_plus() : endpoint_minus(); }

  bool operator==(const GeodesicAxis& o) const {
    return p == o.p && q == o.q && D == o.D && forward == o.forward && vertical == o.vertical;
  }
};

inline GeodesicAxis axis(const GroupElement& g) {
  if (!g.is_hyperbolic()) throw DomainError("axis requires a hyperbolic element");
  if (g.c() == 0) throw DomainError("vertical axis (c = 0)");
  GeodesicAxis ax;
  ax.p = checked_sub(g.a(), g.d());
  ax.q = checked_mul(2, g.c());
  i128 t = g.trace();
  ax.D = checked_sub(checked_mul(t, t), 4);
  // With c > 0 the attracting fixed point is (a - d + sign(t) sqrt(D)) / 2c.
  ax.forward = t > 0;
  return ax;
}

// Axis translated by n: endpoints shift by n.
inline GeodesicAxis translate_axis(const GeodesicAxis& ax, i128 n) {
  GeodesicAxis r = ax;
  r.p = checked_add(ax.p, checked_mul(n, ax.q));
  return r;
}

inline UpperHalfPlanePoint mobius(const RealMatrix& g, const UpperHalfPlanePoint& z) {
  cplx w = (g.a * z.z() + g.b) / (g.c * z.z() + g.d);
  double y = w.imag();
  if (g.det() < 0) throw DomainError("orientation-reversing matrix");
  if (!(y > 0.0)) y = std::numeric_limits<double>::min();
  return {w.real(), y};
}

inline UpperHalfPlanePoint mobius(const GroupElement& g, const UpperHalfPlanePoint& z) {
  const double a = static_cast<double>(g.a()), b = static_cast<double>(g.b());
  const double c = static_cast<double>(g.c()), d = static_cast<double>(g.d());
  const double ux = c * z.x + d, uy = c * z.y;
  const double den = ux * ux + uy * uy;
  const double nx = a * z.x + b, ny = a * z.y;
  return {(nx * ux + ny * uy) / den, z.y / den};
}

struct StripRegion {
  double T = 1.0;
  explicit StripRegion(double t = 1.0) : T(t) {
    if (!(t >= 1.0)) throw DomainError("strip height T must be >= 1");
  }
};

inline double length_above(double r, double T) {
  if (r <= T) return 0.0;
  return 2.0 * std::log(r + std::sqrt((r - T) * (r + T))) - 2.0 * std::log(T);
}

// Length of the semicircle of radius r inside T <= Im z <= 2T.
inline double strip_intersection_length(double r, double T) {
  if (!(r > 0.0) || !(T > 0.0)) throw DomainError("radius and height must be positive");
  return length_above(r, T) - length_above(r, 2.0 * T);
}

inline double strip_length_max() { return 2.0 * std::log(2.0 + std::sqrt(3.0)); }

struct Reduction {
  UpperHalfPlanePoint z;
  GroupElement sigma;
};

inline Reduction reduce_to_fundamental_domain(const UpperHalfPlanePoint& z0, int max_steps = 10000) {
  // Extended precision keeps the hyperbolic drift of the iteration below 1e-12 for y >= 1e-6.
  long double x = z0.x, y = z0.y;
  i128 a = 1, b = 0, c = 0, d = 1;
  for (int step = 0; step < max_steps; ++step) {
    long double n = nearbyintl(x);
    if (n != 0.0L) {
      x -= n;
      i128 k = static_cast<i128>(n);
      a = checked_sub(a, checked_mul(k, c));
      b = checked_sub(b, checked_mul(k, d));
    }
    long double r2 = x * x + y * y;
    if (r2 < 1.0L) {
      x = -x / r2;
      y = y / r2;
      i128 na = -c, nb = -d;
      c = a;
      d = b;
      a = na;
      b = nb;
      continue;
    }
    double xd = static_cast<double>(x);
    if (xd > 0.5) xd = 0.5;
    if (xd < -0.5) xd = -0.5;
    return {UpperHalfPlanePoint(xd, static_cast<double>(y)), GroupElement::normalize(a, b, c, d)};
  }
  throw NumericalError("fundamental-domain reduction exceeded the iteration cap");
}

// Matrix g0 with g0(0) = source, g0(infinity) = target, g0(i) = apex.
inline RealMatrix base_frame(const GeodesicAxis& ax) {
  if (ax.vertical) throw DomainError("vertical axis has no finite frame");
  const double s = ax.target(), r = ax.source();
  const double gap = 2.0 * ax.sqrt_d() / static_cast<double>(ax.q);
  const double k = 1.0 / std::sqrt(gap);
  if (s > r) return {s * k, r * k, k, k};
  return {s * k, -r * k, k, -k};
}

struct FlowPoint {
  UpperHalfPlanePoint z;
  RealMatrix g;
};

inline FlowPoint geodesic_parametrization(const GeodesicAxis& ax, double t) {
  RealMatrix g = base_frame(ax) * flow(t);
  return {mobius(g, UpperHalfPlanePoint(0.0, 1.0)), g};
}

inline double hyperbolic_distance(const UpperHalfPlanePoint& z, const UpperHalfPlanePoint& w) {
  double dx = z.x - w.x, dy = z.y - w.y;
  double num = dx * dx + dy * dy;
  return 2.0 * std::asinh(0.5 * std::sqrt(num / (z.y * w.y)));
}

}  // namespace geolab
