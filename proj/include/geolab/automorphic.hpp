#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"
#include "hyperbolic.hpp"
#include "int128.hpp"
#include "special.hpp"

namespace geolab {

using BigInt = boost::multiprecision::cpp_int;

enum class FormKind { HolomorphicCusp, MaassCusp, Eisenstein, Constant, Zero };
enum class Parity { Even, Odd };

inline const char* to_string(FormKind k) {
  switch (k) {
    case FormKind::HolomorphicCusp: return "holomorphic";
    case FormKind::MaassCusp: return "maass";
    case FormKind::Eisenstein: return "eisenstein";
    case FormKind::Constant: return "constant";
    case FormKind::Zero: return "zero";
  }
  return "?";
}

namespace detail {

// Coefficients of q^0..q^{len-1} in (eta(q)^3 / q^{1/8})^8, with eta^3 from Jacobi's series.
template <class T, class Mul>
std::vector<T> eta24_series(std::size_t len, Mul mul) {
  std::vector<std::pair<std::size_t, std::int64_t>> J;
  for (std::int64_t k = 0;; ++k) {
    std::size_t e = static_cast<std::size_t>(k * (k + 1) / 2);
    if (e >= len) break;
    J.push_back({e, (k % 2 ? -1 : 1) * (2 * k + 1)});
  }
  std::vector<T> P(len, T(0)), Q(len);
  for (auto [e, c] : J) P[e] = mul(T(1), c);
  for (int step = 1; step < 8; ++step) {
    for (std::size_t i = 0; i < len; ++i) {
      T s(0);
      for (auto [e, c] : J) {
        if (e > i) break;
        s += mul(P[i - e], c);
      }
      Q[i] = s;
    }
    P.swap(Q);
  }
  return P;
}

struct ModP {
  static constexpr std::uint64_t p = (1ULL << 61) - 1;
  std::uint64_t v = 0;
  ModP() = default;
  explicit ModP(std::uint64_t x) : v(x % p) {}
  ModP& operator+=(ModP o) {
    v += o.v;
    if (v >= p) v -= p;
    return *this;
  }
};

}  // namespace detail

// Ramanujan tau(1..M), exact. Beyond exact_limit the 128-bit residues are combined with residues mod 2^61 - 1.
inline std::vector<BigInt> delta_coefficients(std::size_t M, std::size_t exact_limit = 1000000) {
  if (M < 1 || M > 10000000) throw PreconditionError("delta_coefficients needs 1 <= M <= 1e7");
  auto low = detail::eta24_series<u128>(M, [](u128 a, std::int64_t c) {
    return a * static_cast<u128>(static_cast<i128>(c));
  });
  std::vector<BigInt> out(M);
  // |tau(n)| <= d(n) n^{11/2} < 2^127 for n <= 10^6.
  if (M <= std::min<std::size_t>(exact_limit, 1000000)) {
    for (std::size_t i = 0; i < M; ++i) out[i] = BigInt(to_string(static_cast<i128>(low[i])));
    return out;
  }
  using detail::ModP;
  auto high = detail::eta24_series<ModP>(M, [](ModP a, std::int64_t c) {
    std::uint64_t cm = c >= 0 ? static_cast<std::uint64_t>(c) : ModP::p - static_cast<std::uint64_t>(-c);
    ModP r;
    r.v = static_cast<std::uint64_t>(static_cast<u128>(a.v) * cm % ModP::p);
    return r;
  });
  const BigInt two128 = BigInt(1) << 128, p = ModP::p, modulus = two128 * p;
  const BigInt inv = [&] {
    // 2^128 mod p, inverted by Fermat.
    BigInt base = two128 % p, r = 1, e = p - 2;
    while (e > 0) {
      if (e & 1) r = r * base % p;
      base = base * base % p;
      e >>= 1;
    }
    return r;
  }();
  for (std::size_t i = 0; i < M; ++i) {
    BigInt r1 = 0;
    u128 u = low[i];
    r1 = BigInt(static_cast<std::uint64_t>(u >> 64)) << 64 | BigInt(static_cast<std::uint64_t>(u));
    BigInt k = ((BigInt(high[i].v) - r1 % p) % p + p) % p * inv % p;
    BigInt v = r1 + two128 * k;
    if (v > modulus / 2) v -= modulus;
    out[i] = v;
  }
  return out;
}

inline cplx eisenstein_constant_term_s(cplx s, double y) {
  if (!(y > 0.0)) throw DomainError("y must be positive");
  const double ly = std::log(y);
  return completed_zeta(2.0 * s) * std::exp(s * ly) + completed_zeta(2.0 - 2.0 * s) * std::exp((1.0 - s) * ly);
}

// Zeroth Fourier mode of E*(z, 1/2 + it).
inline cplx eisenstein_constant_term(double t, double y) {
  if (!(t >= 0.0)) throw DomainError("t must be nonnegative");
  if (!(y > 0.0)) throw DomainError("y must be positive");
  if (t == 0.0) return std::sqrt(y) * (std::log(y) + 2.0 * completed_zeta_c0());
  return eisenstein_constant_term_s(cplx(0.5, t), y);
}

class AutomorphicForm {
 public:
  static AutomorphicForm holomorphic(int k, std::vector<BigInt> a) {
    if (k < 12 || k % 2) throw PreconditionError("holomorphic cusp forms need even weight >= 12");
    if (a.empty() || a[0] != 1) throw PreconditionError("holomorphic coefficients must start with a(1) = 1");
    AutomorphicForm f(FormKind::HolomorphicCusp, k);
    f.coeff_.reserve(a.size());
    for (const auto& v : a) f.coeff_.push_back(v.convert_to<double>());
    f.exact_ = std::move(a);
    return f;
  }

  static AutomorphicForm delta(std::size_t M) { return holomorphic(12, delta_coefficients(M)); }

  static AutomorphicForm maass(double R, Parity parity, std::vector<double> a, double prec) {
    if (!(R > 0.0)) throw PreconditionError("Maass spectral parameter must be positive");
    if (a.empty()) throw PreconditionError("Maass form needs coefficients");
    AutomorphicForm f(FormKind::MaassCusp, 0);
    f.spectral_ = R;
    f.parity_ = parity;
    f.prec_ = prec;
    f.coeff_ = std::move(a);
    f.bessel_ = std::make_shared<KBesselImag>(R);
    return f;
  }

  // Completed Eisenstein series E*(z, 1/2 + it), coefficients precomputed up to M.
  static AutomorphicForm eisenstein(double t, std::size_t M = 200000) {
    if (!(t >= 0.0)) throw PreconditionError("Eisenstein parameter t must be nonnegative");
    AutomorphicForm f(FormKind::Eisenstein, 0);
    f.spectral_ = t;
    f.coeff_.assign(M, 0.0);
    for (std::size_t d = 1; d <= M; ++d)
      for (std::size_t n = d; n <= M; n += d)
        f.coeff_[n - 1] += 4.0 * std::cos(t * std::log(static_cast<double>(n) / (static_cast<double>(d) * d)));
    if (t == 0.0) {
      f.A_ = 2.0 * completed_zeta_c0();
      f.B_ = 1.0;
    } else {
      f.A_ = completed_zeta(cplx(1.0, -2.0 * t));
      f.B_ = completed_zeta(cplx(1.0, 2.0 * t));
    }
    f.bessel_ = std::make_shared<KBesselImag>(t);
    return f;
  }

  // E*(z, s) at real s > 1, where the defining lattice sum converges absolutely.
  static AutomorphicForm eisenstein_real(double s, std::size_t M = 20000) {
    if (!(s > 1.0)) throw PreconditionError("test-mode Eisenstein series needs real s > 1");
    AutomorphicForm f(FormKind::Eisenstein, 0);
    f.real_s_ = s;
    f.coeff_.assign(M, 0.0);
    for (std::size_t d = 1; d <= M; ++d)
      for (std::size_t n = d; n <= M; n += d)
        f.coeff_[n - 1] += 4.0 * std::pow(static_cast<double>(n), s - 0.5) * std::pow(static_cast<double>(d), 1.0 - 2.0 * s);
    f.A_ = completed_zeta(cplx(2.0 - 2.0 * s, 0.0));
    f.B_ = completed_zeta(cplx(2.0 * s, 0.0));
    return f;
  }

  static AutomorphicForm constant(double c = 1.0) {
    AutomorphicForm f(FormKind::Constant, 0);
    f.constant_ = c;
    return f;
  }

  static AutomorphicForm zero() { return AutomorphicForm(FormKind::Zero, 0); }

  FormKind kind() const { return kind_; }
  int weight() const { return weight_; }
  bool is_cusp() const { return kind_ == FormKind::HolomorphicCusp || kind_ == FormKind::MaassCusp; }
  bool test_mode() const { return real_s_ > 0.0; }
  std::size_t size() const { return coeff_.size(); }
  double spectral_parameter() const { return spectral_; }
  Parity parity() const { return parity_; }
  double precision() const { return prec_; }
  double constant_value() const { return constant_; }
  cplx A() const { return A_; }
  cplx B() const { return B_; }
  const KBesselImag* bessel() const { return bessel_.get(); }

  double a(std::size_t n) const {
    if (n < 1 || n > coeff_.size()) throw PreconditionError("coefficient index out of range");
    return coeff_[n - 1];
  }

  const BigInt& exact(std::size_t n) const {
    if (kind_ != FormKind::HolomorphicCusp) throw PreconditionError("exact coefficients exist only for holomorphic forms");
    if (n < 1 || n > exact_.size()) throw PreconditionError("coefficient index out of range");
    return exact_[n - 1];
  }

  // f_infinity(y).
  cplx constant_term(double y) const {
    switch (kind_) {
      case FormKind::Constant: return constant_;
      case FormKind::Eisenstein:
        if (test_mode()) return eisenstein_constant_term_s(cplx(real_s_, 0.0), y);
        return eisenstein_constant_term(spectral_, y);
      default: return 0.0;
    }
  }

  // Radial factor W_n(y) of the n-th Fourier term, coefficient excluded.
  double radial(std::size_t n, double y) const {
    const double x = 2.0 * std::numbers::pi * static_cast<double>(n) * y;
    switch (kind_) {
      case FormKind::HolomorphicCusp: return std::pow(y, 0.5 * weight_) * std::exp(-x);
      case FormKind::MaassCusp: return std::sqrt(y) * bessel_->scale() * (*bessel_)(x);
      case FormKind::Eisenstein:
        if (test_mode()) return std::sqrt(y) * bessel_k_real(real_s_ - 0.5, x);
        return std::sqrt(y) * (*bessel_)(x);
      default: return 0.0;
    }
  }

  // Angular factor of the n-th Fourier term.
  cplx mode(std::size_t n, double x) const {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(n) * x;
    if (kind_ == FormKind::HolomorphicCusp) return std::polar(1.0, th);
    if (kind_ == FormKind::MaassCusp && parity_ == Parity::Odd) return std::sin(th);
    return std::cos(th);
  }

  // int_{Y0}^inf W_n(y) dy / y.
  double vertical_radial(std::size_t n, double Y0) const {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(n);
    switch (kind_) {
      case FormKind::HolomorphicCusp:
        return std::pow(w, -0.5 * weight_) * upper_gamma_int(weight_ / 2, w * Y0);
      case FormKind::MaassCusp: return bessel_->scale() * bessel_->tail(w * Y0) / std::sqrt(w);
      case FormKind::Eisenstein:
        if (test_mode()) throw PreconditionError("vertical integrals are not provided in test mode");
        return bessel_->tail(w * Y0) / std::sqrt(w);
      default: return 0.0;
    }
  }

  // Number of Fourier terms whose omitted tail at height y is below tol.
  std::size_t truncation(double y, double tol) const {
    double C = 0.0, p = 0.0;
    const double alpha = 2.0 * std::numbers::pi * y;
    switch (kind_) {
      case FormKind::HolomorphicCusp:
        C = 2.0 * std::pow(y, 0.5 * weight_);
        p = 0.5 * weight_;
        break;
      case FormKind::MaassCusp:
        // Heuristic: |a(n)| <= 2 sqrt(n) with safety factor 10.
        C = 10.0 * bessel_->scale();
        break;
      case FormKind::Eisenstein:
        if (test_mode()) {
          const double nu = real_s_ - 0.5;
          C = 2.0 * zeta(cplx(2.0 * real_s_ - 1.0, 0.0)).real() * (1.0 + nu * nu);
          p = real_s_ - 1.0;
        } else {
          C = 4.0;
        }
        break;
      default: return 0;
    }
    return need(tail_terms(C, p, alpha, tol));
  }

  // Terms needed so that the omitted part of sum a(n) mode * vertical_radial(n, Y0) is below tol.
  std::size_t vertical_truncation(double Y0, double tol) const {
    const double a = 2.0 * std::numbers::pi * Y0;
    if (kind_ == FormKind::HolomorphicCusp) {
      // Deligne: |a(n)| <= 2 n^{k/2}; the tail is bounded by an integral of Gamma(k/2, a u).
      const int m = weight_ / 2;
      const double C = 2.0 * std::pow(2.0 * std::numbers::pi, -0.5 * weight_);
      for (std::size_t M = 0;; ++M) {
        const double X = a * static_cast<double>(M);
        const double bound = C / a * (upper_gamma_int(m + 1, X) - X * upper_gamma_int(m, X));
        if (bound < tol) return need(M);
        if (M > 100000000) throw NumericalError("vertical truncation diverged");
      }
    }
    double C = 0.0;
    if (kind_ == FormKind::MaassCusp)
      C = 10.0 * bessel_->scale();
    else if (kind_ == FormKind::Eisenstein)
      C = 4.0;
    else
      return 0;
    // Terms bounded by C e^{-a n} / (a n).
    for (std::size_t M = 1;; ++M) {
      const double X = a * static_cast<double>(M + 1);
      const double bound = C * std::exp(-X) / X / (1.0 - std::exp(-a));
      if (bound < tol) return need(M);
      if (M > 100000000) throw NumericalError("vertical truncation diverged");
    }
  }

  // Fourier series at x + iy, no reduction.
  cplx series(double x, double y, double tol) const {
    if (kind_ == FormKind::Zero) return 0.0;
    if (kind_ == FormKind::Constant) return constant_;
    const std::size_t N = truncation(y, tol);
    cplx s = constant_term(y);
    for (std::size_t n = 1; n <= N; ++n) s += coeff_[n - 1] * radial(n, y) * mode(n, x);
    return s;
  }

 private:
  AutomorphicForm(FormKind k, int w) : kind_(k), weight_(w) {}

  std::size_t need(std::size_t N) const {
    if (N > coeff_.size())
      throw PreconditionError("insufficient coefficients: need M >= " + std::to_string(N) + ", have " +
                              std::to_string(coeff_.size()));
    return N;
  }

  // Smallest N with sum_{n > N} C n^p e^{-alpha n} < tol.
  static std::size_t tail_terms(double C, double p, double alpha, double tol) {
    for (std::size_t N = 0;; ++N) {
      const double n1 = static_cast<double>(N + 1);
      const double lr = p * std::log1p(1.0 / n1) - alpha;
      if (lr < 0.0) {
        const double lb = std::log(C) + p * std::log(n1) - alpha * n1 - std::log1p(-std::exp(lr));
        if (lb < std::log(tol)) return N;
      }
      if (N > 100000000) throw NumericalError("truncation search diverged");
    }
  }

  FormKind kind_;
  int weight_;
  std::vector<double> coeff_;
  std::vector<BigInt> exact_;
  double spectral_ = 0.0;
  double real_s_ = 0.0;
  Parity parity_ = Parity::Even;
  double prec_ = 0.0;
  double constant_ = 0.0;
  cplx A_ = 0.0, B_ = 0.0;
  std::shared_ptr<const KBesselImag> bessel_;
};

struct EvaluationRequest {
  UpperHalfPlanePoint z;
  double tol = 1e-10;
  bool reduce = true;
};

inline void check_tolerance(double tol) {
  if (!(tol >= 1e-14 && tol <= 1e-3)) throw PreconditionError("tolerance must lie in [1e-14, 1e-3]");
}

// j_g(z) = (cz + d) / |cz + d|.
inline cplx cocycle(double c, double d, const UpperHalfPlanePoint& z) {
  cplx w = c * z.z() + d;
  return w / std::abs(w);
}

inline cplx eval_form(const AutomorphicForm& f, const UpperHalfPlanePoint& z, double tol, bool reduce = true) {
  check_tolerance(tol);
  if (!reduce) {
    if (z.y < 0.5) throw PreconditionError("points with y < 0.5 must be reduced first");
    return f.series(z.x, z.y, tol);
  }
  Reduction r = reduce_to_fundamental_domain(z);
  cplx v = f.series(r.z.x, r.z.y, tol);
  if (f.weight() != 0) {
    cplx j = cocycle(static_cast<double>(r.sigma.c()), static_cast<double>(r.sigma.d()), z);
    v *= std::pow(j, -f.weight());
  }
  return v;
}

inline cplx eval_form(const AutomorphicForm& f, const EvaluationRequest& req) {
  return eval_form(f, req.z, req.tol, req.reduce);
}

// F(g) = j_g(i)^{-k} f(g i).
inline cplx eval_lift(const AutomorphicForm& f, const RealMatrix& g, double tol) {
  check_tolerance(tol);
  const UpperHalfPlanePoint w = mobius(g, UpperHalfPlanePoint(0.0, 1.0));
  if (f.weight() == 0) return eval_form(f, w, tol, true);
  Reduction r = reduce_to_fundamental_domain(w);
  const GroupElement& s = r.sigma;
  RealMatrix h = RealMatrix{static_cast<double>(s.a()), static_cast<double>(s.b()), static_cast<double>(s.c()),
                            static_cast<double>(s.d())} *
                 g;
  const UpperHalfPlanePoint zi = mobius(h, UpperHalfPlanePoint(0.0, 1.0));
  cplx j = cocycle(h.c, h.d, UpperHalfPlanePoint(0.0, 1.0));
  return std::pow(j, -f.weight()) * f.series(zi.x, zi.y, tol);
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

}  // namespace detail

struct MaassFileHeader {
  std::string R_text;
  double R = 0.0;
  Parity parity = Parity::Even;
  std::size_t M = 0;
  double prec = 0.0;
};

inline AutomorphicForm parse_maass_coefficients(std::istream& in, MaassFileHeader* header_out = nullptr) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "MAASS v1") throw FormatError("malformed header: expected MAASS v1");
  if (!std::getline(in, line)) throw FormatError("malformed header: missing parameter line");
  MaassFileHeader h;
  bool haveR = false, haveP = false, haveM = false, havePrec = false;
  std::istringstream ps(line);
  std::string tok;
  while (ps >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header token: " + tok);
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    try {
      if (key == "R") {
        h.R_text = val;
        h.R = std::stod(val);
        haveR = true;
      } else if (key == "parity") {
        if (val != "even" && val != "odd") throw FormatError("parity must be even or odd");
        h.parity = val == "even" ? Parity::Even : Parity::Odd;
        haveP = true;
      } else if (key == "M") {
        long long m = std::stoll(val);
        if (m < 1) throw FormatError("M must be positive");
        h.M = static_cast<std::size_t>(m);
        haveM = true;
      } else if (key == "prec") {
        h.prec = std::stod(val);
        havePrec = true;
      } else {
        throw FormatError("unknown header key: " + key);
      }
    } catch (const std::logic_error&) {
      throw FormatError("malformed header value: " + tok);
    }
  }
  if (!(haveR && haveP && haveM && havePrec)) throw FormatError("malformed header: need R, parity, M and prec");
  if (!(h.R > 0.0) || !(h.prec > 0.0)) throw FormatError("malformed header: R and prec must be positive");
  std::vector<double> a;
  a.reserve(h.M);
  while (a.size() < h.M && std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    std::istringstream ls(line);
    long long n;
    double v;
    std::string extra;
    if (!(ls >> n >> v) || (ls >> extra)) throw FormatError("malformed coefficient line: " + line);
    if (n != static_cast<long long>(a.size()) + 1) throw FormatError("coefficient indices must run 1..M in order");
    a.push_back(v);
  }
  if (a.size() < h.M) throw FormatError("too few coefficients: header promises " + std::to_string(h.M));
  if (a.size() < 6) throw FormatError("too few coefficients: at least 6 are needed for the Hecke self-check");
  if (std::abs(a[0] - 1.0) > h.prec) throw ValidationError("self-check failed: a(1) != 1");
  if (std::abs(a[1] * a[2] - a[5]) > h.prec) throw ValidationError("self-check failed: a(2)a(3) != a(6)");
  if (header_out) *header_out = h;
  return AutomorphicForm::maass(h.R, h.parity, std::move(a), h.prec);
}

inline AutomorphicForm ingest_maass_coefficients(const std::string& path, MaassFileHeader* header_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return parse_maass_coefficients(in, header_out);
}

#ifdef GEOLAB_DATA_DIR
inline std::string bundled_maass_path(Parity p) {
  return std::string(GEOLAB_DATA_DIR) + (p == Parity::Odd ? "/maass_odd_9.53.txt" : "/maass_even_13.78.txt");
}
#endif

}  // namespace geolab
