#pragma once

// =============================================================================
// Exact rational scalar for the whole library.
//
// Every quantity in this project is an exact rational (or a polynomial /
// matrix built over them); no floating point is used anywhere in the math
// path.  Arithmetic is delegated to boost::multiprecision::cpp_rational, but
// the backend is wrapped in an owned value type rather than used directly:
// boost's number<> exposes templated converting constructors and operators
// that enter overload resolution against Eigen expression types and trip a
// hard error in its container-detection traits.  The wrapper's operator set
// consists of hidden friends over the wrapper type only, so Eigen and boost
// never see each other.
// =============================================================================

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Core>

#include <compare>
#include <concepts>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace projquant {

using Integer = boost::multiprecision::number<boost::multiprecision::backends::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;

/// Arbitrary-precision rational with plain value semantics.  Always stored
/// normalized (gcd(p, q) = 1, q > 0); construction and every operation
/// preserve that.  Division by zero throws std::overflow_error.
class Rational {
 public:
  using Raw = boost::multiprecision::number<
      boost::multiprecision::backends::rational_adaptor<boost::multiprecision::backends::cpp_int_backend<>>,
      boost::multiprecision::et_off>;

  Rational() = default;

  template <std::integral I>
  Rational(I n) : v_(n) {}  // NOLINT(google-explicit-constructor): numeric literal convenience

  Rational(const Integer& n) : v_(n) {}  // NOLINT(google-explicit-constructor)

  Rational(long long num, long long den) {
    if (den == 0) throw std::overflow_error("rational with zero denominator");
    v_ = Raw(num, den);
  }

  Rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::overflow_error("rational with zero denominator");
    v_ = Raw(num, den);
  }

  explicit Rational(Raw raw) : v_(std::move(raw)) {}

  const Raw& raw() const { return v_; }

  bool is_zero() const { return v_.is_zero(); }
  int sign() const { return v_.sign(); }
  std::string str() const { return v_.str(); }
  double to_double() const { return v_.convert_to<double>(); }

  Rational& operator+=(const Rational& o) {
    v_ += o.v_;
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    v_ -= o.v_;
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    v_ *= o.v_;
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(Raw(a.v_ + b.v_)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(Raw(a.v_ - b.v_)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(Raw(a.v_ * b.v_)); }
  friend Rational operator/(const Rational& a, const Rational& b) { return Rational(Raw(a.v_ / b.v_)); }
  friend Rational operator-(const Rational& a) { return Rational(Raw(-a.v_)); }
  friend Rational operator+(const Rational& a) { return a; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = a.v_.compare(b.v_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  friend Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }
  friend Integer numerator(const Rational& a) { return boost::multiprecision::numerator(a.v_); }
  friend Integer denominator(const Rational& a) { return boost::multiprecision::denominator(a.v_); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& a) { return os << a.v_; }

 private:
  Raw v_;
};

/// Render a rational canonically: "p" when the denominator is 1, else "p/q"
/// with q > 0 and gcd(p, q) = 1 (values are kept normalized).
inline std::string format_rational(const Rational& r) {
  return r.str();
}

/// Parse "p" or "p/q" (optional leading '-'). Throws std::invalid_argument on
/// malformed input or zero denominator; whitespace is not accepted.
inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto digits = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (!digits(s)) throw std::invalid_argument("bad rational literal: " + s);
    return Rational(Integer(s));
  }
  const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  if (!digits(num) || !digits(den) || den[0] == '-')
    throw std::invalid_argument("bad rational literal: " + s);
  Integer d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + s);
  return Rational(Integer(num), d);
}

/// Deterministic PRNG used by every randomized routine in the project.  All
/// random draws must flow through a caller-seeded instance so identical
/// configurations reproduce byte-identical outputs.
using Rng = std::mt19937_64;

/// Uniform small rational: numerator in [-num_bound, num_bound], denominator
/// in [1, den_bound].  Intended for generating test data, not for sampling
/// any particular distribution.
inline Rational random_rational(Rng& rng, long num_bound = 6, long den_bound = 4) {
  std::uniform_int_distribution<long> num(-num_bound, num_bound);
  std::uniform_int_distribution<long> den(1, den_bound);
  return Rational(static_cast<long long>(num(rng)), static_cast<long long>(den(rng)));
}

/// Nonzero variant of random_rational.
inline Rational random_nonzero_rational(Rng& rng, long num_bound = 6, long den_bound = 4) {
  for (;;) {
    Rational r = random_rational(rng, num_bound, den_bound);
    if (!r.is_zero()) return r;
  }
}

inline Integer factorial(unsigned n) {
  Integer f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

inline Integer binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Integer b = 1;
  for (unsigned i = 0; i < k; ++i) b = b * (n - i) / (i + 1);  // exact at each step
  return b;
}

}  // namespace projquant

namespace Eigen {

template <>
struct NumTraits<projquant::Rational> : GenericNumTraits<projquant::Rational> {
  typedef projquant::Rational Real;
  typedef projquant::Rational NonInteger;
  typedef projquant::Rational Nested;
  typedef projquant::Rational Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 40,
    MulCost = 40,
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
