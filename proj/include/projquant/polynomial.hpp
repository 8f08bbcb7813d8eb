#pragma once

// =============================================================================
// Sparse multivariate polynomials over an exact scalar.
//
// Monomials are exponent vectors over a global variable index space; trailing
// zero exponents are trimmed so polynomials in different variable counts
// compose freely.  Convention used throughout the project: for base dimension
// m, variables 0..m-1 are the base coordinates x_i and variables m..2m-1 are
// the fiber coordinates of the bundle trivialization.
//
// Polynomial<Scalar> carries enough operator surface (ring ops, NumTraits) to
// serve as an Eigen scalar, so polynomial-valued vectors and matrices are
// ordinary Eigen dense types.
// =============================================================================

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "projquant/rational.hpp"

namespace projquant {

/// Exponent vector with trailing zeros trimmed; the empty vector is the
/// constant monomial 1.
using Mono = std::vector<std::uint32_t>;

inline void trim_mono(Mono& e) {
  while (!e.empty() && e.back() == 0) e.pop_back();
}

inline Mono mul_mono(const Mono& a, const Mono& b) {
  Mono r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;  // sum of nonnegatives: no trim needed unless both empty
}

inline std::uint32_t mono_degree(const Mono& e) {
  std::uint32_t d = 0;
  for (auto x : e) d += x;
  return d;
}

template <class Scalar>
class Polynomial {
 public:
  using Terms = std::map<Mono, Scalar>;  // ordered: deterministic iteration

  Polynomial() = default;
  Polynomial(const Scalar& c) {  // implicit: lets Rational promote to Poly
    if (c != Scalar(0)) terms_[Mono{}] = c;
  }
  Polynomial(int c) : Polynomial(Scalar(c)) {}

  /// The monomial c * v_{var}^{exp}.
  static Polynomial monomial(std::size_t var, std::uint32_t exp = 1,
                             const Scalar& c = Scalar(1)) {
    Polynomial p;
    if (c == Scalar(0)) return p;
    if (exp == 0) return Polynomial(c);
    Mono e(var + 1, 0);
    e[var] = exp;
    p.terms_[std::move(e)] = c;
    return p;
  }

  static Polynomial variable(std::size_t var) { return monomial(var, 1); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }

  Scalar constant_term() const {
    auto it = terms_.find(Mono{});
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  Scalar coefficient(Mono e) const {
    trim_mono(e);
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  std::uint32_t total_degree() const {  // degree of 0 reported as 0
    std::uint32_t d = 0;
    for (auto& [e, c] : terms_) d = std::max(d, mono_degree(e));
    return d;
  }

  /// Largest variable index used, plus one (0 for constants).
  std::size_t num_vars() const {
    std::size_t n = 0;
    for (auto& [e, c] : terms_) n = std::max(n, e.size());
    return n;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial operator+(const Polynomial& o) const {
    Polynomial r = *this;
    return r += o;
  }
  Polynomial operator-(const Polynomial& o) const {
    Polynomial r = *this;
    return r -= o;
  }
  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }

  Polynomial operator*(const Polynomial& o) const {
    Polynomial r;
    for (auto& [ea, ca] : terms_)
      for (auto& [eb, cb] : o.terms_) r.add_term(mul_mono(ea, eb), ca * cb);
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  Polynomial& operator*=(const Scalar& s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }
  Polynomial operator*(const Scalar& s) const {
    Polynomial r = *this;
    return r *= s;
  }
  friend Polynomial operator*(const Scalar& s, const Polynomial& p) { return p * s; }

  Polynomial& operator/=(const Scalar& s) {
    for (auto& [e, c] : terms_) c /= s;
    return *this;
  }
  Polynomial operator/(const Scalar& s) const {
    Polynomial r = *this;
    return r /= s;
  }

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  /// Partial derivative with respect to variable `var`.
  Polynomial derivative(std::size_t var) const {
    Polynomial r;
    for (auto& [e, c] : terms_) {
      if (var >= e.size() || e[var] == 0) continue;
      Mono d = e;
      Scalar k = Scalar(static_cast<long>(d[var]));
      d[var] -= 1;
      trim_mono(d);
      r.add_term(d, c * k);
    }
    return r;
  }

  /// Evaluate at a point; `point` must cover every variable in use.
  Scalar eval(const std::vector<Scalar>& point) const {
    Scalar v(0);
    for (auto& [e, c] : terms_) {
      Scalar t = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        for (std::uint32_t k = 0; k < e[i]; ++k) t *= point.at(i);
      v += t;
    }
    return v;
  }

  /// Substitute polynomials for variables; `images` must cover every variable
  /// in use.  Used for pullback along polynomial coordinate maps.
  Polynomial subst(const std::vector<Polynomial>& images) const {
    Polynomial r;
    for (auto& [e, c] : terms_) {
      Polynomial t(c);
      for (std::size_t i = 0; i < e.size(); ++i)
        for (std::uint32_t k = 0; k < e[i]; ++k) t *= images.at(i);
      r += t;
    }
    return r;
  }

  /// Debug rendering, e.g. "3/2*x0^2*x1 - 4".  Base variables print as x<i>;
  /// with `fiber_start` >= 0, variables at index >= fiber_start print as
  /// xi<i-fiber_start>.
  std::string str(long fiber_start = -1) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [e, c] : terms_) {
      std::string cs = c.str();
      if (!first) os << (cs[0] == '-' ? " - " : " + ");
      if (!first && cs[0] == '-') cs = cs.substr(1);
      first = false;
      bool unit = (cs == "1" || cs == "-1") && !e.empty();
      if (!unit)
        os << cs << (e.empty() ? "" : "*");
      else if (cs == "-1")
        os << "-";
      bool firstv = true;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!firstv) os << "*";
        firstv = false;
        if (fiber_start >= 0 && i >= static_cast<std::size_t>(fiber_start))
          os << "xi" << (i - fiber_start);
        else
          os << "x" << i;
        if (e[i] > 1) os << "^" << e[i];
      }
    }
    return os.str();
  }

 private:
  void add_term(Mono e, const Scalar& c) {
    trim_mono(e);
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (c != Scalar(0)) terms_.emplace(std::move(e), c);
    } else {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  Terms terms_;
};

using Poly = Polynomial<Rational>;

/// Polynomial-valued Eigen dense types (Poly is an Eigen-compatible scalar).
using PolyVec = Eigen::Matrix<Poly, Eigen::Dynamic, 1>;
using PolyMat = Eigen::Matrix<Poly, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace projquant

namespace Eigen {

template <class S>
struct NumTraits<projquant::Polynomial<S>> {
  using Self = projquant::Polynomial<S>;
  using Real = Self;
  using NonInteger = Self;
  using Literal = Self;
  using Nested = Self;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 16,
    AddCost = 64,
    MulCost = 256,
  };
  static inline Self epsilon() { return Self(); }
  static inline Self dummy_precision() { return Self(); }
  static inline int digits10() { return 0; }
};

// Mixed products Scalar * Polynomial<Scalar> inside Eigen expressions.
template <class S, class Op>
struct ScalarBinaryOpTraits<projquant::Polynomial<S>, S, Op> {
  using ReturnType = projquant::Polynomial<S>;
};
template <class S, class Op>
struct ScalarBinaryOpTraits<S, projquant::Polynomial<S>, Op> {
  using ReturnType = projquant::Polynomial<S>;
};

}  // namespace Eigen
