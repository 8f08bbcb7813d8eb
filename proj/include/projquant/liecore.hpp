#pragma once

// =============================================================================
// The graded special linear algebra underlying projective geometry in
// dimension m: sl(m+1, ℚ) presented as g = g₋₁ ⊕ g₀ ⊕ g₁ with
//
//   g₋₁ ≅ ℚ^m (columns v),   g₀ ≅ gl(m, ℚ) (matrices A),   g₁ ≅ ℚ^{m*} (rows ξ).
//
// An element is stored as the triple (v, A, ξ).  The identification with
// trace-zero (m+1)×(m+1) matrices sends (v, A, ξ) to the class of
// [[A, v], [ξ, 0]] modulo multiples of the identity; the canonical
// representative is made trace-free, and the decomposition of a class
// [[A, v], [ξ, a]] reads off (v, A − a·Id, ξ).
//
// The grading element E is (0, −Id, 0): ad(E) acts as −1 on g₋₁, 0 on g₀,
// +1 on g₁.  The Killing form is evaluated as 2(m+1)·tr(XY) on trace-free
// representatives.  build_dual_bases assembles the basis family
// (e_r, h_s, E, ε^t) together with its Killing-dual family — the ingredient
// lists for the Casimir operators downstream.
// =============================================================================

#include <stdexcept>
#include <vector>

#include "projquant/jsonio.hpp"
#include "projquant/linalg.hpp"
#include "projquant/rational.hpp"

namespace projquant {

/// One element of the graded algebra, as the triple (v, A, ξ).
struct GradedElement {
  Vec v;     // g₋₁ component (column, size m)
  Mat A;     // g₀ component (m×m)
  RowVec xi; // g₁ component (row, size m)

  static GradedElement zero(Index m) {
    return {Vec::Zero(m), Mat::Zero(m, m), RowVec::Zero(m)};
  }
  static GradedElement from_v(const Vec& v) {
    return {v, Mat::Zero(v.size(), v.size()), RowVec::Zero(v.size())};
  }
  static GradedElement from_A(const Mat& A) {
    return {Vec::Zero(A.rows()), A, RowVec::Zero(A.rows())};
  }
  static GradedElement from_xi(const RowVec& xi) {
    return {Vec::Zero(xi.size()), Mat::Zero(xi.size(), xi.size()), xi};
  }
  /// r-th standard basis vector of g₋₁.
  static GradedElement basis_v(Index m, Index r) {
    GradedElement g = zero(m);
    g.v(r) = 1;
    return g;
  }
  /// t-th standard (unscaled) basis covector of g₁.
  static GradedElement basis_xi(Index m, Index t) {
    GradedElement g = zero(m);
    g.xi(t) = 1;
    return g;
  }
  /// The grading element E = (0, −Id, 0).
  static GradedElement euler(Index m) {
    return from_A(-Mat::Identity(m, m));
  }

  Index m() const { return v.size(); }

  GradedElement operator+(const GradedElement& o) const {
    return {v + o.v, A + o.A, xi + o.xi};
  }
  GradedElement operator-(const GradedElement& o) const {
    return {v - o.v, A - o.A, xi - o.xi};
  }
  GradedElement operator-() const { return {-v, -A, -xi}; }
  GradedElement operator*(const Rational& s) const { return {v * s, A * s, xi * s}; }
  friend GradedElement operator*(const Rational& s, const GradedElement& g) { return g * s; }

  bool operator==(const GradedElement& o) const {
    return v == o.v && A == o.A && xi == o.xi;
  }
  bool is_zero() const { return v.isZero() && A.isZero() && xi.isZero(); }
};

/// Bracket in graded components.  For X = (v, A, ξ), Y = (w, B, η):
///   [X,Y]₋₁ = Aw − Bv
///   [X,Y]₀  = [A,B] + (vη + ⟨η,v⟩Id) − (wξ + ⟨ξ,w⟩Id)
///   [X,Y]₁  = ξB − ηA
inline GradedElement bracket(const GradedElement& x, const GradedElement& y) {
  const Index m = x.m();
  if (y.m() != m) throw std::invalid_argument("bracket: dimension mismatch");
  GradedElement r = GradedElement::zero(m);
  r.v = x.A * y.v - y.A * x.v;
  r.A = x.A * y.A - y.A * x.A
      + x.v * y.xi + (y.xi * x.v)(0, 0) * Mat::Identity(m, m)
      - y.v * x.xi - (x.xi * y.v)(0, 0) * Mat::Identity(m, m);
  r.xi = x.xi * y.A - y.xi * x.A;
  return r;
}

/// Trace-free (m+1)×(m+1) representative of (v, A, ξ).
inline Mat to_matrix(const GradedElement& g) {
  const Index m = g.m();
  Mat rep = Mat::Zero(m + 1, m + 1);
  rep.topLeftCorner(m, m) = g.A;
  rep.topRightCorner(m, 1) = g.v;
  rep.bottomLeftCorner(1, m) = g.xi;
  const Rational c = g.A.trace() / Rational(m + 1);
  rep -= c * Mat::Identity(m + 1, m + 1);
  return rep;
}

/// Decomposition of a trace-class representative: [[A, v], [ξ, a]] goes to
/// (v, A − a·Id, ξ).  Inverse of to_matrix on classes mod ℚ·Id.
inline GradedElement from_matrix(const Mat& rep) {
  const Index m = rep.rows() - 1;
  if (rep.cols() != m + 1) throw std::invalid_argument("from_matrix: not square");
  GradedElement g = GradedElement::zero(m);
  g.v = rep.topRightCorner(m, 1);
  g.xi = rep.bottomLeftCorner(1, m);
  g.A = rep.topLeftCorner(m, m) - rep(m, m) * Mat::Identity(m, m);
  return g;
}

/// Killing form: 2(m+1)·tr(XY) on trace-free representatives.
inline Rational killing(const GradedElement& x, const GradedElement& y) {
  const Index m = x.m();
  return Rational(2 * (m + 1)) * (to_matrix(x) * to_matrix(y)).trace();
}

/// The basis family used by every Casimir-type operator:
///   e[r]      — standard basis of g₋₁;
///   h[s]      — basis of the trace-free part h₀ ≅ sl(m) of g₀;
///   E         — grading element;
///   eps[t]    — Killing-duals of e (so killing(e[r], eps[t]) = δ_rt);
///   eps_raw[t]— unscaled standard covectors;
///   hstar[s]  — Killing-duals of h within h₀;
///   E_dual    — E / killing(E, E) = E/2m.
/// The full dual basis of (e, h, E, eps) is (eps, hstar, E_dual, e).
struct DualBasisFamily {
  Index m;
  std::vector<GradedElement> e, h, eps, eps_raw, hstar;
  GradedElement E, E_dual;

  /// All (m+1)²−1 basis elements in order (e, h, E, eps).
  std::vector<GradedElement> basis() const {
    std::vector<GradedElement> b = e;
    b.insert(b.end(), h.begin(), h.end());
    b.push_back(E);
    b.insert(b.end(), eps.begin(), eps.end());
    return b;
  }
  /// Dual family in matching order (eps, hstar, E_dual, e).
  std::vector<GradedElement> dual_basis() const {
    std::vector<GradedElement> b = eps;
    b.insert(b.end(), hstar.begin(), hstar.end());
    b.push_back(E_dual);
    b.insert(b.end(), e.begin(), e.end());
    return b;
  }
};

/// Standard basis of the trace-free m×m matrices: all off-diagonal units
/// E_{ij} (i ≠ j), then the diagonal differences E_{ii} − E_{i+1,i+1}.
inline std::vector<Mat> sl_basis(Index m) {
  std::vector<Mat> out;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      if (i == j) continue;
      Mat u = Mat::Zero(m, m);
      u(i, j) = 1;
      out.push_back(std::move(u));
    }
  for (Index i = 0; i + 1 < m; ++i) {
    Mat d = Mat::Zero(m, m);
    d(i, i) = 1;
    d(i + 1, i + 1) = -1;
    out.push_back(std::move(d));
  }
  return out;
}

/// Basis of the whole graded algebra: the m translations, all m² matrix
/// units of g₀, and the m raw covectors of g₁.
inline std::vector<GradedElement> graded_basis(Index m) {
  std::vector<GradedElement> out;
  for (Index r = 0; r < m; ++r) out.push_back(GradedElement::basis_v(m, r));
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) {
      Mat u = Mat::Zero(m, m);
      u(a, b) = 1;
      out.push_back(GradedElement::from_A(u));
    }
  for (Index t = 0; t < m; ++t) out.push_back(GradedElement::basis_xi(m, t));
  return out;
}

/// Assemble the basis family and its Killing-dual family for dimension m.
/// The h-duals come from inverting the exact Killing Gram matrix on h₀.
inline DualBasisFamily build_dual_bases(Index m) {
  if (m < 2) throw std::invalid_argument("build_dual_bases: m must be >= 2");
  DualBasisFamily f;
  f.m = m;
  for (Index r = 0; r < m; ++r) f.e.push_back(GradedElement::basis_v(m, r));
  for (Index t = 0; t < m; ++t) f.eps_raw.push_back(GradedElement::basis_xi(m, t));
  // killing(e_r, raw ε_t) = 2(m+1) δ_rt, so the Killing-duals are scaled rows.
  const Rational scale = Rational(1, 2 * (m + 1));
  for (Index t = 0; t < m; ++t) f.eps.push_back(f.eps_raw[t] * scale);
  for (const Mat& a : sl_basis(m)) f.h.push_back(GradedElement::from_A(a));
  const Index hs = static_cast<Index>(f.h.size());
  Mat gram(hs, hs);
  for (Index a = 0; a < hs; ++a)
    for (Index b = 0; b < hs; ++b) gram(a, b) = killing(f.h[a], f.h[b]);
  const Mat ginv = invert(gram);
  for (Index b = 0; b < hs; ++b) {
    GradedElement d = GradedElement::zero(m);
    for (Index a = 0; a < hs; ++a) d = d + f.h[a] * ginv(a, b);
    f.hstar.push_back(d);
  }
  f.E = GradedElement::euler(m);
  f.E_dual = f.E * (Rational(1) / killing(f.E, f.E));  // killing(E,E) = 2m
  return f;
}

inline Json graded_to_json(const GradedElement& g) {
  Json j;
  j["v"] = vec_to_json(g.v);
  j["A"] = mat_to_json(g.A);
  j["xi"] = vec_to_json(g.xi.transpose());
  return j;
}

inline GradedElement graded_from_json(const Json& j) {
  GradedElement g;
  g.v = json_to_vec(j.at("v"));
  g.A = json_to_mat(j.at("A"));
  g.xi = json_to_vec(j.at("xi")).transpose();
  if (g.A.rows() != g.v.size() || g.A.cols() != g.v.size() || g.xi.size() != g.v.size())
    throw std::invalid_argument("graded element: inconsistent dimensions");
  return g;
}

}  // namespace projquant
