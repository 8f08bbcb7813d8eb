#pragma once

// =============================================================================
// Calculus on polynomial symbols over the flat model ℝ^m.
//
// A symbol of degree k is a polynomial map ℝ^m → Sym^k(ℝ^m) ⊗ Hom(V₁, V₂);
// it is the k-th order part of a differential operator sending V₁-valued
// functions to V₂-valued ones.  This header provides
//
//   * SymbolSpace — the shared context: dimension, source/target modules,
//     and per-degree fiber data (monomial basis, the g₀ fiber module, the
//     scalar by which the identity acts);
//   * the fractional-linear vector fields of the model: constants, linear
//     fields, and the quadratic fields ⟨ξ,x⟩x, one family per graded slot;
//   * geometric Lie derivatives of symbols and of V-valued functions along
//     polynomial vector fields (transport plus the fiber action of the
//     field's Jacobian);
//   * PolyOperator — differential operators with polynomial matrix
//     coefficients, with application and Leibniz composition;
//   * the affine symbol map q_aff (monomial symbol ↦ derivative, no
//     factorial normalization) with its exact inverse, and the conjugated
//     action curly_l on symbols obtained by moving the operator-side Lie
//     derivative through q_aff — for quadratic fields it acquires a
//     degree-lowering fiber correction, available in closed form via
//     gamma_matrix;
//   * JSON codecs for symbols and mixed-degree symbol sums.
// =============================================================================

#include "projquant/jsonio.hpp"
#include "projquant/liecore.hpp"
#include "projquant/linalg.hpp"
#include "projquant/polynomial.hpp"
#include "projquant/rational.hpp"
#include "projquant/repspace.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace projquant {

// ---------------------------------------------------------------------------
// Multi-index utilities for derivative bookkeeping.
// ---------------------------------------------------------------------------

inline Mono unit_mono(std::size_t var) {
  Mono e(var + 1, 0);
  e[var] = 1;
  return e;
}

inline bool mono_leq(const Mono& a, const Mono& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > (i < b.size() ? b[i] : 0)) return false;
  return true;
}

/// a − b, requiring b ≤ a componentwise.
inline Mono mono_sub(const Mono& a, const Mono& b) {
  Mono d = a;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] > (i < d.size() ? d[i] : 0)) throw std::invalid_argument("mono_sub: not componentwise smaller");
    if (b[i]) d[i] -= b[i];
  }
  trim_mono(d);
  return d;
}

/// Π_r C(b_r, mu_r); the coefficient of the multivariate Leibniz rule.
inline Rational multi_binomial(const Mono& b, const Mono& mu) {
  Integer prod = 1;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i]) prod *= binomial(i < b.size() ? b[i] : 0, mu[i]);
  return Rational(prod);
}

/// Visit every μ with 0 ≤ μ ≤ b componentwise (including 0 and b itself).
template <class F>
inline void for_each_submono(const Mono& b, F&& fn) {
  Mono mu(b.size(), 0);
  for (;;) {
    Mono t = mu;
    trim_mono(t);
    fn(t);
    std::size_t i = 0;
    while (i < b.size() && mu[i] == b[i]) mu[i++] = 0;
    if (i == b.size()) return;
    ++mu[i];
  }
}

inline Poly poly_derivative_multi(Poly p, const Mono& beta) {
  for (std::size_t r = 0; r < beta.size(); ++r)
    for (std::uint32_t t = 0; t < beta[r]; ++t) p = p.derivative(r);
  return p;
}

inline PolyMat mat_derivative_multi(const PolyMat& a, const Mono& beta) {
  PolyMat out = a;
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = poly_derivative_multi(out(i, j), beta);
  return out;
}

// ---------------------------------------------------------------------------
// Symbol spaces.
// ---------------------------------------------------------------------------

/// Shared context for all symbol calculus between a fixed source module V₁
/// and target module V₂ over ℝ^m.  Per-degree fiber data is built lazily and
/// cached; the fiber of degree k is Sym^k(ℝ^m) ⊗ Hom(V₁, V₂) with the index
/// of e^α ⊗ E_(r,c) equal to sym_index(α)·dim(Hom) + r·dim(V₁) + c.
class SymbolSpace {
 public:
  SymbolSpace(int m, const RepSpec& source_spec, const RepSpec& target_spec)
      : m_(m),
        source_spec_(source_spec),
        target_spec_(target_spec),
        source_(build_module(m, source_spec)),
        target_(build_module(m, target_spec)),
        hom_(hom_module(source_, target_)),
        delta_(shift_delta(source_spec, target_spec, m)),
        duals_(build_dual_bases(m)) {}

  struct Degree {
    std::vector<Mono> monos;
    std::map<Mono, Index> mono_index;
    G0Module fiber;
    Rational identity_scalar;  // scalar action of Id on the whole fiber
  };

  int m() const { return m_; }
  const RepSpec& source_spec() const { return source_spec_; }
  const RepSpec& target_spec() const { return target_spec_; }
  const G0Module& source() const { return source_; }
  const G0Module& target() const { return target_; }
  const G0Module& hom() const { return hom_; }
  const DualBasisFamily& duals() const { return duals_; }

  /// Difference of identity scalars of source and target, divided by m.
  const Rational& delta() const { return delta_; }

  const Degree& degree(int k) const {
    if (k < 0) throw std::invalid_argument("symbol degree must be nonnegative");
    auto it = cache_.find(k);
    if (it == cache_.end()) {
      Degree d;
      d.monos = monomials_of_degree(m_, static_cast<std::uint32_t>(k));
      for (Index i = 0; i < static_cast<Index>(d.monos.size()); ++i)
        d.mono_index[d.monos[static_cast<std::size_t>(i)]] = i;
      d.fiber = tensor_module(sym_module(m_, k, Rational(0)), hom_);
      d.identity_scalar = id_scalar(d.fiber);
      it = cache_.emplace(k, std::move(d)).first;
    }
    return it->second;
  }

  Index fiber_dim(int k) const { return degree(k).fiber.dim; }

  Index fiber_index(int k, const Mono& alpha, Index row, Index col) const {
    const Degree& d = degree(k);
    Mono key = alpha;
    trim_mono(key);
    const auto it = d.mono_index.find(key);
    if (it == d.mono_index.end()) throw std::invalid_argument("fiber_index: monomial has wrong degree");
    return it->second * hom_.dim + row * source_.dim + col;
  }

 private:
  int m_;
  RepSpec source_spec_, target_spec_;
  G0Module source_, target_, hom_;
  Rational delta_;
  DualBasisFamily duals_;
  mutable std::map<int, Degree> cache_;
};

/// A degree-k symbol: fiber coefficients that are polynomials in x.
struct PolySymbol {
  const SymbolSpace* space = nullptr;
  int k = 0;
  PolyVec coeffs;

  static PolySymbol zero(const SymbolSpace& sp, int k) {
    return {&sp, k, PolyVec::Zero(sp.fiber_dim(k))};
  }

  bool is_zero() const {
    for (Index i = 0; i < coeffs.size(); ++i)
      if (!coeffs(i).is_zero()) return false;
    return true;
  }
};

inline PolySymbol operator+(const PolySymbol& a, const PolySymbol& b) {
  if (a.space != b.space || a.k != b.k) throw std::invalid_argument("symbol sum: mismatched spaces or degrees");
  return {a.space, a.k, a.coeffs + b.coeffs};
}

inline PolySymbol operator-(const PolySymbol& a, const PolySymbol& b) {
  if (a.space != b.space || a.k != b.k) throw std::invalid_argument("symbol difference: mismatched spaces or degrees");
  return {a.space, a.k, a.coeffs - b.coeffs};
}

inline PolySymbol operator*(const Rational& c, const PolySymbol& a) {
  return {a.space, a.k, PolyVec(Poly(c) * a.coeffs)};
}

inline PolySymbol partial(const PolySymbol& t, std::size_t var) {
  PolySymbol out = t;
  for (Index i = 0; i < out.coeffs.size(); ++i) out.coeffs(i) = out.coeffs(i).derivative(var);
  return out;
}

/// Mixed-degree symbol: a finite sum of PolySymbols of distinct degrees.
/// Zero parts are pruned on insertion.
struct SymbolSum {
  const SymbolSpace* space = nullptr;
  std::map<int, PolySymbol> parts;

  static SymbolSum zero(const SymbolSpace& sp) { return {&sp, {}}; }

  static SymbolSum of(const PolySymbol& t) {
    SymbolSum s{t.space, {}};
    s.add(t);
    return s;
  }

  void add(const PolySymbol& t) {
    if (t.is_zero()) return;
    auto it = parts.find(t.k);
    if (it == parts.end()) {
      parts.emplace(t.k, t);
    } else {
      it->second.coeffs += t.coeffs;
      if (it->second.is_zero()) parts.erase(it);
    }
  }

  PolySymbol part(int k) const {
    const auto it = parts.find(k);
    return it != parts.end() ? it->second : PolySymbol::zero(*space, k);
  }

  bool is_zero() const { return parts.empty(); }
};

inline SymbolSum operator+(const SymbolSum& a, const SymbolSum& b) {
  SymbolSum out = a;
  for (const auto& [k, t] : b.parts) out.add(t);
  return out;
}

inline SymbolSum operator-(const SymbolSum& a, const SymbolSum& b) {
  SymbolSum out = a;
  for (const auto& [k, t] : b.parts) out.add(Rational(-1) * t);
  return out;
}

inline SymbolSum operator*(const Rational& c, const SymbolSum& a) {
  SymbolSum out = SymbolSum::zero(*a.space);
  if (c.is_zero()) return out;
  for (const auto& [k, t] : a.parts) out.add(c * t);
  return out;
}

// ---------------------------------------------------------------------------
// Vector fields of the flat model and Lie derivatives.
// ---------------------------------------------------------------------------

/// The fundamental vector field of a graded element (v, A, ξ):
///   X = −v − A·x + ⟨ξ, x⟩·x.
/// The assignment is a Lie algebra homomorphism into polynomial vector
/// fields; the grading element (0, −Id, 0) maps to the radial field x·∂.
inline PolyVec proj_vector_field(const GradedElement& g) {
  const Index m = g.m();
  Poly xi_dot_x(0);
  for (Index j = 0; j < m; ++j) xi_dot_x += g.xi(j) * Poly::variable(static_cast<std::size_t>(j));
  PolyVec field(m);
  for (Index i = 0; i < m; ++i) {
    Poly comp(-g.v(i));
    for (Index j = 0; j < m; ++j) comp -= g.A(i, j) * Poly::variable(static_cast<std::size_t>(j));
    comp += xi_dot_x * Poly::variable(static_cast<std::size_t>(i));
    field(i) = comp;
  }
  return field;
}

/// Jacobian matrix (∂_b X^a) of a polynomial vector field.
inline PolyMat jacobian(const PolyVec& field) {
  const Index m = field.size();
  PolyMat dx(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) dx(a, b) = field(a).derivative(static_cast<std::size_t>(b));
  return dx;
}

/// Module action with polynomial matrix argument: Σ_ab A_ab(x) ρ(E_ab).
inline PolyMat module_action_poly(const G0Module& mod, const PolyMat& a) {
  PolyMat out = PolyMat::Zero(mod.dim, mod.dim);
  for (int p = 0; p < mod.m; ++p)
    for (int q = 0; q < mod.m; ++q)
      if (!a(p, q).is_zero()) out += mod.generator(p, q).cast<Poly>() * a(p, q);
  return out;
}

/// Geometric Lie derivative of a symbol along a polynomial vector field:
/// transport of the coefficients minus the fiber action of the Jacobian.
inline PolySymbol lie_derivative(const PolySymbol& t, const PolyVec& field) {
  const SymbolSpace& sp = *t.space;
  const auto& deg = sp.degree(t.k);
  PolyVec out = PolyVec::Zero(deg.fiber.dim);
  for (Index f = 0; f < out.size(); ++f) {
    Poly acc(0);
    for (Index i = 0; i < field.size(); ++i) acc += field(i) * t.coeffs(f).derivative(static_cast<std::size_t>(i));
    out(f) = acc;
  }
  const PolyMat dx = jacobian(field);
  for (int p = 0; p < sp.m(); ++p)
    for (int q = 0; q < sp.m(); ++q)
      if (!dx(p, q).is_zero()) out -= dx(p, q) * PolyVec(deg.fiber.generator(p, q).cast<Poly>() * t.coeffs);
  return {t.space, t.k, std::move(out)};
}

inline PolySymbol lie_derivative(const PolySymbol& t, const GradedElement& g) {
  return lie_derivative(t, proj_vector_field(g));
}

inline SymbolSum lie_derivative(const SymbolSum& s, const GradedElement& g) {
  const PolyVec field = proj_vector_field(g);
  SymbolSum out = SymbolSum::zero(*s.space);
  for (const auto& [k, t] : s.parts) out.add(lie_derivative(t, field));
  return out;
}

// ---------------------------------------------------------------------------
// Differential operators with polynomial coefficients.
// ---------------------------------------------------------------------------

/// D(f) = Σ_β A_β(x) ∂^β f with A_β a dim_out×dim_in polynomial matrix.
struct PolyOperator {
  Index dim_in = 1, dim_out = 1;
  std::map<Mono, PolyMat> terms;

  static PolyOperator zero(Index dim_in, Index dim_out) { return {dim_in, dim_out, {}}; }

  void add_term(Mono beta, const PolyMat& a) {
    trim_mono(beta);
    auto it = terms.find(beta);
    if (it == terms.end()) it = terms.emplace(std::move(beta), PolyMat::Zero(dim_out, dim_in)).first;
    it->second += a;
    for (Index i = 0; i < it->second.rows(); ++i)
      for (Index j = 0; j < it->second.cols(); ++j)
        if (!it->second(i, j).is_zero()) return;
    terms.erase(it);
  }

  int order() const {
    int o = 0;
    for (const auto& [beta, a] : terms) o = std::max<int>(o, static_cast<int>(mono_degree(beta)));
    return o;
  }

  bool is_zero() const { return terms.empty(); }
};

inline PolyVec apply(const PolyOperator& d, const PolyVec& f) {
  if (f.size() != d.dim_in) throw std::invalid_argument("operator application: wrong argument dimension");
  PolyVec out = PolyVec::Zero(d.dim_out);
  for (const auto& [beta, a] : d.terms) {
    PolyVec df(f.size());
    for (Index i = 0; i < f.size(); ++i) df(i) = poly_derivative_multi(f(i), beta);
    out += a * df;
  }
  return out;
}

inline PolyOperator operator+(const PolyOperator& a, const PolyOperator& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out)
    throw std::invalid_argument("operator sum: mismatched dimensions");
  PolyOperator out = a;
  for (const auto& [beta, mat] : b.terms) out.add_term(beta, mat);
  return out;
}

inline PolyOperator operator-(const PolyOperator& a, const PolyOperator& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out)
    throw std::invalid_argument("operator difference: mismatched dimensions");
  PolyOperator out = a;
  for (const auto& [beta, mat] : b.terms) out.add_term(beta, PolyMat(-mat));
  return out;
}

inline PolyOperator operator*(const Rational& c, const PolyOperator& a) {
  PolyOperator out = PolyOperator::zero(a.dim_in, a.dim_out);
  if (c.is_zero()) return out;
  for (const auto& [beta, mat] : a.terms) out.add_term(beta, PolyMat(mat * Poly(c)));
  return out;
}

/// Composition (a ∘ b)(f) = a(b(f)), expanded with the multivariate Leibniz
/// rule: ∂^β (B ∂^γ f) = Σ_{μ≤β} C(β,μ) (∂^(β−μ) B) ∂^(μ+γ) f.
inline PolyOperator compose(const PolyOperator& a, const PolyOperator& b) {
  if (a.dim_in != b.dim_out) throw std::invalid_argument("operator composition: mismatched dimensions");
  PolyOperator out = PolyOperator::zero(b.dim_in, a.dim_out);
  for (const auto& [beta, amat] : a.terms)
    for (const auto& [gamma, bmat] : b.terms)
      for_each_submono(beta, [&](const Mono& mu) {
        const PolyMat db = mat_derivative_multi(bmat, mono_sub(beta, mu));
        bool nonzero = false;
        for (Index i = 0; i < db.rows() && !nonzero; ++i)
          for (Index j = 0; j < db.cols() && !nonzero; ++j) nonzero = !db(i, j).is_zero();
        if (!nonzero) return;
        out.add_term(mul_mono(mu, gamma), PolyMat((amat * db) * Poly(multi_binomial(beta, mu))));
      });
  return out;
}

/// First-order Lie derivative operator on V-valued functions:
/// f ↦ X·∂f − ρ(DX)f.
inline PolyOperator vector_lie_operator(const G0Module& v, const PolyVec& field) {
  PolyOperator op = PolyOperator::zero(v.dim, v.dim);
  const PolyMat id = PolyMat::Identity(v.dim, v.dim);
  for (Index j = 0; j < field.size(); ++j)
    if (!field(j).is_zero()) op.add_term(unit_mono(static_cast<std::size_t>(j)), PolyMat(id * field(j)));
  const PolyMat rho = module_action_poly(v, jacobian(field));
  op.add_term(Mono{}, PolyMat(-rho));
  return op;
}

/// Lie derivative of an operator: L_X(D) = L^(V₂)_X ∘ D − D ∘ L^(V₁)_X.
inline PolyOperator operator_lie_derivative(const PolyOperator& d, const G0Module& v1, const G0Module& v2,
                                            const PolyVec& field) {
  return compose(vector_lie_operator(v2, field), d) - compose(d, vector_lie_operator(v1, field));
}

// ---------------------------------------------------------------------------
// Affine symbol map and the conjugated action.
// ---------------------------------------------------------------------------

/// Affine quantization: e^α ⊗ E_(r,c) ↦ E_(r,c) ∂^α, coefficients carried
/// through unchanged (no factorial normalization).
inline PolyOperator q_aff(const PolySymbol& t) {
  const SymbolSpace& sp = *t.space;
  const auto& deg = sp.degree(t.k);
  const Index d1 = sp.source().dim, d2 = sp.target().dim, dh = sp.hom().dim;
  PolyOperator op = PolyOperator::zero(d1, d2);
  for (Index s = 0; s < static_cast<Index>(deg.monos.size()); ++s) {
    PolyMat a = PolyMat::Zero(d2, d1);
    bool nonzero = false;
    for (Index r = 0; r < d2; ++r)
      for (Index c = 0; c < d1; ++c) {
        const Poly& coef = t.coeffs(s * dh + r * d1 + c);
        if (!coef.is_zero()) {
          a(r, c) = coef;
          nonzero = true;
        }
      }
    if (nonzero) op.add_term(deg.monos[static_cast<std::size_t>(s)], a);
  }
  return op;
}

inline PolyOperator q_aff(const SymbolSum& s) {
  const SymbolSpace& sp = *s.space;
  PolyOperator op = PolyOperator::zero(sp.source().dim, sp.target().dim);
  for (const auto& [k, t] : s.parts) op = op + q_aff(t);
  return op;
}

/// Exact inverse of q_aff: reads each coefficient matrix A_β into the symbol
/// component of degree |β|.
inline SymbolSum q_aff_inv(const PolyOperator& d, const SymbolSpace& sp) {
  const Index d1 = sp.source().dim, d2 = sp.target().dim, dh = sp.hom().dim;
  if (d.dim_in != d1 || d.dim_out != d2)
    throw std::invalid_argument("q_aff_inv: operator dimensions do not match the symbol space");
  std::map<int, PolySymbol> parts;
  SymbolSum out = SymbolSum::zero(sp);
  for (const auto& [beta, a] : d.terms) {
    const int k = static_cast<int>(mono_degree(beta));
    const auto& deg = sp.degree(k);
    auto it = parts.find(k);
    if (it == parts.end()) it = parts.emplace(k, PolySymbol::zero(sp, k)).first;
    const Index s = deg.mono_index.at(beta);
    for (Index r = 0; r < d2; ++r)
      for (Index c = 0; c < d1; ++c) it->second.coeffs(s * dh + r * d1 + c) += a(r, c);
  }
  for (const auto& [k, t] : parts) out.add(t);
  return out;
}

/// Conjugated action on symbols: q_aff⁻¹ ∘ L^op ∘ q_aff along the fundamental
/// field of g.  For g in the affine part this equals the geometric Lie
/// derivative; for quadratic fields it additionally produces a component one
/// degree lower (the gamma_matrix correction).
inline SymbolSum curly_l(const PolySymbol& t, const GradedElement& g) {
  const SymbolSpace& sp = *t.space;
  const PolyVec field = proj_vector_field(g);
  return q_aff_inv(operator_lie_derivative(q_aff(t), sp.source(), sp.target(), field), sp);
}

inline SymbolSum curly_l(const SymbolSum& s, const GradedElement& g) {
  SymbolSum out = SymbolSum::zero(*s.space);
  for (const auto& [k, t] : s.parts) out = out + curly_l(t, g);
  return out;
}

/// Closed form of the degree-lowering correction of curly_l for a covector ξ:
/// the fiber map F_k → F_(k−1) with
///   e^α ⊗ A ↦ Σ_r α_r e^(α−δ_r) ⊗ A·ρ₁(e_r ξ + ξ_r Id)
///            − Σ_(r≤t) n_rt (ξ_t e^(α−δ_t) + ξ_r e^(α−δ_r)) ⊗ A,
/// where n_rt counts ordered slot pairs: α_r α_t for r < t, C(α_r, 2) doubled
/// into ξ_r-terms for r = t.  Constant in x; degree k must be ≥ 1.
inline Mat gamma_matrix(const SymbolSpace& sp, int k, const RowVec& xi) {
  if (k < 1) throw std::invalid_argument("gamma_matrix: needs degree >= 1");
  const auto& hi = sp.degree(k);
  const auto& lo = sp.degree(k - 1);
  const Index m = sp.m();
  const Index d1 = sp.source().dim, d2 = sp.target().dim, dh = sp.hom().dim;
  Mat out = Mat::Zero(lo.fiber.dim, hi.fiber.dim);

  // ρ₁(e_r ξ + ξ_r Id), one d1×d1 matrix per direction r.
  std::vector<Mat> rho1(static_cast<std::size_t>(m));
  for (Index r = 0; r < m; ++r) {
    Mat arg = Mat::Zero(m, m);
    for (Index j = 0; j < m; ++j) arg(r, j) = xi(j);
    arg += xi(r) * Mat::Identity(m, m);
    rho1[static_cast<std::size_t>(r)] = module_action(sp.source(), arg);
  }

  auto lo_index = [&](const Mono& alpha, Index r, Index row, Index col) {
    Mono target = alpha;
    target.resize(static_cast<std::size_t>(m), 0);
    target[static_cast<std::size_t>(r)] -= 1;
    trim_mono(target);
    return lo.mono_index.at(target) * dh + row * d1 + col;
  };

  for (Index s = 0; s < static_cast<Index>(hi.monos.size()); ++s) {
    const Mono& alpha = hi.monos[static_cast<std::size_t>(s)];
    for (Index row = 0; row < d2; ++row)
      for (Index col = 0; col < d1; ++col) {
        const Index in = s * dh + row * d1 + col;
        for (Index r = 0; r < m; ++r) {
          const std::uint32_t ar = mono_exp(alpha, static_cast<std::size_t>(r));
          if (ar == 0) continue;
          // Hom factor composes with ρ₁: E_(row,col)·M contributes M(col, c')
          // at hom position (row, c').
          const Mat& rho = rho1[static_cast<std::size_t>(r)];
          for (Index cp = 0; cp < d1; ++cp)
            if (!rho(col, cp).is_zero())
              out(lo_index(alpha, r, row, cp), in) += Rational(ar) * rho(col, cp);
          // Diagonal slot pairs (r, r).
          if (ar >= 2) {
            const Rational pairs = Rational(static_cast<long long>(ar) * (ar - 1), 2);
            if (!xi(r).is_zero()) out(lo_index(alpha, r, row, col), in) -= Rational(2) * pairs * xi(r);
          }
          // Off-diagonal slot pairs (r, t), counted once per unordered pair.
          for (Index t = r + 1; t < m; ++t) {
            const std::uint32_t at = mono_exp(alpha, static_cast<std::size_t>(t));
            if (at == 0) continue;
            const Rational pairs = Rational(static_cast<long long>(ar) * at);
            if (!xi(t).is_zero()) out(lo_index(alpha, t, row, col), in) -= pairs * xi(t);
            if (!xi(r).is_zero()) out(lo_index(alpha, r, row, col), in) -= pairs * xi(r);
          }
        }
      }
  }
  return out;
}

/// Apply a constant fiber map F_k → F_j to a symbol of degree k.
inline PolySymbol apply_fiber_map(const SymbolSpace& sp, int j, const Mat& map, const PolySymbol& t) {
  if (map.cols() != t.coeffs.size() || map.rows() != sp.fiber_dim(j))
    throw std::invalid_argument("apply_fiber_map: dimension mismatch");
  return {&sp, j, PolyVec(map.cast<Poly>() * t.coeffs)};
}

// ---------------------------------------------------------------------------
// JSON codecs.
// ---------------------------------------------------------------------------

/// {"k": k, "coeffs": {"<multi>|<row>,<col>": polynomial}} — the polynomial
/// value may be an object of monomial terms or, as a shorthand for constants,
/// a bare rational string / integer.
inline Json symbol_to_json(const PolySymbol& t) {
  const SymbolSpace& sp = *t.space;
  const auto& deg = sp.degree(t.k);
  const Index d1 = sp.source().dim, d2 = sp.target().dim, dh = sp.hom().dim;
  Json coeffs = Json::object();
  for (Index s = 0; s < static_cast<Index>(deg.monos.size()); ++s)
    for (Index r = 0; r < d2; ++r)
      for (Index c = 0; c < d1; ++c) {
        const Poly& p = t.coeffs(s * dh + r * d1 + c);
        if (p.is_zero()) continue;
        const std::string key = mono_key(deg.monos[static_cast<std::size_t>(s)], static_cast<std::size_t>(sp.m())) +
                                "|" + std::to_string(r) + "," + std::to_string(c);
        coeffs[key] = poly_to_json(p, static_cast<std::size_t>(sp.m()));
      }
  Json j = Json::object();
  j["k"] = t.k;
  j["coeffs"] = std::move(coeffs);
  return j;
}

inline PolySymbol symbol_from_json(const SymbolSpace& sp, const Json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("coeffs") || !j["k"].is_number_integer())
    throw std::invalid_argument("symbol: expected {\"k\": int, \"coeffs\": {...}}");
  const int k = j["k"].get<int>();
  if (k < 0) throw std::invalid_argument("symbol: negative degree");
  PolySymbol t = PolySymbol::zero(sp, k);
  const Index d1 = sp.source().dim, d2 = sp.target().dim;
  if (!j["coeffs"].is_object()) throw std::invalid_argument("symbol: \"coeffs\" must be an object");
  for (auto it = j["coeffs"].begin(); it != j["coeffs"].end(); ++it) {
    const std::string& key = it.key();
    const auto bar = key.find('|');
    if (bar == std::string::npos) throw std::invalid_argument("symbol key missing '|': " + key);
    const auto exps = parse_index_list(key.substr(0, bar));
    const auto homidx = parse_index_list(key.substr(bar + 1));
    if (static_cast<int>(exps.size()) != sp.m() || homidx.size() != 2)
      throw std::invalid_argument("bad symbol component key: " + key);
    Mono alpha(exps.begin(), exps.end());
    if (static_cast<int>(mono_degree(alpha)) != k)
      throw std::invalid_argument("symbol component degree differs from k: " + key);
    const Index row = static_cast<Index>(homidx[0]), col = static_cast<Index>(homidx[1]);
    if (row >= d2 || col >= d1) throw std::invalid_argument("symbol component out of range: " + key);
    const Poly p = it.value().is_object() ? json_to_poly(it.value()) : Poly(json_to_rational(it.value()));
    t.coeffs(sp.fiber_index(k, alpha, row, col)) += p;
  }
  return t;
}

inline Json symbol_sum_to_json(const SymbolSum& s) {
  Json parts = Json::object();
  for (const auto& [k, t] : s.parts) parts[std::to_string(k)] = symbol_to_json(t);
  Json j = Json::object();
  j["parts"] = std::move(parts);
  return j;
}

}  // namespace projquant
