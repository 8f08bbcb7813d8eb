#pragma once

// =============================================================================
// Quantization for an arbitrary torsion-free connection on R^m, exact in the
// connection coefficients.
//
// A connection enters as its symmetric Christoffel symbols with polynomial
// entries.  Two connections with the same unparametrized geodesics differ by
// a one-form shift Γ'^i_jk = Γ^i_jk + δ^i_j α_k + δ^i_k α_j, and everything
// built here depends only on that equivalence class: the class is first
// normalized to trace-free symbols Π (invariant under the shift) plus a
// curvature-trace tensor P, the unique choice for which the degree-0 part of
// the curvature has vanishing Ricci-type trace.
//
// Computations run on a partial trivialization R^m × R^m* of the structure
// bundle, with base coordinates x (polynomial variables 0..m−1) and fiber
// coordinates ξ (variables m..2m−1).  Sections and symbols lift to functions
// of (x, ξ); the canonical derivative along the frame direction e_r acts as
//
//   ∂_{x_r} + ξ̇(e_r)·∂_ξ − ρ(A_r) + slot transport,
//   A_r    = −Π_r − e_r ξ − ξ_r Id,
//   ξ̇(e_r) = −P_r + ξ Π_r + ξ_r ξ,
//
// where ρ is the value-module action and the slot transport redistributes
// previously created derivative slots:  [L G]_β += Σ_s β_s (A_r)_{ts} G_{β−δ_s+δ_t}.
// Iterating and symmetrizing gives exact jets; pairing a degree-k symbol lift
// against the k-jet yields the operator candidate, and the same eigenvector
// recursion as in the flat module — with the degree-lowering map built from
// these derivatives — produces the equivariant lift.  Reading the result back
// on the jet basis of polynomial arguments recovers an operator with
// polynomial coefficients; for the zero connection it coincides with the flat
// quantization, and shift-equivalent connections give identical operators.
// =============================================================================

#include "projquant/casimir.hpp"
#include "projquant/flatcalc.hpp"
#include "projquant/jsonio.hpp"
#include "projquant/quantflat.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace projquant {

// ---------------------------------------------------------------------------
// Connections and geodesic (shift) equivalence.
// ---------------------------------------------------------------------------

/// Torsion-free connection: gamma[i](j,k) is the coefficient of ∂_i in
/// ∇_{∂_j}∂_k, a polynomial in the base variables, symmetric in (j,k).
struct ProjConnection {
  int m = 0;
  std::vector<PolyMat> gamma;

  static ProjConnection zero(int m) {
    ProjConnection c;
    c.m = m;
    c.gamma.assign(static_cast<std::size_t>(m), PolyMat::Zero(m, m));
    return c;
  }
};

/// Throws unless the symbol array is well-shaped, symmetric in the lower
/// indices, and uses base variables only.
inline void validate_connection(const ProjConnection& c) {
  if (c.m < 1) throw std::invalid_argument("connection: dimension must be positive");
  if (c.gamma.size() != static_cast<std::size_t>(c.m))
    throw std::invalid_argument("connection: need one coefficient matrix per upper index");
  for (const PolyMat& g : c.gamma) {
    if (g.rows() != c.m || g.cols() != c.m)
      throw std::invalid_argument("connection: coefficient matrices must be m x m");
    for (Index j = 0; j < c.m; ++j)
      for (Index k = 0; k < c.m; ++k) {
        if (g(j, k) != g(k, j)) throw std::invalid_argument("connection: symbols must be symmetric");
        if (g(j, k).num_vars() > static_cast<std::size_t>(c.m))
          throw std::invalid_argument("connection: entries must depend on base variables only");
      }
  }
}

/// Γ'^i_jk = Γ^i_jk + δ^i_j α_k + δ^i_k α_j for a one-form α.
inline ProjConnection weyl_shift(const ProjConnection& c, const std::vector<Poly>& alpha) {
  if (alpha.size() != static_cast<std::size_t>(c.m))
    throw std::invalid_argument("weyl_shift: need one form component per dimension");
  ProjConnection out = c;
  for (Index i = 0; i < c.m; ++i)
    for (Index j = 0; j < c.m; ++j)
      for (Index k = 0; k < c.m; ++k) {
        if (i == j) out.gamma[static_cast<std::size_t>(i)](j, k) += alpha[static_cast<std::size_t>(k)];
        if (i == k) out.gamma[static_cast<std::size_t>(i)](j, k) += alpha[static_cast<std::size_t>(j)];
      }
  return out;
}

/// Verdict of the geodesic-equivalence test, with the witnessing one-form
/// when the two connections are equivalent.
struct WeylWitness {
  bool equivalent = false;
  std::vector<Poly> alpha;
};

/// Decides whether two connections differ by a one-form shift.  The only
/// candidate is forced by the traces, α_k = (Σ_l Γ'^l_lk − Σ_l Γ^l_lk)/(m+1),
/// and is then verified entrywise.
inline WeylWitness weyl_equivalent(const ProjConnection& a, const ProjConnection& b) {
  validate_connection(a);
  validate_connection(b);
  if (a.m != b.m) throw std::invalid_argument("weyl_equivalent: dimension mismatch");
  WeylWitness w;
  w.alpha.assign(static_cast<std::size_t>(a.m), Poly(0));
  for (Index k = 0; k < a.m; ++k) {
    Poly d(0);
    for (Index l = 0; l < a.m; ++l)
      d += b.gamma[static_cast<std::size_t>(l)](l, k) - a.gamma[static_cast<std::size_t>(l)](l, k);
    w.alpha[static_cast<std::size_t>(k)] = d / Rational(a.m + 1);
  }
  const ProjConnection shifted = weyl_shift(a, w.alpha);
  for (Index i = 0; i < a.m; ++i)
    for (Index j = 0; j < a.m; ++j)
      for (Index k = 0; k < a.m; ++k)
        if (shifted.gamma[static_cast<std::size_t>(i)](j, k) != b.gamma[static_cast<std::size_t>(i)](j, k)) {
          w.alpha.clear();
          return w;
        }
  w.equivalent = true;
  return w;
}

// ---------------------------------------------------------------------------
// Normalized structure data.
// ---------------------------------------------------------------------------

/// Shift-invariant data of a geodesic class: trace-free symbols pi[i](j,k)
/// and the curvature-trace tensor p(j,k).
struct CartanData {
  int m = 0;
  std::vector<PolyMat> pi;
  PolyMat p;

  static CartanData flat(int m) {
    CartanData cd;
    cd.m = m;
    cd.pi.assign(static_cast<std::size_t>(m), PolyMat::Zero(m, m));
    cd.p = PolyMat::Zero(m, m);
    return cd;
  }

  /// Π(e_j) as an m×m matrix: row i, column k holds Π^i_jk.
  PolyMat pi_matrix(Index j) const {
    PolyMat out(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index k = 0; k < m; ++k) out(i, k) = pi[static_cast<std::size_t>(i)](j, k);
    return out;
  }
};

/// Normalizes a connection: removes the trace with a one-form shift,
///   Π^i_jk = Γ^i_jk − (δ^i_j tr_k + δ^i_k tr_j)/(m+1),  tr_k = Σ_l Γ^l_lk,
/// then solves the trace condition m·P_kl + P_lk = −Ric_kl of the degree-0
/// curvature for the tensor P, where Ric is the Ricci-type trace of the
/// curvature of Π.  Shift-equivalent connections produce identical data.
inline CartanData normal_cartan(const ProjConnection& c) {
  validate_connection(c);
  const Index m = c.m;
  CartanData cd = CartanData::flat(c.m);

  std::vector<Poly> tr(static_cast<std::size_t>(m), Poly(0));
  for (Index k = 0; k < m; ++k)
    for (Index l = 0; l < m; ++l) tr[static_cast<std::size_t>(k)] += c.gamma[static_cast<std::size_t>(l)](l, k);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < m; ++k) {
        Poly v = c.gamma[static_cast<std::size_t>(i)](j, k);
        if (i == j) v -= tr[static_cast<std::size_t>(k)] / Rational(m + 1);
        if (i == k) v -= tr[static_cast<std::size_t>(j)] / Rational(m + 1);
        cd.pi[static_cast<std::size_t>(i)](j, k) = v;
      }

  // Ric_kl = Σ_i [∂_i Π_k − ∂_k Π_i + [Π_i, Π_k]]^i_l.
  PolyMat ric(m, m);
  for (Index k = 0; k < m; ++k) {
    const PolyMat pik = cd.pi_matrix(k);
    for (Index l = 0; l < m; ++l) {
      Poly v(0);
      for (Index i = 0; i < m; ++i) {
        const PolyMat pii = cd.pi_matrix(i);
        const PolyMat comm = PolyMat(pii * pik - pik * pii);
        v += pik(i, l).derivative(static_cast<std::size_t>(i)) -
             pii(i, l).derivative(static_cast<std::size_t>(k)) + comm(i, l);
      }
      ric(k, l) = v;
    }
  }
  // m·P_kl + P_lk = −Ric_kl  ⇒  P_kl = −(m·Ric_kl + Ric_lk)/(m² − 1).
  for (Index k = 0; k < m; ++k)
    for (Index l = 0; l < m; ++l)
      cd.p(k, l) = (ric(k, l) * Rational(-m) - ric(l, k)) / Rational(m * m - 1);
  return cd;
}

/// Graded value of the curvature two-form on a coordinate pair (∂_j, ∂_k).
struct GradedCurvature {
  PolyVec v;   // translation part (column) — vanishes for symmetric symbols
  PolyMat a;   // linear part
  PolyVec xi;  // covector part (stored as a column of components)
};

/// Ω(∂_j, ∂_k) = ∂_j ω_k − ∂_k ω_j + [ω_j, ω_k] for the local connection form
/// ω_j = (e_j, Π_j, P_j).
inline GradedCurvature curvature_component(const CartanData& cd, Index j, Index k) {
  const Index m = cd.m;
  const PolyMat pij = cd.pi_matrix(j), pik = cd.pi_matrix(k);
  GradedCurvature out;

  out.v = PolyVec::Zero(m);
  for (Index i = 0; i < m; ++i) out.v(i) = pij(i, k) - pik(i, j);

  out.a = PolyMat(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index l = 0; l < m; ++l)
      out.a(i, l) = pik(i, l).derivative(static_cast<std::size_t>(j)) -
                    pij(i, l).derivative(static_cast<std::size_t>(k));
  out.a += PolyMat(pij * pik - pik * pij);
  for (Index i = 0; i < m; ++i)
    for (Index l = 0; l < m; ++l) {
      if (i == j) out.a(i, l) += cd.p(k, l);
      if (i == k) out.a(i, l) -= cd.p(j, l);
      if (i == l) out.a(i, l) += cd.p(k, j) - cd.p(j, k);
    }

  out.xi = PolyVec::Zero(m);
  for (Index t = 0; t < m; ++t) {
    Poly v = cd.p(k, t).derivative(static_cast<std::size_t>(j)) -
             cd.p(j, t).derivative(static_cast<std::size_t>(k));
    for (Index l = 0; l < m; ++l) v += cd.p(j, l) * pik(l, t) - cd.p(k, l) * pij(l, t);
    out.xi(t) = v;
  }
  return out;
}

/// Checks the two normalization identities as exact polynomial statements:
/// the translation part of the curvature vanishes and the degree-0 part is
/// trace-free, Σ_i [Ω(∂_i, ∂_k)]^i_l = 0.
inline bool is_normal(const CartanData& cd) {
  const Index m = cd.m;
  std::vector<std::vector<GradedCurvature>> omega(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j)
    for (Index k = 0; k < m; ++k) omega[static_cast<std::size_t>(j)].push_back(curvature_component(cd, j, k));
  for (Index j = 0; j < m; ++j)
    for (Index k = 0; k < m; ++k)
      for (Index i = 0; i < m; ++i)
        if (!omega[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].v(i).is_zero()) return false;
  for (Index k = 0; k < m; ++k)
    for (Index l = 0; l < m; ++l) {
      Poly trace(0);
      for (Index i = 0; i < m; ++i) trace += omega[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].a(i, l);
      if (!trace.is_zero()) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Lifted functions on the partial trivialization.
// ---------------------------------------------------------------------------

/// Function on the trivialized bundle with values in a module attached to the
/// symbol space, plus a number of symmetrized derivative slots.  Components
/// are polynomials in (x, ξ), keyed by the slot multi-index; missing keys are
/// zero.  `degree` selects the value module: a symbol degree (≥ 0), or one of
/// the two section markers below.
struct LiftedFunction {
  static constexpr int kSourceValues = -1;
  static constexpr int kTargetValues = -2;

  const SymbolSpace* space = nullptr;
  int degree = kSourceValues;
  int slots = 0;
  std::map<Mono, PolyVec> comps;

  const G0Module& value_module() const {
    if (degree >= 0) return space->degree(degree).fiber;
    return degree == kSourceValues ? space->source() : space->target();
  }

  Index value_dim() const { return value_module().dim; }

  /// A lift descends to the base exactly when nothing depends on the fiber
  /// coordinates (variables m..2m−1).
  bool h_equivariant() const {
    for (const auto& [beta, comp] : comps)
      for (Index c = 0; c < comp.size(); ++c)
        if (comp(c).num_vars() > static_cast<std::size_t>(space->m())) return false;
    return true;
  }

  bool is_zero() const {
    for (const auto& [beta, comp] : comps)
      for (Index c = 0; c < comp.size(); ++c)
        if (!comp(c).is_zero()) return false;
    return true;
  }

  /// Component at a slot multi-index, zero when absent.
  PolyVec component(Mono beta) const {
    trim_mono(beta);
    auto it = comps.find(beta);
    return it == comps.end() ? PolyVec(PolyVec::Zero(value_dim())) : it->second;
  }

  void add_component(Mono beta, const PolyVec& v) {
    trim_mono(beta);
    auto it = comps.find(beta);
    if (it == comps.end())
      comps.emplace(std::move(beta), v);
    else
      it->second += v;
  }

  static LiftedFunction zero(const SymbolSpace& sp, int degree, int slots = 0) {
    LiftedFunction f;
    f.space = &sp;
    f.degree = degree;
    f.slots = slots;
    return f;
  }
};

inline void check_compatible(const LiftedFunction& a, const LiftedFunction& b, const char* what) {
  if (a.space != b.space || a.degree != b.degree || a.slots != b.slots)
    throw std::invalid_argument(std::string(what) + ": incompatible lifted functions");
}

inline LiftedFunction operator+(const LiftedFunction& a, const LiftedFunction& b) {
  check_compatible(a, b, "lifted sum");
  LiftedFunction out = a;
  for (const auto& [beta, comp] : b.comps) out.add_component(beta, comp);
  return out;
}

inline LiftedFunction operator-(const LiftedFunction& a, const LiftedFunction& b) {
  check_compatible(a, b, "lifted difference");
  LiftedFunction out = a;
  for (const auto& [beta, comp] : b.comps) out.add_component(beta, PolyVec(-comp));
  return out;
}

inline LiftedFunction operator*(const Rational& s, const LiftedFunction& a) {
  LiftedFunction out = a;
  for (auto& [beta, comp] : out.comps) comp *= Poly(s);
  return out;
}

/// Constant-in-ξ lift of a polynomial symbol.
inline LiftedFunction lift_symbol(const PolySymbol& t) {
  LiftedFunction f = LiftedFunction::zero(*t.space, t.k);
  f.comps[Mono{}] = t.coeffs;
  return f;
}

/// Constant-in-ξ lift of a source-type section (argument of the operators).
inline LiftedFunction lift_section(const SymbolSpace& sp, const PolyVec& values) {
  if (values.size() != sp.source().dim)
    throw std::invalid_argument("lift_section: wrong number of components");
  LiftedFunction f = LiftedFunction::zero(sp, LiftedFunction::kSourceValues);
  f.comps[Mono{}] = values;
  return f;
}

/// Value on the base: substitutes ξ = 0 into a slotless lift.
inline PolyVec restrict_to_base(const LiftedFunction& f) {
  if (f.slots != 0) throw std::invalid_argument("restrict_to_base: slotless lifts only");
  const std::size_t m = static_cast<std::size_t>(f.space->m());
  PolyVec out = PolyVec::Zero(f.value_dim());
  const PolyVec comp = f.component(Mono{});
  for (Index c = 0; c < comp.size(); ++c) {
    Poly kept;
    for (const auto& [e, coef] : comp(c).terms()) {
      bool base_only = true;
      for (std::size_t i = m; i < e.size(); ++i)
        if (e[i] != 0) {
          base_only = false;
          break;
        }
      if (base_only) kept += poly_of_mono(e) * coef;
    }
    out(c) = kept;
  }
  return out;
}

/// Symbol whose coefficients are the base restriction of a symbol-valued lift.
inline PolySymbol restrict_to_base_symbol(const LiftedFunction& f) {
  if (f.degree < 0) throw std::invalid_argument("restrict_to_base_symbol: symbol-valued lifts only");
  return {f.space, f.degree, restrict_to_base(f)};
}

// ---------------------------------------------------------------------------
// The canonical derivative and exact jets.
// ---------------------------------------------------------------------------

/// A_r(x, ξ) = −Π_r − e_r ξ − ξ_r Id: the vertical compensation attached to
/// the canonical derivative along e_r.
inline PolyMat vertical_field(const CartanData& cd, Index r) {
  const Index m = cd.m;
  PolyMat a = PolyMat::Zero(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < m; ++k) {
      Poly v = -cd.pi[static_cast<std::size_t>(i)](r, k);
      if (i == r) v -= Poly::monomial(static_cast<std::size_t>(m + k));
      if (i == k) v -= Poly::monomial(static_cast<std::size_t>(m + r));
      a(i, k) = v;
    }
  return a;
}

/// ξ̇(e_r)_t = −P_rt + (ξ Π_r)_t + ξ_r ξ_t: the fiber drift of the canonical
/// derivative along e_r.
inline Poly fiber_drift(const CartanData& cd, Index r, Index t) {
  const Index m = cd.m;
  Poly v = -cd.p(r, t);
  for (Index l = 0; l < m; ++l)
    v += Poly::monomial(static_cast<std::size_t>(m + l)) * cd.pi[static_cast<std::size_t>(l)](r, t);
  v += Poly::monomial(static_cast<std::size_t>(m + r)) * Poly::monomial(static_cast<std::size_t>(m + t));
  return v;
}

/// Derivative of a lifted function along the canonical lift of e_r:
/// base transport, fiber drift, value-module compensation, slot transport.
inline LiftedFunction omega_lie(const CartanData& cd, const LiftedFunction& g, Index r) {
  const Index m = cd.m;
  if (g.space->m() != m) throw std::invalid_argument("omega_lie: dimension mismatch");
  const PolyMat a = vertical_field(cd, r);
  const PolyMat act = module_action_poly(g.value_module(), a);
  std::vector<Poly> drift(static_cast<std::size_t>(m));
  for (Index t = 0; t < m; ++t) drift[static_cast<std::size_t>(t)] = fiber_drift(cd, r, t);

  LiftedFunction out = LiftedFunction::zero(*g.space, g.degree, g.slots);
  for (const auto& [beta, comp] : g.comps) {
    PolyVec v(comp.size());
    for (Index c = 0; c < comp.size(); ++c) {
      Poly w = comp(c).derivative(static_cast<std::size_t>(r));
      for (Index t = 0; t < m; ++t)
        w += drift[static_cast<std::size_t>(t)] * comp(c).derivative(static_cast<std::size_t>(m + t));
      v(c) = w;
    }
    v -= PolyVec(act * comp);
    // Slot transport gathers from shifted indices:
    //   [L g]_β += Σ_s β_s (A_r)_{ts} g_{β−δ_s+δ_t}.
    for (Index s = 0; s < m; ++s) {
      const std::uint32_t bs = mono_exp(beta, static_cast<std::size_t>(s));
      if (bs == 0) continue;
      for (Index t = 0; t < m; ++t) {
        if (a(t, s).is_zero()) continue;
        Mono src = beta;
        src.resize(static_cast<std::size_t>(m), 0);
        src[static_cast<std::size_t>(s)] -= 1;
        src[static_cast<std::size_t>(t)] += 1;
        trim_mono(src);
        auto it = g.comps.find(src);
        if (it == g.comps.end()) continue;
        for (Index c = 0; c < comp.size(); ++c) v(c) += a(t, s) * it->second(c) * Rational(bs);
      }
    }
    out.add_component(beta, v);
  }
  return out;
}

/// One symmetrized derivative slot:  H_β = (1/(j+1)) Σ_r β_r [L_r G]_{β−δ_r}
/// for |β| = j+1.
inline LiftedFunction invariant_diff(const CartanData& cd, const LiftedFunction& g) {
  const Index m = cd.m;
  std::vector<LiftedFunction> lg;
  lg.reserve(static_cast<std::size_t>(m));
  for (Index r = 0; r < m; ++r) lg.push_back(omega_lie(cd, g, r));

  LiftedFunction out = LiftedFunction::zero(*g.space, g.degree, g.slots + 1);
  for (const Mono& beta : monomials_of_degree(cd.m, static_cast<std::uint32_t>(g.slots) + 1)) {
    PolyVec acc = PolyVec::Zero(g.value_dim());
    for (Index r = 0; r < m; ++r) {
      const std::uint32_t br = mono_exp(beta, static_cast<std::size_t>(r));
      if (br == 0) continue;
      Mono lower = beta;
      lower.resize(static_cast<std::size_t>(m), 0);
      lower[static_cast<std::size_t>(r)] -= 1;
      trim_mono(lower);
      acc += PolyVec(lg[static_cast<std::size_t>(r)].component(lower) * Rational(br));
    }
    out.comps[beta] = PolyVec(acc / Rational(g.slots + 1));
  }
  return out;
}

inline LiftedFunction iterated_invariant_diff(const CartanData& cd, const LiftedFunction& g, int k) {
  if (k < 0) throw std::invalid_argument("iterated_invariant_diff: negative order");
  LiftedFunction out = g;
  for (int j = 0; j < k; ++j) out = invariant_diff(cd, out);
  return out;
}

/// Pairs a degree-k symbol lift against the k-jet of a section lift:
/// out(row) = Σ_{α,c} T_(α,row,c) · Jet_α(c).  No combinatorial weights: the
/// symbol stores plain monomial coefficients and the jet stores plain
/// symmetrized values, matching the flat convention e^α ⊗ E ↦ E ∂^α.
inline LiftedFunction q_omega(const CartanData& cd, const LiftedFunction& t, const LiftedFunction& f) {
  if (t.degree < 0 || t.slots != 0) throw std::invalid_argument("q_omega: symbol-valued slotless lift expected");
  if (f.degree != LiftedFunction::kSourceValues || f.slots != 0)
    throw std::invalid_argument("q_omega: source-valued slotless lift expected");
  const SymbolSpace& sp = *t.space;
  const Index d1 = sp.source().dim, d2 = sp.target().dim, dh = sp.hom().dim;
  const LiftedFunction jet = iterated_invariant_diff(cd, f, t.degree);
  const PolyVec tc = t.component(Mono{});

  LiftedFunction out = LiftedFunction::zero(sp, LiftedFunction::kTargetValues);
  PolyVec acc = PolyVec::Zero(d2);
  const auto& deg = sp.degree(t.degree);
  for (Index s = 0; s < static_cast<Index>(deg.monos.size()); ++s) {
    auto it = jet.comps.find(deg.monos[static_cast<std::size_t>(s)]);
    if (it == jet.comps.end()) continue;
    for (Index row = 0; row < d2; ++row)
      for (Index c = 0; c < d1; ++c) acc(row) += tc(s * dh + row * d1 + c) * it->second(c);
  }
  out.comps[Mono{}] = acc;
  return out;
}

// ---------------------------------------------------------------------------
// Vertical action, degree lowering, and the invariant on lifts.
// ---------------------------------------------------------------------------

/// Derivative along the vertical fiber direction h: Σ_j h_j ∂_{ξ_j}.
inline LiftedFunction lifted_vertical_derivative(const LiftedFunction& f, const RowVec& h) {
  const Index m = f.space->m();
  if (h.size() != m) throw std::invalid_argument("lifted_vertical_derivative: wrong covector size");
  LiftedFunction out = LiftedFunction::zero(*f.space, f.degree, f.slots);
  for (const auto& [beta, comp] : f.comps) {
    PolyVec v(comp.size());
    for (Index c = 0; c < comp.size(); ++c) {
      Poly w;
      for (Index j = 0; j < m; ++j) {
        if (h(j) == Rational(0)) continue;
        w += comp(c).derivative(static_cast<std::size_t>(m + j)) * h(j);
      }
      v(c) = w;
    }
    out.comps[beta] = std::move(v);
  }
  return out;
}

/// Constant degree-lowering fiber map applied to a symbol-valued lift.
inline LiftedFunction lifted_gamma(const LiftedFunction& t, const RowVec& h) {
  if (t.degree < 1 || t.slots != 0)
    throw std::invalid_argument("lifted_gamma: slotless symbol-valued lift of degree >= 1 expected");
  const Mat g = gamma_matrix(*t.space, t.degree, h);
  LiftedFunction out = LiftedFunction::zero(*t.space, t.degree - 1);
  out.comps[Mono{}] = PolyVec(g.cast<Poly>() * t.component(Mono{}));
  return out;
}

/// Degree-lowering part of the invariant: −2 Σ_i γ(ε^i) L_{e_i}.
inline LiftedFunction n_omega(const CartanData& cd, const LiftedFunction& t) {
  if (t.degree < 1 || t.slots != 0)
    throw std::invalid_argument("n_omega: slotless symbol-valued lift of degree >= 1 expected");
  const SymbolSpace& sp = *t.space;
  LiftedFunction out = LiftedFunction::zero(sp, t.degree - 1);
  PolyVec acc = PolyVec::Zero(sp.fiber_dim(t.degree - 1));
  for (Index i = 0; i < sp.m(); ++i) {
    const LiftedFunction l = omega_lie(cd, t, i);
    const Mat g = gamma_matrix(sp, t.degree, sp.duals().eps[static_cast<std::size_t>(i)].xi);
    acc += PolyVec(g.cast<Poly>() * l.component(Mono{})) * Rational(-2);
  }
  out.comps[Mono{}] = acc;
  return out;
}

/// Mixed-degree families of slotless symbol-valued lifts.
struct LiftedSum {
  const SymbolSpace* space = nullptr;
  std::map<int, LiftedFunction> parts;

  static LiftedSum zero(const SymbolSpace& sp) { return {&sp, {}}; }

  void add_part(const LiftedFunction& f) {
    auto it = parts.find(f.degree);
    if (it == parts.end())
      parts.emplace(f.degree, f);
    else
      it->second = it->second + f;
  }

  bool is_zero() const {
    for (const auto& [k, f] : parts)
      if (!f.is_zero()) return false;
    return true;
  }

  bool h_equivariant() const {
    for (const auto& [k, f] : parts)
      if (!f.h_equivariant()) return false;
    return true;
  }
};

inline LiftedSum operator+(const LiftedSum& a, const LiftedSum& b) {
  LiftedSum out = a;
  for (const auto& [k, f] : b.parts) out.add_part(f);
  return out;
}

inline LiftedSum operator-(const LiftedSum& a, const LiftedSum& b) {
  LiftedSum out = a;
  for (const auto& [k, f] : b.parts) out.add_part(Rational(-1) * f);
  return out;
}

/// The invariant on lifts: spectral part on each degree plus the
/// degree-lowering part of the degree above.
inline LiftedSum curved_casimir(const CartanData& cd, const LiftedSum& s) {
  const SymbolSpace& sp = *s.space;
  LiftedSum out = LiftedSum::zero(sp);
  for (const auto& [k, f] : s.parts) {
    LiftedFunction cf = LiftedFunction::zero(sp, k);
    cf.comps[Mono{}] = PolyVec(casimir_fiber_matrix(sp, k).cast<Poly>() * f.component(Mono{}));
    out.add_part(cf);
    if (k >= 1) out.add_part(n_omega(cd, f));
  }
  return out;
}

/// Vertical action combined with the degree-lowering correction: sends the
/// degree-k part to L_h(part) in degree k plus γ(h)(part) in degree k−1.
inline LiftedSum lifted_h_action(const LiftedSum& s, const RowVec& h) {
  LiftedSum out = LiftedSum::zero(*s.space);
  for (const auto& [k, f] : s.parts) {
    out.add_part(lifted_vertical_derivative(f, h));
    if (k >= 1) out.add_part(lifted_gamma(f, h));
  }
  return out;
}

/// Commutator of the invariant with the h-action, in section coordinates.
/// Away from the section the h-action conjugates its generator along the
/// compensating frame motion, so composing the invariant after the h-action
/// picks up the derivative of that conjugation: in the frame direction e_i
/// the generator moves at rate ḣ_i = −h·A_i(x, ξ), contributing
///   −2 Σ_i γ(ε^i) [ L_{ḣ_i} + γ(ḣ_i) ]
/// with ξ-dependent coefficient rows.  With that term accounted for, the
/// commutator vanishes identically on every lift; the difference is returned
/// so the identity is a runnable check.
inline LiftedSum commute_defect(const CartanData& cd, const RowVec& h, const LiftedSum& s) {
  const SymbolSpace& sp = *s.space;
  const Index m = cd.m;
  LiftedSum out = lifted_h_action(curved_casimir(cd, s), h) - curved_casimir(cd, lifted_h_action(s, h));
  for (const auto& [j, part] : s.parts) {
    if (j < 1) continue;
    for (Index i = 0; i < m; ++i) {
      const PolyMat ai = vertical_field(cd, i);
      std::vector<Poly> hdot(static_cast<std::size_t>(m));
      for (Index t = 0; t < m; ++t) {
        Poly v(0);
        for (Index a = 0; a < m; ++a) v -= h(a) * ai(a, t);
        hdot[static_cast<std::size_t>(t)] = v;
      }
      const Mat geps = gamma_matrix(sp, j, sp.duals().eps[static_cast<std::size_t>(i)].xi);

      LiftedFunction vt = LiftedFunction::zero(sp, j - 1, part.slots);
      for (const auto& [beta, vec] : part.comps) {
        PolyVec dv = PolyVec::Zero(vec.size());
        for (Index t = 0; t < m; ++t)
          for (Index c = 0; c < vec.size(); ++c)
            dv(c) += hdot[static_cast<std::size_t>(t)] * vec(c).derivative(static_cast<std::size_t>(m + t));
        vt.add_component(beta, PolyVec(geps.cast<Poly>() * dv));
      }
      if (!vt.is_zero()) out.add_part(Rational(2) * vt);

      if (j >= 2) {
        const Mat geps1 = gamma_matrix(sp, j - 1, sp.duals().eps[static_cast<std::size_t>(i)].xi);
        std::vector<Mat> gt(static_cast<std::size_t>(m));
        for (Index t = 0; t < m; ++t) {
          RowVec et = RowVec::Zero(m);
          et(t) = 1;
          gt[static_cast<std::size_t>(t)] = gamma_matrix(sp, j, et);
        }
        LiftedFunction gg = LiftedFunction::zero(sp, j - 2, part.slots);
        for (const auto& [beta, vec] : part.comps) {
          PolyVec acc = PolyVec::Zero(sp.fiber_dim(j - 1));
          for (Index t = 0; t < m; ++t)
            acc += hdot[static_cast<std::size_t>(t)] * PolyVec(gt[static_cast<std::size_t>(t)].cast<Poly>() * vec);
          gg.add_component(beta, PolyVec(geps1.cast<Poly>() * acc));
        }
        if (!gg.is_zero()) out.add_part(Rational(2) * gg);
      }
    }
  }
  return out;
}

inline LiftedFunction q_omega(const CartanData& cd, const LiftedSum& s, const LiftedFunction& f) {
  LiftedFunction out = LiftedFunction::zero(*s.space, LiftedFunction::kTargetValues);
  out.comps[Mono{}] = PolyVec::Zero(s.space->target().dim);
  for (const auto& [k, part] : s.parts) out = out + q_omega(cd, part, f);
  return out;
}

// ---------------------------------------------------------------------------
// Equivariance defect.
// ---------------------------------------------------------------------------

/// Both sides of the vertical equivariance identity, computed independently
/// for a covector direction h:
///   LHS = L_h(Q(T)(f)) − Q(T)(L_h f),
///   RHS = Q(L_h T)(f) + Q(γ(h) T)(f),
/// returned as LHS − RHS.  The identity holds exactly — for any connection
/// and any (possibly ξ-dependent) symbol lift — when f is an equivariant
/// section lift, which is therefore required.
inline LiftedFunction equivariance_defect(const CartanData& cd, const RowVec& h, const LiftedFunction& t,
                                          const LiftedFunction& f) {
  if (!f.h_equivariant())
    throw std::invalid_argument("equivariance_defect: section lift must be equivariant");
  const LiftedFunction qtf = q_omega(cd, t, f);
  const LiftedFunction lhs =
      lifted_vertical_derivative(qtf, h) - q_omega(cd, t, lifted_vertical_derivative(f, h));
  LiftedFunction rhs = q_omega(cd, lifted_vertical_derivative(t, h), f);
  if (t.degree >= 1) rhs = rhs + q_omega(cd, lifted_gamma(t, h), f);
  return lhs - rhs;
}

inline LiftedFunction equivariance_defect(const CartanData& cd, const RowVec& h, const LiftedSum& s,
                                          const LiftedFunction& f) {
  LiftedFunction out = LiftedFunction::zero(*s.space, LiftedFunction::kTargetValues);
  out.comps[Mono{}] = PolyVec::Zero(s.space->target().dim);
  for (const auto& [k, part] : s.parts) out = out + equivariance_defect(cd, h, part, f);
  return out;
}

// ---------------------------------------------------------------------------
// Curved lift and quantization.
// ---------------------------------------------------------------------------

/// Solves the eigenvector recursion on lifts, block by block: the top part is
/// the ξ-independent lift of the symbol and each lower part solves
/// (C − α) T_{j−1} = −N(T_j), dividing blockwise by α − α_b.  Lower parts are
/// genuinely ξ-dependent in general — even for the flat data — but restrict
/// at ξ = 0 to the flat lift when the data is flat.  Throws CriticalPairError
/// when a populated block is critical for the weights.
inline LiftedSum curved_lift(const CartanData& cd, const PolySymbol& t) {
  const SymbolSpace& sp = *t.space;
  if (cd.m != sp.m()) throw std::invalid_argument("curved_lift: dimension mismatch");
  const int k = t.k;
  const CriticalityReport report = criticality(sp, k);
  std::vector<DegreeSpectrum> spectra;
  spectra.reserve(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) spectra.push_back(degree_spectrum(sp, j));

  LiftedSum out = LiftedSum::zero(sp);
  const auto& top = spectra[static_cast<std::size_t>(k)];
  for (std::size_t s = 0; s < top.blocks.size(); ++s) {
    const PolySymbol ts = apply_fiber_map(sp, k, top.blocks[s].projector, t);
    bool empty = true;
    for (Index c = 0; c < ts.coeffs.size() && empty; ++c) empty = ts.coeffs(c).is_zero();
    if (empty) continue;
    for (const BlockVerdict& v : report.verdicts)
      if (v.k == k && v.block == s && v.critical) throw CriticalPairError(report);
    const Rational alpha = top.alphas[s];

    LiftedFunction cur = lift_symbol(ts);
    out.add_part(cur);
    for (int j = k; j >= 1; --j) {
      const LiftedFunction n = n_omega(cd, cur);
      const auto& lower = spectra[static_cast<std::size_t>(j) - 1];
      LiftedFunction next = LiftedFunction::zero(sp, j - 1);
      PolyVec acc = PolyVec::Zero(sp.fiber_dim(j - 1));
      for (std::size_t b = 0; b < lower.blocks.size(); ++b) {
        const PolyVec piece = PolyVec(lower.blocks[b].projector.cast<Poly>() * n.component(Mono{}));
        if (alpha == lower.alphas[b]) {
          for (Index c = 0; c < piece.size(); ++c)
            if (!piece(c).is_zero())
              throw std::logic_error("curved_lift: resonant component survived a non-critical block");
          continue;
        }
        acc += PolyVec(piece / (alpha - lower.alphas[b]));
      }
      next.comps[Mono{}] = acc;
      out.add_part(next);
      cur = std::move(next);
    }
  }
  return out;
}

/// Quantization attached to a connection: normalizes the geodesic class,
/// lifts the symbol, pairs against exact jets, and reads the resulting
/// operator back on the jet basis x^β v_c.  Every output of the pairing must
/// descend to the base; that invariant is checked and a violation reports an
/// internal error.  Shift-equivalent connections yield identical operators,
/// and the zero connection reproduces the flat quantization.
inline PolyOperator quantize_curved(const ProjConnection& conn, const PolySymbol& t) {
  const SymbolSpace& sp = *t.space;
  validate_connection(conn);
  if (conn.m != sp.m()) throw std::invalid_argument("quantize_curved: dimension mismatch");
  const CartanData cd = normal_cartan(conn);
  const LiftedSum hat = curved_lift(cd, t);

  const Index d1 = sp.source().dim, d2 = sp.target().dim;
  PolyOperator op = PolyOperator::zero(d1, d2);
  std::vector<Mono> basis;
  for (int j = 0; j <= t.k; ++j)
    for (const Mono& beta : sp.degree(j).monos) basis.push_back(beta);

  // images[b][c] = Σ_j Q(hat_j)(x^β v_c), a target-valued x-polynomial.
  std::map<Mono, std::vector<PolyVec>> images;
  for (const Mono& beta : basis) {
    std::vector<PolyVec> cols;
    cols.reserve(static_cast<std::size_t>(d1));
    for (Index c = 0; c < d1; ++c) {
      PolyVec arg = PolyVec::Zero(d1);
      arg(c) = poly_of_mono(beta);
      const LiftedFunction out = q_omega(cd, hat, lift_section(sp, arg));
      if (!out.h_equivariant())
        throw std::logic_error("quantize_curved: operator value failed to descend to the base");
      cols.push_back(out.component(Mono{}));
    }
    images.emplace(beta, std::move(cols));
  }

  // Triangular readback: A_β = (1/β!) (image_β − Σ_{β' < β} A_{β'} ff(β, β') x^{β−β'}).
  std::map<Mono, PolyMat> tables;
  for (const Mono& beta : basis) {
    PolyMat a(d2, d1);
    for (Index c = 0; c < d1; ++c) {
      PolyVec rem = images.at(beta)[static_cast<std::size_t>(c)];
      for (const auto& [bp, ap] : tables) {
        if (!mono_leq(bp, beta) || bp == beta) continue;
        const Poly factor = poly_of_mono(mono_sub(beta, bp)) * Rational(falling_factorial(beta, bp));
        for (Index r = 0; r < d2; ++r) rem(r) -= ap(r, c) * factor;
      }
      const Rational inv_fact = Rational(1) / Rational(mono_factorial(beta));
      for (Index r = 0; r < d2; ++r) a(r, c) = rem(r) * inv_fact;
    }
    tables.emplace(beta, std::move(a));
  }
  for (auto& [beta, a] : tables) op.add_term(beta, a);
  return op;
}

// ---------------------------------------------------------------------------
// JSON codecs.
// ---------------------------------------------------------------------------

/// {"m": 2, "gamma": {"i,j,k": polynomial}} listing nonzero entries with
/// j <= k (symmetry fills the rest on decode).
inline Json connection_to_json(const ProjConnection& c) {
  validate_connection(c);
  Json entries = Json::object();
  for (Index i = 0; i < c.m; ++i)
    for (Index j = 0; j < c.m; ++j)
      for (Index k = j; k < c.m; ++k) {
        const Poly& p = c.gamma[static_cast<std::size_t>(i)](j, k);
        if (p.is_zero()) continue;
        entries[std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k)] =
            poly_to_json(p, static_cast<std::size_t>(c.m));
      }
  return Json{{"m", c.m}, {"gamma", entries}};
}

inline ProjConnection json_to_connection(const Json& j) {
  if (!j.is_object() || !j.contains("m") || !j["m"].is_number_integer())
    throw std::invalid_argument("connection: need an object with integer \"m\"");
  const int m = j["m"].get<int>();
  if (m < 1) throw std::invalid_argument("connection: dimension must be positive");
  ProjConnection c = ProjConnection::zero(m);
  if (j.contains("gamma")) {
    if (!j["gamma"].is_object()) throw std::invalid_argument("connection: \"gamma\" must be an object");
    for (auto it = j["gamma"].begin(); it != j["gamma"].end(); ++it) {
      const Mono idx = parse_index_list(it.key());
      if (idx.size() != 3) throw std::invalid_argument("connection: entry keys must be \"i,j,k\"");
      const Index i = idx[0], a = idx[1], b = idx[2];
      if (i >= m || a >= m || b >= m) throw std::invalid_argument("connection: entry index out of range");
      const Poly p = it.value().is_object() ? json_to_poly(it.value()) : Poly(json_to_rational(it.value()));
      c.gamma[static_cast<std::size_t>(i)](a, b) = p;
      c.gamma[static_cast<std::size_t>(i)](b, a) = p;
    }
  }
  validate_connection(c);
  return c;
}

/// {"dim_in": ..., "dim_out": ..., "order": ..., "terms": {"β-key": [[poly]]}}
/// with coefficient polynomials in the base variables.
inline Json poly_operator_to_json(const PolyOperator& d, std::size_t nvars) {
  Json terms = Json::object();
  for (const auto& [beta, a] : d.terms) {
    Json rows = Json::array();
    for (Index r = 0; r < a.rows(); ++r) {
      Json row = Json::array();
      for (Index c = 0; c < a.cols(); ++c) row.push_back(poly_to_json(a(r, c), nvars));
      rows.push_back(std::move(row));
    }
    terms[mono_key(beta, nvars)] = std::move(rows);
  }
  return Json{{"dim_in", d.dim_in}, {"dim_out", d.dim_out}, {"order", d.order()}, {"terms", terms}};
}

}  // namespace projquant
