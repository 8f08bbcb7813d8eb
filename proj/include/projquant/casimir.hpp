#pragma once

// =============================================================================
// Quadratic invariant operators on symbol spaces and resonance analysis.
//
// Two operators drive the whole construction:
//
//   * casimir_direct — the quadratic invariant of the full graded algebra,
//     acting on symbols through geometric Lie derivatives along fundamental
//     fields.  Written against the dual bases of the grading it reads
//       C = 2 Σ_i L_(ε^i) L_(e_i) − ½ L_E + (1/2m) L_E² + Σ_j L_(h_j) L_(h_j*).
//     On a degree-k symbol it acts fiberwise and constantly: on each spectral
//     block of the sl(m) Casimir C' with eigenvalue c' it is the scalar
//       α = a(a+m)/(2m) + (m/(m+1))·c',
//     where a is the scalar by which the identity acts on the fiber.  Both
//     forms are implemented; tests pin them against each other.
//
//   * curly_casimir — the same invariant for the conjugated (operator-side)
//     action.  It differs from C by the degree-lowering term
//       N(T) = −2 Σ_i γ(ε^i)(∂_i T),
//     the only place the corrections γ enter quadratically-ordered sums.
//
// A quantization map inverts (curly_casimir − α) degree by degree, which is
// possible exactly when no lower-degree block shares the eigenvalue α.  The
// resonance analysis below computes, in closed form, the shift parameters δ
// at which such collisions happen: eigenvalue differences are linear in δ,
// so each block pair contributes one critical value.
// =============================================================================

#include "projquant/flatcalc.hpp"
#include "projquant/jsonio.hpp"
#include "projquant/liecore.hpp"
#include "projquant/linalg.hpp"
#include "projquant/repspace.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace projquant {

/// Quadratic invariant acting on a symbol through Lie derivatives.
inline PolySymbol casimir_direct(const PolySymbol& t) {
  const SymbolSpace& sp = *t.space;
  const DualBasisFamily& d = sp.duals();
  const Index m = sp.m();

  PolySymbol out = PolySymbol::zero(sp, t.k);
  for (Index i = 0; i < m; ++i)
    out = out + Rational(2) * lie_derivative(lie_derivative(t, d.e[static_cast<std::size_t>(i)]),
                                             d.eps[static_cast<std::size_t>(i)]);
  const PolySymbol et = lie_derivative(t, d.E);
  out = out - Rational(1, 2) * et;
  out = out + Rational(1, 2 * m) * lie_derivative(et, d.E);
  for (std::size_t j = 0; j < d.h.size(); ++j)
    out = out + lie_derivative(lie_derivative(t, d.hstar[j]), d.h[j]);
  return out;
}

/// Spectral data of a symbol degree: the sl(m) Casimir blocks of the fiber
/// together with the full invariant's eigenvalue α on each block.
struct DegreeSpectrum {
  Rational identity_scalar;
  std::vector<Eigenblock> blocks;
  std::vector<Rational> alphas;
};

inline Rational alpha_eigenvalue(int m, const Rational& identity_scalar, const Rational& cprime) {
  return identity_scalar * (identity_scalar + Rational(m)) / Rational(2 * m) +
         Rational(m) * cprime / Rational(m + 1);
}

inline DegreeSpectrum degree_spectrum(const SymbolSpace& sp, int k) {
  const auto& deg = sp.degree(k);
  DegreeSpectrum spec;
  spec.identity_scalar = deg.identity_scalar;
  spec.blocks = sl_casimir_blocks(deg.fiber);
  for (const Eigenblock& b : spec.blocks)
    spec.alphas.push_back(alpha_eigenvalue(sp.m(), spec.identity_scalar, b.eigenvalue));
  return spec;
}

/// The constant fiber matrix by which the invariant acts on degree-k symbols:
/// Σ_s α_s P_s over the spectral blocks.
inline Mat casimir_fiber_matrix(const SymbolSpace& sp, int k) {
  const DegreeSpectrum spec = degree_spectrum(sp, k);
  Mat out = Mat::Zero(sp.fiber_dim(k), sp.fiber_dim(k));
  for (std::size_t s = 0; s < spec.blocks.size(); ++s) out += spec.alphas[s] * spec.blocks[s].projector;
  return out;
}

/// Degree-lowering part of the conjugated invariant:
/// N(T) = −2 Σ_i γ(ε^i)(∂_i T), mapping degree k to degree k−1.
inline PolySymbol n_operator(const PolySymbol& t) {
  const SymbolSpace& sp = *t.space;
  if (t.k < 1) throw std::invalid_argument("n_operator: needs degree >= 1");
  PolySymbol out = PolySymbol::zero(sp, t.k - 1);
  for (Index i = 0; i < sp.m(); ++i) {
    const Mat gm = gamma_matrix(sp, t.k, sp.duals().eps[static_cast<std::size_t>(i)].xi);
    out = out + Rational(-2) * apply_fiber_map(sp, t.k - 1, gm, partial(t, static_cast<std::size_t>(i)));
  }
  return out;
}

/// Conjugated invariant on mixed-degree symbols: C on each part plus N of the
/// part one degree up.
inline SymbolSum curly_casimir(const SymbolSum& s) {
  SymbolSum out = SymbolSum::zero(*s.space);
  for (const auto& [k, t] : s.parts) {
    out.add(casimir_direct(t));
    if (k >= 1) out.add(n_operator(t));
  }
  return out;
}

/// Iterated degree drops [T, N T, N² T, …] down to degree 0; the l-th entry
/// carries the order-(k−l) seed of any lift of T.
inline std::vector<PolySymbol> n_tower(const PolySymbol& t) {
  std::vector<PolySymbol> tower{t};
  while (tower.back().k >= 1) tower.push_back(n_operator(tower.back()));
  return tower;
}

// ---------------------------------------------------------------------------
// Resonance analysis.
// ---------------------------------------------------------------------------

/// One eigenvalue collision: block `top_block` at the top degree meets block
/// `low_block` at `low_degree` when the shift parameter equals `delta`.
struct Resonance {
  int top_degree = 0;
  int low_degree = 0;
  std::size_t top_block = 0;
  std::size_t low_block = 0;
  Rational delta;
};

/// All shift parameters at which the degree-k inversion can fail, for the
/// representation *structure* of the space (weights enter eigenvalues only
/// through δ, so each block pair gives one critical δ: the eigenvalue
/// difference α_k,s(δ) − α_j,b(δ) = (k−j)(k+j+m−2mδ)/(2m) + (m/(m+1))Δc'
/// is linear in δ with slope −(k−j) ≠ 0).
inline std::vector<Resonance> resonances(const SymbolSpace& sp, int k) {
  const int m = sp.m();
  std::vector<std::vector<Eigenblock>> blocks(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) blocks[static_cast<std::size_t>(j)] = sl_casimir_blocks(sp.degree(j).fiber);

  std::vector<Resonance> out;
  for (int j = 0; j < k; ++j)
    for (std::size_t s = 0; s < blocks[static_cast<std::size_t>(k)].size(); ++s)
      for (std::size_t b = 0; b < blocks[static_cast<std::size_t>(j)].size(); ++b) {
        const Rational dc =
            blocks[static_cast<std::size_t>(k)][s].eigenvalue - blocks[static_cast<std::size_t>(j)][b].eigenvalue;
        // Solve (k−j)(k+j+m−2mδ)/(2m) + (m/(m+1))·dc = 0 for δ.
        const Rational delta = Rational(k + j + m) / Rational(2 * m) +
                               Rational(m) * dc / (Rational(m + 1) * Rational(k - j));
        out.push_back({k, j, s, b, delta});
      }
  return out;
}

/// Distinct critical shift parameters for degree-k quantization, ascending.
inline std::vector<Rational> critical_deltas(const SymbolSpace& sp, int k) {
  std::vector<Rational> out;
  for (const Resonance& r : resonances(sp, k)) out.push_back(r.delta);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Whether the space's own shift parameter resonates at degree k.
inline bool is_critical(const SymbolSpace& sp, int k) {
  for (const Resonance& r : resonances(sp, k))
    if (r.delta == sp.delta()) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Tree subspaces and the exact criticality verdict.
//
// The resonance analysis above lists every shift parameter at which two
// eigenvalues *could* collide.  A collision only obstructs the inversion if
// the lower block is actually reachable from the top block by iterated
// degree drops — the "tree" of γ(g₁)-images.  The report below restricts the
// eigenvalue comparison to those reachable subspaces, which is the exact
// criterion for the lift recursion to be solvable.
// ---------------------------------------------------------------------------

inline bool is_zero_matrix(const Mat& a) {
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (!a(i, j).is_zero()) return false;
  return true;
}

/// Reduce a stack of row vectors to an independent row basis (RREF rows).
inline Mat row_space(Mat rows) {
  const Index r = static_cast<Index>(rref_in_place(rows).size());
  return rows.topRows(r);
}

/// Whether v lies in the span of the rows of `basis` (basis need not be
/// reduced).
inline bool in_row_span(const Mat& basis, const RowVec& v) {
  Mat stacked(basis.rows() + 1, basis.cols());
  stacked.topRows(basis.rows()) = basis;
  stacked.row(basis.rows()) = v;
  return rank(stacked) == rank(basis);
}

/// Iterated degree-drop images of one spectral block: levels[l] spans the
/// subspace of the degree-(k−l) fiber reachable from block s by l
/// applications of γ along g₁ directions.  Level 0 is the block itself.
struct TreeFamily {
  int k = 0;
  std::size_t block = 0;
  std::vector<Mat> levels;
};

inline TreeFamily tree_family(const SymbolSpace& sp, int k, std::size_t block) {
  const DegreeSpectrum spec = degree_spectrum(sp, k);
  TreeFamily tf{k, block, {}};
  // The block is the *column* space of its projector (the projectors are not
  // symmetric); store it as rows.
  tf.levels.push_back(row_space(spec.blocks.at(block).projector.transpose()));
  for (int l = 0; l < k; ++l) {
    const Mat& cur = tf.levels.back();
    const int deg = k - l;
    Mat images(cur.rows() * sp.m(), sp.fiber_dim(deg - 1));
    Index row = 0;
    for (Index j = 0; j < sp.m(); ++j) {
      // γ is linear in the g₁ direction, so the raw covector units span all
      // of γ(g₁) applied to the level.
      const Mat g = gamma_matrix(sp, deg, sp.duals().eps_raw[static_cast<std::size_t>(j)].xi);
      for (Index r = 0; r < cur.rows(); ++r) images.row(row++) = (g * cur.row(r).transpose()).transpose();
    }
    tf.levels.push_back(row_space(std::move(images)));
  }
  return tf;
}

struct CriticalityHit {
  int level = 0;           // how many degree drops below the origin
  std::size_t low_block = 0;
  Rational eigenvalue;     // equals the origin's α by construction
};

struct BlockVerdict {
  int k = 0;
  std::size_t block = 0;
  Rational alpha;
  bool critical = false;
  std::vector<CriticalityHit> hits;
};

struct CriticalityReport {
  int m = 0;
  int kmax = 0;
  RepSpec rep1, rep2;
  Rational delta;
  std::vector<BlockVerdict> verdicts;
  bool any_critical = false;
};

/// Exact criticality verdict for every block of every degree up to kmax:
/// a block (k,s) is critical when its eigenvalue α reappears in the spectrum
/// of the invariant restricted to some tree level l ≥ 1 — equivalently, when
/// a lower block with the same α meets the tree (its projector does not kill
/// the level).
inline CriticalityReport criticality(const SymbolSpace& sp, int kmax) {
  CriticalityReport rep;
  rep.m = static_cast<int>(sp.m());
  rep.kmax = kmax;
  rep.rep1 = sp.source_spec();
  rep.rep2 = sp.target_spec();
  rep.delta = sp.delta();
  for (int k = 0; k <= kmax; ++k) {
    const DegreeSpectrum spec = degree_spectrum(sp, k);
    for (std::size_t s = 0; s < spec.blocks.size(); ++s) {
      BlockVerdict v;
      v.k = k;
      v.block = s;
      v.alpha = spec.alphas[s];
      const TreeFamily tf = tree_family(sp, k, s);
      for (int l = 1; l <= k; ++l) {
        const Mat& level = tf.levels[static_cast<std::size_t>(l)];
        if (level.rows() == 0) continue;
        const DegreeSpectrum low = degree_spectrum(sp, k - l);
        for (std::size_t b = 0; b < low.blocks.size(); ++b) {
          if (low.alphas[b] != v.alpha) continue;
          if (!is_zero_matrix(level * low.blocks[b].projector.transpose()))
            v.hits.push_back({l, b, low.alphas[b]});
        }
      }
      v.critical = !v.hits.empty();
      rep.any_critical = rep.any_critical || v.critical;
      rep.verdicts.push_back(std::move(v));
    }
  }
  return rep;
}

inline Json criticality_report_to_json(const CriticalityReport& rep) {
  Json j;
  j["m"] = rep.m;
  j["kmax"] = rep.kmax;
  j["rep1"] = rep.rep1.str();
  j["rep2"] = rep.rep2.str();
  j["delta"] = format_rational(rep.delta);
  j["any_critical"] = rep.any_critical;
  Json verdicts = Json::array();
  for (const BlockVerdict& v : rep.verdicts) {
    Json jv;
    jv["k"] = v.k;
    jv["block"] = v.block;
    jv["alpha"] = format_rational(v.alpha);
    jv["critical"] = v.critical;
    Json hits = Json::array();
    for (const CriticalityHit& h : v.hits)
      hits.push_back(Json{{"level", h.level}, {"low_block", h.low_block}, {"eigenvalue", format_rational(h.eigenvalue)}});
    jv["hits"] = std::move(hits);
    verdicts.push_back(std::move(jv));
  }
  j["verdicts"] = std::move(verdicts);
  return j;
}

/// Fiber-level commutator identity tying the invariant to the degree drops:
/// with the grading conventions used throughout this library,
///   [C, γ(h)] = 2 Σ_i γ(ε^i) ρ([h, e_i])   for every h ∈ g₁,
/// as maps from the degree-k fiber to the degree-(k−1) fiber (ρ is the g₀
/// fiber action).  Returns LHS − RHS; tests assert it vanishes.
inline Mat gamma_commutator_defect(const SymbolSpace& sp, int k, const RowVec& h) {
  const Mat g = gamma_matrix(sp, k, h);
  Mat lhs = casimir_fiber_matrix(sp, k - 1) * g - g * casimir_fiber_matrix(sp, k);
  const GradedElement hx = GradedElement::from_xi(h);
  for (Index i = 0; i < sp.m(); ++i) {
    const GradedElement br = bracket(hx, GradedElement::basis_v(sp.m(), i));
    lhs -= Rational(2) * gamma_matrix(sp, k, sp.duals().eps[static_cast<std::size_t>(i)].xi) *
           module_action(sp.degree(k).fiber, br.A);
  }
  return lhs;
}

}  // namespace projquant
