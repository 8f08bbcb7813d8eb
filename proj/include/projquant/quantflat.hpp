#pragma once

// =============================================================================
// Flat equivariant quantization.
//
// A degree-k symbol T lying in one spectral block (eigenvalue α) extends
// uniquely to a mixed-degree symbol T̂ = T + T_{k−1} + … + T_0 on which the
// conjugated invariant acts by α.  Comparing degrees in 𝒞(T̂) = α·T̂ turns
// the construction into a downward recursion,
//
//     (C − α)·T_j = −N(T_{j+1}),
//
// solved blockwise: C is the constant fiber matrix Σ_b α_b P_b, so
// T_j = Σ_b P_b N(T_{j+1}) / (α − α_b).  The divisions are legal exactly when
// no lower block reachable through the degree drops shares α — the
// criticality verdict of `casimir`.  The quantization is the affine symbol
// map applied to T̂; equivariance of that assignment is the content the
// verification routines below check, never assume.
//
//   * FlatQuantizer     — cached engine (spectra, drop matrices, verdicts).
//   * lift              — the recursion for one block, with reachability
//                         certificates for every produced lower part.
//   * quantize_flat     — block-decompose, lift, read through q_aff.
//   * quantization_tables / apply_quantization_tables — the map in its
//                         normal form Q(T) = Σ_l A_l(∂^l T) with constant
//                         fiber matrices A_l.
//   * brute_force_quantization — independent oracle: solves the defining
//                         equivariance equations directly for the A_l,
//                         reporting uniqueness or an exact certificate.
//   * verify_equivariance — checks Q(L_g T) = 𝓛_g(Q(T)) on monomial
//                         spanning sets for all algebra generators.
// =============================================================================

#include "projquant/casimir.hpp"
#include "projquant/flatcalc.hpp"
#include "projquant/jsonio.hpp"
#include "projquant/liecore.hpp"
#include "projquant/linalg.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace projquant {

/// Thrown when a quantization is requested at a weight pair whose eigenvalue
/// collisions make the lift recursion unsolvable.
class CriticalPairError : public std::runtime_error {
 public:
  explicit CriticalPairError(CriticalityReport rep)
      : std::runtime_error("quantization undefined: the weight pair is critical at degree " +
                           std::to_string(rep.kmax)),
        report(std::move(rep)) {}
  CriticalityReport report;
};

struct LiftResult {
  std::size_t block = 0;
  Rational alpha;
  SymbolSum hat;
  /// For l = 1..k: whether every fiber coefficient of the degree-(k−l) part
  /// lies in the l-th iterated drop image of the origin block.  The theory
  /// says always true; recorded so tests assert it rather than trust it.
  std::vector<bool> level_membership;
};

inline Poly poly_of_mono(const Mono& mu) {
  Poly p(1);
  for (std::size_t v = 0; v < mu.size(); ++v)
    if (mu[v]) p *= Poly::monomial(v, mu[v]);
  return p;
}

inline Integer mono_factorial(const Mono& mu) {
  Integer f = 1;
  for (const std::uint32_t e : mu) f *= factorial(e);
  return f;
}

/// Falling-factorial coefficient: ∂^β x^ν = ff(ν,β)·x^{ν−β} for β ≤ ν.
inline Integer falling_factorial(const Mono& nu, const Mono& beta) {
  Integer f = 1;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const std::uint32_t n = i < nu.size() ? nu[i] : 0;
    for (std::uint32_t t = 0; t < beta[i]; ++t) f *= Integer(n - t);
  }
  return f;
}

/// Engine for repeated lifts over one symbol space and top degree: spectra,
/// drop matrices, criticality verdicts and tree families are computed once.
class FlatQuantizer {
 public:
  FlatQuantizer(const SymbolSpace& sp, int k) : sp_(&sp), k_(k), report_(criticality(sp, k)) {
    for (int j = 0; j <= k; ++j) spectra_.push_back(degree_spectrum(sp, j));
    for (int j = 1; j <= k; ++j) {
      std::vector<Mat> g;
      for (Index i = 0; i < sp.m(); ++i)
        g.push_back(gamma_matrix(sp, j, sp.duals().eps[static_cast<std::size_t>(i)].xi));
      drops_.push_back(std::move(g));  // drops_[j−1][i] acts on degree-j fibers
    }
  }

  const SymbolSpace& space() const { return *sp_; }
  int degree() const { return k_; }
  const CriticalityReport& report() const { return report_; }
  const DegreeSpectrum& spectrum(int j) const { return spectra_.at(static_cast<std::size_t>(j)); }

  bool block_critical(std::size_t s) const {
    for (const BlockVerdict& v : report_.verdicts)
      if (v.k == k_ && v.block == s) return v.critical;
    throw std::out_of_range("block_critical: no such block");
  }

  bool any_critical() const {
    for (const BlockVerdict& v : report_.verdicts)
      if (v.k == k_ && v.critical) return true;
    return false;
  }

  /// Degree-lowering operator with cached drop matrices.
  PolySymbol n_op(const PolySymbol& t) const {
    PolySymbol out = PolySymbol::zero(*sp_, t.k - 1);
    for (Index i = 0; i < sp_->m(); ++i)
      out = out + Rational(-2) * apply_fiber_map(*sp_, t.k - 1,
                                                 drops_[static_cast<std::size_t>(t.k - 1)][static_cast<std::size_t>(i)],
                                                 partial(t, static_cast<std::size_t>(i)));
    return out;
  }

  /// Eigenvector extension of a symbol lying in a single spectral block.
  LiftResult lift(const PolySymbol& t) const {
    if (t.space != sp_ || t.k != k_) throw std::invalid_argument("lift: symbol from a different space or degree");
    const DegreeSpectrum& top = spectra_[static_cast<std::size_t>(k_)];
    std::size_t block = top.blocks.size();
    for (std::size_t s = 0; s < top.blocks.size(); ++s)
      if ((apply_fiber_map(*sp_, k_, top.blocks[s].projector, t) - t).is_zero()) {
        block = s;
        break;
      }
    if (block == top.blocks.size())
      throw std::invalid_argument("lift: symbol does not lie in a single spectral block");
    if (block_critical(block)) throw CriticalPairError(report_);

    const Rational alpha = top.alphas[block];
    const TreeFamily& tf = tree(block);
    LiftResult out{block, alpha, SymbolSum::of(t), {}};
    PolySymbol cur = t;
    for (int j = k_ - 1; j >= 0; --j) {
      const PolySymbol rhs = n_op(cur);
      const DegreeSpectrum& low = spectra_[static_cast<std::size_t>(j)];
      PolySymbol next = PolySymbol::zero(*sp_, j);
      for (std::size_t b = 0; b < low.blocks.size(); ++b) {
        PolySymbol comp = apply_fiber_map(*sp_, j, low.blocks[b].projector, rhs);
        if (comp.is_zero()) continue;
        if (low.alphas[b] == alpha)
          throw std::logic_error("lift: reachable eigenvalue collision escaped the criticality verdict");
        next = next + (Rational(1) / (alpha - low.alphas[b])) * comp;
      }
      out.level_membership.push_back(in_level(tf, k_ - j, next));
      out.hat.add(next);
      cur = next;
    }
    return out;
  }

  /// Eigenvector extension of an arbitrary degree-k symbol: project onto the
  /// spectral blocks and lift each component with its own eigenvalue.
  SymbolSum hat(const PolySymbol& t) const {
    if (t.space != sp_ || t.k != k_) throw std::invalid_argument("hat: symbol from a different space or degree");
    SymbolSum out = SymbolSum::zero(*sp_);
    const DegreeSpectrum& top = spectra_[static_cast<std::size_t>(k_)];
    for (std::size_t s = 0; s < top.blocks.size(); ++s) {
      const PolySymbol comp = apply_fiber_map(*sp_, k_, top.blocks[s].projector, t);
      if (!comp.is_zero()) out = out + lift(comp).hat;
    }
    return out;
  }

  PolyOperator quantize(const PolySymbol& t) const { return q_aff(hat(t)); }

  /// Normal form of the map: constant fiber matrices A_l with
  /// Q(T) = Σ_l A_l(∂^l T); tables[l] has one column per (derivative
  /// monomial β, |β| = l; input fiber index c), laid out β-major.
  std::vector<Mat> quantization_tables() const {
    const Index fdk = sp_->fiber_dim(k_);
    std::vector<Mat> tables;
    tables.push_back(Mat::Identity(fdk, fdk));
    for (int l = 1; l <= k_; ++l) {
      const auto& monos = sp_->degree(l).monos;
      Mat a = Mat::Zero(sp_->fiber_dim(k_ - l), static_cast<Index>(monos.size()) * fdk);
      for (std::size_t bi = 0; bi < monos.size(); ++bi) {
        const Rational inv = Rational(1) / Rational(Integer(mono_factorial(monos[bi])));
        for (Index c = 0; c < fdk; ++c) {
          PolySymbol t = PolySymbol::zero(*sp_, k_);
          t.coeffs(c) = poly_of_mono(monos[bi]);
          const PolySymbol part = hat(t).part(k_ - l);
          const Index col = static_cast<Index>(bi) * fdk + c;
          for (Index r = 0; r < a.rows(); ++r) {
            if (!part.coeffs(r).is_constant())
              throw std::logic_error("quantization_tables: non-constant normal-form entry");
            a(r, col) = part.coeffs(r).constant_term() * inv;
          }
        }
      }
      tables.push_back(std::move(a));
    }
    return tables;
  }

 private:
  const TreeFamily& tree(std::size_t block) const {
    auto it = trees_.find(block);
    if (it == trees_.end()) it = trees_.emplace(block, tree_family(*sp_, k_, block)).first;
    return it->second;
  }

  bool in_level(const TreeFamily& tf, int level, const PolySymbol& part) const {
    const Mat& basis = tf.levels.at(static_cast<std::size_t>(level));
    // Collect the monomials appearing in any fiber coefficient, then test
    // each monomial's fiber vector against the level span.
    std::map<Mono, RowVec> columns;
    for (Index f = 0; f < part.coeffs.size(); ++f)
      for (const auto& [mono, c] : part.coeffs(f).terms()) {
        auto [it, fresh] = columns.try_emplace(mono, RowVec::Zero(part.coeffs.size()));
        (void)fresh;
        it->second(f) = c;
      }
    for (const auto& [mono, v] : columns)
      if (!in_row_span(basis, v)) return false;
    return true;
  }

  const SymbolSpace* sp_;
  int k_;
  CriticalityReport report_;
  std::vector<DegreeSpectrum> spectra_;
  std::vector<std::vector<Mat>> drops_;
  mutable std::map<std::size_t, TreeFamily> trees_;
};

inline LiftResult lift(const PolySymbol& t) { return FlatQuantizer(*t.space, t.k).lift(t); }

inline PolyOperator quantize_flat(const PolySymbol& t) { return FlatQuantizer(*t.space, t.k).quantize(t); }

inline std::vector<Mat> quantization_tables(const SymbolSpace& sp, int k) {
  return FlatQuantizer(sp, k).quantization_tables();
}

/// Evaluate a table family on a symbol: Σ_l A_l(∂^l T).
inline SymbolSum apply_quantization_tables(const SymbolSpace& sp, int k, const std::vector<Mat>& tables,
                                           const PolySymbol& t) {
  SymbolSum out = SymbolSum::of(t);
  const Index fdk = sp.fiber_dim(k);
  for (int l = 1; l < static_cast<int>(tables.size()); ++l) {
    const auto& monos = sp.degree(l).monos;
    PolySymbol part = PolySymbol::zero(sp, k - l);
    for (Index c = 0; c < fdk; ++c) {
      if (t.coeffs(c).is_zero()) continue;
      for (std::size_t bi = 0; bi < monos.size(); ++bi) {
        const Poly d = poly_derivative_multi(t.coeffs(c), monos[bi]);
        if (d.is_zero()) continue;
        const Index col = static_cast<Index>(bi) * fdk + c;
        for (Index r = 0; r < part.coeffs.size(); ++r)
          if (!tables[static_cast<std::size_t>(l)](r, col).is_zero())
            part.coeffs(r) += Poly(tables[static_cast<std::size_t>(l)](r, col)) * d;
      }
    }
    out.add(part);
  }
  return out;
}

inline Json tables_to_json(const SymbolSpace& sp, int k, const std::vector<Mat>& tables) {
  Json j;
  j["m"] = sp.m();
  j["k"] = k;
  j["rep1"] = sp.source_spec().str();
  j["rep2"] = sp.target_spec().str();
  j["delta"] = format_rational(sp.delta());
  Json by_order;
  for (std::size_t l = 0; l < tables.size(); ++l) by_order[std::to_string(l)] = mat_to_json(tables[l]);
  j["tables"] = std::move(by_order);
  return j;
}

// ---------------------------------------------------------------------------
// Equivariance verification.
// ---------------------------------------------------------------------------

using SymbolQuantization = std::function<SymbolSum(const PolySymbol&)>;

struct EquivarianceReport {
  bool passed = true;
  long checked = 0;
  Json counterexample;  // {"generator","symbol","defect"} for the first failure
};

/// Check Q(L_g T) = 𝓛_g(Q(T)) for every generator g and every monomial
/// symbol x^μ·f_c with |μ| ≤ coeff_degree_bound.  Both sides are linear in T
/// with bounded coefficient degrees, so the monomial spanning set decides
/// operator equality.
inline EquivarianceReport verify_equivariance(const SymbolSpace& sp, int k, const SymbolQuantization& q,
                                              int coeff_degree_bound,
                                              const std::vector<GradedElement>& generators = {}) {
  const std::vector<GradedElement> gens = generators.empty() ? graded_basis(sp.m()) : generators;
  EquivarianceReport rep;
  for (int d = 0; d <= coeff_degree_bound; ++d)
    for (const Mono& mu : monomials_of_degree(sp.m(), static_cast<std::uint32_t>(d)))
      for (Index c = 0; c < sp.fiber_dim(k); ++c) {
        PolySymbol t = PolySymbol::zero(sp, k);
        t.coeffs(c) = poly_of_mono(mu);
        const SymbolSum qt = q(t);
        for (const GradedElement& g : gens) {
          const SymbolSum defect = q(lie_derivative(t, g)) - curly_l(qt, g);
          ++rep.checked;
          if (!defect.is_zero()) {
            rep.passed = false;
            rep.counterexample = Json{{"generator", graded_to_json(g)},
                                      {"symbol", symbol_to_json(t)},
                                      {"defect", symbol_sum_to_json(defect)}};
            return rep;
          }
        }
      }
  return rep;
}

// ---------------------------------------------------------------------------
// Brute-force oracle.
// ---------------------------------------------------------------------------

struct BruteForceResult {
  SolveStatus status = SolveStatus::Unique;
  std::vector<Mat> tables;  // filled exactly when status == Unique
  Index unknowns = 0;
  Index rank = 0;
};

/// Solve the defining conditions of an equivariant quantization directly:
/// unknowns are the entries of the normal-form tables A_1..A_k (A_0 = Id is
/// the symbol-preservation condition), equations are the coordinates of
///   Q(L_g(x^μ f_c)) − 𝓛_g(Q(x^μ f_c)) = 0
/// for every g₀ and g₁ generator g and every monomial symbol with
/// |μ| ≤ degree_bound.  Translations are omitted: constant-coefficient
/// tables commute with ∂ on both sides identically, so their equations are
/// 0 = 0.  Independence from the lift: only q_aff-side actions (curly_l) and
/// derivative bookkeeping enter; no spectra, no recursion.
inline BruteForceResult brute_force_quantization(const SymbolSpace& sp, int k, int degree_bound) {
  const Index m = sp.m();
  const Index fdk = sp.fiber_dim(k);

  // Unknown layout: uid(l, row, β-index bi, input fiber c).
  std::vector<std::vector<Mono>> monos_l(static_cast<std::size_t>(k) + 1);
  std::vector<Index> offset(static_cast<std::size_t>(k) + 1, 0);
  Index total = 0;
  for (int l = 1; l <= k; ++l) {
    monos_l[static_cast<std::size_t>(l)] = sp.degree(l).monos;
    offset[static_cast<std::size_t>(l)] = total;
    total += sp.fiber_dim(k - l) * static_cast<Index>(monos_l[static_cast<std::size_t>(l)].size()) * fdk;
  }
  const auto uid = [&](int l, Index row, Index col) {
    const Index cols = static_cast<Index>(monos_l[static_cast<std::size_t>(l)].size()) * fdk;
    return offset[static_cast<std::size_t>(l)] + row * cols + col;
  };

  // graded_basis lists the m translations first; drop them and keep g₀ ⊕ g₁.
  const std::vector<GradedElement> all_gens = graded_basis(m);
  const std::vector<GradedElement> gens(all_gens.begin() + m, all_gens.end());

  // Cache 𝓛_g of the basis symbols x^ν e_r at each degree.
  std::map<std::tuple<std::size_t, int, Mono, Index>, SymbolSum> curly_cache;
  const auto curly_basis = [&](std::size_t gi, int deg, const Mono& nu, Index r) -> const SymbolSum& {
    const auto key = std::make_tuple(gi, deg, nu, r);
    auto it = curly_cache.find(key);
    if (it == curly_cache.end()) {
      PolySymbol b = PolySymbol::zero(sp, deg);
      b.coeffs(r) = poly_of_mono(nu);
      it = curly_cache.emplace(key, curly_l(SymbolSum::of(b), gens[gi])).first;
    }
    return it->second;
  };

  using Coord = std::tuple<int, Mono, Index>;  // (degree, monomial, fiber row)
  SparseRowSolver solver(total);

  for (std::size_t gi = 0; gi < gens.size(); ++gi) {
    for (int d = 0; d <= degree_bound; ++d)
      for (const Mono& mu : monomials_of_degree(m, static_cast<std::uint32_t>(d)))
        for (Index c = 0; c < fdk; ++c) {
          std::map<Coord, SparseRowSolver::SparseRow> rows;
          std::map<Coord, Rational> rhs;

          const auto add_concrete = [&](const SymbolSum& s, int sign) {
            // Move to the right-hand side: Σ coeff·u = −(concrete part).
            for (const auto& [deg, part] : s.parts)
              for (Index f = 0; f < part.coeffs.size(); ++f)
                for (const auto& [w, v] : part.coeffs(f).terms()) rhs[{deg, w, f}] -= Rational(sign) * v;
          };
          const auto add_unknown = [&](const Coord& coord, Index u, const Rational& v) {
            auto& row = rows[coord];
            auto [it, fresh] = row.try_emplace(u, v);
            if (!fresh) {
              it->second += v;
              if (it->second.is_zero()) row.erase(it);
            }
          };
          // Contributions of Q applied to a concrete symbol: the A_0 part is
          // concrete, the A_l parts are linear in the unknowns.  `post` maps
          // each unknown's basis-symbol contribution into coordinates,
          // identity for the Q(L_g T) side and 𝓛_g for the subtracted side.
          const auto add_q_of = [&](const PolySymbol& s, int sign, bool through_curly) {
            if (through_curly)
              add_concrete(curly_l(SymbolSum::of(s), gens[gi]), sign);
            else
              add_concrete(SymbolSum::of(s), sign);
            for (Index cc = 0; cc < s.coeffs.size(); ++cc)
              for (const auto& [nu, v] : s.coeffs(cc).terms())
                for (int l = 1; l <= k; ++l) {
                  const auto& monos = monos_l[static_cast<std::size_t>(l)];
                  for (std::size_t bi = 0; bi < monos.size(); ++bi) {
                    const Mono& beta = monos[bi];
                    if (!mono_leq(beta, nu)) continue;
                    const Rational factor = v * Rational(falling_factorial(nu, beta));
                    const Mono rest = mono_sub(nu, beta);
                    const Index col = static_cast<Index>(bi) * fdk + cc;
                    for (Index r = 0; r < sp.fiber_dim(k - l); ++r) {
                      const Index u = uid(l, r, col);
                      if (!through_curly) {
                        add_unknown({k - l, rest, r}, u, Rational(sign) * factor);
                      } else {
                        const SymbolSum& img = curly_basis(gi, k - l, rest, r);
                        for (const auto& [deg, part] : img.parts)
                          for (Index f = 0; f < part.coeffs.size(); ++f)
                            for (const auto& [w, q] : part.coeffs(f).terms())
                              add_unknown({deg, w, f}, u, Rational(sign) * factor * q);
                      }
                    }
                  }
                }
          };

          PolySymbol t = PolySymbol::zero(sp, k);
          t.coeffs(c) = poly_of_mono(mu);
          add_q_of(lie_derivative(t, gens[gi]), +1, /*through_curly=*/false);
          add_q_of(t, -1, /*through_curly=*/true);

          for (auto& [coord, row] : rows) {
            auto rit = rhs.find(coord);
            Rational b = rit == rhs.end() ? Rational(0) : rit->second;
            if (rit != rhs.end()) rhs.erase(rit);
            if (!row.empty() || !b.is_zero()) solver.add_row(std::move(row), std::move(b));
          }
          for (auto& [coord, b] : rhs)
            if (!b.is_zero()) solver.add_row({}, std::move(b));
        }
  }

  BruteForceResult out;
  out.unknowns = total;
  out.rank = solver.rank();
  out.status = solver.status();
  if (out.status == SolveStatus::Unique) {
    const Vec x = solver.solution();
    out.tables.push_back(Mat::Identity(fdk, fdk));
    for (int l = 1; l <= k; ++l) {
      const Index cols = static_cast<Index>(monos_l[static_cast<std::size_t>(l)].size()) * fdk;
      Mat a(sp.fiber_dim(k - l), cols);
      for (Index r = 0; r < a.rows(); ++r)
        for (Index col = 0; col < cols; ++col) a(r, col) = x(uid(l, r, col));
      out.tables.push_back(std::move(a));
    }
  }
  return out;
}

}  // namespace projquant
