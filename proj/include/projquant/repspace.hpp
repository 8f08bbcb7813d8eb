#pragma once

// =============================================================================
// Concrete finite-dimensional gl(m) modules.
//
// A module is stored as its dimension together with the matrices of the m²
// elementary generators E_ab; every other action (an arbitrary matrix, the
// sl(m) Casimir, duals, Hom and tensor constructions) is assembled from
// those.  The building blocks are the symmetric and exterior powers of the
// standard representation, twisted by a density weight w: the twist adds
// w·tr(A)·Id to the natural action, so the identity matrix acts on
// Sym^p ⊗ (weight w) as the scalar p + m·w.
//
// Bases are explicit and deterministically ordered: Sym^p is spanned by the
// degree-p monomials in the standard basis vectors (lexicographic, leading
// exponent first), Ext^p by the size-p index subsets (lexicographic).  All
// downstream code that needs to address individual fiber components relies
// on these orderings.
// =============================================================================

#include "projquant/linalg.hpp"
#include "projquant/polynomial.hpp"
#include "projquant/rational.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace projquant {

/// Exponent of variable r in a (trimmed) monomial.
inline std::uint32_t mono_exp(const Mono& e, std::size_t r) {
  return r < e.size() ? e[r] : 0;
}

/// All degree-p monomials in m variables, ordered lexicographically with the
/// first exponent decreasing fastest: for m=2, p=2 the order is
/// (2,0), (1,1), (0,2).  Monomials are trimmed like every other Mono.
inline std::vector<Mono> monomials_of_degree(int m, std::uint32_t p) {
  std::vector<Mono> out;
  Mono cur(static_cast<std::size_t>(m), 0);
  auto rec = [&](auto&& self, int var, std::uint32_t rem) -> void {
    if (var == m - 1) {
      cur[static_cast<std::size_t>(var)] = rem;
      Mono e = cur;
      trim_mono(e);
      out.push_back(std::move(e));
      return;
    }
    for (std::uint32_t d = rem + 1; d-- > 0;) {
      cur[static_cast<std::size_t>(var)] = d;
      self(self, var + 1, rem - d);
    }
  };
  if (m <= 0) throw std::invalid_argument("monomials_of_degree: need m >= 1");
  rec(rec, 0, p);
  return out;
}

/// All size-p subsets of {0, …, m-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets_of_size(int m, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(cur.size()) == p) {
      out.push_back(cur);
      return;
    }
    for (int i = next; i <= m - (p - static_cast<int>(cur.size())); ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  if (p < 0 || p > m) return out;
  rec(rec, 0);
  return out;
}

/// Names one of the module building blocks.  The CLI shorthand is
/// "trivial:w", "sym:p:w" or "ext:p:w" with w a rational density weight.
struct RepSpec {
  enum class Kind { Trivial, Sym, Ext };

  Kind kind = Kind::Trivial;
  int p = 0;
  Rational weight = 0;

  static RepSpec parse(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
      if (i == s.size() || s[i] == ':') {
        parts.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    RepSpec spec;
    if (parts.size() == 2 && parts[0] == "trivial") {
      spec.kind = Kind::Trivial;
      spec.weight = parse_rational(parts[1]);
      return spec;
    }
    if (parts.size() == 3 && (parts[0] == "sym" || parts[0] == "ext")) {
      spec.kind = parts[0] == "sym" ? Kind::Sym : Kind::Ext;
      try {
        std::size_t used = 0;
        spec.p = std::stoi(parts[1], &used);
        if (used != parts[1].size() || spec.p < 0) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw std::invalid_argument("bad representation power: " + parts[1]);
      }
      spec.weight = parse_rational(parts[2]);
      return spec;
    }
    throw std::invalid_argument("bad representation spec (want trivial:w, sym:p:w or ext:p:w): " + s);
  }

  std::string str() const {
    switch (kind) {
      case Kind::Trivial:
        return "trivial:" + format_rational(weight);
      case Kind::Sym:
        return "sym:" + std::to_string(p) + ":" + format_rational(weight);
      case Kind::Ext:
        return "ext:" + std::to_string(p) + ":" + format_rational(weight);
    }
    throw std::logic_error("unreachable");
  }

  Index dim(int m) const {
    switch (kind) {
      case Kind::Trivial:
        return 1;
      case Kind::Sym:
        return static_cast<Index>(binomial(static_cast<unsigned>(m + p - 1), static_cast<unsigned>(p)));
      case Kind::Ext:
        if (p > m) throw std::invalid_argument("exterior power beyond dimension: " + str());
        return static_cast<Index>(binomial(static_cast<unsigned>(m), static_cast<unsigned>(p)));
    }
    throw std::logic_error("unreachable");
  }

  /// Scalar by which the identity matrix acts: natural degree + m · weight.
  Rational id_scalar(int m) const { return Rational(p) + Rational(m) * weight; }
};

/// A gl(m) module in matrices: act[a*m + b] is the action of E_ab.
struct G0Module {
  int m = 0;
  Index dim = 0;
  std::vector<Mat> act;

  const Mat& generator(int a, int b) const { return act[static_cast<std::size_t>(a * m + b)]; }
  Mat& generator(int a, int b) { return act[static_cast<std::size_t>(a * m + b)]; }
};

inline G0Module make_zero_module(int m, Index dim) {
  G0Module mod;
  mod.m = m;
  mod.dim = dim;
  mod.act.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), Mat::Zero(dim, dim));
  return mod;
}

/// Action of an arbitrary m×m matrix A = Σ A_ab E_ab on the module.
inline Mat module_action(const G0Module& mod, const Mat& A) {
  Mat out = Mat::Zero(mod.dim, mod.dim);
  for (int a = 0; a < mod.m; ++a)
    for (int b = 0; b < mod.m; ++b)
      if (!A(a, b).is_zero()) out += A(a, b) * mod.generator(a, b);
  return out;
}

/// Weight-w trivial module: E_ab acts as w·δ_ab.
inline G0Module trivial_module(int m, const Rational& w) {
  G0Module mod = make_zero_module(m, 1);
  for (int a = 0; a < m; ++a) mod.generator(a, a)(0, 0) = w;
  return mod;
}

/// Sym^p of the standard representation, twisted by density weight w.  The
/// generators act as derivations on monomials: E_ab · e^α = α_b e^(α-δ_b+δ_a),
/// plus w·δ_ab on the diagonal.
inline G0Module sym_module(int m, int p, const Rational& w) {
  const std::vector<Mono> basis = monomials_of_degree(m, static_cast<std::uint32_t>(p));
  std::map<Mono, Index> index;
  for (Index i = 0; i < static_cast<Index>(basis.size()); ++i) index[basis[static_cast<std::size_t>(i)]] = i;

  G0Module mod = make_zero_module(m, static_cast<Index>(basis.size()));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Mat& g = mod.generator(a, b);
      for (Index j = 0; j < mod.dim; ++j) {
        const Mono& alpha = basis[static_cast<std::size_t>(j)];
        const std::uint32_t ab = mono_exp(alpha, static_cast<std::size_t>(b));
        if (ab > 0) {
          Mono target(alpha);
          target.resize(static_cast<std::size_t>(m), 0);
          target[static_cast<std::size_t>(b)] -= 1;
          target[static_cast<std::size_t>(a)] += 1;
          trim_mono(target);
          g(index.at(target), j) += Rational(ab);
        }
        if (a == b) g(j, j) += w;
      }
    }
  return mod;
}

/// Ext^p of the standard representation, twisted by density weight w.  Basis
/// vectors are wedges over sorted index sets; E_ab replaces a factor e_b by
/// e_a, with the sign of re-sorting, plus w·δ_ab on the diagonal.
inline G0Module ext_module(int m, int p, const Rational& w) {
  if (p > m) throw std::invalid_argument("exterior power beyond dimension");
  const std::vector<std::vector<int>> basis = subsets_of_size(m, p);
  std::map<std::vector<int>, Index> index;
  for (Index i = 0; i < static_cast<Index>(basis.size()); ++i) index[basis[static_cast<std::size_t>(i)]] = i;

  G0Module mod = make_zero_module(m, static_cast<Index>(basis.size()));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      Mat& g = mod.generator(a, b);
      for (Index j = 0; j < mod.dim; ++j) {
        const std::vector<int>& set = basis[static_cast<std::size_t>(j)];
        if (a == b) g(j, j) += w;
        const bool has_b = std::find(set.begin(), set.end(), b) != set.end();
        if (!has_b) continue;
        if (a == b) {
          g(j, j) += 1;
          continue;
        }
        if (std::find(set.begin(), set.end(), a) != set.end()) continue;  // repeated factor
        std::vector<int> target = set;
        *std::find(target.begin(), target.end(), b) = a;
        int sign = 1;  // parity of the insertion sort that restores order
        for (std::size_t u = 1; u < target.size(); ++u)
          for (std::size_t v = u; v > 0 && target[v - 1] > target[v]; --v) {
            std::swap(target[v - 1], target[v]);
            sign = -sign;
          }
        g(index.at(target), j) += Rational(sign);
      }
    }
  return mod;
}

inline G0Module build_module(int m, const RepSpec& spec) {
  switch (spec.kind) {
    case RepSpec::Kind::Trivial:
      return trivial_module(m, spec.weight);
    case RepSpec::Kind::Sym:
      return sym_module(m, spec.p, spec.weight);
    case RepSpec::Kind::Ext:
      return ext_module(m, spec.p, spec.weight);
  }
  throw std::logic_error("unreachable");
}

/// Contragredient module: generators act by -transpose.
inline G0Module dual_module(const G0Module& v) {
  G0Module mod = make_zero_module(v.m, v.dim);
  for (std::size_t g = 0; g < v.act.size(); ++g) mod.act[g] = -v.act[g].transpose();
  return mod;
}

/// Hom(V1, V2) with the commutator action ρ(A)Φ = ρ₂(A)Φ − Φρ₁(A).  A basis
/// element is the matrix unit with given (row, col); its linear index is
/// row·dim(V1) + col, matching the "row,col" component labels in file I/O.
inline G0Module hom_module(const G0Module& v1, const G0Module& v2) {
  const Index d1 = v1.dim, d2 = v2.dim;
  G0Module mod = make_zero_module(v1.m, d1 * d2);
  for (std::size_t g = 0; g < mod.act.size(); ++g) {
    const Mat &r1 = v1.act[g], &r2 = v2.act[g];
    Mat& out = mod.act[g];
    for (Index r = 0; r < d2; ++r)
      for (Index c = 0; c < d1; ++c) {
        const Index h = r * d1 + c;
        for (Index rp = 0; rp < d2; ++rp)
          if (!r2(rp, r).is_zero()) out(rp * d1 + c, h) += r2(rp, r);
        for (Index cp = 0; cp < d1; ++cp)
          if (!r1(c, cp).is_zero()) out(r * d1 + cp, h) -= r1(c, cp);
      }
  }
  return mod;
}

/// V1 ⊗ V2 with ρ = ρ₁⊗Id + Id⊗ρ₂; the index of u_i ⊗ w_j is i·dim(V2) + j.
inline G0Module tensor_module(const G0Module& v1, const G0Module& v2) {
  const Index d1 = v1.dim, d2 = v2.dim;
  G0Module mod = make_zero_module(v1.m, d1 * d2);
  for (std::size_t g = 0; g < mod.act.size(); ++g) {
    const Mat &r1 = v1.act[g], &r2 = v2.act[g];
    Mat& out = mod.act[g];
    for (Index i = 0; i < d1; ++i)
      for (Index j = 0; j < d2; ++j) {
        const Index t = i * d2 + j;
        for (Index ip = 0; ip < d1; ++ip)
          if (!r1(ip, i).is_zero()) out(ip * d2 + j, t) += r1(ip, i);
        for (Index jp = 0; jp < d2; ++jp)
          if (!r2(jp, j).is_zero()) out(i * d2 + jp, t) += r2(jp, j);
      }
  }
  return mod;
}

/// Scalar by which the identity matrix acts.  Throws std::domain_error if the
/// action is not scalar (it always is for the modules built here).
inline Rational id_scalar(const G0Module& mod) {
  const Mat action = module_action(mod, Mat::Identity(mod.m, mod.m));
  const Rational a = mod.dim > 0 ? action(0, 0) : Rational(0);
  if (action != Mat(a * Mat::Identity(mod.dim, mod.dim)))
    throw std::domain_error("id_scalar: identity does not act as a scalar");
  return a;
}

/// Shift parameter of a source/target weight pair: the difference of the
/// identity scalars of the two modules, divided by m.
inline Rational shift_delta(const RepSpec& from, const RepSpec& to, int m) {
  return (from.id_scalar(m) - to.id_scalar(m)) / Rational(m);
}

/// Casimir operator of sl(m) on the module, normalized against the Killing
/// form κ(X, Y) = 2m·tr(XY): C' = Σ ρ(x_i)ρ(x_i^♯) over a basis {x_i} of
/// sl(m) with κ-dual basis {x_i^♯}.  Off-diagonal units pair as
/// E_ab ↔ E_ba/(2m); the duals of the diagonal differences come from
/// inverting their Gram matrix.  The density weight never enters: sl(m)
/// elements are trace-free.
inline Mat sl_casimir_matrix(const G0Module& mod) {
  const int m = mod.m;
  Mat c = Mat::Zero(mod.dim, mod.dim);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b) c += mod.generator(a, b) * mod.generator(b, a) / Rational(2 * m);

  std::vector<Mat> h(static_cast<std::size_t>(m - 1));
  for (int j = 0; j + 1 < m; ++j) h[static_cast<std::size_t>(j)] = mod.generator(j, j) - mod.generator(j + 1, j + 1);
  Mat gram = Mat::Zero(m - 1, m - 1);
  for (int i = 0; i + 1 < m; ++i) {
    gram(i, i) = Rational(4 * m);
    if (i + 2 < m) gram(i, i + 1) = gram(i + 1, i) = Rational(-2 * m);
  }
  const Mat gram_inv = invert(gram);
  for (int i = 0; i + 1 < m; ++i)
    for (int j = 0; j + 1 < m; ++j)
      if (!gram_inv(i, j).is_zero())
        c += gram_inv(i, j) * (h[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(i)]);
  return c;
}

/// Spectral decomposition of the sl(m) Casimir on the module: eigenvalues
/// with their spectral projectors.  Every eigenvalue of C' on tensor products
/// of (twisted) Sym/Ext powers is a rational with denominator dividing 2m²,
/// which is what the eigensystem scan relies on.
inline std::vector<Eigenblock> sl_casimir_blocks(const G0Module& mod) {
  return rational_eigensystem(sl_casimir_matrix(mod), Integer(2 * mod.m * mod.m));
}

}  // namespace projquant
