#pragma once

// =============================================================================
// Exact linear algebra over the rational scalar, on Eigen dense containers.
//
// Row reduction uses first-nonzero pivoting (not largest-|pivot|), which is
// the right choice over ℚ: every comparison is exact, and magnitude-chasing
// only inflates intermediate numerators.  On top of RREF this header provides
// rank / solve / kernel / inverse, matrix minimal polynomials, and the
// rational eigendecomposition (eigenvalues plus spectral projectors) used by
// the fiber Casimir machinery.  A sparse incremental solver supports the
// large structured systems assembled by the brute-force quantization oracle.
// =============================================================================

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "projquant/rational.hpp"

namespace projquant {

using Mat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RowVec = Eigen::Matrix<Rational, 1, Eigen::Dynamic>;
using Index = Eigen::Index;

/// In-place reduced row echelon form; returns the pivot columns in order.
inline std::vector<Index> rref_in_place(Mat& a) {
  std::vector<Index> pivots;
  const Index rows = a.rows(), cols = a.cols();
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index p = -1;
    for (Index i = r; i < rows; ++i)
      if (a(i, c) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r) a.row(p).swap(a.row(r));
    const Rational inv = Rational(1) / a(r, c);
    for (Index j = c; j < cols; ++j) a(r, j) *= inv;
    for (Index i = 0; i < rows; ++i) {
      if (i == r || a(i, c) == 0) continue;
      const Rational f = a(i, c);
      for (Index j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline Index rank(Mat a) { return static_cast<Index>(rref_in_place(a).size()); }

/// Column-space basis test: does `v` lie in the span of the columns of `basis`?
inline bool in_column_span(const Mat& basis, const Vec& v) {
  if (v.size() == 0 || v.isZero()) return true;
  Mat aug(basis.rows(), basis.cols() + 1);
  aug.leftCols(basis.cols()) = basis;
  aug.col(basis.cols()) = v;
  return rank(aug) == rank(basis);
}

/// Basis of the kernel of `a`, returned as columns (may have zero columns).
inline Mat kernel_basis(Mat a) {
  const Index cols = a.cols();
  const std::vector<Index> pivots = rref_in_place(a);
  std::vector<Index> free_cols;
  {
    std::size_t pi = 0;
    for (Index c = 0; c < cols; ++c) {
      if (pi < pivots.size() && pivots[pi] == c)
        ++pi;
      else
        free_cols.push_back(c);
    }
  }
  Mat k = Mat::Zero(cols, static_cast<Index>(free_cols.size()));
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    k(free_cols[f], static_cast<Index>(f)) = 1;
    for (std::size_t pi = 0; pi < pivots.size(); ++pi)
      k(pivots[pi], static_cast<Index>(f)) = -a(static_cast<Index>(pi), free_cols[f]);
  }
  return k;
}

enum class SolveStatus { Unique, Underdetermined, Inconsistent };

struct LinearSolution {
  SolveStatus status;
  Vec solution;          // a particular solution when consistent
  Index kernel_dim = 0;  // solution-space dimension when consistent
};

/// Solve a x = b exactly, reporting uniqueness or the failure mode.
inline LinearSolution solve_linear(const Mat& a, const Vec& b) {
  const Index cols = a.cols();
  Mat aug(a.rows(), cols + 1);
  aug.leftCols(cols) = a;
  aug.col(cols) = b;
  const std::vector<Index> pivots = rref_in_place(aug);
  LinearSolution out;
  if (!pivots.empty() && pivots.back() == cols) {
    out.status = SolveStatus::Inconsistent;
    return out;
  }
  out.solution = Vec::Zero(cols);
  for (std::size_t i = 0; i < pivots.size(); ++i)
    out.solution(pivots[i]) = aug(static_cast<Index>(i), cols);
  out.kernel_dim = cols - static_cast<Index>(pivots.size());
  out.status = out.kernel_dim == 0 ? SolveStatus::Unique : SolveStatus::Underdetermined;
  return out;
}

/// Exact inverse; throws std::domain_error on singular input.
inline Mat invert(const Mat& a) {
  const Index n = a.rows();
  if (a.cols() != n) throw std::domain_error("invert: matrix not square");
  Mat aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n) = Mat::Identity(n, n);
  const auto pivots = rref_in_place(aug);
  if (static_cast<Index>(pivots.size()) != n || pivots.back() != n - 1)
    throw std::domain_error("invert: singular matrix");
  return aug.rightCols(n);
}

/// Monic minimal polynomial of `m`, returned as coefficients c[0..d] with
/// c[d] = 1, i.e. sum_i c[i] X^i annihilates m.
inline std::vector<Rational> minimal_polynomial(const Mat& m) {
  const Index n = m.rows();
  if (m.cols() != n) throw std::domain_error("minimal_polynomial: not square");
  const Index nn = n * n;
  // Vectorized powers I, m, m^2, ... accumulated until linear dependence.
  std::vector<Mat> powers{Mat::Identity(n, n)};
  for (Index d = 1; d <= n; ++d) {
    powers.push_back(powers.back() * m);
    Mat sys(nn, d);
    for (Index k = 0; k < d; ++k)
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) sys(i * n + j, k) = powers[k](i, j);
    Vec rhs(nn);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) rhs(i * n + j) = -powers[d](i, j);
    const LinearSolution sol = solve_linear(sys, rhs);
    if (sol.status == SolveStatus::Inconsistent) continue;  // powers still independent
    std::vector<Rational> coeffs(d + 1);
    for (Index k = 0; k < d; ++k) coeffs[k] = sol.solution(k);
    coeffs[d] = 1;
    return coeffs;
  }
  throw std::logic_error("minimal_polynomial: no annihilator found (unreachable)");
}

/// Horner evaluation of a coefficient-vector polynomial.
inline Rational eval_poly1(const std::vector<Rational>& coeffs, const Rational& x) {
  Rational v(0);
  for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
  return v;
}

/// Exact synthetic division by (X - root); requires root to be a root.
inline std::vector<Rational> deflate_poly1(const std::vector<Rational>& coeffs,
                                           const Rational& root) {
  std::vector<Rational> q(coeffs.size() - 1);
  Rational carry(0);
  for (std::size_t i = coeffs.size(); i-- > 1;) {
    carry = coeffs[i] + carry * root;
    q[i - 1] = carry;
  }
  if (eval_poly1(coeffs, root) != 0)
    throw std::domain_error("deflate_poly1: not a root");
  return q;
}

/// A bound B with every eigenvalue magnitude <= B (Gershgorin row sums).
inline Rational gershgorin_bound(const Mat& m) {
  Rational best(0);
  for (Index i = 0; i < m.rows(); ++i) {
    Rational s(0);
    for (Index j = 0; j < m.cols(); ++j) s += abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

struct Eigenblock {
  Rational eigenvalue;
  Mat projector;  // exact spectral projector onto the eigenspace
};

/// Rational eigendecomposition of a semisimple matrix whose eigenvalue
/// denominators divide `denom_hint`.  Finds the minimal polynomial, extracts
/// its roots by scanning numerator candidates inside the Gershgorin bound,
/// and builds Lagrange spectral projectors.  Throws std::domain_error if the
/// minimal polynomial has a nonlinear factor over ℚ (irrational or complex
/// eigenvalue) or a repeated root (non-semisimple input).
inline std::vector<Eigenblock> rational_eigensystem(const Mat& m, const Integer& denom_hint) {
  std::vector<Rational> p = minimal_polynomial(m);
  const std::size_t deg = p.size() - 1;
  const Rational bound = gershgorin_bound(m);
  // Numerators n with |n/denom_hint| <= bound, i.e. |n| <= bound*denom_hint.
  const Integer nmax = numerator(bound * Rational(denom_hint)) / denominator(bound * Rational(denom_hint)) + 1;
  std::vector<Rational> roots;
  for (Integer n = -nmax; n <= nmax; ++n) {
    const Rational cand = Rational(n, denom_hint);
    if (eval_poly1(p, cand) == 0) {
      roots.push_back(cand);
      p = deflate_poly1(p, cand);
      if (eval_poly1(p, cand) == 0)
        throw std::domain_error("rational_eigensystem: repeated eigenvalue (not semisimple)");
    }
  }
  if (roots.size() != deg)
    throw std::domain_error(
        "rational_eigensystem: eigenvalue outside ℚ with expected denominator; "
        "minimal polynomial does not split");
  const Index n = m.rows();
  std::vector<Eigenblock> blocks;
  for (const Rational& lam : roots) {
    Mat proj = Mat::Identity(n, n);
    for (const Rational& mu : roots) {
      if (mu == lam) continue;
      proj = proj * (m - mu * Mat::Identity(n, n)) / (lam - mu);
    }
    blocks.push_back({lam, std::move(proj)});
  }
  return blocks;
}

// -----------------------------------------------------------------------------
// Incremental sparse solver for large structured systems.
//
// Rows arrive one at a time as sparse (column -> coefficient) maps with a
// rational right-hand side.  Forward elimination keeps one pivot row per
// leading column; consistency is tracked through the eliminations.  Intended
// regime: thousands of sparse rows over a few hundred columns.
// -----------------------------------------------------------------------------
class SparseRowSolver {
 public:
  using SparseRow = std::map<Index, Rational>;

  explicit SparseRowSolver(Index num_cols) : num_cols_(num_cols) {}

  /// Reduce and absorb one equation  sum coeff[c]*x_c = rhs.
  void add_row(SparseRow row, Rational rhs) {
    while (!row.empty()) {
      const Index lead = row.begin()->first;
      auto it = pivot_rows_.find(lead);
      if (it == pivot_rows_.end()) {
        const Rational inv = Rational(1) / row.begin()->second;
        for (auto& [c, v] : row) v *= inv;
        rhs *= inv;
        pivot_rows_.emplace(lead, PivotRow{std::move(row), std::move(rhs)});
        return;
      }
      const Rational f = row.begin()->second;
      for (const auto& [c, v] : it->second.coeffs) {
        auto jt = row.find(c);
        if (jt == row.end()) {
          row.emplace(c, -f * v);
        } else {
          jt->second -= f * v;
          if (jt->second == 0) row.erase(jt);
        }
      }
      rhs -= f * it->second.rhs;
    }
    if (rhs != 0) inconsistent_ = true;
  }

  bool inconsistent() const { return inconsistent_; }
  Index rank() const { return static_cast<Index>(pivot_rows_.size()); }
  Index num_cols() const { return num_cols_; }

  SolveStatus status() const {
    if (inconsistent_) return SolveStatus::Inconsistent;
    return rank() == num_cols_ ? SolveStatus::Unique : SolveStatus::Underdetermined;
  }

  /// Columns without a pivot (free unknowns of the consistent system).
  std::vector<Index> free_columns() const {
    std::vector<Index> free;
    auto it = pivot_rows_.begin();
    for (Index c = 0; c < num_cols_; ++c) {
      if (it != pivot_rows_.end() && it->first == c)
        ++it;
      else
        free.push_back(c);
    }
    return free;
  }

  /// Back-substituted solution; valid only when status() == Unique.
  Vec solution() const {
    if (status() != SolveStatus::Unique)
      throw std::logic_error("SparseRowSolver: no unique solution to extract");
    Vec x = Vec::Zero(num_cols_);
    for (auto it = pivot_rows_.rbegin(); it != pivot_rows_.rend(); ++it) {
      Rational v = it->second.rhs;
      bool lead = true;
      for (const auto& [c, coeff] : it->second.coeffs) {
        if (lead) {  // leading unit coefficient
          lead = false;
          continue;
        }
        v -= coeff * x(c);
      }
      x(it->first) = v;
    }
    return x;
  }

 private:
  struct PivotRow {
    SparseRow coeffs;  // normalized: leading coefficient 1
    Rational rhs;
  };
  Index num_cols_;
  std::map<Index, PivotRow> pivot_rows_;  // keyed by leading column
  bool inconsistent_ = false;
};

}  // namespace projquant
