#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "projquant/liecore.hpp"

using namespace projquant;

namespace {

GradedElement random_element(Rng& rng, Index m) {
  GradedElement g = GradedElement::zero(m);
  for (Index i = 0; i < m; ++i) {
    g.v(i) = random_rational(rng);
    g.xi(i) = random_rational(rng);
    for (Index j = 0; j < m; ++j) g.A(i, j) = random_rational(rng);
  }
  return g;
}

/// Full basis of the graded algebra: m + m^2 + m elements.
std::vector<GradedElement> full_basis(Index m) {
  std::vector<GradedElement> basis;
  for (Index r = 0; r < m; ++r) basis.push_back(GradedElement::basis_v(m, r));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      Mat a = Mat::Zero(m, m);
      a(i, j) = 1;
      basis.push_back(GradedElement::from_A(a));
    }
  for (Index t = 0; t < m; ++t) basis.push_back(GradedElement::basis_xi(m, t));
  return basis;
}

Vec coords(const GradedElement& g) {
  const Index m = g.m();
  Vec c(2 * m + m * m);
  for (Index r = 0; r < m; ++r) c(r) = g.v(r);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) c(m + i * m + j) = g.A(i, j);
  for (Index t = 0; t < m; ++t) c(m + m * m + t) = g.xi(t);
  return c;
}

}  // namespace

TEST_CASE("matrix embedding is a section of the graded decomposition") {
  Rng rng(7);
  for (Index m = 2; m <= 5; ++m)
    for (int trial = 0; trial < 10; ++trial) {
      const GradedElement g = random_element(rng, m);
      const Mat rep = to_matrix(g);
      CHECK(rep.trace() == 0);
      CHECK(from_matrix(rep) == g);
      // decomposition is constant on the class mod Id
      CHECK(from_matrix(rep + Rational(5) * Mat::Identity(m + 1, m + 1)) == g);
    }
}

TEST_CASE("bracket agrees with the matrix commutator oracle") {
  Rng rng(11);
  for (Index m = 2; m <= 5; ++m)
    for (int trial = 0; trial < 12; ++trial) {
      const GradedElement x = random_element(rng, m), y = random_element(rng, m);
      const Mat commutator = to_matrix(x) * to_matrix(y) - to_matrix(y) * to_matrix(x);
      CHECK(bracket(x, y) == from_matrix(commutator));
    }
}

TEST_CASE("bracket is antisymmetric and satisfies Jacobi") {
  Rng rng(13);
  for (Index m = 2; m <= 5; ++m)
    for (int trial = 0; trial < 6; ++trial) {
      const GradedElement x = random_element(rng, m), y = random_element(rng, m),
                          z = random_element(rng, m);
      CHECK(bracket(x, y) == -bracket(y, x));
      const GradedElement jac = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) +
                                bracket(z, bracket(x, y));
      CHECK(jac.is_zero());
    }
}

TEST_CASE("grading relations") {
  Rng rng(17);
  for (Index m = 2; m <= 4; ++m) {
    const GradedElement E = GradedElement::euler(m);
    for (int trial = 0; trial < 6; ++trial) {
      GradedElement x = random_element(rng, m);
      const GradedElement v = GradedElement::from_v(x.v), a = GradedElement::from_A(x.A),
                          xi = GradedElement::from_xi(x.xi);
      // degree +1 steps vanish after two applications within one end
      CHECK(bracket(v, GradedElement::from_v(random_element(rng, m).v)).is_zero());
      CHECK(bracket(xi, GradedElement::from_xi(random_element(rng, m).xi)).is_zero());
      // ad(E) acts by -1, 0, +1 on the graded pieces
      CHECK(bracket(E, v) == -v);
      CHECK(bracket(E, a).is_zero());
      CHECK(bracket(E, xi) == xi);
      // g₀ acts naturally: [A, v] = Av, [A, ξ] = -ξA
      CHECK(bracket(a, v) == GradedElement::from_v(x.A * x.v));
      CHECK(bracket(a, xi) == GradedElement::from_xi(Eigen::RowVectorX<Rational>(-x.xi * x.A)));
    }
  }
}

TEST_CASE("mixed bracket example: [e_1, raw eps_1] at m = 2") {
  const Index m = 2;
  const GradedElement b = bracket(GradedElement::basis_v(m, 0), GradedElement::basis_xi(m, 0));
  Mat expected = Mat::Identity(m, m);
  expected(0, 0) = 2;  // E_{11} + Id
  CHECK(b.v.isZero());
  CHECK(b.xi.isZero());
  CHECK(b.A == expected);
}

TEST_CASE("killing form values and ad-trace oracle") {
  // fixed values
  CHECK(killing(GradedElement::basis_v(2, 0), GradedElement::basis_xi(2, 0)) == 6);
  for (Index m = 2; m <= 5; ++m) {
    CHECK(killing(GradedElement::euler(m), GradedElement::euler(m)) == 2 * m);
    CHECK(killing(GradedElement::basis_v(m, 0), GradedElement::basis_v(m, 1)).is_zero());
  }

  // independent oracle: the trace form of the adjoint representation computed
  // through bracket alone must reproduce 2(m+1)tr(XY) on representatives
  for (Index m = 2; m <= 3; ++m) {
    const auto basis = full_basis(m);
    const Index dim = static_cast<Index>(basis.size());
    std::vector<Mat> ad(basis.size(), Mat::Zero(dim, dim));
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (Index c = 0; c < dim; ++c)
        ad[k].col(c) = coords(bracket(basis[k], basis[static_cast<std::size_t>(c)]));
    Rng rng(19);
    for (int trial = 0; trial < 8; ++trial) {
      const GradedElement x = random_element(rng, m), y = random_element(rng, m);
      const Vec cx = coords(x), cy = coords(y);
      Mat adx = Mat::Zero(dim, dim), ady = Mat::Zero(dim, dim);
      for (Index k = 0; k < dim; ++k) {
        adx += cx(k) * ad[static_cast<std::size_t>(k)];
        ady += cy(k) * ad[static_cast<std::size_t>(k)];
      }
      CHECK((adx * ady).trace() == killing(x, y));
    }
  }
}

TEST_CASE("dual basis family: exact Gram identity and crochet sum") {
  for (Index m = 2; m <= 5; ++m) {
    const DualBasisFamily f = build_dual_bases(m);
    const auto basis = f.basis();
    const auto dual = f.dual_basis();
    REQUIRE(basis.size() == static_cast<std::size_t>((m + 1) * (m + 1) - 1));
    REQUIRE(dual.size() == basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < dual.size(); ++j)
        CHECK(killing(basis[i], dual[j]) == (i == j ? 1 : 0));

    // sum of [e_r, ε^r] is -E/2
    GradedElement s = GradedElement::zero(m);
    for (Index r = 0; r < m; ++r) s = s + bracket(f.e[r], f.eps[r]);
    CHECK(s == f.E * Rational(-1, 2));
  }
}

TEST_CASE("graded element json round trip") {
  Rng rng(23);
  const GradedElement g = random_element(rng, 3);
  CHECK(graded_from_json(graded_to_json(g)) == g);
  const Json j = graded_to_json(g);
  CHECK(j.contains("v"));
  CHECK(j.contains("A"));
  CHECK(j.contains("xi"));
}
