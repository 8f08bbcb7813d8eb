#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <projquant/repspace.hpp>

#include <vector>

using namespace projquant;

namespace {

Mat random_matrix(Rng& rng, int m) {
  Mat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = random_rational(rng, 3, 2);
  return a;
}

// Independent eigenvalue oracle: the Casimir acts on an irreducible with
// highest weight λ as (λ, λ + 2ρ̄), computed with the inner product the
// Killing form κ = 2m·tr induces on diagonal weights, (δ_i, δ_j) =
// (δ_ij − 1/m)/(2m), and ρ̄ = Σ_i (m−i)δ_i (i = 1..m).  Everything here is
// weight bookkeeping and never touches the module code under test.
Rational weight_form(const std::vector<Rational>& u, const std::vector<Rational>& v, int m) {
  Rational dot = 0, su = 0, sv = 0;
  for (int i = 0; i < m; ++i) {
    dot += u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    su += u[static_cast<std::size_t>(i)];
    sv += v[static_cast<std::size_t>(i)];
  }
  return (dot - su * sv / Rational(m)) / Rational(2 * m);
}

Rational casimir_of_weight(const std::vector<Rational>& lam, int m) {
  std::vector<Rational> rho(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) rho[static_cast<std::size_t>(i)] = Rational(m - 1 - i);
  return weight_form(lam, lam, m) + Rational(2) * weight_form(lam, rho, m);
}

Rational casimir_sym(int m, int k) {
  std::vector<Rational> lam(static_cast<std::size_t>(m), Rational(0));
  lam[0] = Rational(k);
  return casimir_of_weight(lam, m);
}

Rational casimir_ext(int m, int p) {
  std::vector<Rational> lam(static_cast<std::size_t>(m), Rational(0));
  for (int i = 0; i < p; ++i) lam[static_cast<std::size_t>(i)] = Rational(1);
  return casimir_of_weight(lam, m);
}

}  // namespace

TEST_CASE("monomial and subset bases are deterministically ordered") {
  const auto monos = monomials_of_degree(2, 2);
  REQUIRE(monos.size() == 3);
  CHECK(monos[0] == Mono{2});
  CHECK(monos[1] == Mono{1, 1});
  CHECK(monos[2] == Mono{0, 2});
  CHECK(mono_exp(monos[0], 0) == 2);
  CHECK(mono_exp(monos[0], 1) == 0);

  const auto monos3 = monomials_of_degree(3, 5);
  CHECK(monos3.size() == 21);  // C(3+5-1, 5)

  const auto sets = subsets_of_size(3, 2);
  REQUIRE(sets.size() == 3);
  CHECK(sets[0] == std::vector<int>{0, 1});
  CHECK(sets[1] == std::vector<int>{0, 2});
  CHECK(sets[2] == std::vector<int>{1, 2});
  CHECK(subsets_of_size(3, 0).size() == 1);
}

TEST_CASE("representation shorthand parses and round-trips") {
  RepSpec s = RepSpec::parse("sym:2:1/3");
  CHECK(s.kind == RepSpec::Kind::Sym);
  CHECK(s.p == 2);
  CHECK(s.weight == Rational(1, 3));
  CHECK(s.str() == "sym:2:1/3");
  CHECK(s.dim(3) == 6);
  CHECK(s.id_scalar(3) == Rational(3));  // 2 + 3·(1/3)

  RepSpec t = RepSpec::parse("trivial:-2");
  CHECK(t.dim(5) == 1);
  CHECK(t.id_scalar(5) == Rational(-10));
  CHECK(t.str() == "trivial:-2");

  RepSpec e = RepSpec::parse("ext:2:0");
  CHECK(e.dim(3) == 3);
  CHECK(e.dim(4) == 6);

  CHECK_THROWS_AS(RepSpec::parse("sym:x:1"), std::invalid_argument);
  CHECK_THROWS_AS(RepSpec::parse("sym:-1:1"), std::invalid_argument);
  CHECK_THROWS_AS(RepSpec::parse("trivial"), std::invalid_argument);
  CHECK_THROWS_AS(RepSpec::parse("vector:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(RepSpec::parse("ext:5:1/3").dim(3), std::invalid_argument);

  CHECK(shift_delta(RepSpec::parse("sym:1:1/2"), RepSpec::parse("trivial:1"), 2) == Rational(0));
  CHECK(shift_delta(RepSpec::parse("trivial:0"), RepSpec::parse("trivial:1"), 3) == Rational(-1));
}

TEST_CASE("generator matrices define homomorphisms of gl(m)") {
  Rng rng(421);
  for (int m : {2, 3}) {
    const Rational w(1, 3);
    std::vector<G0Module> mods;
    mods.push_back(trivial_module(m, w));
    mods.push_back(sym_module(m, 2, w));
    mods.push_back(ext_module(m, m - 1, Rational(-1, 2)));
    mods.push_back(dual_module(sym_module(m, 2, w)));
    mods.push_back(hom_module(sym_module(m, 1, w), ext_module(m, 1, Rational(0))));
    mods.push_back(tensor_module(sym_module(m, 2, Rational(0)), dual_module(sym_module(m, 1, w))));

    for (const G0Module& mod : mods) {
      for (int rep = 0; rep < 4; ++rep) {
        const Mat a = random_matrix(rng, m), b = random_matrix(rng, m);
        const Mat lhs = module_action(mod, Mat(a * b - b * a));
        const Mat ra = module_action(mod, a), rb = module_action(mod, b);
        CHECK(Mat(lhs - (ra * rb - rb * ra)).isZero());
      }
    }
  }
}

TEST_CASE("identity scalars follow degree plus m times weight") {
  const int m = 3;
  const Rational w(2, 5);
  CHECK(id_scalar(sym_module(m, 4, w)) == Rational(4) + Rational(m) * w);
  CHECK(id_scalar(ext_module(m, 2, w)) == Rational(2) + Rational(m) * w);
  CHECK(id_scalar(trivial_module(m, w)) == Rational(m) * w);
  CHECK(id_scalar(dual_module(sym_module(m, 4, w))) == -(Rational(4) + Rational(m) * w));

  const G0Module v1 = sym_module(m, 1, Rational(1, 2));
  const G0Module v2 = ext_module(m, 2, Rational(-1, 3));
  CHECK(id_scalar(hom_module(v1, v2)) == id_scalar(v2) - id_scalar(v1));
  CHECK(id_scalar(tensor_module(v1, v2)) == id_scalar(v1) + id_scalar(v2));

  // Matches the RepSpec-level computation used to derive shift parameters.
  CHECK(id_scalar(sym_module(m, 4, w)) == RepSpec::parse("sym:4:2/5").id_scalar(m));
}

TEST_CASE("Casimir is scalar on symmetric and exterior powers, matching weight theory") {
  for (int m : {2, 3, 4}) {
    for (int k = 0; k <= 4; ++k) {
      const Mat c = sl_casimir_matrix(sym_module(m, k, Rational(1, 7)));
      const Rational expect = casimir_sym(m, k);
      CHECK(Mat(c - expect * Mat::Identity(c.rows(), c.cols())).isZero());
      // Closed form of the weight computation for this family.
      CHECK(expect == Rational(static_cast<long long>(m - 1) * k * (k + m), 2LL * m * m));
    }
    for (int p = 0; p <= m; ++p) {
      const Mat c = sl_casimir_matrix(ext_module(m, p, Rational(-2)));
      const Rational expect = casimir_ext(m, p);
      CHECK(Mat(c - expect * Mat::Identity(c.rows(), c.cols())).isZero());
      CHECK(expect == Rational(static_cast<long long>(p) * (m - p) * (m + 1), 2LL * m * m));
    }
  }
}

TEST_CASE("Casimir commutes with the whole gl(m) action") {
  Rng rng(99);
  for (int m : {2, 3}) {
    const G0Module fiber =
        tensor_module(sym_module(m, 2, Rational(0)), hom_module(sym_module(m, 1, Rational(1, 2)), trivial_module(m, Rational(1, 3))));
    const Mat c = sl_casimir_matrix(fiber);
    for (int rep = 0; rep < 4; ++rep) {
      const Mat rx = module_action(fiber, random_matrix(rng, m));
      CHECK(Mat(c * rx - rx * c).isZero());
    }
  }
}

TEST_CASE("spectral blocks of Sym^k tensor dual-standard match the two-irreducible split") {
  // Sym^k ⊗ V* decomposes as Sym^(k-1) plus the trace-free part with highest
  // weight kδ₁ − δ_m; the block eigenvalues and projector ranks must agree.
  for (int m : {2, 3}) {
    for (int k : {1, 2, 3}) {
      const G0Module fiber = tensor_module(sym_module(m, k, Rational(0)), dual_module(sym_module(m, 1, Rational(0))));
      auto blocks = sl_casimir_blocks(fiber);
      REQUIRE(blocks.size() == 2);

      std::vector<Rational> lam(static_cast<std::size_t>(m), Rational(0));
      lam[0] = Rational(k);
      lam[static_cast<std::size_t>(m - 1)] = Rational(-1);
      const Rational traceless_eig = casimir_of_weight(lam, m);
      const Rational lower_eig = casimir_sym(m, k - 1);

      std::map<Rational, Rational> rank;  // eigenvalue -> projector trace
      for (const auto& b : blocks) {
        CHECK(Mat(b.projector * b.projector - b.projector).isZero());
        rank[b.eigenvalue] = b.projector.trace();
      }
      REQUIRE(rank.count(traceless_eig) == 1);
      REQUIRE(rank.count(lower_eig) == 1);
      const Rational dim_lower = Rational(binomial(static_cast<unsigned>(m + k - 2), static_cast<unsigned>(k - 1)));
      CHECK(rank[lower_eig] == dim_lower);
      CHECK(rank[traceless_eig] == Rational(fiber.dim) - dim_lower);

      // Projectors recompose the Casimir and resolve the identity.
      Mat recomposed = Mat::Zero(fiber.dim, fiber.dim);
      Mat sum = Mat::Zero(fiber.dim, fiber.dim);
      for (const auto& b : blocks) {
        recomposed += b.eigenvalue * b.projector;
        sum += b.projector;
      }
      CHECK(Mat(recomposed - sl_casimir_matrix(fiber)).isZero());
      CHECK(Mat(sum - Mat::Identity(fiber.dim, fiber.dim)).isZero());
    }
  }
}

TEST_CASE("endomorphism module splits into trivial and adjoint blocks") {
  const int m = 2;
  const G0Module v = sym_module(m, 1, Rational(2, 3));
  auto blocks = sl_casimir_blocks(hom_module(v, v));
  REQUIRE(blocks.size() == 2);
  std::vector<Rational> adj{Rational(1), Rational(-1)};
  std::map<Rational, Rational> rank;
  for (const auto& b : blocks) rank[b.eigenvalue] = b.projector.trace();
  REQUIRE(rank.count(Rational(0)) == 1);
  REQUIRE(rank.count(casimir_of_weight(adj, m)) == 1);
  CHECK(rank[Rational(0)] == Rational(1));
  CHECK(rank[casimir_of_weight(adj, m)] == Rational(3));
  // The sl(2) adjoint is Sym² of the standard module, so the eigenvalues agree.
  CHECK(casimir_of_weight(adj, m) == casimir_sym(m, 2));
  CHECK(casimir_of_weight(adj, m) == Rational(1));
}
