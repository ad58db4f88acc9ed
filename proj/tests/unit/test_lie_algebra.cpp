#include <random>

#include "doctest.h"
#include "liesect/error.hpp"
#include "liesect/lie_algebra.hpp"
#include "support/oracles.hpp"

using namespace liesect;

namespace {

Vector random_vector(std::mt19937_64& rng, Index n) {
  return oracle::random_point(rng, Vector::Zero(n), 1.0);
}

}  // namespace

TEST_CASE("triangular bracket matches the semidirect formula") {
  const GroupChart tri = GroupChart::triangular_affine();
  std::mt19937_64 rng(5);
  double worst = 0.0;
  double worst_plain = 0.0;
  auto mu = [](const Vector& g, const Vector& h) { return oracle::triangular_mu(g, h); };
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_vector(rng, 5);
    const Vector y = random_vector(rng, 5);
    const Vector expected = oracle::triangular_bracket(x, y);
    worst = std::max(worst, inf_norm(bracket(tri, x, y) - expected));
    worst_plain = std::max(worst_plain, inf_norm(oracle::fd_bracket(mu, tri.identity(), x, y) - expected));
  }
  CHECK(worst <= 1e-6);
  CHECK(worst_plain <= 1e-6);

  Vector i_part(5), e2(5), out(5);
  i_part << 1, 0, 1, 0, 0;
  e2 << 0, 0, 0, 0, 1;
  CHECK(inf_norm(bracket(tri, i_part, e2) - e2) <= 1e-9);
}

TEST_CASE("abelian brackets vanish") {
  const GroupChart ab = GroupChart::abelian_exp();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    CHECK(inf_norm(bracket(ab, random_vector(rng, 2), random_vector(rng, 2))) <= 1e-9);
  }
}

TEST_CASE("bracket algebraic identities") {
  std::vector<GroupChart> groups{
      GroupChart::abelian_exp(), GroupChart::triangular_affine(),
      GroupChart::custom({expr::parse("g1*h1"), expr::parse("g2 + g1*h2")},
                         (Vector(2) << 1, 0).finished())};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> scalar(-2.0, 2.0);
  for (const GroupChart& g : groups) {
    const Index n = g.dim();
    double anti = 0.0, self = 0.0, bilinear = 0.0, jacobi = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vector x = random_vector(rng, n);
      const Vector y = random_vector(rng, n);
      anti = std::max(anti, inf_norm(bracket(g, x, y) + bracket(g, y, x)));
      self = std::max(self, inf_norm(bracket(g, x, x)));
      const Vector x2 = random_vector(rng, n);
      const double a = scalar(rng);
      const double b = scalar(rng);
      bilinear = std::max(bilinear, inf_norm(bracket(g, a * x + b * x2, y) -
                                             (a * bracket(g, x, y) + b * bracket(g, x2, y))));
      if (i < 20) {
        const Vector z = random_vector(rng, n);
        jacobi = std::max(jacobi, inf_norm(bracket(g, x, bracket(g, y, z)) +
                                           bracket(g, y, bracket(g, z, x)) +
                                           bracket(g, z, bracket(g, x, y))));
      }
    }
    INFO(g.name());
    CHECK(anti <= 1e-9);
    CHECK(self <= 1e-9);
    CHECK(bilinear <= 1e-8);
    CHECK(jacobi <= 1e-6);
  }
}

TEST_CASE("closure examples") {
  const GroupChart ab = GroupChart::abelian_exp();
  Matrix f(2, 1);
  f << 3, 1;
  const ClosureReport abr = closure_check(ab, AlgebraFrame(f));
  CHECK(abr.is_subalgebra);
  CHECK(abr.max_residual == 0.0);

  const GroupChart tri = GroupChart::triangular_affine();
  for (double k : {0.5, 1.0, 2.0}) {
    CHECK(closure_check(tri, AlgebraFrame(oracle::triangular_closed_frame(k))).is_subalgebra);
  }
  const ClosureReport bad = closure_check(tri, AlgebraFrame(oracle::triangular_nonclosed_frame()));
  CHECK_FALSE(bad.is_subalgebra);
  // [F1, F2] = (E21, -e1) is orthogonal to both frame vectors.
  CHECK(bad.max_residual == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(bad.worst_pair == std::pair<Index, Index>{0, 1});
}

TEST_CASE("closure verdict is invariant under basis change") {
  const GroupChart tri = GroupChart::triangular_affine();
  const FibrationChart p = FibrationChart::standard(tri);
  std::mt19937_64 rng(12);
  std::vector<Matrix> frames{oracle::triangular_nonclosed_frame()};
  for (const auto& rf : oracle::random_triangular_frames(5, 77, tri, p)) frames.push_back(rf.frame);
  for (const Matrix& f : frames) {
    const bool verdict = closure_check(tri, AlgebraFrame(f)).is_subalgebra;
    for (int i = 0; i < 10; ++i) {
      Matrix w(2, 2);
      do {
        w = oracle::random_point(rng, Vector::Zero(4), 2.0).reshaped(2, 2);
      } while (std::abs(w.determinant()) < 0.2);
      CHECK(closure_check(tri, AlgebraFrame(f * w)).is_subalgebra == verdict);
    }
  }
}

TEST_CASE("transversality examples") {
  const GroupChart ab = GroupChart::abelian_exp();
  const FibrationChart pab = FibrationChart::standard(ab);
  for (double k : {-3.0, 0.0, 0.5, 7.0}) {
    Matrix f(2, 1);
    f << k, 1;
    CHECK(transversality_check(ab, pab, AlgebraFrame(f)).transversal);
  }
  Matrix vertical(2, 1);
  vertical << 1, 0;
  const TransversalityReport r = transversality_check(ab, pab, AlgebraFrame(vertical));
  CHECK_FALSE(r.transversal);

  const GroupChart tri = GroupChart::triangular_affine();
  const TransversalityReport t = transversality_check(
      tri, FibrationChart::standard(tri), AlgebraFrame(oracle::triangular_closed_frame(1.0)));
  CHECK(t.transversal);
  CHECK(t.condition_number >= 1.0);
  CHECK(std::isfinite(t.condition_number));
}

TEST_CASE("structure constants") {
  const GroupChart tri = GroupChart::triangular_affine();
  const double k = 1.5;
  const StructureConstants sc = structure_constants(tri, AlgebraFrame(oracle::triangular_closed_frame(k)));
  // [F1, F2] = (0, k e2) = k F2
  CHECK(sc.coefficients[0](0, 1) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sc.coefficients[1](0, 1) == doctest::Approx(k).epsilon(1e-9));
  CHECK(sc.coefficients[1](1, 0) == doctest::Approx(-k).epsilon(1e-9));
  CHECK(sc.residual(0, 1) <= 1e-9);
}

TEST_CASE("frames must be independent") {
  Matrix f(5, 2);
  f.col(0) << 1, 0, 1, 0, 0;
  f.col(1) = 2.0 * f.col(0);
  CHECK_THROWS_AS(AlgebraFrame{f}, PreconditionError);
  CHECK_THROWS_AS(AlgebraFrame{Matrix::Zero(2, 3)}, PreconditionError);
}
