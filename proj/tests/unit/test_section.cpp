#include <cmath>
#include <random>

#include "doctest.h"
#include "liesect/error.hpp"
#include "liesect/section.hpp"
#include "support/oracles.hpp"

using namespace liesect;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix abelian_frame(double k) {
  Matrix f(2, 1);
  f << k, 1;
  return f;
}

struct Triangular {
  GroupChart group = GroupChart::triangular_affine();
  FibrationChart fibration = FibrationChart::standard(group);
};

}  // namespace

TEST_CASE("left-invariant exponential") {
  const GroupChart ab = GroupChart::abelian_exp();
  const SolverParams params;
  const Vector g = exp_left_invariant(ab, vec({1, 1}), 1.0, params);
  CHECK(std::abs(g[0] - std::exp(1.0)) <= 1e-8);
  CHECK(std::abs(g[1] - 1.0) <= 1e-12);

  const Triangular t;
  CHECK(exp_left_invariant(t.group, Vector::Zero(5), 0.7, params) == t.group.identity());

  // M' = kM, X' = M e1 -> M = e^{kt} I, X = ((e^{kt} - 1)/k, 0); k = 1, t = 0.3
  const Vector x = oracle::triangular_closed_frame(1.0).col(0);
  const Vector flow = exp_left_invariant(t.group, x, 0.3, params);
  const double m = std::exp(0.3);
  CHECK(inf_norm(flow - vec({m, 0, m, m - 1, 0})) <= 1e-9);
}

TEST_CASE("abelian sections reproduce the exponential") {
  const GroupChart ab = GroupChart::abelian_exp();
  const FibrationChart p = FibrationChart::standard(ab);
  const AlgebraFrame frame(abelian_frame(2.0));
  const SectionField exp_route = build_section_exp(ab, p, frame, {});
  const SectionField ode_route = build_section_ode(ab, p, frame, {});
  for (const SectionField* s : {&exp_route, &ode_route}) {
    CHECK(inf_norm(s->evaluate(vec({0.5})) - vec({std::exp(1.0), 0.5})) <= 1e-8);
    CHECK(inf_norm(s->evaluate(vec({0.0})) - ab.identity()) == 0.0);
  }
  CHECK(exp_route.route() == Route::Exp);
  CHECK(ode_route.route() == Route::Ode);
}

TEST_CASE("triangular closed frame has the closed-form section") {
  const Triangular t;
  const AlgebraFrame frame(oracle::triangular_closed_frame(1.0));
  const SectionField sigma = build_section_exp(t.group, t.fibration, frame, {});
  const Vector x = vec({0.2, -0.1});
  CHECK(inf_norm(sigma.evaluate(x) - oracle::triangular_closed_section(1.0, x)) <= 1e-8);

  const SectionField ode = build_section_ode(t.group, t.fibration, frame, {});
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const Vector y = oracle::random_point(rng, Vector::Zero(2), 0.3);
    CHECK(inf_norm(sigma.evaluate(y) - ode.evaluate(y)) <= 1e-6);
  }
}

TEST_CASE("sections are sections") {
  const Triangular t;
  const auto frames = oracle::random_triangular_frames(5, 91, t.group, t.fibration);
  std::mt19937_64 rng(32);
  for (const auto& rf : frames) {
    const AlgebraFrame frame(rf.frame);
    for (Route route : {Route::Exp, Route::Ode}) {
      const SectionField sigma = route == Route::Exp
                                     ? build_section_exp(t.group, t.fibration, frame, {})
                                     : build_section_ode(t.group, t.fibration, frame, {});
      for (int i = 0; i < 5; ++i) {
        const Vector x = oracle::random_point(rng, Vector::Zero(2), 0.3);
        CHECK(inf_norm(t.fibration.project(sigma.evaluate(x)) - x) <= 1e-8);
      }
    }
  }
}

TEST_CASE("derived product") {
  const Triangular t;
  const SectionField sigma = build_section_exp(
      t.group, t.fibration, AlgebraFrame(oracle::triangular_closed_frame(1.0)), {});
  CHECK(inf_norm(derived_product(sigma, vec({0.1, 0}), vec({0.2, 0.1})) - vec({0.32, 0.11})) <= 1e-8);
  CHECK(inf_norm(derived_product(sigma, vec({0, 0}), vec({0.2, -0.3})) - vec({0.2, -0.3})) <= 1e-10);

  const GroupChart ab = GroupChart::abelian_exp();
  const SectionField s = build_section_ode(ab, FibrationChart::standard(ab),
                                           AlgebraFrame(abelian_frame(1.5)), {});
  CHECK(std::abs(derived_product(s, vec({0.1}), vec({-0.25}))[0] + 0.15) <= 1e-12);

  std::mt19937_64 rng(33);
  for (int i = 0; i < 20; ++i) {
    const Vector x = oracle::random_point(rng, Vector::Zero(2), 0.3);
    const Vector y = oracle::random_point(rng, Vector::Zero(2), 0.3);
    const Vector z = oracle::random_point(rng, Vector::Zero(2), 0.3);
    const Vector left = derived_product(sigma, derived_product(sigma, x, y), z);
    const Vector right = derived_product(sigma, x, derived_product(sigma, y, z));
    CHECK(inf_norm(left - right) <= 1e-6);
  }
}

TEST_CASE("ODE route path dependence detects non-closed frames") {
  const Triangular t;
  SolverParams straight;
  SolverParams legs;
  legs.path_strategy = PathStrategy::AxisLegs;
  const Vector x = vec({0.3, 0.3});

  const AlgebraFrame closed(oracle::triangular_closed_frame(1.0));
  const Vector a = build_section_ode(t.group, t.fibration, closed, straight).evaluate(x);
  const Vector b = build_section_ode(t.group, t.fibration, closed, legs).evaluate(x);
  CHECK(inf_norm(a - b) <= 1e-6);

  const AlgebraFrame open(oracle::triangular_nonclosed_frame());
  const Vector c = build_section_ode(t.group, t.fibration, open, straight).evaluate(x);
  const Vector d = build_section_ode(t.group, t.fibration, open, legs).evaluate(x);
  CHECK(inf_norm(c - d) > 1e-3);
  CHECK_THROWS_AS(build_section_exp(t.group, t.fibration, open, {}), PreconditionError);
}

TEST_CASE("RK4 converges with fourth order") {
  const GroupChart ab = GroupChart::abelian_exp(1.2);
  const FibrationChart p = FibrationChart::standard(ab);
  const AlgebraFrame frame(abelian_frame(2.0));
  for (Route route : {Route::Exp, Route::Ode}) {
    auto error = [&](double h) {
      SolverParams params;
      params.rk4_step = h;
      const SectionField s = route == Route::Exp ? build_section_exp(ab, p, frame, params)
                                                 : build_section_ode(ab, p, frame, params);
      return std::abs(s.evaluate(vec({1.0}))[0] - std::exp(2.0));
    };
    const double e1 = error(0.1);
    const double e2 = error(0.05);
    const double e3 = error(0.025);
    INFO(to_string(route));
    CHECK(e1 / e2 >= 8.0);
    CHECK(e1 / e2 <= 32.0);
    CHECK(e2 / e3 >= 8.0);
    CHECK(e2 / e3 <= 32.0);
  }
}

TEST_CASE("solver failures are numerical errors") {
  const GroupChart ab = GroupChart::abelian_exp();
  const FibrationChart p = FibrationChart::standard(ab);
  CHECK_THROWS_AS(build_section_ode(ab, p, AlgebraFrame(abelian_frame(1.0)), SolverParams{0.0}),
                  PreconditionError);
  CHECK_THROWS_AS(
      build_section_ode(ab, p, AlgebraFrame(abelian_frame(1.0)), {}).evaluate(vec({0.1, 0.2})),
      PreconditionError);

  // sigma = ((1 - 4 X1) I, X) degenerates at X1 = 0.25.
  const Triangular t;
  Matrix sheared = Matrix::Zero(5, 2);
  sheared.col(0) << -4, 0, -4, 1, 0;
  sheared(4, 1) = 1;
  const SectionField bad = build_section_ode(t.group, t.fibration, AlgebraFrame(sheared), {});
  CHECK_THROWS_AS(bad.evaluate(vec({0.4, 0.0})), NumericalError);
}

TEST_CASE("function sections and caching") {
  const GroupChart ab = GroupChart::abelian_exp();
  int calls = 0;
  SectionField s = SectionField::from_function(
      ab, FibrationChart::standard(ab),
      [&calls](const Vector& x) {
        ++calls;
        return vec({std::exp(x[0]), x[0]});
      },
      "exp");
  CHECK(s.route() == Route::Function);
  CHECK(s.label() == "exp");
  s.evaluate(vec({0.1}));
  s.evaluate(vec({0.1}));
  CHECK(calls == 1);
  s.set_caching(false);
  s.evaluate(vec({0.1}));
  CHECK(calls == 2);
}
