// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "liesect/section.hpp"
#include "liesect/verifier.hpp"
#include "support/oracles.hpp"

using namespace liesect;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

Vector scalar(double x) { return Vector::Constant(1, x); }

SectionField build(const GroupChart& g, const FibrationChart& p, const AlgebraFrame& f,
                   Route route, const SolverParams& params = {}) {
  return route == Route::Exp ? build_section_exp(g, p, f, params)
                             : build_section_ode(g, p, f, params);
}

Outcome exponential_reproduction() {
  Outcome o;
  const GroupChart group = GroupChart::abelian_exp(1.2);
  const FibrationChart p = FibrationChart::standard(group);
  SolverParams params;
  params.rk4_step = 5e-3;
  double worst = 0.0;
  for (double k : {-1.0, 0.5, 2.0}) {
    const AlgebraFrame frame((Matrix(2, 1) << k, 1).finished());
    for (Route route : {Route::Exp, Route::Ode}) {
      const SectionField sigma = build(group, p, frame, route, params);
      for (int i = 0; i <= 100; ++i) {
        const double x = -1.0 + 0.02 * i;
        Vector expected(2);
        expected << std::exp(k * x), x;
        worst = std::max(worst, inf_norm(sigma.evaluate(scalar(x)) - expected));
      }
    }
  }
  o.require(worst <= 1e-8, fmt::format("max error {:.3e}", worst));
  if (o.ok) o.detail = fmt::format("max error {:.3e}", worst);
  return o;
}

Outcome triangular_second_example() {
  Outcome o;
  const double k = 1.0;
  const GroupChart group = GroupChart::triangular_affine();
  const FibrationChart p = FibrationChart::standard(group);
  const AlgebraFrame frame(oracle::triangular_closed_frame(k));
  double closed_form = 0.0;
  double functional = 0.0;
  for (Route route : {Route::Exp, Route::Ode}) {
    const SectionField sigma = build(group, p, frame, route);
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        Vector x(2);
        x << -0.3 + 0.075 * i, -0.3 + 0.075 * j;
        closed_form = std::max(
            closed_form, inf_norm(sigma.evaluate(x) - oracle::triangular_closed_section(k, x)));
      }
    }
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 50; ++i) {
      const Vector x = oracle::random_point(rng, Vector::Zero(2), 0.3);
      const Vector y = oracle::random_point(rng, Vector::Zero(2), 0.3);
      functional = std::max(functional, inf_norm(functional_residual(sigma, x, y)));
    }
  }
  o.require(closed_form <= 1e-7, fmt::format("closed-form error {:.3e}", closed_form));
  o.require(functional <= 1e-7, fmt::format("functional residual {:.3e}", functional));
  if (o.ok) {
    o.detail = fmt::format("closed-form {:.3e}, functional {:.3e}", closed_form, functional);
  }
  return o;
}

Outcome random_closed_frames() {
  Outcome o;
  const Region region{Vector(), 0.3};
  const SampleSpec spec;
  double worst = 0.0;
  auto run = [&](const GroupChart& group, const FibrationChart& p,
                 const std::vector<oracle::RandomFrame>& frames) {
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const AlgebraFrame frame(frames[i].frame);
      for (Route route : {Route::Exp, Route::Ode}) {
        const SectionField sigma = build(group, p, frame, route);
        const ResidualReport r = grid_report(Check::Functional, sigma,
                                             Region{p.base_point(), region.radius}, spec, 1e-6);
        worst = std::max(worst, r.max_residual);
        o.require(r.passed(), fmt::format("{} frame {} {} route: max {:.3e}, {} errors",
                                          group.name(), i, to_string(route), r.max_residual,
                                          r.errors));
      }
    }
  };
  const GroupChart ab = GroupChart::abelian_exp();
  const FibrationChart pab = FibrationChart::standard(ab);
  run(ab, pab, oracle::random_abelian_frames(20, 301));
  const GroupChart tri = GroupChart::triangular_affine();
  const FibrationChart ptri = FibrationChart::standard(tri);
  run(tri, ptri, oracle::random_triangular_frames(20, 302, tri, ptri));
  if (o.ok) o.detail = fmt::format("80 reports, max residual {:.3e}", worst);
  return o;
}

Outcome negative_controls() {
  Outcome o;
  const GroupChart ab = GroupChart::abelian_exp();
  const SectionField affine = SectionField::from_function(
      ab, FibrationChart::standard(ab), [](const Vector& x) {
        Vector s(2);
        s << 1.0 + x[0], x[0];
        return s;
      });
  const ResidualReport r = grid_report(Check::Functional, affine, Region{scalar(0), 0.3},
                                       SampleSpec{5, 0, 0, 0}, 1e-6);
  o.require(!r.passed(), "1 + x oracle passed the functional check");
  o.require(std::abs(r.max_residual - 0.09) <= 1e-12,
            fmt::format("worst residual {:.6g}, expected 0.09", r.max_residual));
  o.require(r.worst_point.size() == 2 && std::abs(r.worst_point[0]) == 0.3 &&
                std::abs(r.worst_point[1]) == 0.3,
            "worst point is not a corner");
  double xy_mismatch = 0.0;
  for (double x : {-0.3, -0.1, 0.2}) {
    for (double y : {-0.25, 0.05, 0.3}) {
      const Vector res = functional_residual(affine, scalar(x), scalar(y));
      xy_mismatch = std::max(xy_mismatch, std::abs(res[0] + x * y) + std::abs(res[1]));
    }
  }
  o.require(xy_mismatch <= 1e-15, fmt::format("residual differs from -xy by {:.3e}", xy_mismatch));

  const GroupChart tri = GroupChart::triangular_affine();
  const FibrationChart p = FibrationChart::standard(tri);
  const AlgebraFrame open(oracle::triangular_nonclosed_frame());
  const ClosureReport closure = closure_check(tri, open);
  o.require(closure.max_residual > 0.1, fmt::format("closure residual {:.3e}", closure.max_residual));
  Vector x(2);
  x << 0.3, 0.3;
  const double path = path_independence_residual(tri, p, open, {}, x);
  o.require(path > 1e-3, fmt::format("path dependence {:.3e}", path));
  if (o.ok) {
    o.detail = fmt::format("oracle max {:.3g} at corner, closure {:.3f}, path dependence {:.3e}",
                           r.max_residual, closure.max_residual, path);
  }
  return o;
}

Outcome bracket_oracle() {
  Outcome o;
  const GroupChart tri = GroupChart::triangular_affine();
  std::mt19937_64 rng(505);
  auto rand = [&] { return oracle::random_point(rng, Vector::Zero(5), 1.0); };
  double formula = 0.0, anti = 0.0, bilinear = 0.0, jacobi = 0.0;
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const Vector x = rand(), y = rand(), z = rand(), w = rand();
    const double a = coef(rng), b = coef(rng);
    formula = std::max(formula, inf_norm(bracket(tri, x, y) - oracle::triangular_bracket(x, y)));
    anti = std::max(anti, inf_norm(bracket(tri, x, y) + bracket(tri, y, x)));
    bilinear = std::max(bilinear, inf_norm(bracket(tri, a * x + b * w, y) -
                                           a * bracket(tri, x, y) - b * bracket(tri, w, y)));
    jacobi = std::max(jacobi, inf_norm(bracket(tri, x, bracket(tri, y, z)) +
                                       bracket(tri, y, bracket(tri, z, x)) +
                                       bracket(tri, z, bracket(tri, x, y))));
  }
  o.require(formula <= 1e-6, fmt::format("formula {:.3e}", formula));
  o.require(anti <= 1e-9, fmt::format("antisymmetry {:.3e}", anti));
  o.require(bilinear <= 1e-8, fmt::format("bilinearity {:.3e}", bilinear));
  o.require(jacobi <= 1e-6, fmt::format("Jacobi {:.3e}", jacobi));
  if (o.ok) {
    o.detail = fmt::format("formula {:.2e}, antisym {:.2e}, bilinear {:.2e}, Jacobi {:.2e}",
                           formula, anti, bilinear, jacobi);
  }
  return o;
}

Outcome differential_equation() {
  Outcome o;
  double worst = 0.0;
  std::mt19937_64 rng(606);
  const GroupChart tri = GroupChart::triangular_affine();
  const FibrationChart ptri = FibrationChart::standard(tri);
  const GroupChart ab = GroupChart::abelian_exp();
  const FibrationChart pab = FibrationChart::standard(ab);
  const AlgebraFrame tri_frame(oracle::triangular_closed_frame(1.0));
  const AlgebraFrame ab_frame((Matrix(2, 1) << 2.0, 1.0).finished());
  for (Route route : {Route::Exp, Route::Ode}) {
    const SectionField s_tri = build(tri, ptri, tri_frame, route);
    const SectionField s_ab = build(ab, pab, ab_frame, route);
    for (int i = 0; i < 20; ++i) {
      worst = std::max(worst, differential_residual(
                                  s_tri, oracle::random_point(rng, Vector::Zero(2), 0.3)));
      worst = std::max(worst,
                       differential_residual(s_ab, oracle::random_point(rng, scalar(0), 0.3)));
    }
  }
  o.require(worst <= 1e-5, fmt::format("solver residual {:.3e}", worst));
  const SectionField perturbed = SectionField::from_function(
      ab, pab, [](const Vector& x) {
        Vector s(2);
        s << std::exp(x[0]) + 0.1 * x[0] * x[0], x[0];
        return s;
      });
  const double bad = differential_residual(perturbed, scalar(0.5));
  o.require(bad > 1e-3, fmt::format("perturbed residual {:.3e}", bad));
  if (o.ok) o.detail = fmt::format("solver max {:.3e}, perturbed {:.3e}", worst, bad);
  return o;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome numerical_quality() {
  Outcome o;
  const GroupChart ab = GroupChart::abelian_exp(1.2);
  const FibrationChart pab = FibrationChart::standard(ab);
  const AlgebraFrame frame((Matrix(2, 1) << 2.0, 1.0).finished());
  double min_ratio = 1e300, max_ratio = 0.0;
  for (Route route : {Route::Exp, Route::Ode}) {
    auto error = [&](double h) {
      SolverParams params;
      params.rk4_step = h;
      return std::abs(build(ab, pab, frame, route, params).evaluate(scalar(1.0))[0] -
                      std::exp(2.0));
    };
    const double e1 = error(0.1), e2 = error(0.05), e3 = error(0.025);
    for (double r : {e1 / e2, e2 / e3}) {
      min_ratio = std::min(min_ratio, r);
      max_ratio = std::max(max_ratio, r);
    }
  }
  o.require(min_ratio >= 8.0 && max_ratio <= 32.0,
            fmt::format("order ratios in [{:.2f}, {:.2f}]", min_ratio, max_ratio));

  const GroupChart tri = GroupChart::triangular_affine();
  const FibrationChart ptri = FibrationChart::standard(tri);
  double agreement = 0.0;
  std::mt19937_64 rng(707);
  for (const auto& rf : oracle::random_triangular_frames(5, 708, tri, ptri)) {
    const AlgebraFrame f(rf.frame);
    const SectionField a = build_section_exp(tri, ptri, f, {});
    const SectionField b = build_section_ode(tri, ptri, f, {});
    for (int i = 0; i < 20; ++i) {
      const Vector x = oracle::random_point(rng, Vector::Zero(2), 0.3);
      agreement = std::max(agreement, inf_norm(a.evaluate(x) - b.evaluate(x)));
    }
  }
  o.require(agreement <= 1e-6, fmt::format("route disagreement {:.3e}", agreement));

  const auto dir = std::filesystem::temp_directory_path() / "liesect_acceptance";
  std::filesystem::create_directories(dir);
  const std::string config = std::string(LIESECT_SOURCE_DIR) + "/configs/triangular.json";
  std::vector<std::string> outputs;
  for (int i = 0; i < 2; ++i) {
    const auto path = (dir / fmt::format("report{}.json", i)).string();
    std::ostringstream out, err;
    const int code = cli::run_command(
        {"verify", "--config", config, "--seed", "17", "--output", path}, out, err);
    o.require(code == 0, fmt::format("verify exit {}: {}", code, err.str()));
    outputs.push_back(slurp(path));
  }
  o.require(!outputs[0].empty() && outputs[0] == outputs[1], "reports differ between runs");
  if (o.ok) {
    o.detail = fmt::format("order ratios [{:.2f}, {:.2f}], route gap {:.2e}, reports identical",
                           min_ratio, max_ratio, agreement);
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exponential reproduction", 1.0, exponential_reproduction},
      {2, "triangular closed form", 5.0, triangular_second_example},
      {3, "random closed frames", 20.0, random_closed_frames},
      {4, "negative controls", 60.0, negative_controls},
      {5, "bracket oracle", 60.0, bracket_oracle},
      {6, "differential equation", 60.0, differential_equation},
      {7, "numerical quality", 60.0, numerical_quality},
  };
  int failures = 0;
  const auto suite_start = std::chrono::steady_clock::now();
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      outcome.ok = false;
      outcome.detail += fmt::format("; took {:.2f}s, budget {:.0f}s", seconds, c.budget_seconds);
    }
    failures += outcome.ok ? 0 : 1;
    std::cout << fmt::format("{} criterion {}: {} ({:.2f}s) {}\n", outcome.ok ? "PASS" : "FAIL",
                             c.id, c.name, seconds, outcome.detail);
  }
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
  std::cout << fmt::format("{} of {} criteria passed in {:.2f}s\n", criteria.size() - failures,
                           criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
