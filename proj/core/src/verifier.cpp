#include "liesect/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "liesect/error.hpp"

namespace liesect {

const char* to_string(Check check) noexcept {
  switch (check) {
    case Check::Identity: return "identity";
    case Check::Functional: return "functional";
    case Check::Differential: return "differential";
    case Check::Tangency: return "tangency";
    case Check::PathIndependence: return "path_independence";
    case Check::Associativity: return "associativity";
  }
  return "unknown";
}

std::optional<Check> parse_check(std::string_view name) {
  for (Check c : {Check::Identity, Check::Functional, Check::Differential,
                  Check::Tangency, Check::PathIndependence, Check::Associativity}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

namespace {

Matrix section_jacobian(const SectionField& sigma, const Vector& x) {
  const Index m = x.size();
  Matrix out(sigma.group().dim(), m);
  for (Index i = 0; i < m; ++i) {
    Vector plus = x;
    Vector minus = x;
    plus[i] += kSectionDiffStep;
    minus[i] -= kSectionDiffStep;
    out.col(i) = (sigma.evaluate(plus) - sigma.evaluate(minus)) / (2.0 * kSectionDiffStep);
  }
  return out;
}

Matrix translated_frame(const SectionField& sigma, const Vector& g) {
  const Matrix f0 = section_jacobian(sigma, sigma.fibration().base_point());
  Matrix out(f0.rows(), f0.cols());
  for (Index i = 0; i < f0.cols(); ++i) {
    out.col(i) = sigma.group().left_translate(g, f0.col(i));
  }
  return out;
}

}  // namespace

Vector functional_residual(const SectionField& sigma, const Vector& x, const Vector& y) {
  const Vector product = sigma.group().mu(sigma.evaluate(x), sigma.evaluate(y));
  return sigma.evaluate(sigma.fibration().project(product)) - product;
}

double identity_residual(const SectionField& sigma) {
  return inf_norm(sigma.evaluate(sigma.fibration().base_point()) -
                  sigma.group().identity());
}

double differential_residual(const SectionField& sigma, const Vector& x) {
  const Vector g = sigma.evaluate(x);
  const Matrix l = translated_frame(sigma, g);
  const Matrix lhs = section_jacobian(sigma, x) * (sigma.fibration().dp(g) * l);
  return (lhs - l).cwiseAbs().maxCoeff();
}

double tangency_residual(const SectionField& sigma, const Vector& x) {
  const Vector g = sigma.evaluate(x);
  const Matrix l = translated_frame(sigma, g);
  const Matrix tangent = section_jacobian(sigma, x);
  double worst = 0.0;
  for (Index i = 0; i < l.cols(); ++i) {
    const Vector v = l.col(i);
    const double norm = v.norm();
    if (norm == 0.0) continue;
    worst = std::max(worst, orthogonal_component(tangent, v).norm() / norm);
  }
  return worst;
}

double path_independence_residual(const GroupChart& group,
                                  const FibrationChart& fibration,
                                  const AlgebraFrame& frame,
                                  const SolverParams& params, const Vector& x) {
  SolverParams straight = params;
  straight.path_strategy = PathStrategy::StraightLine;
  SolverParams legs = params;
  legs.path_strategy = PathStrategy::AxisLegs;
  return inf_norm(build_section_ode(group, fibration, frame, straight).evaluate(x) -
                  build_section_ode(group, fibration, frame, legs).evaluate(x));
}

double associativity_residual(const SectionField& sigma, const Vector& x,
                              const Vector& y, const Vector& z) {
  const Vector left = derived_product(sigma, derived_product(sigma, x, y), z);
  const Vector right = derived_product(sigma, x, derived_product(sigma, y, z));
  return inf_norm(left - right);
}

// ---------------------------------------------------------------------------

std::vector<Vector> sample_points(int arity, const Region& region, const SampleSpec& spec) {
  const Index m = region.center.size();
  const Index dim = arity * m;
  if (spec.grid < 1) throw PreconditionError("grid density must be at least 1");
  if (!(region.radius >= 0.0)) throw PreconditionError("region radius must be >= 0");

  Vector center(dim);
  for (int a = 0; a < arity; ++a) center.segment(a * m, m) = region.center;

  std::vector<Vector> points;
  const int per_axis = region.radius == 0.0 ? 1 : spec.grid;
  double total = 1.0;
  for (Index d = 0; d < dim; ++d) total *= per_axis;
  if (total > 1e7) {
    throw PreconditionError("grid of " + std::to_string(per_axis) + "^" +
                            std::to_string(dim) + " points is too large");
  }
  const auto count = static_cast<std::size_t>(total);
  points.reserve(count + static_cast<std::size_t>(std::max(0, spec.random_samples)));

  auto coordinate = [&](int i) {
    return per_axis == 1 ? 0.0 : region.radius * (-1.0 + 2.0 * i / (per_axis - 1));
  };
  std::vector<int> digits(static_cast<std::size_t>(dim), 0);
  for (std::size_t k = 0; k < count; ++k) {
    Vector p = center;
    for (Index d = 0; d < dim; ++d) p[d] += coordinate(digits[static_cast<std::size_t>(d)]);
    points.push_back(std::move(p));
    // Odometer with the last coordinate fastest.
    for (Index d = dim - 1; d >= 0; --d) {
      auto& digit = digits[static_cast<std::size_t>(d)];
      if (++digit < per_axis) break;
      digit = 0;
    }
  }

  if (spec.random_samples > 0 && region.radius > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uniform(-region.radius, region.radius);
    for (int k = 0; k < spec.random_samples; ++k) {
      Vector p = center;
      for (Index d = 0; d < dim; ++d) p[d] += uniform(rng);
      points.push_back(std::move(p));
    }
  }
  return points;
}

ResidualReport sample_report(std::string name, int arity, const Region& region,
                             const SampleSpec& spec, double tol,
                             const ResidualFn& residual) {
  const std::vector<Vector> points = sample_points(arity, region, spec);
  const std::size_t count = points.size();
  std::vector<double> values(count, 0.0);
  std::vector<std::string> errors(count);

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < count; k += stride) {
      try {
        values[k] = residual(points[k]);
      } catch (const std::exception& ex) {
        errors[k] = ex.what();
        if (errors[k].empty()) errors[k] = "evaluation failed";
      }
    }
  };

  std::size_t threads = spec.threads > 0 ? static_cast<std::size_t>(spec.threads)
                                         : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }

  ResidualReport report;
  report.check = std::move(name);
  report.samples = count;
  report.tolerance = tol;
  double sum = 0.0;
  std::size_t evaluated = 0;
  for (std::size_t k = 0; k < count; ++k) {
    if (!errors[k].empty()) {
      ++report.errors;
      report.failures.push_back({to_std(points[k]), 0.0, errors[k]});
      continue;
    }
    const double r = values[k];
    ++evaluated;
    sum += r;
    if (evaluated == 1 || r > report.max_residual || std::isnan(r)) {
      report.max_residual = r;
      report.worst_point = to_std(points[k]);
    }
    if (!(r <= tol)) report.failures.push_back({to_std(points[k]), r, {}});
  }
  report.mean_residual = evaluated ? sum / static_cast<double>(evaluated) : 0.0;
  return report;
}

ResidualReport grid_report(Check check, const SectionField& sigma, const Region& region,
                           const SampleSpec& spec, double tol) {
  const Index m = sigma.fibration().base_dim();
  if (region.center.size() != m) {
    throw PreconditionError("region centre has the wrong dimension");
  }
  auto part = [m](const Vector& p, int i) -> Vector { return p.segment(i * m, m); };

  switch (check) {
    case Check::Identity: {
      Region single{sigma.fibration().base_point(), 0.0};
      return sample_report(to_string(check), 1, single, spec, tol,
                           [&](const Vector&) { return identity_residual(sigma); });
    }
    case Check::Functional:
      return sample_report(to_string(check), 2, region, spec, tol, [&](const Vector& p) {
        return inf_norm(functional_residual(sigma, part(p, 0), part(p, 1)));
      });
    case Check::Differential:
      return sample_report(to_string(check), 1, region, spec, tol, [&](const Vector& p) {
        return differential_residual(sigma, p);
      });
    case Check::Tangency:
      return sample_report(to_string(check), 1, region, spec, tol, [&](const Vector& p) {
        return tangency_residual(sigma, p);
      });
    case Check::PathIndependence: {
      if (!sigma.frame()) {
        throw PreconditionError("path independence needs a frame-built section");
      }
      SolverParams straight = sigma.params();
      straight.path_strategy = PathStrategy::StraightLine;
      SolverParams legs = sigma.params();
      legs.path_strategy = PathStrategy::AxisLegs;
      const SectionField a =
          build_section_ode(sigma.group(), sigma.fibration(), *sigma.frame(), straight);
      const SectionField b =
          build_section_ode(sigma.group(), sigma.fibration(), *sigma.frame(), legs);
      return sample_report(to_string(check), 1, region, spec, tol, [&](const Vector& p) {
        return inf_norm(a.evaluate(p) - b.evaluate(p));
      });
    }
    case Check::Associativity:
      return sample_report(to_string(check), 3, region, spec, tol, [&](const Vector& p) {
        return associativity_residual(sigma, part(p, 0), part(p, 1), part(p, 2));
      });
  }
  throw PreconditionError("unknown check");
}

}  // namespace liesect
