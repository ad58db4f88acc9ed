#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "liesect/group.hpp"
#include "liesect/lie_algebra.hpp"
#include "liesect/linalg.hpp"

namespace liesect {

enum class PathStrategy {
  StraightLine,  ///< x(s) = x0 + s (x - x0)
  AxisLegs,      ///< one leg per base axis, in coordinate order
};

enum class Route {
  Exp,       ///< flow of sum t_i F_i from e, Newton-inverted through p
  Ode,       ///< integrate the left-translation ODE along a base path
  Function,  ///< user-supplied closed form (oracles, injected non-solutions)
};

const char* to_string(PathStrategy strategy) noexcept;
const char* to_string(Route route) noexcept;

struct SolverParams {
  double rk4_step = 1e-2;
  double newton_tol = 1e-10;
  int max_newton_iter = 50;
  PathStrategy path_strategy = PathStrategy::StraightLine;

  /// Throws PreconditionError unless 0 < rk4_step <= domain_radius and the
  /// tolerances are positive.
  void validate(double domain_radius) const;
};

/// Time-t flow of the left-invariant field generated by x, started at e.
/// Classical RK4 with ceil(|t| / rk4_step) equal steps. Throws NumericalError
/// if an iterate leaves the chart (GroupChart::is_valid).
Vector exp_left_invariant(const GroupChart& group, const Vector& x, double t,
                          const SolverParams& params);

/// A local section sigma of p, evaluatable at base points.
///
/// Solver-built sections accept any finite target; they throw NumericalError
/// when an iterate leaves the chart or Newton fails, which is how targets far
/// outside the domain radius are rejected.
///
/// Copies share one synchronized evaluation cache, so concurrent evaluations
/// return the same values as sequential ones.
class SectionField {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  /// Wraps a closed-form map; used for oracles and deliberately wrong sections.
  static SectionField from_function(GroupChart group, FibrationChart fibration,
                                    Evaluator fn, std::string label = "function");

  Vector evaluate(const Vector& x) const;

  const GroupChart& group() const noexcept;
  const FibrationChart& fibration() const noexcept;
  const std::optional<AlgebraFrame>& frame() const noexcept;
  const SolverParams& params() const noexcept;
  Route route() const noexcept;
  const std::string& label() const noexcept;

  void set_caching(bool enabled);

 private:
  struct State;
  explicit SectionField(std::shared_ptr<State> state);

  friend SectionField build_section_exp(const GroupChart&, const FibrationChart&,
                                        const AlgebraFrame&, const SolverParams&);
  friend SectionField build_section_ode(const GroupChart&, const FibrationChart&,
                                        const AlgebraFrame&, const SolverParams&);

  std::shared_ptr<State> state_;
};

/// Requires the frame to span a subalgebra transversal to the fibres
/// (PreconditionError otherwise). Evaluation throws NumericalError when
/// Newton fails or its Jacobian goes singular.
SectionField build_section_exp(const GroupChart& group, const FibrationChart& fibration,
                               const AlgebraFrame& frame, const SolverParams& params);

/// Integrates gamma' = L(gamma) [Dp(gamma) L(gamma)]^{-1} x'(s), with
/// L(gamma) = d2mu_at(gamma) F, along the configured base path. Closure is not
/// required; a non-closed frame shows up as path dependence.
SectionField build_section_ode(const GroupChart& group, const FibrationChart& fibration,
                               const AlgebraFrame& frame, const SolverParams& params);

/// p(mu(sigma(x), sigma(y))): the local group law induced on the base.
Vector derived_product(const SectionField& sigma, const Vector& x, const Vector& y);

}  // namespace liesect
