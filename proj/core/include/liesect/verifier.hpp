#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liesect/section.hpp"

namespace liesect {

/// Central-difference step used for every derivative of sigma.
inline constexpr double kSectionDiffStep = 1e-5;

/// sigma(p(sigma(x) sigma(y))) - sigma(x) sigma(y), componentwise.
Vector functional_residual(const SectionField& sigma, const Vector& x, const Vector& y);

/// |sigma(x0) - e|_inf
double identity_residual(const SectionField& sigma);

/// Max over unit xi of |Dsigma(x) Dp(sigma(x)) L xi - L xi|_inf, where
/// L = d2mu_at(sigma(x)) Dsigma(x0). Both Dsigma are central differences.
double differential_residual(const SectionField& sigma, const Vector& x);

/// Left translates of the columns of Dsigma(x0) by sigma(x) should be tangent
/// to the image of sigma. Returns the largest relative norm of the part
/// orthogonal to the column space of Dsigma(x).
double tangency_residual(const SectionField& sigma, const Vector& x);

/// |sigma_straight(x) - sigma_axis_legs(x)|_inf for the ODE route.
double path_independence_residual(const GroupChart& group,
                                  const FibrationChart& fibration,
                                  const AlgebraFrame& frame,
                                  const SolverParams& params, const Vector& x);

/// |(x*y)*z - x*(y*z)|_inf for the derived product on the base.
double associativity_residual(const SectionField& sigma, const Vector& x,
                              const Vector& y, const Vector& z);

enum class Check {
  Identity,         ///< sample space: a single point (x0)
  Functional,       ///< sample space: (x, y), dimension 2m
  Differential,     ///< sample space: x, dimension m
  Tangency,         ///< sample space: x, dimension m
  PathIndependence, ///< sample space: x, dimension m (needs a frame)
  Associativity,    ///< sample space: (x, y, z), dimension 3m
};

const char* to_string(Check check) noexcept;
std::optional<Check> parse_check(std::string_view name);

/// Sup-norm box of the given radius around `center` in the base space.
struct Region {
  Vector center;
  double radius = 0.3;
};

struct SampleSpec {
  int grid = 5;             ///< points per axis; 1 means only the centre
  int random_samples = 0;   ///< extra uniform samples in the box
  std::uint64_t seed = 0;
  int threads = 0;          ///< 0: hardware concurrency
};

struct SampleFailure {
  std::vector<double> point;
  double residual = 0.0;    ///< meaningless when `error` is set
  std::string error;        ///< evaluation error message, empty if none
};

struct ResidualReport {
  std::string check;
  std::size_t samples = 0;
  std::size_t errors = 0;   ///< samples whose evaluation threw
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::vector<double> worst_point;
  std::vector<SampleFailure> failures;  ///< in sample order
  double tolerance = 0.0;

  bool passed() const noexcept { return failures.empty(); }
};

/// Evaluates `check` on a uniform grid over the region (plus seeded random
/// samples). Per-sample evaluation errors are recorded as failures. Samples
/// may be evaluated concurrently; the report equals the sequential one.
ResidualReport grid_report(Check check, const SectionField& sigma, const Region& region,
                           const SampleSpec& spec, double tol);

/// Generic form: `residual` is called with points of dimension
/// `arity * region.center.size()` sampled from the product box.
using ResidualFn = std::function<double(const Vector&)>;
ResidualReport sample_report(std::string name, int arity, const Region& region,
                             const SampleSpec& spec, double tol,
                             const ResidualFn& residual);

/// Sample points used by sample_report, in order.
std::vector<Vector> sample_points(int arity, const Region& region, const SampleSpec& spec);

}  // namespace liesect
