#include "liesect/section.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>
#include <vector>

#include "liesect/error.hpp"

namespace liesect {

const char* to_string(PathStrategy strategy) noexcept {
  switch (strategy) {
    case PathStrategy::StraightLine: return "straight";
    case PathStrategy::AxisLegs: return "two_leg";
  }
  return "unknown";
}

const char* to_string(Route route) noexcept {
  switch (route) {
    case Route::Exp: return "exp";
    case Route::Ode: return "ode";
    case Route::Function: return "function";
  }
  return "unknown";
}

void SolverParams::validate(double domain_radius) const {
  if (!(rk4_step > 0.0) || !(rk4_step <= domain_radius)) {
    throw PreconditionError("rk4_step must lie in (0, domain_radius]");
  }
  if (!(newton_tol > 0.0)) {
    throw PreconditionError("newton_tol must be positive");
  }
  if (max_newton_iter < 1) {
    throw PreconditionError("max_newton_iter must be at least 1");
  }
}

namespace {

constexpr double kNewtonJacobianStep = 1e-6;
constexpr double kMaxConditionNumber = 1e12;
constexpr std::size_t kMaxCacheEntries = 1u << 16;

std::string format_point(const Vector& v) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

void check_in_domain(const GroupChart& group, const Vector& g, const char* where) {
  if (!group.is_valid(g)) {
    throw NumericalError(std::string(where) + ": iterate " + format_point(g) +
                         " left the chart of " + group.name());
  }
}

void check_target(const Vector& x) {
  if (!x.allFinite()) {
    throw NumericalError("target x = " + format_point(x) + " is not finite");
  }
}

template <typename Rhs>
Vector rk4_integrate(const Vector& start, int steps, double dt, Rhs&& rhs,
                     const GroupChart& group, const char* where) {
  Vector y = start;
  for (int i = 0; i < steps; ++i) {
    const double s = i * dt;
    const Vector k1 = rhs(y, s);
    const Vector k2 = rhs(y + 0.5 * dt * k1, s + 0.5 * dt);
    const Vector k3 = rhs(y + 0.5 * dt * k2, s + 0.5 * dt);
    const Vector k4 = rhs(y + dt * k3, s + dt);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_in_domain(group, y, where);
  }
  return y;
}

int step_count(double length, double step) {
  return length == 0.0 ? 0 : static_cast<int>(std::ceil(length / step));
}

void require_frame_shape(const GroupChart& group, const FibrationChart& fibration,
                         const AlgebraFrame& frame) {
  if (frame.group_dim() != group.dim() || fibration.group_dim() != group.dim()) {
    throw PreconditionError("frame, fibration and group dimensions disagree");
  }
  if (frame.size() != fibration.base_dim()) {
    throw PreconditionError("frame has " + std::to_string(frame.size()) +
                            " vectors but the base has dimension " +
                            std::to_string(fibration.base_dim()));
  }
}

}  // namespace

Vector exp_left_invariant(const GroupChart& group, const Vector& x, double t,
                          const SolverParams& params) {
  if (x.size() != group.dim()) {
    throw PreconditionError("algebra element has the wrong dimension");
  }
  const int steps = x.isZero(0.0) ? 0 : step_count(std::abs(t), params.rk4_step);
  if (steps == 0) return group.identity();
  return rk4_integrate(
      group.identity(), steps, t / steps,
      [&](const Vector& g, double) { return group.left_translate(g, x); }, group,
      "exp_left_invariant");
}

// ---------------------------------------------------------------------------

struct SectionField::State {
  State(GroupChart g, FibrationChart p, std::optional<AlgebraFrame> f,
        SolverParams sp, Route r, std::string l, Evaluator fn)
      : group(std::move(g)),
        fibration(std::move(p)),
        frame(std::move(f)),
        params(sp),
        route(r),
        label(std::move(l)),
        evaluator(std::move(fn)) {}

  GroupChart group;
  FibrationChart fibration;
  std::optional<AlgebraFrame> frame;
  SolverParams params;
  Route route;
  std::string label;
  Evaluator evaluator;

  std::mutex mutex;
  bool caching = true;
  std::map<std::vector<double>, Vector> cache;
};

SectionField::SectionField(std::shared_ptr<State> state) : state_(std::move(state)) {}

const GroupChart& SectionField::group() const noexcept { return state_->group; }
const FibrationChart& SectionField::fibration() const noexcept { return state_->fibration; }
const std::optional<AlgebraFrame>& SectionField::frame() const noexcept {
  return state_->frame;
}
const SolverParams& SectionField::params() const noexcept { return state_->params; }
Route SectionField::route() const noexcept { return state_->route; }
const std::string& SectionField::label() const noexcept { return state_->label; }

SectionField SectionField::from_function(GroupChart group, FibrationChart fibration,
                                         Evaluator fn, std::string label) {
  return SectionField(std::make_shared<State>(std::move(group), std::move(fibration),
                                              std::nullopt, SolverParams{},
                                              Route::Function, std::move(label),
                                              std::move(fn)));
}

void SectionField::set_caching(bool enabled) {
  std::lock_guard lock(state_->mutex);
  state_->caching = enabled;
  if (!enabled) state_->cache.clear();
}

Vector SectionField::evaluate(const Vector& x) const {
  if (x.size() != state_->fibration.base_dim()) {
    throw PreconditionError("base point has dimension " + std::to_string(x.size()) +
                            ", expected " +
                            std::to_string(state_->fibration.base_dim()));
  }
  std::vector<double> key;
  {
    std::lock_guard lock(state_->mutex);
    if (state_->caching) {
      key = to_std(x);
      const auto it = state_->cache.find(key);
      if (it != state_->cache.end()) return it->second;
    }
  }
  Vector value = state_->evaluator(x);
  if (!key.empty()) {
    std::lock_guard lock(state_->mutex);
    if (state_->caching) {
      if (state_->cache.size() >= kMaxCacheEntries) state_->cache.clear();
      state_->cache.emplace(std::move(key), value);
    }
  }
  return value;
}

// ---------------------------------------------------------------------------

SectionField build_section_exp(const GroupChart& group, const FibrationChart& fibration,
                               const AlgebraFrame& frame, const SolverParams& params) {
  params.validate(group.domain_radius());
  require_frame_shape(group, fibration, frame);
  const ClosureReport closure = closure_check(group, frame);
  if (!closure.is_subalgebra) {
    throw PreconditionError("exp route needs a subalgebra; closure residual " +
                            std::to_string(closure.max_residual));
  }
  if (!transversality_check(group, fibration, frame).transversal) {
    throw PreconditionError("exp route needs a frame transversal to the fibre");
  }

  const Matrix f = frame.matrix();
  const Vector x0 = fibration.base_point();
  const Eigen::PartialPivLU<Matrix> initial(fibration.dp(group.identity()) * f);

  // Copies keep the evaluator independent of the caller's objects.
  SectionField::Evaluator eval = [group, fibration, f, x0, initial, params](const Vector& x) {
    check_target(x);
    const Index m = f.cols();
    auto flow = [&](const Vector& t) {
      return exp_left_invariant(group, f * t, 1.0, params);
    };
    auto base_of = [&](const Vector& t) { return fibration.project(flow(t)); };

    Vector t = initial.solve(x - x0);
    Vector gamma = flow(t);
    Matrix jacobian(m, m);
    for (int iter = 0;; ++iter) {
      const Vector residual = fibration.project(gamma) - x;
      if (inf_norm(residual) <= params.newton_tol) return gamma;
      if (iter >= params.max_newton_iter) {
        throw NumericalError("exp route: Newton did not converge at x = " +
                             format_point(x) + " (residual " +
                             std::to_string(inf_norm(residual)) + ")");
      }
      for (Index i = 0; i < m; ++i) {
        Vector tp = t;
        Vector tm = t;
        tp[i] += kNewtonJacobianStep;
        tm[i] -= kNewtonJacobianStep;
        jacobian.col(i) = (base_of(tp) - base_of(tm)) / (2.0 * kNewtonJacobianStep);
      }
      const Vector sv = singular_values(jacobian);
      if (!(sv[m - 1] > 0.0) || sv[0] / sv[m - 1] > kMaxConditionNumber) {
        throw NumericalError("exp route: singular Newton Jacobian at x = " +
                             format_point(x) + " (transversality lost)");
      }
      t -= jacobian.partialPivLu().solve(residual);
      gamma = flow(t);
    }
  };

  return SectionField(std::make_shared<SectionField::State>(
      group, fibration, frame, params, Route::Exp, "exp", std::move(eval)));
}

SectionField build_section_ode(const GroupChart& group, const FibrationChart& fibration,
                               const AlgebraFrame& frame, const SolverParams& params) {
  params.validate(group.domain_radius());
  require_frame_shape(group, fibration, frame);

  const Matrix f = frame.matrix();
  const Vector x0 = fibration.base_point();

  SectionField::Evaluator eval = [group, fibration, f, x0, params](const Vector& x) {
    check_target(x);
    const Index m = f.cols();
    const Index n = f.rows();

    std::vector<std::pair<Vector, Vector>> legs;
    if (params.path_strategy == PathStrategy::StraightLine) {
      legs.emplace_back(x0, x);
    } else {
      Vector from = x0;
      for (Index i = 0; i < m; ++i) {
        Vector to = from;
        to[i] = x[i];
        legs.emplace_back(from, to);
        from = to;
      }
    }

    Vector gamma = group.identity();
    Matrix l(n, m);
    for (std::size_t leg = 0; leg < legs.size(); ++leg) {
      const Vector delta = legs[leg].second - legs[leg].first;
      const int steps = step_count(delta.norm(), params.rk4_step);
      if (steps == 0) continue;
      auto rhs = [&](const Vector& g, double s) -> Vector {
        for (Index i = 0; i < m; ++i) l.col(i) = group.left_translate(g, f.col(i));
        const Matrix a = fibration.dp(g) * l;
        const Vector sv = singular_values(a);
        if (!(sv[m - 1] > 0.0) || sv[0] / sv[m - 1] > kMaxConditionNumber) {
          std::ostringstream os;
          os << "ode route: transversality lost (Dp L singular) on leg " << leg
             << " at s = " << s << " towards x = " << format_point(x);
          throw NumericalError(os.str());
        }
        return l * a.partialPivLu().solve(delta);
      };
      gamma = rk4_integrate(gamma, steps, 1.0 / steps, rhs, group, "ode route");
    }
    return gamma;
  };

  return SectionField(std::make_shared<SectionField::State>(
      group, fibration, frame, params, Route::Ode, "ode", std::move(eval)));
}

Vector derived_product(const SectionField& sigma, const Vector& x, const Vector& y) {
  const auto& group = sigma.group();
  return sigma.fibration().project(group.mu(sigma.evaluate(x), sigma.evaluate(y)));
}

}  // namespace liesect
