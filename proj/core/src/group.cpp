#include "liesect/group.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "liesect/error.hpp"

namespace liesect {

const char* to_string(ProductKind kind) noexcept {
  switch (kind) {
    case ProductKind::AbelianExp: return "abelian_exp";
    case ProductKind::TriangularAffine: return "triangular_affine";
    case ProductKind::CustomExpr: return "custom";
  }
  return "unknown";
}

namespace {

void require_dim(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw PreconditionError(std::string(what) + " has dimension " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(n));
  }
}

void require_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw PreconditionError("domain radius must be a positive finite number");
  }
}

}  // namespace

GroupChart::GroupChart(ProductKind kind, Vector identity, double radius,
                       std::vector<expr::Ast> components)
    : kind_(kind),
      identity_(std::move(identity)),
      domain_radius_(radius),
      components_(std::move(components)) {
  require_radius(radius);
}

GroupChart GroupChart::abelian_exp(double domain_radius) {
  Vector e(2);
  e << 1.0, 0.0;
  return GroupChart(ProductKind::AbelianExp, std::move(e), domain_radius, {});
}

GroupChart GroupChart::triangular_affine(double domain_radius) {
  Vector e(5);
  e << 1.0, 0.0, 1.0, 0.0, 0.0;
  return GroupChart(ProductKind::TriangularAffine, std::move(e), domain_radius, {});
}

GroupChart GroupChart::custom(std::vector<expr::Ast> components, Vector identity,
                              double domain_radius) {
  const auto n = static_cast<int>(identity.size());
  if (n == 0) {
    throw PreconditionError("custom group needs at least one coordinate");
  }
  if (static_cast<int>(components.size()) != n) {
    throw PreconditionError("custom group has " + std::to_string(components.size()) +
                            " product components for " + std::to_string(n) +
                            " identity coordinates");
  }
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& ast = components[k];
    if (ast.max_index('x') > 0) {
      throw PreconditionError("product component " + std::to_string(k) +
                              " may only use g1..gn and h1..hn");
    }
    if (ast.max_index('g') > n || ast.max_index('h') > n) {
      throw PreconditionError("product component " + std::to_string(k) +
                              " references a coordinate beyond n = " +
                              std::to_string(n));
    }
  }
  return GroupChart(ProductKind::CustomExpr, std::move(identity), domain_radius,
                    std::move(components));
}

std::string GroupChart::name() const { return to_string(kind_); }

GroupChart GroupChart::with_domain_radius(double radius) const {
  GroupChart copy = *this;
  require_radius(radius);
  copy.domain_radius_ = radius;
  return copy;
}

bool GroupChart::contains(const Vector& g) const {
  return g.size() == dim() && g.allFinite() &&
         inf_norm(g - identity_) <= domain_radius_ * (1.0 + 1e-12);
}

bool GroupChart::is_valid(const Vector& g) const {
  if (g.size() != dim() || !g.allFinite()) return false;
  switch (kind_) {
    case ProductKind::AbelianExp: return g[0] > 0.0;
    case ProductKind::TriangularAffine: return g[0] > 0.0 && g[2] > 0.0;
    case ProductKind::CustomExpr: return true;
  }
  return false;
}

Vector GroupChart::mu(const Vector& g, const Vector& h) const {
  require_dim(g, dim(), "g");
  require_dim(h, dim(), "h");
  Vector out(dim());
  switch (kind_) {
    case ProductKind::AbelianExp:
      out << g[0] * h[0], g[1] + h[1];
      break;
    case ProductKind::TriangularAffine:
      // M = [[g0, 0], [g1, g2]], X = (g3, g4)
      out << g[0] * h[0],
             g[1] * h[0] + g[2] * h[1],
             g[2] * h[2],
             g[3] + g[0] * h[3],
             g[4] + g[1] * h[3] + g[2] * h[4];
      break;
    case ProductKind::CustomExpr: {
      const expr::Env env{as_span(g), as_span(h), {}, {}, {}, {}};
      for (Index k = 0; k < dim(); ++k) {
        out[k] = expr::evaluate(components_[static_cast<std::size_t>(k)], env);
      }
      break;
    }
  }
  return out;
}

Vector GroupChart::mu_derivative(const Vector& g, const Vector& h,
                                 const Vector& dg, const Vector& dh) const {
  require_dim(g, dim(), "g");
  require_dim(h, dim(), "h");
  require_dim(dg, dim(), "dg");
  require_dim(dh, dim(), "dh");
  Vector out(dim());
  switch (kind_) {
    case ProductKind::AbelianExp:
      out << dg[0] * h[0] + g[0] * dh[0], dg[1] + dh[1];
      break;
    case ProductKind::TriangularAffine:
      out << dg[0] * h[0] + g[0] * dh[0],
             dg[1] * h[0] + g[1] * dh[0] + dg[2] * h[1] + g[2] * dh[1],
             dg[2] * h[2] + g[2] * dh[2],
             dg[3] + dg[0] * h[3] + g[0] * dh[3],
             dg[4] + dg[1] * h[3] + g[1] * dh[3] + dg[2] * h[4] + g[2] * dh[4];
      break;
    case ProductKind::CustomExpr: {
      const expr::Env env{as_span(g), as_span(h), {}, as_span(dg), as_span(dh), {}};
      for (Index k = 0; k < dim(); ++k) {
        out[k] =
            expr::evaluate_dual(components_[static_cast<std::size_t>(k)], env).derivative;
      }
      break;
    }
  }
  return out;
}

Vector GroupChart::left_translate(const Vector& g, const Vector& v) const {
  require_dim(g, dim(), "g");
  require_dim(v, dim(), "v");
  Vector out(dim());
  switch (kind_) {
    case ProductKind::AbelianExp:
      out << g[0] * v[0], v[1];
      break;
    case ProductKind::TriangularAffine:
      // (B, w) -> (M B, M w)
      out << g[0] * v[0],
             g[1] * v[0] + g[2] * v[1],
             g[2] * v[2],
             g[0] * v[3],
             g[1] * v[3] + g[2] * v[4];
      break;
    case ProductKind::CustomExpr: {
      const expr::Env env{as_span(g), as_span(identity_), {}, {}, as_span(v), {}};
      for (Index k = 0; k < dim(); ++k) {
        out[k] =
            expr::evaluate_dual(components_[static_cast<std::size_t>(k)], env).derivative;
      }
      break;
    }
  }
  return out;
}

Matrix GroupChart::d2mu_at(const Vector& g) const {
  const Index n = dim();
  Matrix out(n, n);
  Vector unit = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    unit[j] = 1.0;
    out.col(j) = left_translate(g, unit);
    unit[j] = 0.0;
  }
  return out;
}

Vector GroupChart::inverse(const Vector& g, const NewtonOptions& options) const {
  require_dim(g, dim(), "g");
  const Index n = dim();
  const Vector zero = Vector::Zero(n);
  Vector z = identity_;
  Matrix jacobian(n, n);
  Vector unit = Vector::Zero(n);
  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const Vector residual = mu(g, z) - identity_;
    if (inf_norm(residual) <= options.tolerance) return z;
    if (iter == options.max_iterations) break;
    for (Index j = 0; j < n; ++j) {
      unit[j] = 1.0;
      jacobian.col(j) = mu_derivative(g, z, zero, unit);
      unit[j] = 0.0;
    }
    Eigen::FullPivLU<Matrix> lu(jacobian);
    if (!lu.isInvertible()) {
      throw NumericalError("inverse: singular Jacobian of h -> mu(g, h)");
    }
    z -= lu.solve(residual);
    if (!z.allFinite()) break;
  }
  throw NumericalError("inverse: Newton did not converge in " +
                       std::to_string(options.max_iterations) +
                       " iterations (g too far from e?)");
}

// ---------------------------------------------------------------------------

FibrationChart::FibrationChart(Index group_dim, std::vector<Index> indices,
                               std::vector<expr::Ast> components,
                               const Vector& identity)
    : group_dim_(group_dim),
      indices_(std::move(indices)),
      components_(std::move(components)) {
  base_point_ = project(identity);
  const Index m = base_point_.size();
  if (m == 0 || m > group_dim_) {
    throw PreconditionError("fibration base dimension " + std::to_string(m) +
                            " must lie in [1, " + std::to_string(group_dim_) + "]");
  }
  const Matrix jac = dp(identity);
  const Vector sv = singular_values(jac);
  if (!(sv[m - 1] > kRankTolerance)) {
    throw PreconditionError(
        "fibration is not a submersion at e: smallest singular value of Dp(e) is " +
        std::to_string(sv[m - 1]));
  }
  vertical_ = null_space(jac, m);
}

FibrationChart FibrationChart::coordinate_projection(const GroupChart& group,
                                                     std::vector<Index> indices) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= group.dim()) {
      throw PreconditionError("projection index " + std::to_string(indices[i]) +
                              " out of range for n = " + std::to_string(group.dim()));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (indices[j] == indices[i]) {
        throw PreconditionError("projection index " + std::to_string(indices[i]) +
                                " repeated");
      }
    }
  }
  return FibrationChart(group.dim(), std::move(indices), {}, group.identity());
}

FibrationChart FibrationChart::from_expressions(const GroupChart& group,
                                                std::vector<expr::Ast> components) {
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& ast = components[i];
    if (ast.max_index('g') > 0 || ast.max_index('h') > 0) {
      throw PreconditionError("fibration component " + std::to_string(i) +
                              " may only use x1..xn");
    }
    if (ast.max_index('x') > group.dim()) {
      throw PreconditionError("fibration component " + std::to_string(i) +
                              " references a coordinate beyond n = " +
                              std::to_string(group.dim()));
    }
  }
  return FibrationChart(group.dim(), {}, std::move(components), group.identity());
}

FibrationChart FibrationChart::standard(const GroupChart& group) {
  switch (group.kind()) {
    case ProductKind::AbelianExp:
      return coordinate_projection(group, {1});
    case ProductKind::TriangularAffine:
      return coordinate_projection(group, {3, 4});
    case ProductKind::CustomExpr:
      break;
  }
  throw PreconditionError("custom groups have no standard fibration");
}

Vector FibrationChart::project(const Vector& g) const {
  require_dim(g, group_dim_, "g");
  if (is_coordinate_projection()) {
    Vector out(static_cast<Index>(indices_.size()));
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      out[static_cast<Index>(i)] = g[indices_[i]];
    }
    return out;
  }
  Vector out(static_cast<Index>(components_.size()));
  const expr::Env env{{}, {}, as_span(g), {}, {}, {}};
  for (std::size_t i = 0; i < components_.size(); ++i) {
    out[static_cast<Index>(i)] = expr::evaluate(components_[i], env);
  }
  return out;
}

Matrix FibrationChart::dp(const Vector& g) const {
  require_dim(g, group_dim_, "g");
  if (is_coordinate_projection()) {
    Matrix out = Matrix::Zero(static_cast<Index>(indices_.size()), group_dim_);
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      out(static_cast<Index>(i), indices_[i]) = 1.0;
    }
    return out;
  }
  Matrix out(static_cast<Index>(components_.size()), group_dim_);
  Vector unit = Vector::Zero(group_dim_);
  for (Index j = 0; j < group_dim_; ++j) {
    unit[j] = 1.0;
    const expr::Env env{{}, {}, as_span(g), {}, {}, as_span(unit)};
    for (std::size_t i = 0; i < components_.size(); ++i) {
      out(static_cast<Index>(i), j) = expr::evaluate_dual(components_[i], env).derivative;
    }
    unit[j] = 0.0;
  }
  return out;
}

}  // namespace liesect
