#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liesect/expr.hpp"
#include "liesect/linalg.hpp"

namespace liesect {

inline constexpr double kDefaultDomainRadius = 0.5;

enum class ProductKind { AbelianExp, TriangularAffine, CustomExpr };

const char* to_string(ProductKind kind) noexcept;

struct NewtonOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
};

/// A local Lie group in one global coordinate chart.
///
/// `domain_radius()` is the sup-norm radius of the neighbourhood of the base
/// point on which sections are solved for; `contains()` applies the same
/// radius to group coordinates around e. Solver iterates are checked with
/// `is_valid()`, which enforces the built-in positivity constraints (a > 0,
/// t11 > 0, t22 > 0) and finiteness.
class GroupChart {
 public:
  /// Coordinates (a, x), a > 0, e = (1, 0), (a,x)(b,y) = (ab, x+y).
  static GroupChart abelian_exp(double domain_radius = kDefaultDomainRadius);

  /// Coordinates (t11, t21, t22, x1, x2) of a pair (M, X) with M lower
  /// triangular; e = (1,0,1,0,0), (M,X)(N,Y) = (MN, X + MY).
  static GroupChart triangular_affine(double domain_radius = kDefaultDomainRadius);

  /// Component k of the product is `components[k]` over g1..gn, h1..hn.
  static GroupChart custom(std::vector<expr::Ast> components, Vector identity,
                           double domain_radius = kDefaultDomainRadius);

  ProductKind kind() const noexcept { return kind_; }
  std::string name() const;
  Index dim() const noexcept { return identity_.size(); }
  const Vector& identity() const noexcept { return identity_; }
  double domain_radius() const noexcept { return domain_radius_; }
  const std::vector<expr::Ast>& components() const noexcept { return components_; }

  /// Copy with a different trust radius.
  GroupChart with_domain_radius(double radius) const;

  /// Sup-norm ball of domain_radius() around e.
  bool contains(const Vector& g) const;

  /// Finite coordinates inside the chart (positivity for the built-ins).
  bool is_valid(const Vector& g) const;

  Vector mu(const Vector& g, const Vector& h) const;

  /// Directional derivative of mu at (g, h) along (dg, dh).
  Vector mu_derivative(const Vector& g, const Vector& h, const Vector& dg,
                       const Vector& dh) const;

  /// Tangent map of left multiplication by g at the identity: column j is the
  /// derivative of h -> mu(g, h) at h = e along coordinate j.
  Matrix d2mu_at(const Vector& g) const;

  /// d2mu_at(g) * v without assembling the matrix.
  Vector left_translate(const Vector& g, const Vector& v) const;

  /// Solves mu(g, z) = e by undamped Newton from z = e.
  Vector inverse(const Vector& g, const NewtonOptions& options = {}) const;

 private:
  GroupChart(ProductKind kind, Vector identity, double radius,
             std::vector<expr::Ast> components);

  ProductKind kind_;
  Vector identity_;
  double domain_radius_;
  std::vector<expr::Ast> components_;
};

/// The projection p : U -> M in coordinates, with base point x0 = p(e).
///
/// Construction checks that Dp(e) has full row rank m; only that submersion
/// property is checked, not a global bundle structure.
class FibrationChart {
 public:
  /// Minimum singular value of Dp(e) accepted as full rank.
  static constexpr double kRankTolerance = 1e-9;

  /// p(g) = (g[indices[0]], ..., g[indices[m-1]]), zero-based indices.
  static FibrationChart coordinate_projection(const GroupChart& group,
                                              std::vector<Index> indices);

  /// Component i of p is `components[i]` over x1..xn.
  static FibrationChart from_expressions(const GroupChart& group,
                                         std::vector<expr::Ast> components);

  /// Projection onto the translation coordinates of a built-in group.
  static FibrationChart standard(const GroupChart& group);

  Index base_dim() const noexcept { return base_point_.size(); }
  Index group_dim() const noexcept { return group_dim_; }
  const Vector& base_point() const noexcept { return base_point_; }
  const std::vector<Index>& indices() const noexcept { return indices_; }
  const std::vector<expr::Ast>& components() const noexcept { return components_; }
  bool is_coordinate_projection() const noexcept { return components_.empty(); }

  Vector project(const Vector& g) const;

  /// Jacobian Dp(g), m x n.
  Matrix dp(const Vector& g) const;

  /// Orthonormal basis of ker Dp(e) as the columns of an n x (n-m) matrix.
  const Matrix& vertical_subspace() const noexcept { return vertical_; }

 private:
  FibrationChart(Index group_dim, std::vector<Index> indices,
                 std::vector<expr::Ast> components, const Vector& identity);

  Index group_dim_;
  std::vector<Index> indices_;
  std::vector<expr::Ast> components_;
  Vector base_point_;
  Matrix vertical_;
};

}  // namespace liesect
