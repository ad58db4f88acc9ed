#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace liesect {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline Vector to_vector(std::span<const double> values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

inline std::vector<double> to_std(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

/// Singular values in decreasing order.
Vector singular_values(const Matrix& a);

/// Orthonormal basis (as columns) of the null space of `a`, obtained from a
/// full SVD; `rank` is the number of leading singular values kept.
Matrix null_space(const Matrix& a, Index rank);

/// Component of `v` orthogonal to the column span of `basis` (full column rank).
Vector orthogonal_component(const Matrix& basis, const Vector& v);

}  // namespace liesect
