#pragma once

#include <utility>

#include "liesect/group.hpp"
#include "liesect/linalg.hpp"

namespace liesect {

inline constexpr double kDefaultClosureTol = 1e-7;
inline constexpr double kBracketStep = 1e-5;

/// m linearly independent tangent vectors at e, stored as the columns of an
/// n x m matrix. The candidate subalgebra is their span.
class AlgebraFrame {
 public:
  static constexpr double kRankTolerance = 1e-9;

  /// Throws PreconditionError if the columns are (numerically) dependent.
  explicit AlgebraFrame(Matrix columns);

  Index group_dim() const noexcept { return columns_.rows(); }
  Index size() const noexcept { return columns_.cols(); }
  const Matrix& matrix() const noexcept { return columns_; }
  Vector column(Index i) const { return columns_.col(i); }

 private:
  Matrix columns_;
};

/// Lie bracket on the tangent space at e:
///   [X,Y]^k = sum_ij d^2 mu^k / dg^i dh^j (e,e) (X^i Y^j - Y^i X^j).
/// The mixed second derivative is a central difference (step kBracketStep)
/// of the left-translation map along X.
Vector bracket(const GroupChart& group, const Vector& x, const Vector& y);

struct ClosureReport {
  bool is_subalgebra = false;
  /// Largest norm of a pairwise bracket's component orthogonal to span F.
  double max_residual = 0.0;
  std::pair<Index, Index> worst_pair{0, 0};
  double tolerance = kDefaultClosureTol;
};

ClosureReport closure_check(const GroupChart& group, const AlgebraFrame& frame,
                            double tol = kDefaultClosureTol);

struct TransversalityReport {
  bool transversal = false;
  double min_singular_value = 0.0;
  /// Largest over smallest singular value of [F | vertical basis].
  double condition_number = 0.0;
};

TransversalityReport transversality_check(const GroupChart& group,
                                          const FibrationChart& fibration,
                                          const AlgebraFrame& frame);

/// Coefficients of [F_i, F_j] in the frame basis plus the part outside it.
struct StructureConstants {
  /// coefficients[k](i, j) is the F_k coefficient of [F_i, F_j].
  std::vector<Matrix> coefficients;
  /// residual(i, j) is the norm of [F_i, F_j] orthogonal to span F.
  Matrix residual;
};

StructureConstants structure_constants(const GroupChart& group,
                                       const AlgebraFrame& frame);

}  // namespace liesect
