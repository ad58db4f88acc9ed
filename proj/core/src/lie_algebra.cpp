#include "liesect/lie_algebra.hpp"

#include <limits>
#include <string>

#include "liesect/error.hpp"

namespace liesect {

AlgebraFrame::AlgebraFrame(Matrix columns) : columns_(std::move(columns)) {
  if (columns_.cols() == 0 || columns_.rows() < columns_.cols()) {
    throw PreconditionError("frame must have between 1 and n columns, got " +
                            std::to_string(columns_.cols()) + " for n = " +
                            std::to_string(columns_.rows()));
  }
  if (!columns_.allFinite()) {
    throw PreconditionError("frame has non-finite entries");
  }
  const Vector sv = singular_values(columns_);
  if (!(sv[sv.size() - 1] > kRankTolerance)) {
    throw PreconditionError("frame columns are linearly dependent (smallest singular value " +
                            std::to_string(sv[sv.size() - 1]) + ")");
  }
}

namespace {

// sum_ij d^2 mu / dg^i dh^j (e,e) X^i Y^j
Vector mixed_second_derivative(const GroupChart& group, const Vector& x,
                               const Vector& y) {
  const Vector& e = group.identity();
  const Vector plus = group.left_translate(e + kBracketStep * x, y);
  const Vector minus = group.left_translate(e - kBracketStep * x, y);
  return (plus - minus) / (2.0 * kBracketStep);
}

}  // namespace

Vector bracket(const GroupChart& group, const Vector& x, const Vector& y) {
  return mixed_second_derivative(group, x, y) - mixed_second_derivative(group, y, x);
}

ClosureReport closure_check(const GroupChart& group, const AlgebraFrame& frame,
                            double tol) {
  if (frame.group_dim() != group.dim()) {
    throw PreconditionError("frame vectors have dimension " +
                            std::to_string(frame.group_dim()) + ", group has " +
                            std::to_string(group.dim()));
  }
  ClosureReport report;
  report.tolerance = tol;
  const Matrix& f = frame.matrix();
  for (Index i = 0; i < frame.size(); ++i) {
    for (Index j = i + 1; j < frame.size(); ++j) {
      const Vector b = bracket(group, f.col(i), f.col(j));
      const double r = orthogonal_component(f, b).norm();
      if (r > report.max_residual) {
        report.max_residual = r;
        report.worst_pair = {i, j};
      }
    }
  }
  report.is_subalgebra = report.max_residual <= tol;
  return report;
}

TransversalityReport transversality_check(const GroupChart& group,
                                          const FibrationChart& fibration,
                                          const AlgebraFrame& frame) {
  const Index n = group.dim();
  const Matrix& vertical = fibration.vertical_subspace();
  if (frame.group_dim() != n || fibration.group_dim() != n) {
    throw PreconditionError("frame, fibration and group dimensions disagree");
  }
  TransversalityReport report;
  if (frame.size() + vertical.cols() != n) {
    return report;
  }
  Matrix assembled(n, n);
  assembled << frame.matrix(), vertical;
  const Vector sv = singular_values(assembled);
  report.min_singular_value = sv[n - 1];
  report.transversal = report.min_singular_value > AlgebraFrame::kRankTolerance;
  report.condition_number = report.min_singular_value > 0.0
                                ? sv[0] / report.min_singular_value
                                : std::numeric_limits<double>::infinity();
  return report;
}

StructureConstants structure_constants(const GroupChart& group,
                                       const AlgebraFrame& frame) {
  const Index m = frame.size();
  const Matrix& f = frame.matrix();
  StructureConstants out;
  out.coefficients.assign(static_cast<std::size_t>(m), Matrix::Zero(m, m));
  out.residual = Matrix::Zero(m, m);
  Eigen::ColPivHouseholderQR<Matrix> qr(f);
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      const Vector b = bracket(group, f.col(i), f.col(j));
      const Vector c = qr.solve(b);
      const double r = (b - f * c).norm();
      for (Index k = 0; k < m; ++k) {
        out.coefficients[static_cast<std::size_t>(k)](i, j) = c[k];
        out.coefficients[static_cast<std::size_t>(k)](j, i) = -c[k];
      }
      out.residual(i, j) = r;
      out.residual(j, i) = r;
    }
  }
  return out;
}

}  // namespace liesect
