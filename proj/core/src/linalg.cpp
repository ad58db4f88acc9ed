#include "liesect/linalg.hpp"

namespace liesect {

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

Matrix null_space(const Matrix& a, Index rank) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Matrix& v = svd.matrixV();
  return v.rightCols(v.cols() - rank);
}

Vector orthogonal_component(const Matrix& basis, const Vector& v) {
  if (basis.cols() == 0) return v;
  Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(basis.rows(), basis.cols());
  return v - q * (q.transpose() * v);
}

}  // namespace liesect
