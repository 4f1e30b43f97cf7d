#include "sqfa/random.hpp"

namespace sqfa {

Matrix sampling_factor(const Matrix& covariance) {
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance);
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace sqfa
