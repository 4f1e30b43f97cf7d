#include "sqfa/spd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sqfa/error.hpp"

namespace sqfa {

namespace {

void require_square(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << " must be square and non-empty, got " << m.rows() << "x" << m.cols();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
}

void require_same_dim(Index a, Index b) {
  if (a != b) {
    std::ostringstream os;
    os << "matrix dimensions differ: " << a << " vs " << b;
    raise(ErrorCode::DimensionMismatch, os.str());
  }
}

}  // namespace

SpdMatrix::SpdMatrix(const Eigen::Ref<const Matrix>& entries) {
  require_square(entries, "SPD matrix");
  const Index n = entries.rows();
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      const double gap = std::abs(entries(a, b) - entries(b, a));
      if (!(gap <= kSymmetryTolerance * std::max(1.0, std::abs(entries(a, b))))) {
        std::ostringstream os;
        os << "entry (" << a << "," << b << ") differs from its transpose by " << gap;
        raise(ErrorCode::NotSymmetric, os.str());
      }
    }
  }
  entries_ = 0.5 * (entries + entries.transpose());
  llt_.compute(entries_);
  if (llt_.info() != Eigen::Success || !entries_.allFinite()) {
    raise(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
  }
}

SpdMatrix SpdMatrix::identity(Index dim) { return SpdMatrix(Matrix::Identity(dim, dim)); }

double SpdMatrix::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Matrix SpdMatrix::inverse() const {
  return llt_.solve(Matrix::Identity(dim(), dim()));
}

GeneralizedSpectrum generalized_eigen(const Eigen::Ref<const Matrix>& symmetric_a,
                                      const SpdMatrix& b) {
  require_square(symmetric_a, "left-hand matrix");
  require_same_dim(symmetric_a.rows(), b.dim());

  // C = L^-1 A L^-T, symmetrized against roundoff before the eigensolve.
  const auto lower = b.cholesky().matrixL();
  Matrix c = lower.solve(symmetric_a);
  c = lower.solve(c.transpose()).eval();
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
  GeneralizedSpectrum out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = b.cholesky().matrixU().solve(solver.eigenvectors());
  return out;
}

GeneralizedSpectrum generalized_eigen(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim());
  GeneralizedSpectrum out = generalized_eigen(a.matrix(), b);
  // Roundoff can push a tiny eigenvalue of an SPD pencil to <= 0.
  const double floor = std::numeric_limits<double>::min();
  out.eigenvalues = out.eigenvalues.cwiseMax(floor);
  return out;
}

double affine_invariant_distance(const SpdMatrix& a, const SpdMatrix& b) {
  const GeneralizedSpectrum spec = generalized_eigen(a, b);
  return std::sqrt(spec.eigenvalues.array().log().square().sum());
}

AffineInvariantGradient affine_invariant_gradient(const SpdMatrix& a, const SpdMatrix& b) {
  const GeneralizedSpectrum spec = generalized_eigen(a, b);
  const Eigen::ArrayXd logs = spec.eigenvalues.array().log();
  const double d = std::sqrt(logs.square().sum());
  if (!(d > kDegenerateDistance)) {
    raise(ErrorCode::DegenerateDistance, "affine-invariant distance is zero");
  }
  const Matrix& v = spec.eigenvectors;
  // d lambda_k / dA = v_k v_k^T, d lambda_k / dB = -lambda_k v_k v_k^T.
  const Vector weight_a = (logs / spec.eigenvalues.array() / d).matrix();
  const Vector weight_b = (-logs / d).matrix();

  AffineInvariantGradient out;
  out.distance = d;
  out.wrt_a = v * weight_a.asDiagonal() * v.transpose();
  out.wrt_b = v * weight_b.asDiagonal() * v.transpose();
  return out;
}

}  // namespace sqfa
