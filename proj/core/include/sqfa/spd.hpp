#pragma once

// Symmetric positive-definite matrices, the generalized symmetric-definite
// eigenproblem, and the affine-invariant Riemannian distance on SPD(m).

#include <Eigen/Dense>

namespace sqfa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance on |X(a,b) - X(b,a)| accepted (and repaired) on construction.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Below this value a distance is treated as zero for gradient purposes.
inline constexpr double kDegenerateDistance = 1e-12;

/// A symmetric positive-definite matrix together with its Cholesky factor.
///
/// Construction symmetrizes the input as (X + X^T)/2. Asymmetry above
/// kSymmetryTolerance throws NotSymmetric; a failed Cholesky (any pivot <= 0,
/// no slack) throws NotPositiveDefinite. Instances are immutable.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::Ref<const Matrix>& entries);

  static SpdMatrix identity(Index dim);

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  const Eigen::LLT<Matrix>& cholesky() const noexcept { return llt_; }

  /// Sum of log Cholesky pivots, times two.
  double log_det() const;
  Matrix inverse() const;
  template <typename Rhs>
  typename Rhs::PlainObject solve(const Eigen::MatrixBase<Rhs>& rhs) const {
    return llt_.solve(rhs);
  }

 private:
  Matrix entries_;
  Eigen::LLT<Matrix> llt_;
};

/// Solutions of A v = lambda B v. Eigenvalues ascending; eigenvector columns
/// are B-orthonormal (V^T B V = I).
struct GeneralizedSpectrum {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Cholesky reduction: B = L L^T, then a symmetric eigensolve of L^-1 A L^-T.
GeneralizedSpectrum generalized_eigen(const SpdMatrix& a, const SpdMatrix& b);

/// Same reduction for a merely symmetric left-hand side (e.g. a rank-deficient
/// scatter matrix). Eigenvalues may be zero or negative.
GeneralizedSpectrum generalized_eigen(const Eigen::Ref<const Matrix>& symmetric_a,
                                      const SpdMatrix& b);

/// sqrt(sum_k log^2 lambda_k) over the generalized eigenvalues of (A, B).
double affine_invariant_distance(const SpdMatrix& a, const SpdMatrix& b);

struct AffineInvariantGradient {
  double distance = 0.0;
  Matrix wrt_a;  // symmetric
  Matrix wrt_b;  // symmetric
};

/// Analytic gradient of affine_invariant_distance with respect to both
/// arguments, for symmetric perturbations: dd = <wrt_a, dA> + <wrt_b, dB>.
///
/// The per-eigenvalue formula is applied to whatever B-orthonormal basis the
/// eigensolver returns. This is valid at repeated eigenvalues because the
/// differentiated quantity is a symmetric function of the spectrum.
/// Throws DegenerateDistance when the distance is <= kDegenerateDistance.
AffineInvariantGradient affine_invariant_gradient(const SpdMatrix& a, const SpdMatrix& b);

}  // namespace sqfa
