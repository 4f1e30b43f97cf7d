#pragma once

#include "sqfa/spd.hpp"

namespace sqfa {

/// Column-wise unit-norm tolerance for FilterBank.
inline constexpr double kUnitNormTolerance = 1e-10;

/// n x m projection matrix F with unit-norm columns (one filter per column).
class FilterBank {
 public:
  /// Validates that m <= n and every column has norm 1 within kUnitNormTolerance.
  explicit FilterBank(Matrix filters);

  /// Rescales each column to unit norm. Throws InvalidArgument on a zero column.
  static FilterBank normalized(const Eigen::Ref<const Matrix>& filters);

  /// First m columns of the n x n identity.
  static FilterBank coordinate_selector(Index n, Index m);

  Index data_dim() const noexcept { return filters_.rows(); }
  Index feature_dim() const noexcept { return filters_.cols(); }
  const Matrix& matrix() const noexcept { return filters_; }

  /// Projects data rows: Z = X F.
  Matrix project_rows(const Eigen::Ref<const Matrix>& samples) const;

  /// Leading `count` columns as a new bank.
  FilterBank leading(Index count) const;

  /// Orthonormal basis of the span (thin QR), for reporting. Same span.
  FilterBank orthogonalized() const;

 private:
  Matrix filters_;
};

/// Largest principal angle, in degrees, between span(a) and span(b).
double max_principal_angle_deg(const Eigen::Ref<const Matrix>& a,
                               const Eigen::Ref<const Matrix>& b);

}  // namespace sqfa
