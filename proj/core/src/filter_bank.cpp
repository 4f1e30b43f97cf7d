#include "sqfa/filter_bank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sqfa/error.hpp"

namespace sqfa {

FilterBank::FilterBank(Matrix filters) : filters_(std::move(filters)) {
  if (filters_.cols() == 0 || filters_.cols() > filters_.rows()) {
    std::ostringstream os;
    os << "filter bank must satisfy 0 < m <= n, got n=" << filters_.rows()
       << " m=" << filters_.cols();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
  for (Index k = 0; k < filters_.cols(); ++k) {
    const double norm = filters_.col(k).norm();
    if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
      std::ostringstream os;
      os << "filter " << k << " has norm " << norm;
      raise(ErrorCode::InvalidArgument, os.str());
    }
  }
}

FilterBank FilterBank::normalized(const Eigen::Ref<const Matrix>& filters) {
  Matrix out = filters;
  for (Index k = 0; k < out.cols(); ++k) {
    const double norm = out.col(k).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      raise(ErrorCode::InvalidArgument, "cannot normalize a zero or non-finite filter");
    }
    out.col(k) /= norm;
  }
  return FilterBank(std::move(out));
}

FilterBank FilterBank::coordinate_selector(Index n, Index m) {
  return FilterBank(Matrix::Identity(n, m));
}

Matrix FilterBank::project_rows(const Eigen::Ref<const Matrix>& samples) const {
  if (samples.cols() != data_dim()) {
    std::ostringstream os;
    os << "samples have " << samples.cols() << " columns, filters expect " << data_dim();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
  return samples * filters_;
}

FilterBank FilterBank::leading(Index count) const {
  return FilterBank(filters_.leftCols(count));
}

FilterBank FilterBank::orthogonalized() const {
  Eigen::HouseholderQR<Matrix> qr(filters_);
  Matrix q = qr.householderQ() * Matrix::Identity(data_dim(), feature_dim());
  return FilterBank::normalized(q);
}

double max_principal_angle_deg(const Eigen::Ref<const Matrix>& a,
                               const Eigen::Ref<const Matrix>& b) {
  if (a.rows() != b.rows()) {
    raise(ErrorCode::DimensionMismatch, "subspaces live in different ambient dimensions");
  }
  auto basis = [](const Eigen::Ref<const Matrix>& x) -> Matrix {
    Eigen::HouseholderQR<Matrix> qr(x);
    return qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
  };
  const Matrix overlap = basis(a).transpose() * basis(b);
  Eigen::JacobiSVD<Matrix> svd(overlap);
  const Vector s = svd.singularValues();
  // With unequal dimensions only min(dim) angles exist.
  const double smallest = s.size() == 0 ? 0.0 : s.minCoeff();
  return std::acos(std::clamp(smallest, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

}  // namespace sqfa
