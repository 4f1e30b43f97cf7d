#pragma once

// Labeled datasets, per-class moments in data space, and their projection
// into feature space.

#include <vector>

#include "sqfa/distances.hpp"
#include "sqfa/filter_bank.hpp"

namespace sqfa {

/// Samples as rows of an N x n matrix with 0-based labels in [0, c).
/// c is inferred as max label + 1; every class needs at least two samples.
class LabeledDataset {
 public:
  LabeledDataset(Matrix samples, std::vector<int> labels);

  Index size() const noexcept { return samples_.rows(); }
  Index dim() const noexcept { return samples_.cols(); }
  int num_classes() const noexcept { return num_classes_; }
  const Matrix& samples() const noexcept { return samples_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  std::vector<Index> class_counts() const;

 private:
  Matrix samples_;
  std::vector<int> labels_;
  int num_classes_ = 0;
};

struct ClassMoments {
  Index count = 0;
  Vector mean;           // gamma_i
  Matrix covariance;     // Phi_i, 1/N normalization
  Matrix second_moment;  // M_i = Phi_i + gamma_i gamma_i^T
};

/// Per-class data-space statistics; the trainer's only view of the data.
class ClassEnsemble {
 public:
  ClassEnsemble(Index dim, std::vector<ClassMoments> classes);

  /// Builds M_i = Phi_i + gamma_i gamma_i^T from (count, mean, covariance).
  static ClassEnsemble from_moments(Index dim, const std::vector<Index>& counts,
                                    const std::vector<Vector>& means,
                                    const std::vector<Matrix>& covariances);

  Index dim() const noexcept { return dim_; }
  int num_classes() const noexcept { return static_cast<int>(classes_.size()); }
  const ClassMoments& operator[](int i) const { return classes_[static_cast<std::size_t>(i)]; }
  const std::vector<ClassMoments>& classes() const noexcept { return classes_; }

 private:
  Index dim_ = 0;
  std::vector<ClassMoments> classes_;
};

/// Per-class feature-space statistics under a filter bank and ridge sigma2:
///   mu_i = F^T gamma_i, Sigma_i = F^T Phi_i F + sigma2 I, Psi_i = F^T M_i F + sigma2 I.
struct FeatureClassStats {
  Vector mean;
  SpdMatrix covariance;
  SpdMatrix second_moment;
};

struct FeatureStats {
  double sigma2 = 0.0;
  std::vector<FeatureClassStats> classes;

  /// (mu_i, Sigma_i), or (0, Psi_i) when `second_moments` is set.
  std::vector<GaussianParams> params(bool second_moments = false) const;
};

ClassEnsemble estimate_class_statistics(const LabeledDataset& data);

/// Accepts any n x m matrix (columns need not be unit norm). Throws
/// NotPositiveDefinite if a projected matrix is singular, which can only
/// happen at sigma2 == 0.
FeatureStats project_statistics(const ClassEnsemble& ens,
                                const Eigen::Ref<const Matrix>& filters, double sigma2);
FeatureStats project_statistics(const ClassEnsemble& ens, const FilterBank& filters,
                                double sigma2);

}  // namespace sqfa
