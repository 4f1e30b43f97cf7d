#pragma once

// Reference dimensionality-reduction methods: PCA, shrinkage LDA, and
// AMA-Gauss (filters that maximize the Gaussian-decoder log posterior).

#include <utility>
#include <vector>

#include "sqfa/class_stats.hpp"
#include "sqfa/trainer.hpp"

namespace sqfa {

/// Top-m eigenvectors of the count-weighted total covariance, descending,
/// each signed so its largest-magnitude entry is positive.
FilterBank pca(const ClassEnsemble& ens, Index m);

/// Eigenvalues of the count-weighted total covariance, descending.
Vector total_covariance_spectrum(const ClassEnsemble& ens);

struct LdaModel {
  FilterBank filters;
  SpdMatrix within_class_cov;  // after shrinkage
  Matrix between_scatter;
  double fisher_criterion = 0.0;  // Tr((F^T W F)^-1 F^T S_b F) over the learned filters
};

inline constexpr double kDefaultLdaShrinkage = 0.1;

/// Generalized eigenvectors of (between-class scatter, shrunk within-class
/// covariance), unit Euclidean norm. Shrinkage s blends the within-class
/// covariance W toward (tr W / n) I: (1 - s) W + s (tr W / n) I.
/// Requires m <= c - 1; throws NotPositiveDefinite when the shrunk W is singular.
LdaModel lda(const ClassEnsemble& ens, Index m, double shrinkage = kDefaultLdaShrinkage);

/// (1/2) sum_{i,j} d_M^2(mu_i, mu_j) under a shared covariance.
double pairwise_mahalanobis_half_sum(const std::vector<Vector>& means, const SpdMatrix& shared);

/// c * Tr(Sigma^-1 S_z) with the unnormalized between-class scatter
/// S_z = sum_i (mu_i - mu)(mu_i - mu)^T, mu the mean of the mu_i. Equals
/// pairwise_mahalanobis_half_sum exactly.
double scaled_fisher_criterion(const std::vector<Vector>& means, const SpdMatrix& shared);

struct AmaGaussModel {
  FilterBank filters;
  double sigma2 = 0.0;
  std::vector<Vector> response_means;
  std::vector<SpdMatrix> response_covs;  // F^T Phi_i F + sigma2 I
};

/// Mean negative log posterior of the correct class under a flat prior, with
/// class-conditional response Gaussians N(F^T gamma_i, F^T Phi_i F + sigma2 I)
/// estimated from `data`. The response noise is folded into the covariance.
double ama_gauss_loss(const Eigen::Ref<const Matrix>& filters, const LabeledDataset& data,
                      double sigma2);

struct AmaLossValue {
  double value = 0.0;
  Matrix gradient;  // d loss / d filters
};
AmaLossValue ama_gauss_loss_with_gradient(const Eigen::Ref<const Matrix>& filters,
                                          const LabeledDataset& data, double sigma2);

/// Minimizes ama_gauss_loss with the trainer's trivialization, tolerance,
/// restarts and (when cfg.sequential_pairs) pairwise staging. cfg.kind is
/// ignored. The log records the negated loss, which is non-decreasing.
std::pair<AmaGaussModel, TrainLog> ama_gauss_fit(const LabeledDataset& data,
                                                 const TrainConfig& cfg);

}  // namespace sqfa
