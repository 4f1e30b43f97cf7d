#pragma once

// Dissimilarities between Gaussian class-conditional distributions and their
// analytic gradients.

#include <string_view>

#include "sqfa/spd.hpp"

namespace sqfa {

/// Mean and covariance of one class in feature space.
class GaussianParams {
 public:
  GaussianParams(Vector mean, SpdMatrix covariance);

  const Vector& mean() const noexcept { return mean_; }
  const SpdMatrix& covariance() const noexcept { return covariance_; }
  Index dim() const noexcept { return mean_.size(); }

 private:
  Vector mean_;
  SpdMatrix covariance_;
};

enum class DistanceKind {
  FisherRaoCalvoOller,
  FisherRaoZeroMean,
  Bhattacharyya,
  Hellinger,
  MahalanobisSq,
};

std::string_view to_string(DistanceKind kind);
/// Accepts the names produced by to_string. Throws InvalidArgument otherwise.
DistanceKind parse_distance_kind(std::string_view name);

/// Omega = [[Sigma + mu mu^T, mu], [mu^T, 1]], an element of SPD(m+1).
SpdMatrix calvo_oller_embedding(const GaussianParams& p);

/// Closed-form lower bound on the Fisher-Rao distance between two Gaussians:
/// d_AI(Omega_p, Omega_q) / sqrt(2). Exact when the means coincide.
double calvo_oller_distance(const GaussianParams& p, const GaussianParams& q);

/// Fisher-Rao distance between zero-mean Gaussians, d_AI(A, B) / sqrt(2).
double fisher_rao_zero_mean(const SpdMatrix& a, const SpdMatrix& b);

/// (mu1 - mu2)^T Sigma^-1 (mu1 - mu2).
double mahalanobis_sq(const Vector& mu1, const Vector& mu2, const SpdMatrix& sigma);

/// Exact Fisher-Rao distance for a shared covariance:
/// sqrt(2) * arccosh(1 + d_M^2 / 4).
double fisher_rao_equal_cov(const Vector& mu1, const Vector& mu2, const SpdMatrix& sigma);

/// Bhattacharyya distance between Gaussians; log-determinants via Cholesky.
double bhattacharyya(const GaussianParams& p, const GaussianParams& q);

/// Zero-mean Bhattacharyya distance written over the generalized spectrum of
/// (A, B): sum_k 0.5 * [log((1 + l_k) / 2) - 0.5 log l_k]. The leading 0.5
/// makes it agree with bhattacharyya() for zero means.
double bhattacharyya_zero_mean_spectral(const SpdMatrix& a, const SpdMatrix& b);

/// sqrt(1 - exp(-bhattacharyya)). Always in [0, 1).
double hellinger(const GaussianParams& p, const GaussianParams& q);

/// Dispatch over DistanceKind. For FisherRaoZeroMean the means are ignored and
/// the covariances are read as second-moment matrices. MahalanobisSq uses the
/// average covariance (Sigma_p + Sigma_q) / 2 so that it stays symmetric.
double distance(DistanceKind kind, const GaussianParams& p, const GaussianParams& q);

struct DistanceGradient {
  double value = 0.0;
  Vector mean_p;
  Matrix cov_p;  // symmetric
  Vector mean_q;
  Matrix cov_q;  // symmetric
};

/// Analytic gradient of distance(kind, p, q). Covariance gradients are for
/// symmetric perturbations. Fisher-Rao kinds throw DegenerateDistance at
/// coincident parameters; Hellinger returns a zero gradient there.
DistanceGradient distance_gradient(DistanceKind kind, const GaussianParams& p,
                                   const GaussianParams& q);

}  // namespace sqfa
