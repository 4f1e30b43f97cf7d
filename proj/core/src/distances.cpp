#include "sqfa/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "sqfa/error.hpp"

namespace sqfa {

namespace {

void require_same_dim(const GaussianParams& p, const GaussianParams& q) {
  if (p.dim() != q.dim()) {
    std::ostringstream os;
    os << "Gaussian dimensions differ: " << p.dim() << " vs " << q.dim();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
}

struct BhattacharyyaParts {
  double value;
  SpdMatrix average;
  Vector gap;           // mu_p - mu_q
  Vector whitened_gap;  // average^-1 gap
};

BhattacharyyaParts bhattacharyya_parts(const GaussianParams& p, const GaussianParams& q) {
  require_same_dim(p, q);
  SpdMatrix average(0.5 * (p.covariance().matrix() + q.covariance().matrix()));
  Vector gap = p.mean() - q.mean();
  Vector whitened = average.solve(gap);
  const double mean_term = 0.125 * gap.dot(whitened);
  const double cov_term = 0.5 * (average.log_det() - 0.5 * p.covariance().log_det() -
                                 0.5 * q.covariance().log_det());
  return {mean_term + cov_term, std::move(average), std::move(gap), std::move(whitened)};
}

// Hellinger from Bhattacharyya without cancellation for small d_B.
double hellinger_from_bhattacharyya(double d_b) {
  return std::sqrt(std::max(0.0, -std::expm1(-d_b)));
}

DistanceGradient zero_gradient(Index m) {
  DistanceGradient g;
  g.mean_p = Vector::Zero(m);
  g.mean_q = Vector::Zero(m);
  g.cov_p = Matrix::Zero(m, m);
  g.cov_q = Matrix::Zero(m, m);
  return g;
}

DistanceGradient calvo_oller_gradient(const GaussianParams& p, const GaussianParams& q) {
  const Index m = p.dim();
  const AffineInvariantGradient ai =
      affine_invariant_gradient(calvo_oller_embedding(p), calvo_oller_embedding(q));
  const double scale = 1.0 / std::numbers::sqrt2;

  // Pull a gradient on Omega back to (mu, Sigma):
  //   d/dSigma = G11, d/dmu = 2 (G11 mu + g12).
  auto pull_back = [m, scale](const Matrix& g, const Vector& mu, Vector& d_mu, Matrix& d_cov) {
    const Matrix g11 = scale * g.topLeftCorner(m, m);
    const Vector g12 = scale * g.topRightCorner(m, 1);
    d_cov = g11;
    d_mu = 2.0 * (g11 * mu + g12);
  };

  DistanceGradient out;
  out.value = scale * ai.distance;
  pull_back(ai.wrt_a, p.mean(), out.mean_p, out.cov_p);
  pull_back(ai.wrt_b, q.mean(), out.mean_q, out.cov_q);
  return out;
}

DistanceGradient zero_mean_gradient(const GaussianParams& p, const GaussianParams& q) {
  const double scale = 1.0 / std::numbers::sqrt2;
  const AffineInvariantGradient ai = affine_invariant_gradient(p.covariance(), q.covariance());
  DistanceGradient out;
  out.value = scale * ai.distance;
  out.mean_p = Vector::Zero(p.dim());
  out.mean_q = Vector::Zero(q.dim());
  out.cov_p = scale * ai.wrt_a;
  out.cov_q = scale * ai.wrt_b;
  return out;
}

DistanceGradient bhattacharyya_gradient(const GaussianParams& p, const GaussianParams& q) {
  const BhattacharyyaParts parts = bhattacharyya_parts(p, q);
  const Matrix avg_inv = parts.average.inverse();
  // d/dAverage of the mean term is -(1/8) w w^T, of 0.5 logdet is 0.5 Avg^-1;
  // dAverage/dSigma_p = 1/2.
  const Matrix d_average =
      -0.125 * parts.whitened_gap * parts.whitened_gap.transpose() + 0.5 * avg_inv;

  DistanceGradient out;
  out.value = parts.value;
  out.mean_p = 0.25 * parts.whitened_gap;
  out.mean_q = -out.mean_p;
  out.cov_p = 0.5 * d_average - 0.25 * p.covariance().inverse();
  out.cov_q = 0.5 * d_average - 0.25 * q.covariance().inverse();
  return out;
}

DistanceGradient hellinger_gradient(const GaussianParams& p, const GaussianParams& q) {
  DistanceGradient g = bhattacharyya_gradient(p, q);
  const double d_b = g.value;
  const double h = hellinger_from_bhattacharyya(d_b);
  if (!(h > kDegenerateDistance)) {
    DistanceGradient zero = zero_gradient(p.dim());
    zero.value = h;
    return zero;
  }
  const double chain = std::exp(-d_b) / (2.0 * h);
  g.value = h;
  g.mean_p *= chain;
  g.mean_q *= chain;
  g.cov_p *= chain;
  g.cov_q *= chain;
  return g;
}

DistanceGradient mahalanobis_gradient(const GaussianParams& p, const GaussianParams& q) {
  require_same_dim(p, q);
  const SpdMatrix average(0.5 * (p.covariance().matrix() + q.covariance().matrix()));
  const Vector gap = p.mean() - q.mean();
  const Vector w = average.solve(gap);
  DistanceGradient out;
  out.value = gap.dot(w);
  out.mean_p = 2.0 * w;
  out.mean_q = -out.mean_p;
  out.cov_p = -0.5 * w * w.transpose();
  out.cov_q = out.cov_p;
  return out;
}

}  // namespace

GaussianParams::GaussianParams(Vector mean, SpdMatrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (mean_.size() != covariance_.dim()) {
    std::ostringstream os;
    os << "mean length " << mean_.size() << " does not match covariance dim "
       << covariance_.dim();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
}

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::FisherRaoCalvoOller: return "fisher_rao_calvo_oller";
    case DistanceKind::FisherRaoZeroMean: return "fisher_rao_zero_mean";
    case DistanceKind::Bhattacharyya: return "bhattacharyya";
    case DistanceKind::Hellinger: return "hellinger";
    case DistanceKind::MahalanobisSq: return "mahalanobis_sq";
  }
  return "unknown";
}

DistanceKind parse_distance_kind(std::string_view name) {
  for (DistanceKind kind :
       {DistanceKind::FisherRaoCalvoOller, DistanceKind::FisherRaoZeroMean,
        DistanceKind::Bhattacharyya, DistanceKind::Hellinger, DistanceKind::MahalanobisSq}) {
    if (to_string(kind) == name) return kind;
  }
  raise(ErrorCode::InvalidArgument, "unknown distance kind '" + std::string(name) + "'");
}

SpdMatrix calvo_oller_embedding(const GaussianParams& p) {
  const Index m = p.dim();
  const Vector& mu = p.mean();
  Matrix omega(m + 1, m + 1);
  omega.topLeftCorner(m, m) = p.covariance().matrix() + mu * mu.transpose();
  omega.topRightCorner(m, 1) = mu;
  omega.bottomLeftCorner(1, m) = mu.transpose();
  omega(m, m) = 1.0;
  return SpdMatrix(omega);
}

double calvo_oller_distance(const GaussianParams& p, const GaussianParams& q) {
  require_same_dim(p, q);
  return affine_invariant_distance(calvo_oller_embedding(p), calvo_oller_embedding(q)) /
         std::numbers::sqrt2;
}

double fisher_rao_zero_mean(const SpdMatrix& a, const SpdMatrix& b) {
  return affine_invariant_distance(a, b) / std::numbers::sqrt2;
}

double mahalanobis_sq(const Vector& mu1, const Vector& mu2, const SpdMatrix& sigma) {
  if (mu1.size() != sigma.dim() || mu2.size() != sigma.dim()) {
    raise(ErrorCode::DimensionMismatch, "mean length does not match covariance dim");
  }
  const Vector gap = mu1 - mu2;
  return gap.dot(sigma.solve(gap));
}

double fisher_rao_equal_cov(const Vector& mu1, const Vector& mu2, const SpdMatrix& sigma) {
  return std::numbers::sqrt2 * std::acosh(1.0 + 0.25 * mahalanobis_sq(mu1, mu2, sigma));
}

double bhattacharyya(const GaussianParams& p, const GaussianParams& q) {
  return bhattacharyya_parts(p, q).value;
}

double bhattacharyya_zero_mean_spectral(const SpdMatrix& a, const SpdMatrix& b) {
  const GeneralizedSpectrum spec = generalized_eigen(a, b);
  const Eigen::ArrayXd l = spec.eigenvalues.array();
  return 0.5 * ((0.5 * (1.0 + l)).log() - 0.5 * l.log()).sum();
}

double hellinger(const GaussianParams& p, const GaussianParams& q) {
  return hellinger_from_bhattacharyya(bhattacharyya(p, q));
}

double distance(DistanceKind kind, const GaussianParams& p, const GaussianParams& q) {
  switch (kind) {
    case DistanceKind::FisherRaoCalvoOller: return calvo_oller_distance(p, q);
    case DistanceKind::FisherRaoZeroMean:
      require_same_dim(p, q);
      return fisher_rao_zero_mean(p.covariance(), q.covariance());
    case DistanceKind::Bhattacharyya: return bhattacharyya(p, q);
    case DistanceKind::Hellinger: return hellinger(p, q);
    case DistanceKind::MahalanobisSq: {
      require_same_dim(p, q);
      const SpdMatrix average(0.5 * (p.covariance().matrix() + q.covariance().matrix()));
      return mahalanobis_sq(p.mean(), q.mean(), average);
    }
  }
  raise(ErrorCode::InvalidArgument, "unknown distance kind");
}

DistanceGradient distance_gradient(DistanceKind kind, const GaussianParams& p,
                                   const GaussianParams& q) {
  require_same_dim(p, q);
  switch (kind) {
    case DistanceKind::FisherRaoCalvoOller: return calvo_oller_gradient(p, q);
    case DistanceKind::FisherRaoZeroMean: return zero_mean_gradient(p, q);
    case DistanceKind::Bhattacharyya: return bhattacharyya_gradient(p, q);
    case DistanceKind::Hellinger: return hellinger_gradient(p, q);
    case DistanceKind::MahalanobisSq: return mahalanobis_gradient(p, q);
  }
  raise(ErrorCode::InvalidArgument, "unknown distance kind");
}

}  // namespace sqfa
