#include "sqfa/baselines.hpp"

#include <cmath>
#include <sstream>

#include "sqfa/error.hpp"

namespace sqfa {

namespace {

struct PooledMoments {
  Vector mean;
  Matrix within;   // sum_i w_i Phi_i
  Matrix between;  // sum_i w_i (gamma_i - mean)(gamma_i - mean)^T
};

PooledMoments pooled_moments(const ClassEnsemble& ens) {
  const Index n = ens.dim();
  double total = 0.0;
  for (const ClassMoments& c : ens.classes()) total += static_cast<double>(c.count);
  PooledMoments out{Vector::Zero(n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (const ClassMoments& c : ens.classes()) {
    const double w = static_cast<double>(c.count) / total;
    out.mean += w * c.mean;
    out.within += w * c.covariance;
  }
  for (const ClassMoments& c : ens.classes()) {
    const double w = static_cast<double>(c.count) / total;
    const Vector centered = c.mean - out.mean;
    out.between += w * centered * centered.transpose();
  }
  return out;
}

// Flips each column so its largest-magnitude entry is positive.
void canonical_signs(Matrix& columns) {
  for (Index k = 0; k < columns.cols(); ++k) {
    Index arg = 0;
    columns.col(k).cwiseAbs().maxCoeff(&arg);
    if (columns(arg, k) < 0.0) columns.col(k) *= -1.0;
  }
}

// Class statistics of the training data, computed once per fit.
struct AmaProblem {
  const LabeledDataset& data;
  ClassEnsemble ens;
  double sigma2;
};

AmaLossValue ama_loss(const Eigen::Ref<const Matrix>& filters, const AmaProblem& prob,
                      bool with_gradient) {
  const LabeledDataset& data = prob.data;
  if (filters.rows() != data.dim()) {
    raise(ErrorCode::DimensionMismatch, "filters do not match data dimension");
  }
  const Index n_samples = data.size();
  const Index m = filters.cols();
  const int c = data.num_classes();
  const Matrix z = data.samples() * filters;

  // Log-likelihoods up to a shared constant, one column per class.
  Matrix loglik(n_samples, c);
  std::vector<Matrix> whitened(static_cast<std::size_t>(c));  // rows u = Sigma^-1 (z - mu)
  std::vector<Matrix> cov_inv(static_cast<std::size_t>(c));
  std::vector<Matrix> phi_f(static_cast<std::size_t>(c));
  std::vector<Vector> means(static_cast<std::size_t>(c));
  for (int i = 0; i < c; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const ClassMoments& moments = prob.ens[i];
    phi_f[idx] = moments.covariance * filters;
    Matrix cov = filters.transpose() * phi_f[idx];
    cov = 0.5 * (cov + cov.transpose()).eval();
    cov.diagonal().array() += prob.sigma2;
    const SpdMatrix sigma(cov);
    means[idx] = filters.transpose() * moments.mean;
    const Matrix centered = z.rowwise() - means[idx].transpose();
    whitened[idx] = sigma.solve(centered.transpose()).transpose();
    loglik.col(i) = -0.5 * (centered.cwiseProduct(whitened[idx])).rowwise().sum();
    loglik.col(i).array() -= 0.5 * sigma.log_det();
    if (with_gradient) cov_inv[idx] = sigma.inverse();
  }

  AmaLossValue out;
  Matrix weights(n_samples, c);  // d loss / d loglik
  double total = 0.0;
  for (Index s = 0; s < n_samples; ++s) {
    const double peak = loglik.row(s).maxCoeff();
    const Eigen::RowVectorXd shifted = (loglik.row(s).array() - peak).exp().matrix();
    const double norm = shifted.sum();
    const int label = data.labels()[static_cast<std::size_t>(s)];
    total += -(loglik(s, label) - peak - std::log(norm));
    if (with_gradient) {
      weights.row(s) = shifted / norm;
      weights(s, label) -= 1.0;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n_samples);
  out.value = total * inv_n;
  if (!with_gradient) return out;
  weights *= inv_n;

  // dl_i/dz = -u, dl_i/dmu_i = u, dl_i/dSigma_i = (u u^T - Sigma_i^-1) / 2.
  Matrix grad_z = Matrix::Zero(n_samples, m);
  out.gradient = Matrix::Zero(filters.rows(), m);
  for (int i = 0; i < c; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Vector w = weights.col(i);
    const Matrix weighted_u = w.asDiagonal() * whitened[idx];
    grad_z -= weighted_u;
    const Vector grad_mean = weighted_u.colwise().sum().transpose();
    const Matrix grad_cov =
        0.5 * (whitened[idx].transpose() * weighted_u) - 0.5 * w.sum() * cov_inv[idx];
    out.gradient.noalias() += prob.ens[i].mean * grad_mean.transpose();
    out.gradient.noalias() += 2.0 * phi_f[idx] * (0.5 * (grad_cov + grad_cov.transpose()));
  }
  out.gradient.noalias() += data.samples().transpose() * grad_z;
  return out;
}

}  // namespace

Vector total_covariance_spectrum(const ClassEnsemble& ens) {
  const PooledMoments pooled = pooled_moments(ens);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(pooled.within + pooled.between);
  return eig.eigenvalues().reverse();
}

FilterBank pca(const ClassEnsemble& ens, Index m) {
  if (m < 1 || m > ens.dim()) {
    std::ostringstream os;
    os << "PCA needs 1 <= m <= n, got m=" << m << " n=" << ens.dim();
    raise(ErrorCode::InvalidArgument, os.str());
  }
  const PooledMoments pooled = pooled_moments(ens);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(pooled.within + pooled.between);
  Matrix top = eig.eigenvectors().rightCols(m).rowwise().reverse();
  canonical_signs(top);
  return FilterBank::normalized(top);
}

LdaModel lda(const ClassEnsemble& ens, Index m, double shrinkage) {
  const int c = ens.num_classes();
  if (m < 1 || m > c - 1) {
    std::ostringstream os;
    os << "LDA can learn at most c - 1 = " << c - 1 << " filters, requested " << m;
    raise(ErrorCode::InvalidArgument, os.str());
  }
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
    raise(ErrorCode::InvalidArgument, "LDA shrinkage must lie in [0, 1]");
  }
  const Index n = ens.dim();
  const PooledMoments pooled = pooled_moments(ens);
  const double scale = pooled.within.trace() / static_cast<double>(n);
  Matrix shrunk = (1.0 - shrinkage) * pooled.within;
  shrunk.diagonal().array() += shrinkage * scale;
  SpdMatrix within(shrunk);

  const GeneralizedSpectrum spec = generalized_eigen(pooled.between, within);
  Matrix top = spec.eigenvectors.rightCols(m).rowwise().reverse();
  canonical_signs(top);
  FilterBank filters = FilterBank::normalized(top);

  const Matrix& f = filters.matrix();
  const SpdMatrix projected_within(f.transpose() * within.matrix() * f);
  const double criterion =
      projected_within.solve(f.transpose() * pooled.between * f).trace();
  return LdaModel{std::move(filters), std::move(within), pooled.between, criterion};
}

double pairwise_mahalanobis_half_sum(const std::vector<Vector>& means, const SpdMatrix& shared) {
  double total = 0.0;
  for (const Vector& a : means) {
    for (const Vector& b : means) total += mahalanobis_sq(a, b, shared);
  }
  return 0.5 * total;
}

double scaled_fisher_criterion(const std::vector<Vector>& means, const SpdMatrix& shared) {
  const auto c = static_cast<double>(means.size());
  Vector center = Vector::Zero(shared.dim());
  for (const Vector& mu : means) center += mu;
  center /= c;
  Matrix scatter = Matrix::Zero(shared.dim(), shared.dim());
  for (const Vector& mu : means) scatter += (mu - center) * (mu - center).transpose();
  return c * shared.solve(scatter).trace();
}

double ama_gauss_loss(const Eigen::Ref<const Matrix>& filters, const LabeledDataset& data,
                      double sigma2) {
  const AmaProblem prob{data, estimate_class_statistics(data), sigma2};
  return ama_loss(filters, prob, false).value;
}

AmaLossValue ama_gauss_loss_with_gradient(const Eigen::Ref<const Matrix>& filters,
                                          const LabeledDataset& data, double sigma2) {
  const AmaProblem prob{data, estimate_class_statistics(data), sigma2};
  return ama_loss(filters, prob, true);
}

std::pair<AmaGaussModel, TrainLog> ama_gauss_fit(const LabeledDataset& data,
                                                 const TrainConfig& cfg) {
  const AmaProblem prob{data, estimate_class_statistics(data), cfg.sigma2};
  FilterObjective objective = [&prob](const Matrix& filters, Matrix* gradient) {
    AmaLossValue v = ama_loss(filters, prob, gradient != nullptr);
    if (gradient) *gradient = -v.gradient;
    return -v.value;
  };
  auto [filters, log] = optimize_filters(objective, data.dim(), cfg);

  AmaGaussModel model{filters, cfg.sigma2, {}, {}};
  const FeatureStats stats = project_statistics(prob.ens, filters, cfg.sigma2);
  for (const FeatureClassStats& c : stats.classes) {
    model.response_means.push_back(c.mean);
    model.response_covs.push_back(c.covariance);
  }
  return {std::move(model), std::move(log)};
}

}  // namespace sqfa
