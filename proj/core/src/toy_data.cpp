#include "sqfa/toy_data.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sqfa/error.hpp"
#include "sqfa/evaluation.hpp"
#include "sqfa/random.hpp"

namespace sqfa {

namespace {

constexpr double kPi = std::numbers::pi;

struct ClassBlueprint {
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
  std::vector<GroundTruthSubspace> subspaces;
};

ClassBlueprint toy6d_blueprint() {
  ClassBlueprint bp;
  for (int k = 0; k < 3; ++k) {
    Vector mean = Vector::Zero(6);
    mean(2) = 0.5 * std::cos(2.0 * kPi * k / 3.0);
    mean(3) = 0.5 * std::sin(2.0 * kPi * k / 3.0);
    Matrix cov = Matrix::Zero(6, 6);
    cov.block(0, 0, 2, 2) = rotated_template(9.0, 1.0, kPi * k / 3.0);
    cov.block(2, 2, 2, 2).setIdentity();
    cov.block(4, 4, 2, 2) = 16.0 * Matrix::Identity(2, 2);
    bp.means.push_back(mean);
    bp.covariances.push_back(cov);
  }
  bp.subspaces = {{"covariance", {0, 1}}, {"mean", {2, 3}}, {"variance", {4, 5}}};
  return bp;
}

ClassBlueprint toy4d_blueprint() {
  ClassBlueprint bp;
  for (int k = 0; k < 3; ++k) {
    Vector mean = Vector::Zero(4);
    mean(0) = 2.5 * std::cos(2.0 * kPi * k / 3.0);
    mean(1) = 2.5 * std::sin(2.0 * kPi * k / 3.0);
    Matrix cov = Matrix::Zero(4, 4);
    cov.block(0, 0, 2, 2).setIdentity();
    cov.block(2, 2, 2, 2) = rotated_template(4.0, 0.25, kPi * k / 3.0);
    bp.means.push_back(mean);
    bp.covariances.push_back(cov);
  }
  bp.subspaces = {{"mean", {0, 1}}, {"covariance", {2, 3}}};
  return bp;
}

ClassBlueprint covcode_blueprint(int classes, Index dim) {
  if (classes < 2) raise(ErrorCode::InvalidArgument, "covcode needs at least 2 classes");
  if (dim < 3) raise(ErrorCode::InvalidArgument, "covcode needs at least 3 dimensions");
  ClassBlueprint bp;
  for (int k = 0; k < classes; ++k) {
    Matrix cov = 4.0 * Matrix::Identity(dim, dim);
    cov.block(0, 0, 2, 2) = rotated_template(4.0, 0.25, kPi * k / classes);
    bp.means.push_back(Vector::Zero(dim));
    bp.covariances.push_back(cov);
  }
  std::vector<Index> noise;
  for (Index d = 2; d < dim; ++d) noise.push_back(d);
  bp.subspaces = {{"covariance", {0, 1}}, {"noise", noise}};
  return bp;
}

}  // namespace

Matrix GroundTruthSubspace::basis(Index n) const {
  Matrix out = Matrix::Zero(n, static_cast<Index>(dims.size()));
  for (std::size_t j = 0; j < dims.size(); ++j) out(dims[j], static_cast<Index>(j)) = 1.0;
  return out;
}

const GroundTruthSubspace& ToyData::subspace(std::string_view role) const {
  for (const auto& s : subspaces) {
    if (s.role == role) return s;
  }
  raise(ErrorCode::InvalidArgument, "no ground-truth subspace named " + std::string(role));
}

ClassEnsemble ToyData::population_ensemble() const {
  return ClassEnsemble::from_moments(dataset.dim(), dataset.class_counts(), means, covariances);
}

std::vector<GaussianParams> ToyData::population_params() const {
  std::vector<GaussianParams> out;
  for (std::size_t i = 0; i < means.size(); ++i) out.emplace_back(means[i], SpdMatrix(covariances[i]));
  return out;
}

std::vector<std::string> toy_names() { return {"toy6d", "toy4d", "covcode"}; }

Matrix rotated_template(double major, double minor, double radians) {
  Matrix rot(2, 2);
  rot << std::cos(radians), -std::sin(radians), std::sin(radians), std::cos(radians);
  const Matrix out = rot * Eigen::Vector2d(major, minor).asDiagonal() * rot.transpose();
  return 0.5 * (out + out.transpose());
}

ToyData generate(const ToySpec& spec) {
  ClassBlueprint bp;
  if (spec.name == "toy6d") {
    bp = toy6d_blueprint();
  } else if (spec.name == "toy4d") {
    bp = toy4d_blueprint();
  } else if (spec.name == "covcode") {
    bp = covcode_blueprint(spec.classes, spec.dim);
  } else {
    raise(ErrorCode::UnknownSpec,
          "unknown toy dataset '" + spec.name + "' (valid: toy6d, toy4d, covcode)");
  }
  if (spec.samples_per_class < 2) {
    raise(ErrorCode::InvalidArgument, "samples_per_class must be at least 2");
  }

  const Index n = bp.means.front().size();
  const auto c = static_cast<Index>(bp.means.size());
  Rng rng(spec.seed);
  Matrix samples(c * spec.samples_per_class, n);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(samples.rows()));
  for (Index i = 0; i < c; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    samples.middleRows(i * spec.samples_per_class, spec.samples_per_class) =
        rng.gaussian_rows(bp.means[idx], sampling_factor(bp.covariances[idx]),
                          spec.samples_per_class);
    labels.insert(labels.end(), static_cast<std::size_t>(spec.samples_per_class),
                  static_cast<int>(i));
  }
  return ToyData{LabeledDataset(std::move(samples), std::move(labels)), std::move(bp.subspaces),
                 std::move(bp.means), std::move(bp.covariances)};
}

std::vector<std::string> sweep_names() {
  return {"bayes1d", "bayes2d", "co_gap_equalcov", "co_gap_dataset"};
}

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * k / (count - 1));
  return out;
}

GaussianParams zero_mean_diag(const Vector& variances) {
  return {Vector::Zero(variances.size()), SpdMatrix(Matrix(variances.asDiagonal()))};
}

Table bayes1d(const SweepOptions& options) {
  Table table{{"log10_sigma2", "closed_form_accuracy", "mc_accuracy", "log_odds", "d_fr"}, {}};
  const GaussianParams reference = zero_mean_diag(Vector::Ones(1));
  std::uint64_t point = 0;
  for (double lg : linspace(-2.0, 2.0, 17)) {
    const double sigma2 = std::pow(10.0, lg);
    const GaussianParams other = zero_mean_diag(Vector::Constant(1, sigma2));
    const BayesEstimate mc =
        monte_carlo_bayes({reference, other}, options.mc_samples, options.seed + point++);
    table.add_row({lg, bayes_1d_closed_form(sigma2), mc.accuracy, mc.log_odds,
                   fisher_rao_zero_mean(reference.covariance(), other.covariance())});
  }
  return table;
}

Table bayes2d(const SweepOptions& options) {
  Table table{{"log10_sigma2_1", "log10_sigma2_2", "mc_accuracy", "log_odds", "d_fr", "d_b", "d_h"},
              {}};
  const GaussianParams reference = zero_mean_diag(Vector::Ones(2));
  std::uint64_t point = 0;
  const std::vector<double> grid = linspace(-2.0, 2.0, 9);
  for (double l1 : grid) {
    for (double l2 : grid) {
      const GaussianParams other =
          zero_mean_diag(Eigen::Vector2d(std::pow(10.0, l1), std::pow(10.0, l2)));
      const BayesEstimate mc =
          monte_carlo_bayes({reference, other}, options.mc_samples, options.seed + point++);
      table.add_row({l1, l2, mc.accuracy, mc.log_odds,
                     fisher_rao_zero_mean(reference.covariance(), other.covariance()),
                     bhattacharyya(reference, other), hellinger(reference, other)});
    }
  }
  return table;
}

Table co_gap_equalcov() {
  Table table{{"d_m", "exact_fr", "calvo_oller_bound"}, {}};
  const SpdMatrix shared = SpdMatrix::identity(2);
  for (double dm : linspace(0.0, 20.0, 41)) {
    const GaussianParams p(Vector::Zero(2), shared);
    const GaussianParams q(Eigen::Vector2d(dm, 0.0), shared);
    table.add_row({dm, fisher_rao_equal_cov(p.mean(), q.mean(), shared),
                   calvo_oller_distance(p, q)});
  }
  return table;
}

bool nearly_equal(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

}  // namespace

Table sweep_grid(std::string_view name, const SweepOptions& options) {
  if (name == "bayes1d") return bayes1d(options);
  if (name == "bayes2d") return bayes2d(options);
  if (name == "co_gap_equalcov") return co_gap_equalcov();
  if (name == "co_gap_dataset") {
    raise(ErrorCode::InvalidArgument, "co_gap_dataset needs class statistics");
  }
  raise(ErrorCode::UnknownSweep,
        "unknown sweep '" + std::string(name) +
            "' (valid: bayes1d, bayes2d, co_gap_equalcov, co_gap_dataset)");
}

Table co_gap_dataset(const std::vector<GaussianParams>& classes) {
  Table table{{"class_i", "class_j", "calvo_oller_bound", "exact_fr"}, {}};
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      const GaussianParams& p = classes[i];
      const GaussianParams& q = classes[j];
      double exact = std::numeric_limits<double>::quiet_NaN();
      if (nearly_equal(p.mean(), q.mean())) {
        exact = fisher_rao_zero_mean(p.covariance(), q.covariance());
      } else if (nearly_equal(p.covariance().matrix(), q.covariance().matrix())) {
        exact = fisher_rao_equal_cov(p.mean(), q.mean(), p.covariance());
      }
      table.add_row({static_cast<double>(i), static_cast<double>(j), calvo_oller_distance(p, q),
                     exact});
    }
  }
  return table;
}

}  // namespace sqfa
