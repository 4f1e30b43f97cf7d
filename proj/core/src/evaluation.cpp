#include "sqfa/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "sqfa/error.hpp"
#include "sqfa/random.hpp"

namespace sqfa {

namespace {

double log_odds_of(double accuracy) {
  const double error = 1.0 - accuracy;
  if (error <= 0.0) return std::numeric_limits<double>::infinity();
  if (accuracy <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(accuracy / error);
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::Qda ? "qda" : "knn";
}

QdaModel qda_fit_features(const Matrix& features, const std::vector<int>& labels,
                          int num_classes, double ridge) {
  if (!(ridge >= 0.0)) raise(ErrorCode::InvalidArgument, "ridge must be nonnegative");
  if (static_cast<Index>(labels.size()) != features.rows()) {
    raise(ErrorCode::DimensionMismatch, "labels and features differ in length");
  }
  const Index m = features.cols();
  std::vector<Index> counts(static_cast<std::size_t>(num_classes), 0);
  std::vector<Vector> sums(static_cast<std::size_t>(num_classes), Vector::Zero(m));
  for (Index s = 0; s < features.rows(); ++s) {
    const auto label = static_cast<std::size_t>(labels[static_cast<std::size_t>(s)]);
    ++counts[label];
    sums[label] += features.row(s).transpose();
  }
  QdaModel model;
  std::vector<Matrix> scatter(static_cast<std::size_t>(num_classes), Matrix::Zero(m, m));
  for (int i = 0; i < num_classes; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (counts[idx] == 0) {
      raise(ErrorCode::EmptyClass, "class " + std::to_string(i) + " has no training samples");
    }
    model.means.push_back(sums[idx] / static_cast<double>(counts[idx]));
    model.priors.push_back(static_cast<double>(counts[idx]) /
                           static_cast<double>(features.rows()));
  }
  for (Index s = 0; s < features.rows(); ++s) {
    const auto label = static_cast<std::size_t>(labels[static_cast<std::size_t>(s)]);
    const Vector centered = features.row(s).transpose() - model.means[label];
    scatter[label].noalias() += centered * centered.transpose();
  }
  for (int i = 0; i < num_classes; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    Matrix cov = scatter[idx] / static_cast<double>(counts[idx]);
    cov.diagonal().array() += ridge;
    model.covariances.emplace_back(cov);
    model.log_dets.push_back(model.covariances.back().log_det());
  }
  return model;
}

QdaModel qda_fit(const LabeledDataset& train, const FilterBank& filters, double ridge) {
  return qda_fit_features(filters.project_rows(train.samples()), train.labels(),
                          train.num_classes(), ridge);
}

int qda_predict_feature(const QdaModel& model, const Vector& z) {
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.means.size(); ++i) {
    const Vector r = z - model.means[i];
    const double score = std::log(model.priors[i]) - 0.5 * model.log_dets[i] -
                         0.5 * r.dot(model.covariances[i].solve(r));
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int qda_predict(const QdaModel& model, const Vector& x, const FilterBank& filters) {
  return qda_predict_feature(model, filters.matrix().transpose() * x);
}

EvalReport make_report(std::string classifier, const std::vector<int>& truth,
                       const std::vector<int>& predicted, int num_classes, std::uint64_t seed) {
  EvalReport report;
  report.classifier = std::move(classifier);
  report.seed = seed;
  report.n_test = static_cast<Index>(truth.size());
  report.confusion.assign(static_cast<std::size_t>(num_classes),
                          std::vector<std::int64_t>(static_cast<std::size_t>(num_classes), 0));
  std::int64_t correct = 0;
  for (std::size_t s = 0; s < truth.size(); ++s) {
    ++report.confusion[static_cast<std::size_t>(truth[s])][static_cast<std::size_t>(predicted[s])];
    if (truth[s] == predicted[s]) ++correct;
  }
  report.accuracy =
      truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
  return report;
}

namespace {

std::vector<int> qda_predict_rows(const QdaModel& model, const Matrix& features) {
  std::vector<int> out(static_cast<std::size_t>(features.rows()));
  for (Index s = 0; s < features.rows(); ++s) {
    out[static_cast<std::size_t>(s)] = qda_predict_feature(model, features.row(s).transpose());
  }
  return out;
}

}  // namespace

EvalReport qda_evaluate(const QdaModel& model, const LabeledDataset& test,
                        const FilterBank& filters) {
  const std::vector<int> predicted = qda_predict_rows(model, filters.project_rows(test.samples()));
  return make_report("qda", test.labels(), predicted,
                     std::max(test.num_classes(), static_cast<int>(model.means.size())));
}

std::vector<int> knn_predict_features(const Matrix& train_features,
                                      const std::vector<int>& train_labels,
                                      const Matrix& test_features, int k) {
  if (k < 1) raise(ErrorCode::InvalidArgument, "k must be at least 1");
  if (train_features.rows() < k) {
    std::ostringstream os;
    os << "training set has " << train_features.rows() << " samples, fewer than k=" << k;
    raise(ErrorCode::TrainSmallerThanK, os.str());
  }
  const int num_labels = *std::max_element(train_labels.begin(), train_labels.end()) + 1;
  std::vector<int> out(static_cast<std::size_t>(test_features.rows()));
  std::vector<Index> order(static_cast<std::size_t>(train_features.rows()));
  Vector dist2(train_features.rows());
  std::vector<int> votes(static_cast<std::size_t>(num_labels));
  std::vector<int> first_rank(static_cast<std::size_t>(num_labels));

  for (Index t = 0; t < test_features.rows(); ++t) {
    dist2 = (train_features.rowwise() - test_features.row(t)).rowwise().squaredNorm();
    std::iota(order.begin(), order.end(), Index{0});
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
      return dist2(a) < dist2(b) || (dist2(a) == dist2(b) && a < b);
    });
    std::fill(votes.begin(), votes.end(), 0);
    std::fill(first_rank.begin(), first_rank.end(), k);
    for (int r = 0; r < k; ++r) {
      const auto label =
          static_cast<std::size_t>(train_labels[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]);
      ++votes[label];
      first_rank[label] = std::min(first_rank[label], r);
    }
    int best = 0;
    for (int label = 1; label < num_labels; ++label) {
      const auto l = static_cast<std::size_t>(label);
      const auto b = static_cast<std::size_t>(best);
      if (votes[l] > votes[b] || (votes[l] == votes[b] && first_rank[l] < first_rank[b])) {
        best = label;
      }
    }
    out[static_cast<std::size_t>(t)] = best;
  }
  return out;
}

EvalReport knn_predict(const LabeledDataset& train, const LabeledDataset& test,
                       const FilterBank& filters, int k) {
  const std::vector<int> predicted =
      knn_predict_features(filters.project_rows(train.samples()), train.labels(),
                           filters.project_rows(test.samples()), k);
  return make_report("knn", test.labels(), predicted,
                     std::max(train.num_classes(), test.num_classes()));
}

BayesEstimate monte_carlo_bayes(const std::vector<GaussianParams>& classes,
                                Index n_per_class, std::uint64_t seed) {
  if (classes.empty()) raise(ErrorCode::InvalidArgument, "no classes given");
  if (n_per_class < 1) raise(ErrorCode::InvalidArgument, "n_per_class must be at least 1");
  QdaModel truth;
  for (const GaussianParams& p : classes) {
    truth.priors.push_back(1.0 / static_cast<double>(classes.size()));
    truth.means.push_back(p.mean());
    truth.covariances.push_back(p.covariance());
    truth.log_dets.push_back(p.covariance().log_det());
  }
  Rng rng(seed);
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const Matrix lower = classes[i].covariance().cholesky().matrixL();
    const Matrix samples = rng.gaussian_rows(classes[i].mean(), lower, n_per_class);
    for (Index s = 0; s < n_per_class; ++s) {
      if (qda_predict_feature(truth, samples.row(s).transpose()) == static_cast<int>(i)) {
        ++correct;
      }
    }
  }
  const double accuracy =
      static_cast<double>(correct) / static_cast<double>(n_per_class * static_cast<Index>(classes.size()));
  return {accuracy, log_odds_of(accuracy)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bayes_1d_closed_form(double sigma2) {
  if (!(sigma2 > 0.0)) raise(ErrorCode::NonPositiveVariance, "sigma2 must be positive");
  if (sigma2 == 1.0) return 0.5;
  // Relabeling symmetry: N(0,1) vs N(0,s) is N(0,1/s) vs N(0,1) rescaled.
  const double s = sigma2 > 1.0 ? sigma2 : 1.0 / sigma2;
  const double t = std::sqrt(std::log(s) / (1.0 - 1.0 / s));
  const double sigma = std::sqrt(s);
  return 0.5 * ((2.0 * normal_cdf(t) - 1.0) + 2.0 * (1.0 - normal_cdf(t / sigma)));
}

EvalReport gaussian_resample_eval(const LabeledDataset& train, const LabeledDataset& test,
                                  const FilterBank& filters, ClassifierKind classifier,
                                  std::uint64_t seed, double ridge, int k) {
  const Matrix test_features = filters.project_rows(test.samples());
  const QdaModel test_fit = qda_fit_features(test_features, test.labels(), test.num_classes(), 0.0);
  const std::vector<Index> counts = test.class_counts();

  Rng rng(seed);
  Matrix synthetic(test.size(), filters.feature_dim());
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(test.size()));
  Index row = 0;
  for (int i = 0; i < test.num_classes(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Matrix lower = sampling_factor(test_fit.covariances[idx].matrix());
    synthetic.middleRows(row, counts[idx]) =
        rng.gaussian_rows(test_fit.means[idx], lower, counts[idx]);
    labels.insert(labels.end(), static_cast<std::size_t>(counts[idx]), i);
    row += counts[idx];
  }

  const Matrix train_features = filters.project_rows(train.samples());
  std::vector<int> predicted;
  if (classifier == ClassifierKind::Qda) {
    const QdaModel model =
        qda_fit_features(train_features, train.labels(), train.num_classes(), ridge);
    predicted = qda_predict_rows(model, synthetic);
  } else {
    predicted = knn_predict_features(train_features, train.labels(), synthetic, k);
  }
  return make_report(to_string(classifier), labels, predicted,
                     std::max(train.num_classes(), test.num_classes()), seed);
}

}  // namespace sqfa
