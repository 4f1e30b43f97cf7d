#pragma once

// Classifiers on projected features and Bayes-error estimates.

#include <cstdint>
#include <string>
#include <vector>

#include "sqfa/class_stats.hpp"
#include "sqfa/distances.hpp"
#include "sqfa/filter_bank.hpp"

namespace sqfa {

/// Gaussian class-conditional (QDA) classifier in feature space.
struct QdaModel {
  std::vector<double> priors;  // count-proportional
  std::vector<Vector> means;
  std::vector<SpdMatrix> covariances;  // ridge included
  std::vector<double> log_dets;
};

struct EvalReport {
  std::string classifier;
  double accuracy = 0.0;
  std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]
  Index n_test = 0;
  std::uint64_t seed = 0;
};

enum class ClassifierKind { Qda, Knn };
std::string to_string(ClassifierKind kind);

/// Fits per-class moments (1/N normalization) of F^T x plus ridge * I.
QdaModel qda_fit(const LabeledDataset& train, const FilterBank& filters, double ridge);
QdaModel qda_fit_features(const Matrix& features, const std::vector<int>& labels,
                          int num_classes, double ridge);

/// argmax_i log prior_i - 1/2 log det Sigma_i - 1/2 (z - mu_i)^T Sigma_i^-1 (z - mu_i),
/// ties to the lowest class index.
int qda_predict_feature(const QdaModel& model, const Vector& z);
int qda_predict(const QdaModel& model, const Vector& x, const FilterBank& filters);

EvalReport qda_evaluate(const QdaModel& model, const LabeledDataset& test,
                        const FilterBank& filters);

/// k-nearest-neighbour vote in feature space (Euclidean). Distance ties go to
/// the earlier training sample; vote ties go to the tied label whose nearest
/// member ranks first (the nearest neighbour's label when it is tied).
EvalReport knn_predict(const LabeledDataset& train, const LabeledDataset& test,
                       const FilterBank& filters, int k = 3);
std::vector<int> knn_predict_features(const Matrix& train_features,
                                      const std::vector<int>& train_labels,
                                      const Matrix& test_features, int k);

/// Builds a report (accuracy and confusion matrix) from predictions.
EvalReport make_report(std::string classifier, const std::vector<int>& truth,
                       const std::vector<int>& predicted, int num_classes,
                       std::uint64_t seed = 0);

struct BayesEstimate {
  double accuracy = 0.0;
  /// log(a / (1 - a)); +infinity when no sample was misclassified.
  double log_odds = 0.0;
};

/// Draws n_per_class samples from every class and classifies each by the
/// true-parameter log-density argmax (equal priors).
BayesEstimate monte_carlo_bayes(const std::vector<GaussianParams>& classes,
                                Index n_per_class, std::uint64_t seed);

/// Bayes accuracy for N(0, 1) vs N(0, sigma2) with equal priors, via erf.
double bayes_1d_closed_form(double sigma2);

/// Standard normal CDF.
double normal_cdf(double x);

/// Replaces the test set by Gaussian samples with the per-class mean and
/// covariance of the projected test features (same class counts), then
/// evaluates the classifier trained on `train`. ridge applies to QDA only.
EvalReport gaussian_resample_eval(const LabeledDataset& train, const LabeledDataset& test,
                                  const FilterBank& filters, ClassifierKind classifier,
                                  std::uint64_t seed, double ridge, int k = 3);

}  // namespace sqfa
