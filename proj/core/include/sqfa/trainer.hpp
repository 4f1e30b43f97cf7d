#pragma once

// Filter learning by maximizing the sum of pairwise class dissimilarities in
// feature space, with unit-norm filters, L-BFGS, restarts and optional
// pairwise staging.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sqfa/class_stats.hpp"
#include "sqfa/distances.hpp"
#include "sqfa/error.hpp"
#include "sqfa/filter_bank.hpp"

namespace sqfa {

struct TrainConfig {
  DistanceKind kind = DistanceKind::FisherRaoCalvoOller;
  double sigma2 = 0.0;
  Index m = 2;
  std::uint64_t seed = 0;
  int restarts = 20;
  double tol = 1e-6;
  int max_iters = 500;
  bool sequential_pairs = false;
  int lbfgs_memory = 10;

  /// Throws InvalidArgument on m < 1, odd m with sequential_pairs, tol <= 0,
  /// restarts < 1, max_iters < 1, lbfgs_memory < 1 or sigma2 < 0.
  void validate() const;
};

/// Stage s of a staged fit draws restart r from seed + s * kStageSeedOffset + r.
inline constexpr std::uint64_t kStageSeedOffset = 1'000'003;

struct IterationRecord {
  int stage = 0;
  int restart = 0;
  int iteration = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct RestartRecord {
  int stage = 0;
  int restart = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string status;
};

struct TrainLog {
  std::vector<IterationRecord> iterations;
  std::vector<RestartRecord> restarts;
  /// Objective of the selected filters after each stage.
  std::vector<double> stage_objectives;
  bool converged = false;
  int iterations_used = 0;
  double wall_seconds = 0.0;
};

/// Raised when no restart can take a single improving step; carries the
/// partial log.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& detail, TrainLog log)
      : Error(ErrorCode::NoImprovingStep, detail), log_(std::move(log)) {}
  const TrainLog& log() const noexcept { return log_; }

 private:
  TrainLog log_;
};

/// Sum over ordered class pairs of a pairwise distance, with gradients with
/// respect to every class's mean and covariance. Pairs at a degenerate
/// (zero) Fisher-Rao distance contribute zero gradient.
struct PairwiseSum {
  double value = 0.0;
  std::vector<Vector> mean_grads;
  std::vector<Matrix> cov_grads;
};
PairwiseSum pairwise_distance_sum(const std::vector<GaussianParams>& classes,
                                  DistanceKind kind, bool with_gradient);

/// Objective value at raw filters (columns need not be unit norm).
double objective(const Eigen::Ref<const Matrix>& filters, const ClassEnsemble& ens,
                 const TrainConfig& cfg);

/// d objective / d filters, an n x m matrix.
Matrix objective_gradient(const Eigen::Ref<const Matrix>& filters, const ClassEnsemble& ens,
                          const TrainConfig& cfg);

struct ObjectiveValue {
  double value = 0.0;
  Matrix gradient;
};
ObjectiveValue objective_with_gradient(const Eigen::Ref<const Matrix>& filters,
                                       const ClassEnsemble& ens, const TrainConfig& cfg);

/// Maps unconstrained W to F = W diag(1 / ||w_k||).
Matrix normalize_columns(const Eigen::Ref<const Matrix>& raw);

/// Chain rule through normalize_columns: column k of the result is
/// (I - f_k f_k^T) g_k / ||w_k||.
Matrix normalization_gradient(const Eigen::Ref<const Matrix>& raw,
                              const Eigen::Ref<const Matrix>& grad_filters);

/// A function of filters to maximize. Writes the gradient when `gradient`
/// is non-null.
using FilterObjective = std::function<double(const Matrix& filters, Matrix* gradient)>;

/// Generic driver shared with the baselines: restarts, normalization
/// trivialization, L-BFGS on the negated objective, and pairwise staging
/// when cfg.sequential_pairs is set.
std::pair<FilterBank, TrainLog> optimize_filters(const FilterObjective& objective, Index n,
                                                 const TrainConfig& cfg);

/// Learns cfg.m filters jointly (or in pairs when cfg.sequential_pairs).
std::pair<FilterBank, TrainLog> fit(const ClassEnsemble& ens, const TrainConfig& cfg);

/// Learns filters two at a time, holding earlier pairs fixed.
std::pair<FilterBank, TrainLog> fit_sequential_pairs(const ClassEnsemble& ens,
                                                     const TrainConfig& cfg);

}  // namespace sqfa
