#pragma once

// Synthetic class-conditional Gaussian datasets and validation sweeps.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sqfa/class_stats.hpp"
#include "sqfa/table.hpp"

namespace sqfa {

struct ToySpec {
  std::string name;  // toy6d, toy4d or covcode
  Index samples_per_class = 500;
  std::uint64_t seed = 0;
  int classes = 8;  // covcode only
  Index dim = 30;   // covcode only
};

/// Coordinate block that carries a particular kind of class difference.
struct GroundTruthSubspace {
  std::string role;
  std::vector<Index> dims;

  /// n x dims.size() coordinate basis.
  Matrix basis(Index n) const;
};

struct ToyData {
  LabeledDataset dataset;
  std::vector<GroundTruthSubspace> subspaces;
  // Generator parameters (population, not sample, moments).
  std::vector<Vector> means;
  std::vector<Matrix> covariances;

  const GroundTruthSubspace& subspace(std::string_view role) const;
  /// Population moments as an ensemble with the requested counts.
  ClassEnsemble population_ensemble() const;
  std::vector<GaussianParams> population_params() const;
};

std::vector<std::string> toy_names();

/// Rows are grouped by class (class 0 first). Deterministic per spec.
ToyData generate(const ToySpec& spec);

/// 2 x 2 rotation of diag(major, minor) by `radians`.
Matrix rotated_template(double major, double minor, double radians);

struct SweepOptions {
  std::uint64_t seed = 0;
  Index mc_samples = 100000;  // per class, bayes sweeps
};

std::vector<std::string> sweep_names();

/// bayes1d, bayes2d, co_gap_equalcov; co_gap_dataset needs classes and goes
/// through co_gap_dataset() (this entry point throws InvalidArgument for it).
Table sweep_grid(std::string_view name, const SweepOptions& options = {});

/// Per class pair (i < j): Calvo-Oller bound and the exact Fisher-Rao distance
/// when the pair shares its mean or its covariance (nan otherwise).
Table co_gap_dataset(const std::vector<GaussianParams>& classes);

}  // namespace sqfa
