#include "sqfa/class_stats.hpp"

#include <algorithm>
#include <sstream>

#include "sqfa/error.hpp"

namespace sqfa {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

LabeledDataset::LabeledDataset(Matrix samples, std::vector<int> labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
  if (static_cast<Index>(labels_.size()) != samples_.rows()) {
    std::ostringstream os;
    os << labels_.size() << " labels for " << samples_.rows() << " samples";
    raise(ErrorCode::DimensionMismatch, os.str());
  }
  if (samples_.rows() == 0 || samples_.cols() == 0) {
    raise(ErrorCode::EmptyClass, "dataset has no samples");
  }
  for (std::size_t s = 0; s < labels_.size(); ++s) {
    if (labels_[s] < 0) {
      std::ostringstream os;
      os << "sample " << s << " has negative label " << labels_[s];
      raise(ErrorCode::LabelOutOfRange, os.str());
    }
  }
  num_classes_ = *std::max_element(labels_.begin(), labels_.end()) + 1;
  const std::vector<Index> counts = class_counts();
  for (int i = 0; i < num_classes_; ++i) {
    if (counts[static_cast<std::size_t>(i)] == 0) {
      std::ostringstream os;
      os << "class " << i << " has no samples (labels must be contiguous from 0)";
      raise(ErrorCode::EmptyClass, os.str());
    }
    if (counts[static_cast<std::size_t>(i)] == 1) {
      std::ostringstream os;
      os << "class " << i << " has a single sample; covariance is not estimable";
      raise(ErrorCode::SingleSampleClass, os.str());
    }
  }
}

std::vector<Index> LabeledDataset::class_counts() const {
  std::vector<Index> counts(static_cast<std::size_t>(num_classes_), 0);
  for (int label : labels_) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

ClassEnsemble::ClassEnsemble(Index dim, std::vector<ClassMoments> classes)
    : dim_(dim), classes_(std::move(classes)) {
  for (const ClassMoments& c : classes_) {
    if (c.mean.size() != dim_ || c.covariance.rows() != dim_ || c.covariance.cols() != dim_ ||
        c.second_moment.rows() != dim_ || c.second_moment.cols() != dim_) {
      raise(ErrorCode::DimensionMismatch, "class moments do not match ensemble dimension");
    }
    if (c.count < 1) raise(ErrorCode::EmptyClass, "class with zero count in ensemble");
  }
}

ClassEnsemble ClassEnsemble::from_moments(Index dim, const std::vector<Index>& counts,
                                          const std::vector<Vector>& means,
                                          const std::vector<Matrix>& covariances) {
  if (counts.size() != means.size() || means.size() != covariances.size()) {
    raise(ErrorCode::DimensionMismatch, "counts, means and covariances differ in length");
  }
  std::vector<ClassMoments> classes;
  classes.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    ClassMoments c;
    c.count = counts[i];
    c.mean = means[i];
    c.covariance = covariances[i];
    c.second_moment = covariances[i] + means[i] * means[i].transpose();
    classes.push_back(std::move(c));
  }
  return ClassEnsemble(dim, std::move(classes));
}

ClassEnsemble estimate_class_statistics(const LabeledDataset& data) {
  const Index n = data.dim();
  const int c = data.num_classes();
  const std::vector<Index> counts = data.class_counts();
  std::vector<Vector> means(static_cast<std::size_t>(c), Vector::Zero(n));
  std::vector<Matrix> covs(static_cast<std::size_t>(c), Matrix::Zero(n, n));

  // Two passes in sample order; the reduction order is fixed, so results are
  // bit-stable for a given input order.
  for (Index s = 0; s < data.size(); ++s) {
    means[static_cast<std::size_t>(data.labels()[static_cast<std::size_t>(s)])] +=
        data.samples().row(s).transpose();
  }
  for (int i = 0; i < c; ++i) {
    means[static_cast<std::size_t>(i)] /= static_cast<double>(counts[static_cast<std::size_t>(i)]);
  }
  for (Index s = 0; s < data.size(); ++s) {
    const auto label = static_cast<std::size_t>(data.labels()[static_cast<std::size_t>(s)]);
    const Vector centered = data.samples().row(s).transpose() - means[label];
    covs[label].selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  for (int i = 0; i < c; ++i) {
    auto& cov = covs[static_cast<std::size_t>(i)];
    cov = cov.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(counts[static_cast<std::size_t>(i)]);
  }
  return ClassEnsemble::from_moments(n, counts, means, covs);
}

std::vector<GaussianParams> FeatureStats::params(bool second_moments) const {
  std::vector<GaussianParams> out;
  out.reserve(classes.size());
  for (const FeatureClassStats& c : classes) {
    if (second_moments) {
      out.emplace_back(Vector::Zero(c.mean.size()), c.second_moment);
    } else {
      out.emplace_back(c.mean, c.covariance);
    }
  }
  return out;
}

FeatureStats project_statistics(const ClassEnsemble& ens,
                                const Eigen::Ref<const Matrix>& filters, double sigma2) {
  if (filters.rows() != ens.dim()) {
    std::ostringstream os;
    os << "filters have " << filters.rows() << " rows, statistics have dimension " << ens.dim();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
  if (!(sigma2 >= 0.0)) raise(ErrorCode::InvalidArgument, "sigma2 must be nonnegative");
  const Index m = filters.cols();
  const Matrix ridge = sigma2 * Matrix::Identity(m, m);

  FeatureStats out;
  out.sigma2 = sigma2;
  out.classes.reserve(ens.classes().size());
  for (const ClassMoments& c : ens.classes()) {
    Vector mean = filters.transpose() * c.mean;
    Matrix cov = symmetrized(filters.transpose() * c.covariance * filters) + ridge;
    Matrix second = symmetrized(filters.transpose() * c.second_moment * filters) + ridge;
    out.classes.push_back({std::move(mean), SpdMatrix(cov), SpdMatrix(second)});
  }
  return out;
}

FeatureStats project_statistics(const ClassEnsemble& ens, const FilterBank& filters,
                                double sigma2) {
  return project_statistics(ens, filters.matrix(), sigma2);
}

}  // namespace sqfa
