#include <cmath>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "sqfa/baselines.hpp"
#include "sqfa/error.hpp"
#include "sqfa/toy_data.hpp"

using namespace sqfa;
using namespace sqfa::testing;

namespace {

ClassEnsemble single_class(const Matrix& cov) {
  return ClassEnsemble::from_moments(cov.rows(), {10}, {Vector::Zero(cov.rows())}, {cov});
}

}  // namespace

TEST(Pca, DiagonalCase) {
  const FilterBank f = pca(single_class(Vector(Eigen::Vector3d(3, 2, 1)).asDiagonal()), 2);
  EXPECT_LT(max_principal_angle_deg(f.matrix(), Matrix::Identity(3, 2)), 1e-6);
}

TEST(Pca, CapturedVarianceIsTopEigenvalueSum) {
  Rng rng(60);
  const ClassEnsemble ens = random_ensemble(rng, 6, 3);
  const FilterBank f = pca(ens, 3);
  const Vector spectrum = total_covariance_spectrum(ens);
  // Total covariance from an independent count-weighted pooling.
  Vector grand = Vector::Zero(6);
  for (const auto& c : ens.classes()) grand += c.mean / 3.0;
  Matrix total = Matrix::Zero(6, 6);
  for (const auto& c : ens.classes()) {
    total += (c.covariance + (c.mean - grand) * (c.mean - grand).transpose()) / 3.0;
  }
  EXPECT_NEAR((f.matrix().transpose() * total * f.matrix()).trace(), spectrum.head(3).sum(), 1e-10);
  EXPECT_TRUE((f.matrix().transpose() * f.matrix()).isApprox(Matrix::Identity(3, 3), 1e-10));
}

TEST(Pca, IsotropicDataKeepsVariance) {
  const FilterBank f = pca(single_class(2.0 * Matrix::Identity(4, 4)), 2);
  EXPECT_NEAR((f.matrix().transpose() * (2.0 * Matrix::Identity(4, 4)) * f.matrix()).trace(), 4.0,
              1e-12);
}

TEST(Lda, TwoClassTextbookDirection) {
  const Eigen::Vector3d v(1.0, -2.0, 0.5);
  const ClassEnsemble ens = ClassEnsemble::from_moments(
      3, {10, 10}, {Vector::Zero(3), Vector(v)}, {Matrix::Identity(3, 3), Matrix::Identity(3, 3)});
  const LdaModel model = lda(ens, 1, 0.0);
  EXPECT_LT(max_principal_angle_deg(model.filters.matrix(), Matrix(v)), 1e-4);
}

TEST(Lda, RankBoundAndShrinkageRange) {
  Rng rng(61);
  const ClassEnsemble ens = random_ensemble(rng, 5, 3);
  EXPECT_THROW(lda(ens, 3), Error);
  EXPECT_THROW(lda(ens, 0), Error);
  EXPECT_THROW(lda(ens, 1, 1.5), Error);
  EXPECT_NO_THROW(lda(ens, 2));
}

TEST(Lda, SingularWithinClassWithoutShrinkage) {
  Matrix cov = Matrix::Identity(3, 3);
  cov(2, 2) = 0.0;
  const ClassEnsemble ens = ClassEnsemble::from_moments(
      3, {10, 10}, {Vector::Zero(3), Vector::Ones(3)}, {cov, cov});
  try {
    lda(ens, 1, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
  EXPECT_NO_THROW(lda(ens, 1, 0.1));
}

TEST(Lda, ToySixFindsMeanSubspace) {
  const ToyData toy = generate({"toy6d", 4000, 5});
  const LdaModel model = lda(estimate_class_statistics(toy.dataset), 2);
  EXPECT_LT(max_principal_angle_deg(model.filters.matrix(), toy.subspace("mean").basis(6)), 5.0);
}

TEST(Lda, PairwiseMahalanobisIdentity) {
  Rng rng(62);
  for (int t = 0; t < 100; ++t) {
    const Index n = random_int(rng, 1, 6);
    const int c = random_int(rng, 2, 7);
    const SpdMatrix shared(random_spd(rng, n));
    std::vector<Vector> means;
    for (int i = 0; i < c; ++i) means.push_back(random_vector(rng, n, 2.0));
    const double lhs = pairwise_mahalanobis_half_sum(means, shared);
    EXPECT_NEAR(scaled_fisher_criterion(means, shared), lhs, 1e-8 * lhs);
  }
}

TEST(AmaGauss, SingleClassLossIsZero) {
  Rng rng(63);
  const LabeledDataset data(random_matrix(rng, 20, 3), std::vector<int>(20, 0));
  EXPECT_NEAR(ama_gauss_loss(Matrix::Identity(3, 2), data, 0.0), 0.0, 1e-14);
}

TEST(AmaGauss, SeparatedClassesHaveVanishingLoss) {
  Matrix x(6, 1);
  x << -100.0, -100.5, -99.5, 100.0, 100.5, 99.5;
  const LabeledDataset data(x, {0, 0, 0, 1, 1, 1});
  EXPECT_LT(ama_gauss_loss(Matrix::Ones(1, 1), data, 0.0), 1e-12);
}

TEST(AmaGauss, GradientMatchesFiniteDifferences) {
  Rng rng(64);
  for (int t = 0; t < 6; ++t) {
    const Index n = random_int(rng, 2, 5);
    const Index m = random_int(rng, 1, static_cast<int>(n));
    const int c = random_int(rng, 2, 4);
    Matrix x = random_matrix(rng, 15 * c, n);
    std::vector<int> labels;
    for (int i = 0; i < c; ++i) {
      x.middleRows(15 * i, 15) *= 0.5 + i;
      labels.insert(labels.end(), 15, i);
    }
    const LabeledDataset data(x, labels);
    const Matrix f = random_matrix(rng, n, m);
    const AmaLossValue v = ama_gauss_loss_with_gradient(f, data, 0.1);
    EXPECT_NEAR(v.value, ama_gauss_loss(f, data, 0.1), 1e-12);
    const Matrix fd =
        finite_difference([&](const Matrix& w) { return ama_gauss_loss(w, data, 0.1); }, f);
    EXPECT_LT(relative_error(v.gradient, fd), 1e-6);
  }
}

TEST(AmaGauss, FitLowersLossBelowRandomFilters) {
  const ToyData toy = generate({"covcode", 200, 3, 4, 8});
  TrainConfig cfg;
  cfg.m = 2;
  cfg.restarts = 2;
  const auto [model, log] = ama_gauss_fit(toy.dataset, cfg);
  Rng rng(65);
  EXPECT_LT(ama_gauss_loss(model.filters.matrix(), toy.dataset, 0.0),
            ama_gauss_loss(normalize_columns(random_matrix(rng, 8, 2)), toy.dataset, 0.0));
  EXPECT_EQ(model.response_means.size(), 4u);
  EXPECT_EQ(model.response_covs.front().dim(), 2);
}
