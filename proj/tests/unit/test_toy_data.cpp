#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sqfa/error.hpp"
#include "sqfa/toy_data.hpp"

using namespace sqfa;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

bool only_differs_on(const std::vector<Matrix>& mats, const std::vector<Index>& dims) {
  Matrix mask = Matrix::Ones(mats[0].rows(), mats[0].cols());
  for (Index i : dims) {
    for (Index j : dims) mask(i, j) = 0.0;
  }
  for (const Matrix& m : mats) {
    if (!(m - mats[0]).cwiseProduct(mask).isZero(1e-14)) return false;
  }
  return true;
}

std::vector<Matrix> as_matrices(const std::vector<Vector>& vs) {
  return {vs.begin(), vs.end()};
}

}  // namespace

TEST(Toy, Shapes) {
  const ToyData six = generate({"toy6d", 500, 1});
  EXPECT_EQ(six.dataset.size(), 1500);
  EXPECT_EQ(six.dataset.dim(), 6);
  EXPECT_EQ(six.dataset.labels()[499], 0);
  EXPECT_EQ(six.dataset.labels()[500], 1);
  const ToyData four = generate({"toy4d", 100, 1});
  EXPECT_EQ(four.dataset.size(), 300);
  EXPECT_EQ(four.dataset.dim(), 4);
  const ToyData code = generate({"covcode", 50, 1, 5, 12});
  EXPECT_EQ(code.dataset.size(), 250);
  EXPECT_EQ(code.dataset.dim(), 12);
  EXPECT_EQ(code.dataset.num_classes(), 5);
}

TEST(Toy, SixDimensionalParameterLayout) {
  const ToyData toy = generate({"toy6d", 10, 0});
  EXPECT_TRUE(only_differs_on(toy.covariances, toy.subspace("covariance").dims));
  std::vector<Matrix> means;
  for (const Vector& m : toy.means) means.push_back(Matrix(m));
  for (const Vector& m : toy.means) {
    EXPECT_EQ(m(0), 0.0);
    EXPECT_EQ(m(4), 0.0);
  }
  const Vector diag = toy.covariances[0].diagonal();
  for (Index d : toy.subspace("variance").dims) {
    for (Index e = 0; e < 4; ++e) EXPECT_GT(diag(d), toy.covariances[1](e, e));
  }
  EXPECT_EQ(toy.subspace("mean").dims, (std::vector<Index>{2, 3}));
}

TEST(Toy, FourDimensionalParameterLayout) {
  const ToyData toy = generate({"toy4d", 10, 0});
  EXPECT_TRUE(only_differs_on(toy.covariances, toy.subspace("covariance").dims));
  for (const Vector& m : toy.means) EXPECT_TRUE(m.tail(2).isZero());
}

TEST(Toy, CovcodeHasZeroMeans) {
  const ToyData toy = generate({"covcode", 10, 0, 4, 6});
  for (const Vector& m : toy.means) EXPECT_TRUE(m.isZero());
  EXPECT_TRUE(only_differs_on(toy.covariances, toy.subspace("covariance").dims));
}

TEST(Toy, Deterministic) {
  EXPECT_EQ(generate({"toy6d", 50, 3}).dataset.samples(),
            generate({"toy6d", 50, 3}).dataset.samples());
  EXPECT_NE(generate({"toy6d", 50, 3}).dataset.samples(),
            generate({"toy6d", 50, 4}).dataset.samples());
}

TEST(Toy, UnknownName) {
  EXPECT_EQ(code_of([] { generate({"toy5d", 10, 0}); }), ErrorCode::UnknownSpec);
}

TEST(Toy, RotatedTemplate) {
  const Matrix r = rotated_template(9.0, 1.0, std::numbers::pi / 2);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(r(1, 1), 9.0, 1e-12);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-12);
}

TEST(Sweep, Bayes1dAnchors) {
  SweepOptions opt;
  opt.mc_samples = 2000;
  const Table t = sweep_grid("bayes1d", opt);
  EXPECT_EQ(t.rows.size(), 17u);
  const auto x = t.column("log10_sigma2");
  const auto closed = t.column("closed_form_accuracy");
  const auto fr = t.column("d_fr");
  EXPECT_DOUBLE_EQ(x[8], 0.0);
  EXPECT_DOUBLE_EQ(closed[8], 0.5);
  EXPECT_NEAR(fr[8], 0.0, 1e-12);
  EXPECT_NEAR(fr[0], fr[16], 1e-12);
  EXPECT_NEAR(fr[16], std::log(100.0) / std::numbers::sqrt2, 1e-9);
}

TEST(Sweep, EqualCovarianceGap) {
  const Table t = sweep_grid("co_gap_equalcov");
  const auto exact = t.column("exact_fr");
  const auto bound = t.column("calvo_oller_bound");
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_LE(bound[i], exact[i] + 1e-12);
  EXPECT_EQ(bound.front(), 0.0);
}

TEST(Sweep, Errors) {
  EXPECT_EQ(code_of([] { sweep_grid("nope"); }), ErrorCode::UnknownSweep);
  EXPECT_EQ(code_of([] { sweep_grid("co_gap_dataset"); }), ErrorCode::InvalidArgument);
}

TEST(Sweep, DatasetGapExactWhereKnown) {
  const Matrix i2 = Matrix::Identity(2, 2);
  const std::vector<GaussianParams> classes = {
      GaussianParams(Vector::Zero(2), SpdMatrix(i2)),
      GaussianParams(Vector::Ones(2), SpdMatrix(i2)),
      GaussianParams(Vector::Zero(2), SpdMatrix(Matrix(4.0 * i2))),
      GaussianParams(Vector::Constant(2, 3.0), SpdMatrix(Matrix(2.0 * i2))),
  };
  const Table t = co_gap_dataset(classes);
  ASSERT_EQ(t.rows.size(), 6u);
  const auto exact = t.column("exact_fr");
  const auto bound = t.column("calvo_oller_bound");
  // (0,1) equal covariance, (0,2) equal mean, (0,3) neither.
  EXPECT_NEAR(exact[0], std::numbers::sqrt2 * std::acosh(1.0 + 2.0 / 4.0), 1e-12);
  EXPECT_NEAR(exact[1], std::sqrt(2.0) * std::log(4.0) / std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(bound[1], exact[1], 1e-10);
  EXPECT_TRUE(std::isnan(exact[2]));
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if (!std::isnan(exact[i])) EXPECT_LE(bound[i], exact[i] + 1e-12);
  }
}

TEST(Table, CsvAndColumns) {
  Table t{{"a", "b"}, {}};
  t.add_row({1.0, std::nan("")});
  t.add_row({0.5, 2.0});
  EXPECT_EQ(t.to_csv(), "a,b\n1,nan\n0.5,2\n");
  EXPECT_EQ(t.column("a"), (std::vector<double>{1.0, 0.5}));
  EXPECT_THROW(t.add_row({1.0}), Error);
  EXPECT_THROW(t.column("c"), Error);
}
