#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "sqfa/spd.hpp"

namespace sqfa {

/// Explicitly seeded generator. Boost's distributions are implemented in
/// headers with fixed algorithms, so draws are identical across platforms
/// (unlike std::normal_distribution).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// rows x cols of independent standard normals, filled column-major.
  Matrix standard_normal(Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index c = 0; c < cols; ++c) {
      for (Index r = 0; r < rows; ++r) out(r, c) = normal();
    }
    return out;
  }

  /// `count` rows drawn from N(mean, L L^T) given a lower factor L.
  Matrix gaussian_rows(const Vector& mean, const Matrix& lower_factor, Index count) {
    Matrix out(count, mean.size());
    Vector z(mean.size());
    for (Index s = 0; s < count; ++s) {
      for (Index k = 0; k < z.size(); ++k) z(k) = normal();
      out.row(s) = (mean + lower_factor * z).transpose();
    }
    return out;
  }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

/// A lower factor L with L L^T = cov for a symmetric PSD cov (Cholesky when
/// possible, clamped eigen-square-root otherwise).
Matrix sampling_factor(const Matrix& covariance);

}  // namespace sqfa
