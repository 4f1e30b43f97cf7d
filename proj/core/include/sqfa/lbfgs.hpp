#pragma once

// Limited-memory BFGS with a strong-Wolfe line search (bracketing + zoom with
// safeguarded cubic interpolation). Minimizes.

#include <functional>
#include <string>
#include <vector>

#include "sqfa/spd.hpp"

namespace sqfa {

struct LbfgsOptions {
  int memory = 10;
  int max_iters = 500;
  /// Converged when |f_k - f_{k-1}| <= tol between accepted iterates.
  double tol = 1e-6;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search_evals = 40;
  /// Also stop when the gradient infinity-norm falls to this level.
  double grad_tol = 1e-12;
};

struct LbfgsIteration {
  int iteration = 0;
  double value = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

enum class LbfgsStatus {
  Converged,
  MaxIterations,
  LineSearchFailed,
  NoImprovingStep,  // line search failed before any step was accepted
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  int iterations = 0;
  /// Entry 0 is the starting point, followed by one record per accepted step.
  std::vector<LbfgsIteration> history;

  bool converged() const noexcept { return status == LbfgsStatus::Converged; }
};

std::string to_string(LbfgsStatus status);

/// f(x, grad) returns the value and writes the gradient.
using ValueAndGradient = std::function<double(const Vector& x, Vector& grad)>;

LbfgsResult minimize_lbfgs(const ValueAndGradient& f, Vector x0, const LbfgsOptions& options);

}  // namespace sqfa
