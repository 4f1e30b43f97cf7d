#include "sqfa/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

namespace sqfa {

namespace {

struct LinePoint {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative along d
  Vector x;
  Vector grad;
};

class LineSearch {
 public:
  LineSearch(const ValueAndGradient& f, const LbfgsOptions& opt, const Vector& x0, double f0,
             const Vector& g0, const Vector& direction)
      : f_(f), opt_(opt), x0_(x0), direction_(direction), f0_(f0), slope0_(g0.dot(direction)) {}

  std::optional<LinePoint> run(double alpha_init) {
    LinePoint prev{0.0, f0_, slope0_, x0_, Vector()};
    double alpha = alpha_init;
    for (int i = 0; evals_ < opt_.max_line_search_evals; ++i) {
      LinePoint cur = evaluate(alpha);
      if (!armijo(cur) || (i > 0 && cur.value >= prev.value)) return zoom(prev, cur);
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return std::nullopt;
  }

 private:
  bool armijo(const LinePoint& p) const {
    return std::isfinite(p.value) && p.value <= f0_ + opt_.c1 * p.alpha * slope0_;
  }

  LinePoint evaluate(double alpha) {
    ++evals_;
    LinePoint p;
    p.alpha = alpha;
    p.x = x0_ + alpha * direction_;
    p.grad.resize(p.x.size());
    p.value = f_(p.x, p.grad);
    if (!p.grad.allFinite()) p.value = std::numeric_limits<double>::infinity();
    p.slope = std::isfinite(p.value) ? p.grad.dot(direction_)
                                     : std::numeric_limits<double>::quiet_NaN();
    return p;
  }

  // Minimizer of the cubic through (a, fa, da), (b, fb, db), kept inside the
  // central 80% of the interval; bisection when the cubic is unusable.
  static double interpolate(const LinePoint& lo, const LinePoint& hi) {
    const double a = lo.alpha;
    const double b = hi.alpha;
    const double left = std::min(a, b);
    const double width = std::abs(b - a);
    double t = 0.5 * (a + b);
    if (std::isfinite(hi.value) && std::isfinite(hi.slope)) {
      const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
      const double disc = d1 * d1 - lo.slope * hi.slope;
      if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double cubic = b - (b - a) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
        if (std::isfinite(cubic)) t = cubic;
      }
    }
    return std::clamp(t, left + 0.1 * width, left + 0.9 * width);
  }

  std::optional<LinePoint> zoom(LinePoint lo, LinePoint hi) {
    while (evals_ < opt_.max_line_search_evals) {
      if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      LinePoint cur = evaluate(interpolate(lo, hi));
      if (!armijo(cur) || cur.value >= lo.value) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    // A point that satisfies sufficient decrease is still an acceptable step.
    if (lo.alpha > 0.0) return lo;
    return std::nullopt;
  }

  const ValueAndGradient& f_;
  const LbfgsOptions& opt_;
  const Vector& x0_;
  const Vector& direction_;
  double f0_;
  double slope0_;
  int evals_ = 0;
};

struct CurvaturePair {
  Vector s;
  Vector y;
  double rho;
};

Vector two_loop(const std::deque<CurvaturePair>& memory, const Vector& grad) {
  Vector q = grad;
  std::vector<double> alphas(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alphas[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alphas[i] * memory[i].y;
  }
  const CurvaturePair& last = memory.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(q);
    q += (alphas[i] - beta) * memory[i].s;
  }
  return -q;
}

}  // namespace

std::string to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::Converged: return "converged";
    case LbfgsStatus::MaxIterations: return "max_iterations";
    case LbfgsStatus::LineSearchFailed: return "line_search_failed";
    case LbfgsStatus::NoImprovingStep: return "no_improving_step";
  }
  return "unknown";
}

LbfgsResult minimize_lbfgs(const ValueAndGradient& f, Vector x0, const LbfgsOptions& options) {
  LbfgsResult result;
  Vector x = std::move(x0);
  Vector grad(x.size());
  double value = f(x, grad);
  result.history.push_back({0, value, grad.norm(), 0.0});
  if (!std::isfinite(value) || !grad.allFinite()) {
    result.x = std::move(x);
    result.value = value;
    result.status = LbfgsStatus::NoImprovingStep;
    return result;
  }

  std::deque<CurvaturePair> memory;
  result.status = LbfgsStatus::MaxIterations;
  int accepted = 0;
  if (grad.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
    result.status = LbfgsStatus::Converged;
  }

  while (result.status == LbfgsStatus::MaxIterations && accepted < options.max_iters) {
    std::optional<LinePoint> step;
    for (int attempt = 0; attempt < 2 && !step; ++attempt) {
      Vector direction;
      double alpha0 = 1.0;
      if (memory.empty()) {
        direction = -grad;
        alpha0 = std::min(1.0, 1.0 / grad.norm());
      } else {
        direction = two_loop(memory, grad);
        if (!(direction.dot(grad) < 0.0)) {
          memory.clear();
          direction = -grad;
          alpha0 = std::min(1.0, 1.0 / grad.norm());
        }
      }
      LineSearch search(f, options, x, value, grad, direction);
      step = search.run(alpha0);
      if (!step) {
        if (memory.empty()) break;
        memory.clear();  // retry once along steepest descent
      }
    }
    if (!step) {
      result.status =
          accepted == 0 ? LbfgsStatus::NoImprovingStep : LbfgsStatus::LineSearchFailed;
      break;
    }

    Vector s = step->x - x;
    Vector y = step->grad - grad;
    const double sy = s.dot(y);
    if (sy > std::numeric_limits<double>::epsilon() * s.norm() * y.norm()) {
      memory.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }

    const double change = std::abs(value - step->value);
    x = std::move(step->x);
    grad = std::move(step->grad);
    value = step->value;
    ++accepted;
    result.history.push_back({accepted, value, grad.norm(), step->alpha});

    if (change <= options.tol || grad.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
      result.status = LbfgsStatus::Converged;
    }
  }

  result.x = std::move(x);
  result.value = value;
  result.iterations = accepted;
  return result;
}

}  // namespace sqfa
