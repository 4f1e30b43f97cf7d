#include "sqfa/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "sqfa/lbfgs.hpp"
#include "sqfa/random.hpp"

namespace sqfa {

namespace {

bool uses_second_moments(DistanceKind kind) { return kind == DistanceKind::FisherRaoZeroMean; }

bool is_fisher_rao(DistanceKind kind) {
  return kind == DistanceKind::FisherRaoCalvoOller || kind == DistanceKind::FisherRaoZeroMean;
}

// Projected class parameters plus the X_i F products reused by the gradient.
struct Projection {
  std::vector<GaussianParams> params;
  std::vector<Matrix> moment_times_filters;
};

Projection project(const Eigen::Ref<const Matrix>& filters, const ClassEnsemble& ens,
                   const TrainConfig& cfg) {
  if (filters.rows() != ens.dim()) {
    std::ostringstream os;
    os << "filters have " << filters.rows() << " rows, statistics have dimension " << ens.dim();
    raise(ErrorCode::DimensionMismatch, os.str());
  }
  const Index m = filters.cols();
  const bool second = uses_second_moments(cfg.kind);
  Projection out;
  out.params.reserve(ens.classes().size());
  out.moment_times_filters.reserve(ens.classes().size());
  for (const ClassMoments& c : ens.classes()) {
    const Matrix& moment = second ? c.second_moment : c.covariance;
    Matrix xf = moment * filters;
    Matrix projected = filters.transpose() * xf;
    projected = 0.5 * (projected + projected.transpose()).eval();
    projected.diagonal().array() += cfg.sigma2;
    Vector mean = second ? Vector::Zero(m) : Vector(filters.transpose() * c.mean);
    out.params.emplace_back(std::move(mean), SpdMatrix(projected));
    out.moment_times_filters.push_back(std::move(xf));
  }
  return out;
}

ObjectiveValue evaluate(const Eigen::Ref<const Matrix>& filters, const ClassEnsemble& ens,
                        const TrainConfig& cfg, bool with_gradient) {
  const Projection proj = project(filters, ens, cfg);
  const PairwiseSum sum = pairwise_distance_sum(proj.params, cfg.kind, with_gradient);
  ObjectiveValue out;
  out.value = sum.value;
  if (!with_gradient) return out;

  // dSigma = dF^T X F + F^T X dF  =>  dF += 2 X F G  (G symmetric);
  // dmu = dF^T gamma             =>  dF += gamma g^T.
  out.gradient = Matrix::Zero(filters.rows(), filters.cols());
  const bool second = uses_second_moments(cfg.kind);
  for (std::size_t i = 0; i < proj.params.size(); ++i) {
    out.gradient.noalias() += 2.0 * proj.moment_times_filters[i] * sum.cov_grads[i];
    if (!second) {
      out.gradient.noalias() +=
          ens.classes()[i].mean * sum.mean_grads[i].transpose();
    }
  }
  return out;
}

// Optimizes `new_count` columns appended to `fixed`; returns the best restart.
struct StageResult {
  Matrix filters;
  double objective = -std::numeric_limits<double>::infinity();
  bool converged = false;
  bool any_step = false;
};

StageResult optimize_stage(const FilterObjective& objective, const Matrix& fixed,
                           Index new_count, int stage, std::uint64_t seed_base,
                           const TrainConfig& cfg, TrainLog& log) {
  const Index n = fixed.rows();
  const Index k = fixed.cols();
  LbfgsOptions options;
  options.memory = cfg.lbfgs_memory;
  options.max_iters = cfg.max_iters;
  options.tol = cfg.tol;

  auto assemble = [&](const Matrix& raw) {
    Matrix full(n, k + new_count);
    full.leftCols(k) = fixed;
    full.rightCols(new_count) = normalize_columns(raw);
    return full;
  };

  StageResult best;
  for (int r = 0; r < cfg.restarts; ++r) {
    const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(r);
    Rng rng(seed);
    const Matrix raw0 = rng.standard_normal(n, new_count);

    // Minimize the negated objective over vec(W).
    ValueAndGradient negated = [&](const Vector& x, Vector& grad) -> double {
      const Eigen::Map<const Matrix> raw(x.data(), n, new_count);
      Matrix grad_full;
      double value = 0.0;
      try {
        value = objective(assemble(raw), &grad_full);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotPositiveDefinite) throw;
        grad.setZero();
        return std::numeric_limits<double>::infinity();
      }
      const Matrix g = normalization_gradient(raw, grad_full.rightCols(new_count));
      grad = -Eigen::Map<const Vector>(g.data(), g.size());
      return -value;
    };

    const LbfgsResult res =
        minimize_lbfgs(negated, Eigen::Map<const Vector>(raw0.data(), raw0.size()), options);
    for (const LbfgsIteration& it : res.history) {
      log.iterations.push_back({stage, r, it.iteration, -it.value, it.grad_norm, it.step});
    }
    log.iterations_used += res.iterations;
    const double value = -res.value;
    log.restarts.push_back(
        {stage, r, seed, value, res.converged(), res.iterations, to_string(res.status)});

    if (res.status == LbfgsStatus::NoImprovingStep) continue;
    best.any_step = true;
    // Strictly greater: ties keep the lowest seed.
    if (value > best.objective) {
      best.objective = value;
      best.converged = res.converged();
      best.filters = assemble(Eigen::Map<const Matrix>(res.x.data(), n, new_count));
    }
  }
  return best;
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { raise(ErrorCode::InvalidArgument, what); };
  if (m < 1) fail("m must be positive");
  if (sequential_pairs && m % 2 != 0) fail("m must be even when learning filters in pairs");
  if (!(tol > 0.0)) fail("tol must be positive");
  if (restarts < 1) fail("restarts must be positive");
  if (max_iters < 1) fail("max_iters must be positive");
  if (lbfgs_memory < 1) fail("lbfgs_memory must be positive");
  if (!(sigma2 >= 0.0)) fail("sigma2 must be nonnegative");
}

PairwiseSum pairwise_distance_sum(const std::vector<GaussianParams>& classes,
                                  DistanceKind kind, bool with_gradient) {
  const std::size_t c = classes.size();
  PairwiseSum out;
  if (with_gradient) {
    for (const GaussianParams& p : classes) {
      out.mean_grads.push_back(Vector::Zero(p.dim()));
      out.cov_grads.push_back(Matrix::Zero(p.dim(), p.dim()));
    }
  }
  // Every distance kind is symmetric, so the ordered-pair sum is evaluated as
  // twice the sum over i < j, in lexicographic order.
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      if (!with_gradient) {
        out.value += 2.0 * distance(kind, classes[i], classes[j]);
        continue;
      }
      DistanceGradient g;
      try {
        g = distance_gradient(kind, classes[i], classes[j]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateDistance || !is_fisher_rao(kind)) throw;
        out.value += 2.0 * distance(kind, classes[i], classes[j]);
        continue;
      }
      out.value += 2.0 * g.value;
      out.mean_grads[i] += 2.0 * g.mean_p;
      out.mean_grads[j] += 2.0 * g.mean_q;
      out.cov_grads[i] += 2.0 * g.cov_p;
      out.cov_grads[j] += 2.0 * g.cov_q;
    }
  }
  return out;
}

double objective(const Eigen::Ref<const Matrix>& filters, const ClassEnsemble& ens,
                 const TrainConfig& cfg) {
  return evaluate(filters, ens, cfg, false).value;
}

Matrix objective_gradient(const Eigen::Ref<const Matrix>& filters, const ClassEnsemble& ens,
                          const TrainConfig& cfg) {
  return evaluate(filters, ens, cfg, true).gradient;
}

ObjectiveValue objective_with_gradient(const Eigen::Ref<const Matrix>& filters,
                                       const ClassEnsemble& ens, const TrainConfig& cfg) {
  return evaluate(filters, ens, cfg, true);
}

Matrix normalize_columns(const Eigen::Ref<const Matrix>& raw) {
  Matrix out = raw;
  for (Index k = 0; k < out.cols(); ++k) out.col(k) /= out.col(k).norm();
  return out;
}

Matrix normalization_gradient(const Eigen::Ref<const Matrix>& raw,
                              const Eigen::Ref<const Matrix>& grad_filters) {
  Matrix out(raw.rows(), raw.cols());
  for (Index k = 0; k < raw.cols(); ++k) {
    const double norm = raw.col(k).norm();
    const Vector f = raw.col(k) / norm;
    const Vector g = grad_filters.col(k);
    out.col(k) = (g - f * f.dot(g)) / norm;
  }
  return out;
}

std::pair<FilterBank, TrainLog> optimize_filters(const FilterObjective& objective, Index n,
                                                 const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.m > n) {
    std::ostringstream os;
    os << "cannot learn " << cfg.m << " filters in dimension " << n;
    raise(ErrorCode::InvalidArgument, os.str());
  }
  const auto start = std::chrono::steady_clock::now();
  TrainLog log;
  const Index stage_width = cfg.sequential_pairs ? 2 : cfg.m;
  const int stages = static_cast<int>(cfg.m / stage_width);

  Matrix filters(n, 0);
  bool converged = true;
  for (int stage = 0; stage < stages; ++stage) {
    const std::uint64_t seed_base = cfg.seed + static_cast<std::uint64_t>(stage) * kStageSeedOffset;
    StageResult res = optimize_stage(objective, filters, stage_width, stage, seed_base, cfg, log);
    if (!res.any_step) {
      log.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::ostringstream os;
      os << "line search failed at initialization for every restart of stage " << stage;
      throw TrainingError(os.str(), std::move(log));
    }
    filters = std::move(res.filters);
    converged = converged && res.converged;
    log.stage_objectives.push_back(res.objective);
  }
  log.converged = converged;
  log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {FilterBank::normalized(filters), std::move(log)};
}

std::pair<FilterBank, TrainLog> fit(const ClassEnsemble& ens, const TrainConfig& cfg) {
  FilterObjective objective = [&ens, &cfg](const Matrix& filters, Matrix* gradient) {
    ObjectiveValue v = evaluate(filters, ens, cfg, gradient != nullptr);
    if (gradient) *gradient = std::move(v.gradient);
    return v.value;
  };
  return optimize_filters(objective, ens.dim(), cfg);
}

std::pair<FilterBank, TrainLog> fit_sequential_pairs(const ClassEnsemble& ens,
                                                     const TrainConfig& cfg) {
  TrainConfig staged = cfg;
  staged.sequential_pairs = true;
  return fit(ens, staged);
}

}  // namespace sqfa
