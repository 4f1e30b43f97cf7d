// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "sqfa/baselines.hpp"
#include "sqfa/evaluation.hpp"
#include "sqfa/toy_data.hpp"
#include "sqfa/trainer.hpp"

using namespace sqfa;
using namespace sqfa::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++failures;
  std::printf("[%s] %2d %-28s %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id, name,
              out.detail.c_str(), seconds_since(start));
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

TrainConfig config(DistanceKind kind, Index m, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.kind = kind;
  cfg.m = m;
  cfg.seed = seed;
  return cfg;
}

// --- 1 -------------------------------------------------------------------

Outcome gradient_oracle() {
  const auto start = Clock::now();
  const DistanceKind kinds[] = {DistanceKind::FisherRaoCalvoOller, DistanceKind::FisherRaoZeroMean,
                                DistanceKind::Bhattacharyya, DistanceKind::Hellinger};
  Rng rng(101);
  double worst = 0.0;
  int instances = 0;
  for (int trial = 0; trial < 15; ++trial) {
    for (DistanceKind kind : kinds) {
      const Index n = random_int(rng, 2, 10);
      const Index m = random_int(rng, 1, static_cast<int>(std::min<Index>(4, n)));
      const int c = random_int(rng, 2, 5);
      const ClassEnsemble ens = random_ensemble(rng, n, c);
      TrainConfig cfg = config(kind, m, 0);
      cfg.sigma2 = 0.05;
      const Matrix f = random_matrix(rng, n, m);
      const Matrix analytic = objective_gradient(f, ens, cfg);
      const Matrix numeric = finite_difference(
          [&](const Matrix& x) { return objective(x, ens, cfg); }, f);
      worst = std::max(worst, relative_error(analytic, numeric));
      ++instances;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-5 && instances >= 50 && elapsed < 30.0,
          fmt("instances=%.0f worst_rel=%.2e (tol 1e-5) time=%.1fs (<30s)", instances, worst,
              elapsed)};
}

// --- 2 -------------------------------------------------------------------

Outcome congruence_invariance() {
  Rng rng(202);
  double worst_ai = 0.0;
  double worst_co = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = random_int(rng, 1, 6);
    const Matrix a = random_spd(rng, n);
    const Matrix b = random_spd(rng, n);
    const Matrix g = random_invertible(rng, n, 0.5);
    const double base = affine_invariant_distance(SpdMatrix(a), SpdMatrix(b));
    const double moved = affine_invariant_distance(SpdMatrix(g.transpose() * a * g),
                                                   SpdMatrix(g.transpose() * b * g));
    if (base > 1e-6) worst_ai = std::max(worst_ai, relative_error(moved, base));

    const Vector mp = random_vector(rng, n);
    const Vector mq = random_vector(rng, n);
    const Vector shift = random_vector(rng, n);
    const GaussianParams p(mp, SpdMatrix(a));
    const GaussianParams q(mq, SpdMatrix(b));
    const GaussianParams pm(g * mp + shift, SpdMatrix(g * a * g.transpose()));
    const GaussianParams qm(g * mq + shift, SpdMatrix(g * b * g.transpose()));
    const double co = calvo_oller_distance(p, q);
    if (co > 1e-6) worst_co = std::max(worst_co, relative_error(calvo_oller_distance(pm, qm), co));
  }
  return {worst_ai <= 1e-8 && worst_co <= 1e-8,
          fmt("trials=1000 d_AI worst_rel=%.2e calvo_oller worst_rel=%.2e (tol 1e-8)", worst_ai,
              worst_co)};
}

// --- 3 -------------------------------------------------------------------

Outcome bound_correctness() {
  Rng rng(303);
  double worst_equal_mean = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = random_int(rng, 1, 6);
    const Vector mu = random_vector(rng, n, 2.0);
    const Matrix a = random_spd(rng, n);
    const Matrix b = random_spd(rng, n);
    const double co = calvo_oller_distance({mu, SpdMatrix(a)}, {mu, SpdMatrix(b)});
    const double exact = fisher_rao_zero_mean(SpdMatrix(a), SpdMatrix(b));
    worst_equal_mean = std::max(worst_equal_mean, std::abs(co - exact) / std::max(1.0, exact));
  }

  const Table grid = sweep_grid("co_gap_equalcov");
  const auto dm = grid.column("d_m");
  const auto exact = grid.column("exact_fr");
  const auto bound = grid.column("calvo_oller_bound");
  bool below = true;
  bool increasing = true;
  bool closed_form = dm.front() == 0.0 && dm.back() == 20.0;
  for (std::size_t k = 0; k < dm.size(); ++k) {
    const double want = std::sqrt(2.0) * std::acosh(1.0 + dm[k] * dm[k] / 4.0);
    closed_form = closed_form && std::abs(exact[k] - want) <= 1e-9 * std::max(1.0, want);
    below = below && bound[k] <= exact[k] + 1e-12;
    if (k > 0) increasing = increasing && bound[k] > bound[k - 1] && exact[k] > exact[k - 1];
  }
  // Relative gap must vanish as d_M -> 0.
  const double gap_at_zero = exact[0] - bound[0];
  const double rel_gap_small = (exact[1] - bound[1]) / exact[1];
  const double rel_gap_large = (exact.back() - bound.back()) / exact.back();
  const bool shrinking = std::abs(gap_at_zero) <= 1e-12 && rel_gap_small < 0.01 &&
                         rel_gap_small < rel_gap_large;
  return {worst_equal_mean <= 1e-10 && below && increasing && closed_form && shrinking,
          fmt("equal-mean worst=%.2e (tol 1e-10); grid bound<=exact:%.0f increasing:%.0f "
              "rel_gap d_M=0.5:%.2e",
              worst_equal_mean, below && closed_form, increasing, rel_gap_small) +
              fmt(" d_M=20:%.3f", rel_gap_large)};
}

// --- 4 -------------------------------------------------------------------

Outcome lda_theorem() {
  Rng rng(404);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = random_int(rng, 1, 8);
    const int c = random_int(rng, 2, 8);
    const Matrix shared = random_spd(rng, n);
    std::vector<Vector> means;
    for (int i = 0; i < c; ++i) means.push_back(random_vector(rng, n, 1.5));
    double lhs = 0.0;
    for (int i = 0; i < c; ++i) {
      for (int j = 0; j < c; ++j) {
        lhs += 0.5 * ref_mahalanobis_sq(means[static_cast<std::size_t>(i)],
                                        means[static_cast<std::size_t>(j)], shared);
      }
    }
    Vector grand = Vector::Zero(n);
    for (const Vector& mu : means) grand += mu / c;
    Matrix scatter = Matrix::Zero(n, n);
    for (const Vector& mu : means) scatter += (mu - grand) * (mu - grand).transpose();
    const double rhs = c * (shared.inverse() * scatter).trace();
    // With the 1/c-normalized scatter the same sum is c^2 Tr(Sigma^-1 S).
    const double rhs_normalized = c * c * (shared.inverse() * (scatter / c)).trace();
    const double lib = scaled_fisher_criterion(means, SpdMatrix(shared));
    const double lib_lhs = pairwise_mahalanobis_half_sum(means, SpdMatrix(shared));
    worst = std::max({worst, relative_error(rhs, lhs), relative_error(rhs_normalized, lhs),
                      relative_error(lib, lhs), relative_error(lib_lhs, lhs)});
  }
  return {worst <= 1e-8, fmt("ensembles=100 worst_rel=%.2e (tol 1e-8)", worst)};
}

// --- 5 -------------------------------------------------------------------

Outcome hellinger_identities() {
  Rng rng(505);
  double worst_identity = 0.0;
  double max_h = 0.0;
  double min_h = 1.0;
  double worst_triangle = 0.0;
  double worst_symmetry = 0.0;
  double worst_self = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = random_int(rng, 1, 5);
    std::vector<GaussianParams> g;
    for (int k = 0; k < 3; ++k) {
      g.emplace_back(random_vector(rng, n, 1.5), SpdMatrix(random_spd(rng, n)));
    }
    const double pq = hellinger(g[0], g[1]);
    const double qr = hellinger(g[1], g[2]);
    const double pr = hellinger(g[0], g[2]);
    const double b = bhattacharyya(g[0], g[1]);
    worst_identity = std::max(worst_identity, std::abs(pq - std::sqrt(1.0 - std::exp(-b))));
    for (double h : {pq, qr, pr}) {
      max_h = std::max(max_h, h);
      min_h = std::min(min_h, h);
    }
    worst_triangle = std::max(worst_triangle, pr - (pq + qr));
    worst_symmetry = std::max(worst_symmetry, std::abs(pq - hellinger(g[1], g[0])));
    worst_self = std::max(worst_self, hellinger(g[0], g[0]));
  }
  const bool pass = worst_identity <= 1e-12 && min_h >= 0.0 && max_h < 1.0 &&
                    worst_triangle <= 1e-12 && worst_symmetry <= 1e-12 && worst_self <= 1e-12;
  return {pass, fmt("identity_err=%.1e range=[%.3f,%.6f] triangle_excess=%.1e", worst_identity,
                    min_h, max_h, worst_triangle) +
                    fmt(" self=%.1e sym=%.1e", worst_self, worst_symmetry)};
}

// --- 6 -------------------------------------------------------------------

Outcome bayes_oracle() {
  const auto start = Clock::now();
  const GaussianParams unit(Vector::Zero(1), SpdMatrix(Matrix::Identity(1, 1)));
  double worst = 0.0;
  std::uint64_t seed = 600;
  for (double lg : {-2.0, -1.0, 1.0, 2.0}) {
    const double s2 = std::exp(lg);
    const GaussianParams other(Vector::Zero(1), SpdMatrix(Matrix::Constant(1, 1, s2)));
    const double mc = monte_carlo_bayes({unit, other}, 100000, seed++).accuracy;
    worst = std::max(worst, std::abs(mc - bayes_1d_closed_form(s2)));
  }
  const double chance = monte_carlo_bayes({unit, unit}, 100000, seed).accuracy;
  const double elapsed = seconds_since(start);
  return {worst <= 0.005 && std::abs(chance - 0.5) <= 0.005 && elapsed < 60.0,
          fmt("worst |mc-closed|=%.4f (tol 0.005) sigma2=1 acc=%.4f time=%.1fs (<60s)", worst,
              chance, elapsed)};
}

// --- 7, 8 ----------------------------------------------------------------

double angle_to(const FilterBank& f, const ToyData& toy, const char* role) {
  return max_principal_angle_deg(f.matrix(), toy.subspace(role).basis(toy.dataset.dim()));
}

Outcome toy6d_reproduction() {
  const auto start = Clock::now();
  int sqfa_ok = 0, lda_ok = 0, pca_ok = 0;
  double worst_sqfa = 0.0, worst_lda = 0.0, worst_pca = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ToyData toy = generate({"toy6d", 4000, seed});
    const ClassEnsemble ens = estimate_class_statistics(toy.dataset);
    const double a_sqfa =
        angle_to(fit(ens, config(DistanceKind::FisherRaoCalvoOller, 2, seed)).first, toy,
                 "covariance");
    const double a_lda = angle_to(lda(ens, 2).filters, toy, "mean");
    const double a_pca = angle_to(pca(ens, 2), toy, "variance");
    sqfa_ok += a_sqfa <= 5.0;
    lda_ok += a_lda <= 5.0;
    pca_ok += a_pca <= 5.0;
    worst_sqfa = std::max(worst_sqfa, a_sqfa);
    worst_lda = std::max(worst_lda, a_lda);
    worst_pca = std::max(worst_pca, a_pca);
  }
  const double elapsed = seconds_since(start);
  return {sqfa_ok >= 18 && lda_ok >= 18 && pca_ok >= 18 && elapsed < 120.0,
          fmt("seeds within 5deg sqfa=%.0f lda=%.0f pca=%.0f /20", sqfa_ok, lda_ok, pca_ok) +
              fmt(" worst angles %.2f/%.2f/%.2f time=%.1fs (<120s)", worst_sqfa, worst_lda,
                  worst_pca, elapsed)};
}

Outcome toy4d_reproduction() {
  int sqfa_ok = 0, sm_ok = 0;
  double worst_sqfa = 0.0, worst_sm = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ToyData toy = generate({"toy4d", 2000, seed});
    const ClassEnsemble ens = estimate_class_statistics(toy.dataset);
    const double a_sqfa =
        angle_to(fit(ens, config(DistanceKind::FisherRaoCalvoOller, 2, seed)).first, toy, "mean");
    const double a_sm =
        angle_to(fit(ens, config(DistanceKind::FisherRaoZeroMean, 2, seed)).first, toy,
                 "covariance");
    sqfa_ok += a_sqfa <= 5.0;
    sm_ok += a_sm <= 5.0;
    worst_sqfa = std::max(worst_sqfa, a_sqfa);
    worst_sm = std::max(worst_sm, a_sm);
  }
  return {sqfa_ok >= 18 && sm_ok >= 18,
          fmt("seeds within 5deg sqfa=%.0f smsqfa=%.0f /20 worst angles %.2f/%.2f", sqfa_ok,
              sm_ok, worst_sqfa, worst_sm)};
}

// --- 9, 12, 13: covariance-coded task ------------------------------------

struct CovcodeRun {
  ToyData train;
  ToyData test;
  ClassEnsemble ens;
  FilterBank sqfa;
  FilterBank smsqfa;
  FilterBank pca_filters;
  FilterBank lda_filters;
};

const CovcodeRun& covcode() {
  static const CovcodeRun run = [] {
    ToyData train = generate({"covcode", 500, 900});
    ToyData test = generate({"covcode", 500, 901});
    ClassEnsemble ens = estimate_class_statistics(train.dataset);
    FilterBank sqfa = fit(ens, config(DistanceKind::FisherRaoCalvoOller, 4, 9)).first;
    FilterBank sm = fit(ens, config(DistanceKind::FisherRaoZeroMean, 4, 9)).first;
    FilterBank p = pca(ens, 4);
    FilterBank l = lda(ens, 4).filters;
    return CovcodeRun{std::move(train), std::move(test), std::move(ens), std::move(sqfa),
                      std::move(sm),    std::move(p),    std::move(l)};
  }();
  return run;
}

double qda_accuracy(const CovcodeRun& run, const FilterBank& f) {
  return qda_evaluate(qda_fit(run.train.dataset, f, 0.0), run.test.dataset, f).accuracy;
}

Outcome discriminability_ordering() {
  const CovcodeRun& run = covcode();
  const double sm = qda_accuracy(run, run.smsqfa);
  const double p = qda_accuracy(run, run.pca_filters);
  const double l = qda_accuracy(run, run.lda_filters);
  const double chance = 1.0 / 8.0;
  return {sm >= p + 0.10 && l <= chance + 0.05,
          fmt("qda acc smsqfa=%.3f pca=%.3f lda=%.3f chance=%.3f", sm, p, l, chance)};
}

Outcome ama_gauss_benchmark() {
  const CovcodeRun& run = covcode();
  TrainConfig cfg = config(DistanceKind::FisherRaoZeroMean, 4, 9);
  cfg.restarts = 5;
  const auto [model, log] = ama_gauss_fit(run.train.dataset, cfg);
  const double ama = qda_accuracy(run, model.filters);
  const double sm = qda_accuracy(run, run.smsqfa);
  return {ama >= sm - 0.02, fmt("qda acc ama=%.3f smsqfa=%.3f (need ama >= smsqfa - 0.02)", ama, sm)};
}

Outcome appendix_f_robustness() {
  const CovcodeRun& run = covcode();
  const auto& train = run.train.dataset;
  const auto& test = run.test.dataset;
  const double rs_sqfa =
      gaussian_resample_eval(train, test, run.sqfa, ClassifierKind::Qda, 13, 0.0).accuracy;
  const double rs_pca =
      gaussian_resample_eval(train, test, run.pca_filters, ClassifierKind::Qda, 13, 0.0).accuracy;
  const double knn_sqfa = knn_predict(train, test, run.sqfa, 3).accuracy;
  const double knn_pca = knn_predict(train, test, run.pca_filters, 3).accuracy;
  const double real_sqfa = qda_accuracy(run, run.sqfa);
  const double real_pca = qda_accuracy(run, run.pca_filters);
  const bool pass = real_sqfa > real_pca && rs_sqfa > rs_pca && knn_sqfa > knn_pca;
  return {pass, fmt("qda sqfa/pca=%.3f/%.3f resampled=%.3f/%.3f", real_sqfa, real_pca, rs_sqfa,
                    rs_pca) +
                    fmt(" knn3=%.3f/%.3f", knn_sqfa, knn_pca)};
}

// --- 10 ------------------------------------------------------------------

Outcome optimizer_contract() {
  bool monotone = true;
  bool converged = true;
  int max_iters_seen = 0;
  double spread = 0.0;
  const std::pair<const char*, DistanceKind> tasks[] = {
      {"toy6d", DistanceKind::FisherRaoCalvoOller}, {"toy6d", DistanceKind::FisherRaoZeroMean},
      {"toy4d", DistanceKind::FisherRaoCalvoOller}, {"toy4d", DistanceKind::FisherRaoZeroMean}};
  for (const auto& [name, kind] : tasks) {
    const ToyData toy = generate({name, 2000, 1});
    const auto [filters, log] = fit(estimate_class_statistics(toy.dataset), config(kind, 2, 1));
    for (std::size_t k = 1; k < log.iterations.size(); ++k) {
      const auto& prev = log.iterations[k - 1];
      const auto& cur = log.iterations[k];
      if (cur.restart == prev.restart && cur.stage == prev.stage) {
        monotone = monotone && cur.objective >= prev.objective;
      }
    }
    for (const RestartRecord& r : log.restarts) {
      converged = converged && r.converged;
      max_iters_seen = std::max(max_iters_seen, r.iterations);
    }
    if (std::string(name) == "toy6d" && kind == DistanceKind::FisherRaoCalvoOller) {
      double lo = log.restarts.front().objective;
      double hi = lo;
      for (const RestartRecord& r : log.restarts) {
        lo = std::min(lo, r.objective);
        hi = std::max(hi, r.objective);
      }
      spread = (hi - lo) / hi;
    }
  }
  return {monotone && converged && max_iters_seen <= 500 && spread <= 0.01,
          fmt("monotone=%.0f all_restarts_converged=%.0f max_iters=%.0f toy6d_spread=%.2e", monotone,
              converged, max_iters_seen, spread)};
}

// --- 11 ------------------------------------------------------------------

Outcome sequential_pairs() {
  bool first_pair_equal = true;
  bool monotone = true;
  double worst_diff = 0.0;
  for (const char* name : {"toy6d", "covcode"}) {
    const ToyData toy = generate({name, 1000, 11});
    const ClassEnsemble ens = estimate_class_statistics(toy.dataset);
    TrainConfig two = config(DistanceKind::FisherRaoCalvoOller, 2, 11);
    TrainConfig four = two;
    four.m = 4;
    four.sequential_pairs = true;
    const FilterBank f2 = fit(ens, two).first;
    const auto [f4, log] = fit(ens, four);
    const double diff = (f4.leading(2).matrix() - f2.matrix()).cwiseAbs().maxCoeff();
    worst_diff = std::max(worst_diff, diff);
    first_pair_equal = first_pair_equal && diff <= 1e-12;
    for (std::size_t s = 1; s < log.stage_objectives.size(); ++s) {
      monotone = monotone && log.stage_objectives[s] >= log.stage_objectives[s - 1];
    }
  }
  return {first_pair_equal && monotone,
          fmt("first pair max|diff|=%.1e monotone stages=%.0f", worst_diff, monotone)};
}

// --- 14 ------------------------------------------------------------------

double median_step_seconds(const ClassEnsemble& ens, const TrainConfig& cfg, Rng& rng) {
  const Matrix f = normalize_columns(random_matrix(rng, ens.dim(), cfg.m));
  std::vector<double> samples;
  for (int rep = 0; rep < 7; ++rep) {
    const auto start = Clock::now();
    int calls = 0;
    double sink = 0.0;
    do {
      sink += objective_with_gradient(f, ens, cfg).value;
      ++calls;
    } while (seconds_since(start) < 0.05);
    samples.push_back(seconds_since(start) / calls + 0.0 * sink);
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

Outcome performance_envelope() {
  Rng rng(1414);
  const ClassEnsemble big = random_ensemble(rng, 200, 20);
  TrainConfig cfg = config(DistanceKind::FisherRaoCalvoOller, 8, 14);
  cfg.sigma2 = 0.01;
  const auto start = Clock::now();
  fit(big, cfg);
  const double full = seconds_since(start);

  // Doubling ratios measured where each complexity term dominates: pair
  // count with small n, data dimension with few classes.
  TrainConfig step = cfg;
  const double c_lo = median_step_seconds(random_ensemble(rng, 8, 40), step, rng);
  const double c_hi = median_step_seconds(random_ensemble(rng, 8, 80), step, rng);
  const double n_lo = median_step_seconds(random_ensemble(rng, 150, 2), step, rng);
  const double n_hi = median_step_seconds(random_ensemble(rng, 300, 2), step, rng);
  const double rc = c_hi / c_lo;
  const double rn = n_hi / n_lo;
  const bool pass = full < 60.0 && rc >= 2.5 && rc <= 6.0 && rn >= 2.5 && rn <= 6.0;
  return {pass, fmt("fit n=200 c=20 m=8: %.1fs (<60s) doubling c: x%.2f doubling n: x%.2f "
                    "(band [2.5,6])",
                    full, rc, rn)};
}

}  // namespace

int main() {
  std::printf("sqfa acceptance suite\n");
  report(1, "gradient oracle", gradient_oracle);
  report(2, "congruence invariance", congruence_invariance);
  report(3, "bound correctness", bound_correctness);
  report(4, "LDA pairwise identity", lda_theorem);
  report(5, "Hellinger identities", hellinger_identities);
  report(6, "Bayes-error oracle", bayes_oracle);
  report(7, "toy6d subspaces", toy6d_reproduction);
  report(8, "toy4d subspaces", toy4d_reproduction);
  report(9, "discriminability ordering", discriminability_ordering);
  report(10, "optimizer contract", optimizer_contract);
  report(11, "sequential pairs", sequential_pairs);
  report(12, "AMA-Gauss benchmark", ama_gauss_benchmark);
  report(13, "resampled/kNN robustness", appendix_f_robustness);
  report(14, "performance envelope", performance_envelope);
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
