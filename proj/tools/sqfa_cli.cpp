// sqfa: command-line front end for toy data, filter learning, evaluation and
// sweeps. Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqfa/baselines.hpp"
#include "sqfa/error.hpp"
#include "sqfa/evaluation.hpp"
#include "sqfa/io.hpp"
#include "sqfa/toy_data.hpp"
#include "sqfa/trainer.hpp"
#include "sqfa/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace sqfa;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kMethods = {"sqfa", "smsqfa", "sqfa-b", "sqfa-h",
                                           "pca",  "lda",    "ama"};
const std::vector<std::string> kMetrics = {"fisher_rao_calvo_oller", "fisher_rao_zero_mean",
                                           "bhattacharyya", "hellinger", "mahalanobis_sq"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

// Validator with an error message that lists every valid choice.
CLI::Validator one_of(const std::vector<std::string>& valid) {
  return CLI::Validator(
      [valid](std::string& value) -> std::string {
        if (std::find(valid.begin(), valid.end(), value) != valid.end()) return {};
        return "'" + value + "' is not one of: " + join(valid);
      },
      "{" + join(valid) + "}");
}

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json flags = json::object();
  json seeds = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void write_manifest(const Manifest& m, double wall_seconds) {
  json doc = {{"command", m.command},
              {"argv", m.argv},
              {"flags", m.flags},
              {"seeds", m.seeds},
              {"inputs", m.inputs},
              {"outputs", m.outputs},
              {"tool_version", kVersion},
              {"wall_seconds", wall_seconds}};
  for (const std::string& out : m.outputs) {
    write_text_file_atomic(out + ".manifest.json", doc.dump(1) + "\n");
  }
}

DistanceKind method_kind(const std::string& method) {
  if (method == "sqfa") return DistanceKind::FisherRaoCalvoOller;
  if (method == "smsqfa") return DistanceKind::FisherRaoZeroMean;
  if (method == "sqfa-b") return DistanceKind::Bhattacharyya;
  if (method == "sqfa-h") return DistanceKind::Hellinger;
  // Baselines run through the trainer only for restart bookkeeping (ama).
  return DistanceKind::FisherRaoZeroMean;
}

std::string train_log_jsonl(const TrainLog& log) {
  std::string out;
  for (const IterationRecord& r : log.iterations) {
    out += json{{"type", "iteration"}, {"stage", r.stage},         {"restart", r.restart},
                {"iteration", r.iteration}, {"objective", r.objective}, {"grad_norm", r.grad_norm},
                {"step", r.step}}
               .dump() +
           "\n";
  }
  for (const RestartRecord& r : log.restarts) {
    out += json{{"type", "restart"},      {"stage", r.stage},
                {"restart", r.restart},   {"seed", r.seed},
                {"objective", r.objective}, {"converged", r.converged},
                {"iterations", r.iterations}, {"status", r.status}}
               .dump() +
           "\n";
  }
  out += json{{"type", "summary"},
              {"stage_objectives", log.stage_objectives},
              {"converged", log.converged},
              {"iterations_used", log.iterations_used}}
             .dump() +
         "\n";
  return out;
}

std::string report_json(const EvalReport& r) {
  json doc = {{"classifier", r.classifier},
              {"accuracy", r.accuracy},
              {"confusion", r.confusion},
              {"n_test", r.n_test},
              {"seed", r.seed}};
  return doc.dump(1) + "\n";
}

json subspaces_json(const ToyData& toy) {
  json out = json::array();
  for (const auto& s : toy.subspaces) out.push_back({{"role", s.role}, {"dims", s.dims}});
  return out;
}

json matrix_rows(const Matrix& a) {
  json rows = json::array();
  for (Index r = 0; r < a.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(a.cols()));
    for (Index c = 0; c < a.cols(); ++c) row[static_cast<std::size_t>(c)] = a(r, c);
    rows.push_back(row);
  }
  return rows;
}

std::string truth_json(const ToyData& toy, const ToySpec& spec) {
  json classes = json::array();
  for (std::size_t i = 0; i < toy.means.size(); ++i) {
    std::vector<double> mean(toy.means[i].data(), toy.means[i].data() + toy.means[i].size());
    classes.push_back({{"label", i}, {"mean", mean}, {"covariance", matrix_rows(toy.covariances[i])}});
  }
  json doc = {{"name", spec.name},
              {"samples_per_class", spec.samples_per_class},
              {"seed", spec.seed},
              {"subspaces", subspaces_json(toy)},
              {"classes", classes}};
  return doc.dump(1) + "\n";
}

// Loads class statistics from a stats JSON or computes them from a dataset CSV.
ClassEnsemble load_ensemble(const std::string& path) {
  if (fs::path(path).extension() == ".json") return load_stats(path);
  return estimate_class_statistics(load_dataset(path));
}

struct Options {
  // toygen
  std::string name;
  Index samples = 500;
  int classes = 8;
  Index dim = 30;
  // shared
  std::uint64_t seed = 0;
  std::string out;
  std::string data;
  // fit
  std::string stats;
  std::string method = "sqfa";
  Index m = 2;
  double sigma2 = 0.0;
  int restarts = 20;
  bool pairs = false;
  std::string log;
  int max_iters = 500;
  double tol = 1e-6;
  double shrinkage = kDefaultLdaShrinkage;
  // eval
  std::string train;
  std::string filters;
  std::string classifier = "qda";
  std::optional<double> ridge;
  bool resample = false;
  int k = 3;
  // distances / sweep
  std::string metric = "fisher_rao_calvo_oller";
  Index mc_samples = 100000;
};

int cmd_toygen(const Options& o, Manifest& man) {
  const ToySpec spec{o.name, o.samples, o.seed, o.classes, o.dim};
  const ToyData toy = generate(spec);
  const std::string truth = o.out + ".truth.json";
  save_dataset(toy.dataset, o.out);
  write_text_file_atomic(truth, truth_json(toy, spec));
  man.flags = {{"name", o.name}, {"samples", o.samples}, {"classes", o.classes}, {"dim", o.dim}};
  man.seeds = {{"seed", o.seed}};
  man.outputs = {o.out, truth};
  return 0;
}

int cmd_stats(const Options& o, Manifest& man) {
  save_stats(estimate_class_statistics(load_dataset(o.data)), o.out);
  man.inputs = {o.data};
  man.outputs = {o.out};
  return 0;
}

int cmd_fit(const Options& o, Manifest& man) {
  if (o.data.empty() == o.stats.empty()) throw UsageError("fit needs exactly one of --data or --stats");
  if (o.method == "ama" && o.data.empty()) throw UsageError("ama needs --data (samples)");
  const std::string input = o.data.empty() ? o.stats : o.data;
  const ClassEnsemble ens = load_ensemble(input);
  if (o.method == "lda" && (o.m < 1 || o.m > ens.num_classes() - 1)) {
    throw UsageError("lda supports 1 <= m <= c - 1 = " + std::to_string(ens.num_classes() - 1) +
                     ", got m=" + std::to_string(o.m));
  }
  if (o.m < 1 || o.m > ens.dim()) {
    throw UsageError("m must lie in [1, n=" + std::to_string(ens.dim()) + "]");
  }

  TrainConfig cfg;
  cfg.kind = method_kind(o.method);
  cfg.sigma2 = o.sigma2;
  cfg.m = o.m;
  cfg.seed = o.seed;
  cfg.restarts = o.restarts;
  cfg.sequential_pairs = o.pairs;
  cfg.max_iters = o.max_iters;
  cfg.tol = o.tol;

  std::optional<FilterBank> filters;
  std::optional<TrainLog> log;
  if (o.method == "pca") {
    filters = pca(ens, o.m);
  } else if (o.method == "lda") {
    filters = lda(ens, o.m, o.shrinkage).filters;
  } else if (o.method == "ama") {
    auto [model, train_log] = ama_gauss_fit(load_dataset(o.data), cfg);
    filters = std::move(model.filters);
    log = std::move(train_log);
  } else {
    auto [f, train_log] = fit(ens, cfg);
    filters = std::move(f);
    log = std::move(train_log);
  }

  save_filters({*filters, o.sigma2, o.method}, o.out);
  man.outputs = {o.out};
  if (!o.log.empty()) {
    write_text_file_atomic(o.log, log ? train_log_jsonl(*log) : json{{"type", "summary"}}.dump() + "\n");
    man.outputs.push_back(o.log);
  }
  man.flags = {{"method", o.method}, {"m", o.m},       {"sigma2", o.sigma2},
               {"restarts", o.restarts}, {"pairs", o.pairs}, {"max_iters", o.max_iters},
               {"tol", o.tol},         {"shrinkage", o.shrinkage}};
  man.seeds = {{"seed", o.seed}};
  man.inputs = {input};
  return 0;
}

int cmd_eval(const Options& o, Manifest& man) {
  const LabeledDataset test = load_dataset(o.data);
  const std::string train_path = o.train.empty() ? o.data : o.train;
  const LabeledDataset train = o.train.empty() ? test : load_dataset(o.train);
  const FilterFile ff = load_filters(o.filters);
  const double ridge = o.ridge.value_or(ff.sigma2);
  const ClassifierKind kind = o.classifier == "qda" ? ClassifierKind::Qda : ClassifierKind::Knn;

  EvalReport report;
  if (o.resample) {
    report = gaussian_resample_eval(train, test, ff.filters, kind, o.seed, ridge, o.k);
  } else if (kind == ClassifierKind::Qda) {
    report = qda_evaluate(qda_fit(train, ff.filters, ridge), test, ff.filters);
  } else {
    report = knn_predict(train, test, ff.filters, o.k);
  }
  report.seed = o.seed;
  write_text_file_atomic(o.out, report_json(report));
  man.flags = {{"classifier", o.classifier}, {"ridge", ridge}, {"gaussian_resample", o.resample},
               {"k", o.k}};
  man.seeds = {{"seed", o.seed}};
  man.inputs = {o.data, train_path, o.filters};
  man.outputs = {o.out};
  return 0;
}

int cmd_distances(const Options& o, Manifest& man) {
  const ClassEnsemble ens = load_ensemble(o.stats);
  const DistanceKind kind = parse_distance_kind(o.metric);
  const Matrix f = o.filters.empty() ? Matrix(Matrix::Identity(ens.dim(), ens.dim()))
                                     : load_filters(o.filters).filters.matrix();
  const FeatureStats fs = project_statistics(ens, f, o.sigma2);
  const auto params = fs.params(kind == DistanceKind::FisherRaoZeroMean);
  Table table{{"class_i", "class_j", o.metric}, {}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = i + 1; j < params.size(); ++j) {
      table.add_row({static_cast<double>(i), static_cast<double>(j),
                     distance(kind, params[i], params[j])});
    }
  }
  write_text_file_atomic(o.out, table.to_csv());
  man.flags = {{"metric", o.metric}, {"sigma2", o.sigma2}};
  man.inputs = {o.stats};
  if (!o.filters.empty()) man.inputs.push_back(o.filters);
  man.outputs = {o.out};
  return 0;
}

int cmd_sweep(const Options& o, Manifest& man) {
  Table table;
  if (o.name == "co_gap_dataset") {
    if (o.stats.empty()) throw UsageError("co_gap_dataset needs --stats");
    const ClassEnsemble ens = load_ensemble(o.stats);
    const Matrix f = o.filters.empty() ? Matrix(Matrix::Identity(ens.dim(), ens.dim()))
                                       : load_filters(o.filters).filters.matrix();
    table = co_gap_dataset(project_statistics(ens, f, o.sigma2).params());
    man.inputs = {o.stats};
  } else {
    table = sweep_grid(o.name, {o.seed, o.mc_samples});
  }
  write_text_file_atomic(o.out, table.to_csv());
  man.flags = {{"name", o.name}, {"mc_samples", o.mc_samples}, {"sigma2", o.sigma2}};
  man.seeds = {{"seed", o.seed}};
  man.outputs = {o.out};
  return 0;
}

int run(std::vector<std::string> args);

int replay(const std::string& path) {
  const json doc = json::parse(read_text_file(path));
  return run(doc.at("argv").get<std::vector<std::string>>());
}

int run(std::vector<std::string> args) {
  CLI::App app{"Supervised quadratic feature analysis toolkit", "sqfa"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);
  Options o;
  std::string manifest_path;
  app.add_option("--manifest", manifest_path, "Re-run the command recorded in a manifest")
      ->check(CLI::ExistingFile);

  auto* toygen = app.add_subcommand("toygen", "Generate a synthetic dataset");
  toygen->add_option("--name", o.name, "Dataset name")->required()->check(one_of(toy_names()));
  toygen->add_option("--samples", o.samples, "Samples per class")->check(CLI::Range(2, 100000000));
  toygen->add_option("--classes", o.classes, "Classes (covcode)")->check(CLI::Range(2, 10000));
  toygen->add_option("--dim", o.dim, "Dimension (covcode)")->check(CLI::Range(3, 100000));
  toygen->add_option("--seed", o.seed, "Random seed");
  toygen->add_option("--out", o.out, "Dataset CSV path")->required();

  auto* stats = app.add_subcommand("stats", "Estimate per-class statistics from a dataset");
  stats->add_option("--data", o.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", o.out, "Stats JSON path")->required();

  auto* fitc = app.add_subcommand("fit", "Learn filters");
  fitc->add_option("--data", o.data, "Dataset CSV")->check(CLI::ExistingFile);
  fitc->add_option("--stats", o.stats, "Precomputed stats JSON")->check(CLI::ExistingFile);
  fitc->add_option("--method", o.method, "Method")->check(one_of(kMethods));
  fitc->add_option("--m", o.m, "Number of filters");
  fitc->add_option("--sigma2", o.sigma2, "Feature noise variance")->check(CLI::NonNegativeNumber);
  fitc->add_option("--seed", o.seed, "Random seed");
  fitc->add_option("--restarts", o.restarts, "Random restarts")->check(CLI::PositiveNumber);
  fitc->add_flag("--pairs", o.pairs, "Learn filters two at a time");
  fitc->add_option("--max-iters", o.max_iters, "L-BFGS iteration cap")->check(CLI::PositiveNumber);
  fitc->add_option("--tol", o.tol, "Objective change tolerance")->check(CLI::PositiveNumber);
  fitc->add_option("--shrinkage", o.shrinkage, "LDA shrinkage")->check(CLI::Range(0.0, 1.0));
  fitc->add_option("--out", o.out, "Filter JSON path")->required();
  fitc->add_option("--log", o.log, "Training log (JSON lines)");

  auto* eval = app.add_subcommand("eval", "Evaluate filters with a classifier");
  eval->add_option("--data", o.data, "Test dataset CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--train", o.train, "Training dataset CSV (default: --data)")
      ->check(CLI::ExistingFile);
  eval->add_option("--filters", o.filters, "Filter JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--classifier", o.classifier, "Classifier")->check(one_of({"qda", "knn"}));
  eval->add_option("--ridge", o.ridge, "QDA ridge (default: the filters' sigma2)")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--k", o.k, "Neighbours for knn")->check(CLI::PositiveNumber);
  eval->add_option("--seed", o.seed, "Random seed (resampling)");
  eval->add_flag("--gaussian-resample", o.resample,
                 "Evaluate on Gaussian samples matched to the test statistics");
  eval->add_option("--out", o.out, "Metrics JSON path")->required();

  auto* dist = app.add_subcommand("distances", "Pairwise class distances");
  dist->add_option("--stats", o.stats, "Stats JSON or dataset CSV")->required()->check(CLI::ExistingFile);
  dist->add_option("--metric", o.metric, "Distance")->check(one_of(kMetrics));
  dist->add_option("--filters", o.filters, "Project through these filters first")
      ->check(CLI::ExistingFile);
  dist->add_option("--sigma2", o.sigma2, "Ridge added after projection")->check(CLI::NonNegativeNumber);
  dist->add_option("--out", o.out, "CSV path")->required();

  auto* sweep = app.add_subcommand("sweep", "Validation sweeps");
  sweep->add_option("--name", o.name, "Sweep name")->required()->check(one_of(sweep_names()));
  sweep->add_option("--seed", o.seed, "Random seed");
  sweep->add_option("--mc-samples", o.mc_samples, "Monte-Carlo samples per class")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--stats", o.stats, "Stats for co_gap_dataset")->check(CLI::ExistingFile);
  sweep->add_option("--filters", o.filters, "Filters for co_gap_dataset")->check(CLI::ExistingFile);
  sweep->add_option("--sigma2", o.sigma2, "Ridge for co_gap_dataset")->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", o.out, "CSV path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (!manifest_path.empty()) {
    if (app.get_subcommands().size() != 0) {
      std::cerr << "error: --manifest cannot be combined with a subcommand\n";
      return kExitUsage;
    }
    try {
      return replay(manifest_path);
    } catch (const std::exception& e) {
      std::cerr << "error: cannot replay manifest: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Manifest man;
  man.command = sub->get_name();
  man.argv = args;
  const auto start = std::chrono::steady_clock::now();
  try {
    int code = 0;
    if (sub == toygen) code = cmd_toygen(o, man);
    if (sub == stats) code = cmd_stats(o, man);
    if (sub == fitc) code = cmd_fit(o, man);
    if (sub == eval) code = cmd_eval(o, man);
    if (sub == dist) code = cmd_distances(o, man);
    if (sub == sweep) code = cmd_sweep(o, man);
    write_manifest(man, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}
