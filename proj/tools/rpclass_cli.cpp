// rpclass command-line front end.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error (bad flags,
// unreadable or invalid config).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rpclass/error.hpp"
#include "rpclass/experiment.hpp"
#include "rpclass/fetch.hpp"
#include "rpclass/model_io.hpp"
#include "rpclass/projections.hpp"

namespace {

using namespace rpclass;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<Eigen::Index> d;
  std::optional<int> b1;
  std::optional<int> b2;
  std::optional<int> k;
  std::optional<std::string> family;
  std::optional<double> alpha;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--d", d, "Projected dimension");
    cmd->add_option("--b1", b1, "Number of projection groups");
    cmd->add_option("--b2", b2, "Candidate projections per group");
    cmd->add_option("--k", k, "Neighbours for kNN");
    cmd->add_option("--family", family, "Projection family: gaussian, haar, axis, sparse");
    cmd->add_option("--alpha", alpha, "Fixed voting threshold in [0,1]");
  }

  void apply(MethodSpec& m) const {
    if (d) m.d = *d;
    if (b1) m.b1 = *b1;
    if (b2) m.b2 = *b2;
    if (k) m.k = *k;
    if (family) m.family = parse_family(*family);
    if (alpha) m.alpha = *alpha;
  }
};

struct CsvFlags {
  int label_column = -1;
  bool header = false;
  std::string delimiter = ",";
  std::string label_map;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--label-column", label_column, "Label column, negative counts from the end")->capture_default_str();
    cmd->add_flag("--header", header, "First line is a header");
    cmd->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    cmd->add_option("--label-map", label_map, "Raw label mapping, e.g. 1=1,2=0,3=0");
  }

  CsvOptions options() const {
    if (delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
    CsvOptions o;
    o.label_column = label_column;
    o.header = header;
    o.delimiter = delimiter[0];
    if (!label_map.empty()) o.label_map = parse_label_map(label_map);
    return o;
  }

  static std::map<double, Label> parse_label_map(const std::string& text) {
    std::map<double, Label> map;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("bad --label-map entry '" + item + "'");
      try {
        const int to = std::stoi(item.substr(eq + 1));
        if (to != 0 && to != 1) throw UsageError("--label-map targets must be 0 or 1");
        map[std::stod(item.substr(0, eq))] = static_cast<Label>(to);
      } catch (const std::logic_error&) {
        throw UsageError("bad --label-map entry '" + item + "'");
      }
    }
    return map;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

// Config problems are usage errors: the invocation named something unusable.
ExperimentConfig load_config_or_usage(const std::string& path) {
  if (!std::filesystem::exists(path)) throw UsageError("config file not found: " + path);
  try {
    return load_config(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError) throw UsageError(e.what());
    throw;
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct BenchArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string format = "csv";
  std::optional<int> threads;
  std::optional<int> repetitions;
  bool no_timings = false;
  bool quiet = false;
  Overrides overrides;
};

int cmd_bench(const BenchArgs& a) {
  ExperimentConfig config = load_config_or_usage(a.config);
  const ReportFormat format = parse_report_format(a.format);
  if (a.seed) config.master_seed = RngSeed{*a.seed};
  if (a.threads) config.threads = *a.threads;
  if (a.repetitions) config.repetitions = *a.repetitions;
  if (a.no_timings) config.record_timings = false;
  for (MethodSpec& m : config.roster) a.overrides.apply(m);

  const ExperimentReport report = run_experiment(config);
  if (a.out == "-") {
    write_text("-", format == ReportFormat::Csv ? report_csv(report) : to_json(report).dump(2) + "\n");
  } else {
    emit_report(report, format, a.out);
  }
  if (!a.quiet) {
    std::cerr << "features " << report.feature_count << "\n";
    for (const MethodSummary& s : summarize(report)) {
      const bool any = s.tractable > 0;
      std::cerr << s.method << ": mean " << (any ? fmt(s.mean_error) : "n/a") << " sd "
                << (any ? fmt(s.sd_error) : "n/a") << " tractable " << s.tractable << " intractable " << s.intractable
                << "\n";
    }
  }
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string method = "RP_LDA";
  std::string out;
  std::uint64_t seed = 0;
  std::optional<int> b;
  std::optional<std::string> estimator;
  CsvFlags csv;
  Overrides overrides;
};

int cmd_train(const TrainArgs& a) {
  const CsvOptions options = a.csv.options();
  MethodSpec spec;
  spec.method = parse_method(a.method);
  spec.name = a.method;
  spec.b = a.b;
  if (a.estimator) spec.estimator = parse_estimator(*a.estimator);
  a.overrides.apply(spec);
  const LabeledDataset data = load_csv(a.data, options);
  const AnyModel model = train_method(spec, data, RngSeed{a.seed});
  save_model(model, a.out);
  std::cerr << "trained " << a.method << " on " << data.size() << " rows, " << data.dim() << " features\n";
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string data;
  std::string out = "-";
  bool no_labels = false;
  CsvFlags csv;
};

int cmd_predict(const PredictArgs& a) {
  CsvOptions options = a.csv.options();
  options.has_labels = !a.no_labels;
  const AnyModel model = load_model(a.model);
  const LabeledDataset data = load_csv(a.data, options);
  require_dim(data.features.row(0).transpose(), input_dim(model));

  std::ostringstream out;
  out << "prediction\n";
  Eigen::Index mistakes = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Label y = predict(model, data.features.row(i).transpose());
    out << int(y) << '\n';
    mistakes += y != data.labels[static_cast<std::size_t>(i)];
  }
  write_text(a.out, out.str());
  if (!a.no_labels) {
    std::cerr << "error " << fmt(static_cast<double>(mistakes) / static_cast<double>(data.size())) << " ("
              << mistakes << "/" << data.size() << ")\n";
  }
  return 0;
}

struct JlArgs {
  long n = 0;
  double eps = 0.0;
  double delta = 0.0;
  std::optional<Eigen::Index> p;
  std::optional<Eigen::Index> d;
  std::string family = "gaussian";
  std::uint64_t seed = 0;
};

int cmd_jl_check(const JlArgs& a) {
  const JlParams params{a.eps, a.delta, a.n};
  const long bound = jl_dimension_bound(params);
  std::cout << "bound " << bound << "\n";
  if (!a.p) return 0;

  const Eigen::Index p = *a.p;
  const Eigen::Index d = a.d.value_or(bound);
  if (d > p) {
    std::cout << "distortion skipped: d " << d << " exceeds p " << p << "\n";
    return 0;
  }
  Engine rng = make_engine(derive(RngSeed{a.seed}, {0}));
  std::normal_distribution<double> normal;
  Eigen::MatrixXd points(a.n, p);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = 0; j < p; ++j) points(i, j) = normal(rng);
  const Projection proj = sample_projection(parse_family(a.family), d, p, derive(RngSeed{a.seed}, {1}));
  const DistortionReport r = check_distortion(proj, points);
  const bool within = r.min_ratio > 1.0 - a.eps && r.max_ratio < 1.0 + a.eps;
  // With N(0, 1/p) entries the squared ratios concentrate at d/p, not 1.
  const double scale = static_cast<double>(p) / static_cast<double>(d);
  std::cout << "d " << d << " p " << p << " family " << a.family << " pairs " << r.pairs << "\n";
  std::cout << "min_ratio " << r.min_ratio << " max_ratio " << r.max_ratio << "\n";
  std::cout << "within (1-eps, 1+eps): " << (within ? "yes" : "no") << "\n";
  std::cout << "scaled by p/d: min_ratio " << r.min_ratio * scale << " max_ratio " << r.max_ratio * scale << "\n";
  return 0;
}

struct FetchArgs {
  std::string url = kEpilepsyUrl;
  std::string cache_dir;
  std::string file_name;
  std::optional<std::string> sha256;
  int timeout = 60;
  bool raw = false;
};

int cmd_fetch(const FetchArgs& a) {
  FetchOptions options;
  options.url = a.url;
  options.cache_dir = a.cache_dir;
  if (!a.file_name.empty()) options.file_name = a.file_name;
  options.expected_sha256 = a.sha256;
  options.timeout = std::chrono::seconds(a.timeout);
  const DatasetFile file = fetch_dataset(options);
  std::cout << "path " << file.path.string() << "\n";
  std::cout << "sha256 " << file.sha256 << "\n";
  std::cout << "source " << (file.from_cache ? "cache" : "network") << "\n";
  if (a.raw) return 0;

  CsvInfo info;
  const LabeledDataset data = load_csv(file.path, epilepsy_csv_options(), &info);
  std::cout << "rows " << data.size() << "\n";
  std::cout << "features " << data.dim() << "\n";
  std::cout << "dropped_columns " << info.dropped_columns.size() << "\n";
  std::cout << "class0 " << data.count(0) << " class1 " << data.count(1) << "\n";
  return 0;
}

struct SweepArgs {
  std::string config;
  std::vector<int> grid{10, 40, 160};
  int ensembles = 20;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string method;
  int repetition = 0;
  Overrides overrides;
};

int cmd_b1_sweep(const SweepArgs& a) {
  ExperimentConfig config = load_config_or_usage(a.config);
  if (a.seed) config.master_seed = RngSeed{*a.seed};
  const MethodSpec* chosen = nullptr;
  for (const MethodSpec& m : config.roster) {
    const bool rp = m.method == Method::RP_LDA || m.method == Method::RP_QDA || m.method == Method::RP_KNN;
    if (rp && (a.method.empty() || m.label() == a.method)) {
      chosen = &m;
      break;
    }
  }
  if (!chosen) throw UsageError("config roster has no matching RP_* method");
  MethodSpec spec = *chosen;
  a.overrides.apply(spec);

  nlohmann::json notes;
  const LabeledDataset data = load_source(config, &notes);
  const TrainTest split = draw_train_test(config, data, a.repetition);
  const RpEnsembleConfig base = ensemble_config(spec, derive(config.master_seed, {3}));
  const auto rows = run_b1_sweep(split.train, split.test, base, a.grid, a.ensembles);
  write_text(a.out, sweep_csv(rows));
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Random-projection ensemble classification toolkit"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Run a benchmark experiment from a JSON config");
  c_bench->add_option("--config", bench.config, "Experiment config (JSON)")->required();
  c_bench->add_option("--seed", bench.seed, "Master seed, overrides the config");
  c_bench->add_option("--out", bench.out, "Report path, - for stdout")->capture_default_str();
  c_bench->add_option("--format", bench.format, "csv or json")->capture_default_str();
  c_bench->add_option("--threads", bench.threads, "Worker threads (0: default)");
  c_bench->add_option("--repetitions", bench.repetitions, "Override the repetition count");
  c_bench->add_flag("--no-timings", bench.no_timings, "Write 0 for timings so reports are byte-stable");
  c_bench->add_flag("--quiet", bench.quiet, "No summary on stderr");
  bench.overrides.add_to(c_bench);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Fit a classifier to a CSV file and save it");
  c_train->add_option("--data", train.data, "Training CSV")->required();
  c_train->add_option("--method", train.method, "Method id")->capture_default_str();
  c_train->add_option("--out", train.out, "Model output (JSON)")->required();
  c_train->add_option("--seed", train.seed, "Seed")->capture_default_str();
  c_train->add_option("--b", train.b, "LDA ensemble size");
  c_train->add_option("--estimator", train.estimator, "training or loo");
  train.csv.add_to(c_train);
  train.overrides.add_to(c_train);

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "Apply a saved model to a CSV file");
  c_pred->add_option("--model", pred.model, "Model file")->required();
  c_pred->add_option("--data", pred.data, "Input CSV")->required();
  c_pred->add_option("--out", pred.out, "Predictions path, - for stdout")->capture_default_str();
  c_pred->add_flag("--no-labels", pred.no_labels, "Input has no label column");
  pred.csv.add_to(c_pred);

  JlArgs jl;
  auto* c_jl = app.add_subcommand("jl-check", "Johnson-Lindenstrauss bound and empirical distortion");
  c_jl->add_option("--n", jl.n, "Number of points")->required();
  c_jl->add_option("--eps", jl.eps, "Distortion epsilon")->required();
  c_jl->add_option("--delta", jl.delta, "Failure probability")->required();
  c_jl->add_option("--p", jl.p, "Ambient dimension; enables the distortion check");
  c_jl->add_option("--d", jl.d, "Projected dimension (default: the bound)");
  c_jl->add_option("--family", jl.family, "Projection family")->capture_default_str();
  c_jl->add_option("--seed", jl.seed, "Seed")->capture_default_str();

  FetchArgs fetch;
  auto* c_fetch = app.add_subcommand("fetch-data", "Download and cache the epileptic seizure dataset");
  c_fetch->add_option("--url", fetch.url, "Source URL")->capture_default_str();
  c_fetch->add_option("--cache-dir", fetch.cache_dir, std::string("Cache directory (default $") + kCacheDirEnv +
                                                          " or .rpclass-cache)");
  c_fetch->add_option("--file-name", fetch.file_name, "Cached file name");
  c_fetch->add_option("--sha256", fetch.sha256, "Expected SHA-256 (hex)");
  c_fetch->add_option("--timeout", fetch.timeout, "Network timeout in seconds")->capture_default_str();
  c_fetch->add_flag("--raw", fetch.raw, "Skip parsing the downloaded table");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("b1-sweep", "Test error mean and sd across ensembles for a grid of B1");
  c_sweep->add_option("--config", sweep.config, "Experiment config (JSON)")->required();
  c_sweep->add_option("--grid", sweep.grid, "B1 values")->delimiter(',')->capture_default_str();
  c_sweep->add_option("--ensembles", sweep.ensembles, "Ensembles per B1")->capture_default_str();
  c_sweep->add_option("--seed", sweep.seed, "Master seed, overrides the config");
  c_sweep->add_option("--out", sweep.out, "CSV path, - for stdout")->capture_default_str();
  c_sweep->add_option("--method", sweep.method, "Roster entry name (default: first RP_* entry)");
  c_sweep->add_option("--repetition", sweep.repetition, "Which repetition's training sample to use")
      ->capture_default_str();
  sweep.overrides.add_to(c_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c_bench) return cmd_bench(bench);
    if (*c_train) return cmd_train(train);
    if (*c_pred) return cmd_predict(pred);
    if (*c_jl) return cmd_jl_check(jl);
    if (*c_fetch) return cmd_fetch(fetch);
    if (*c_sweep) return cmd_b1_sweep(sweep);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
