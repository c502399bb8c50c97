#include "rpclass/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rpclass/error.hpp"
#include "rpclass/lda_sketch.hpp"

namespace rpclass {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kTestSplitStream = 0x7e57;
constexpr std::uint64_t kRepetitionStream = 1;
constexpr std::uint64_t kMethodStream = 2;
constexpr std::uint64_t kPoolStream = 0x9001;

struct MethodName {
  Method method;
  const char* id;
};

constexpr MethodName kMethodNames[] = {
    {Method::LDA, "LDA"},       {Method::QDA, "QDA"},       {Method::LDA_1, "LDA_1"},
    {Method::LDA_1000, "LDA_1000"}, {Method::RP_LDA, "RP_LDA"}, {Method::RP_QDA, "RP_QDA"},
    {Method::RP_KNN, "RP_KNN"}, {Method::SKETCH_LDA, "SKETCH_LDA"}, {Method::CONSTANT, "CONSTANT"},
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

MethodSpec method_from_json(const json& j) {
  MethodSpec m;
  if (j.is_string()) {
    m.method = parse_method(j.get<std::string>());
    m.name = std::string(to_string(m.method));
    return m;
  }
  m.method = parse_method(j.at("method").get<std::string>());
  m.name = j.value("name", std::string(to_string(m.method)));
  if (j.contains("d")) m.d = j.at("d").get<Eigen::Index>();
  if (j.contains("b1")) m.b1 = j.at("b1").get<int>();
  if (j.contains("b2")) m.b2 = j.at("b2").get<int>();
  if (j.contains("b")) m.b = j.at("b").get<int>();
  if (j.contains("k")) m.k = j.at("k").get<int>();
  if (j.contains("family")) m.family = parse_family(j.at("family").get<std::string>());
  if (j.contains("alpha") && j.at("alpha").is_number()) m.alpha = j.at("alpha").get<double>();
  if (j.contains("estimator")) m.estimator = parse_estimator(j.at("estimator").get<std::string>());
  m.constant_label = j.value("label", 0);
  return m;
}

json method_to_json(const MethodSpec& m) {
  json j = {{"method", std::string(to_string(m.method))}, {"name", m.name}};
  if (m.d) j["d"] = *m.d;
  if (m.b1) j["b1"] = *m.b1;
  if (m.b2) j["b2"] = *m.b2;
  if (m.b) j["b"] = *m.b;
  if (m.k) j["k"] = *m.k;
  if (m.family) j["family"] = std::string(to_string(*m.family));
  if (m.alpha) j["alpha"] = *m.alpha;
  if (m.estimator) j["estimator"] = std::string(to_string(*m.estimator));
  if (m.method == Method::CONSTANT) j["label"] = m.constant_label;
  return j;
}

RpEnsembleConfig rp_config(const MethodSpec& spec, BaseKind kind, RngSeed seed) {
  RpEnsembleConfig c;
  c.d = spec.d.value_or(5);
  c.b1 = spec.b1.value_or(500);
  c.b2 = spec.b2.value_or(50);
  c.base.kind = kind;
  c.base.knn_k = spec.k.value_or(5);
  c.estimator = spec.estimator;
  c.family = spec.family.value_or(ProjectionFamily::Gaussian);
  c.alpha = spec.alpha;
  c.seed = seed;
  return c;
}

std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool, std::size_t count, RngSeed seed) {
  Engine rng = make_engine(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

struct Split {
  std::vector<std::size_t> test_rows;
  std::vector<std::size_t> pool;
};

// The test set is drawn once from the master seed and stays fixed across
// repetitions; training samples come from the remaining pool.
Split make_split(const ExperimentConfig& config, const LabeledDataset& data) {
  if (config.n_train < 1 || config.n_test < 1) throw Error(ErrorCode::ConfigError, "n_train and n_test must be >= 1");
  if (config.n_train + config.n_test > data.size()) {
    throw Error(ErrorCode::ConfigError, "n_train + n_test = " + std::to_string(config.n_train + config.n_test) +
                                            " exceeds the " + std::to_string(data.size()) + " available observations");
  }
  const auto n = static_cast<std::size_t>(data.size());
  const auto n_test = static_cast<std::size_t>(config.n_test);
  std::vector<std::size_t> shuffled(n);
  std::iota(shuffled.begin(), shuffled.end(), std::size_t{0});
  Engine rng = make_engine(derive(config.master_seed, {kTestSplitStream}));
  for (std::size_t i = 0; i < n_test; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(shuffled[i], shuffled[pick(rng)]);
  }
  Split split;
  split.test_rows.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.pool.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_test), shuffled.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());
  std::sort(split.pool.begin(), split.pool.end());
  return split;
}

RngSeed repetition_seed(const ExperimentConfig& config, int r) {
  return derive(config.master_seed, {kRepetitionStream, static_cast<std::uint64_t>(r)});
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& m : kMethodNames)
    if (m.method == method) return m.id;
  return "LDA";
}

Method parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const auto& m : kMethodNames)
    if (upper == m.id) return m.method;
  throw Error(ErrorCode::ConfigError, "unknown method '" + std::string(name) + "'");
}

ExperimentConfig config_from_json(const json& j, const fs::path& base_dir) {
  try {
    ExperimentConfig c;
    c.schema_version = j.value("schema_version", kConfigSchemaVersion);
    if (c.schema_version != kConfigSchemaVersion) {
      throw Error(ErrorCode::ConfigError, "unsupported schema_version " + std::to_string(c.schema_version));
    }
    c.master_seed.value = j.value("master_seed", std::uint64_t{0});
    c.n_train = j.value("n_train", c.n_train);
    c.n_test = j.value("n_test", c.n_test);
    c.repetitions = j.value("repetitions", c.repetitions);
    c.record_timings = j.value("record_timings", c.record_timings);
    c.threads = j.value("threads", c.threads);
    for (const json& m : j.at("roster")) c.roster.push_back(method_from_json(m));

    const json& data = j.at("data");
    const std::string source = data.value("source", std::string("synthetic"));
    if (source == "synthetic") {
      c.data.kind = SourceKind::Synthetic;
      c.data.synthetic = synthetic_from_json(data.value("synthetic", json::object()));
      c.data.pool_size = data.value("pool_size", Eigen::Index{0});
    } else if (source == "csv") {
      c.data.kind = SourceKind::Csv;
      c.data.path = data.at("path").get<std::string>();
      if (c.data.path.is_relative() && !base_dir.empty()) c.data.path = base_dir / c.data.path;
      c.data.csv.label_column = data.value("label_column", -1);
      c.data.csv.header = data.value("header", false);
      const std::string delim = data.value("delimiter", std::string(","));
      if (delim.size() != 1) throw Error(ErrorCode::ConfigError, "delimiter must be a single character");
      c.data.csv.delimiter = delim[0];
      c.data.csv.drop_non_numeric = data.value("drop_non_numeric", false);
      if (data.contains("label_map")) {
        std::map<double, Label> map;
        for (const auto& [key, value] : data.at("label_map").items()) map[std::stod(key)] = value.get<Label>();
        c.data.csv.label_map = std::move(map);
      }
    } else if (source == "epilepsy") {
      c.data.kind = SourceKind::Epilepsy;
      c.data.fetch.url = data.value("url", std::string(kEpilepsyUrl));
      if (data.contains("cache_dir")) c.data.fetch.cache_dir = data.at("cache_dir").get<std::string>();
      if (data.contains("sha256")) c.data.fetch.expected_sha256 = data.at("sha256").get<std::string>();
    } else {
      throw Error(ErrorCode::ConfigError, "unknown data source '" + source + "'");
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ConfigError, "label_map keys must be numeric");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json roster = json::array();
  for (const auto& m : c.roster) roster.push_back(method_to_json(m));
  json data;
  switch (c.data.kind) {
    case SourceKind::Synthetic:
      data = {{"source", "synthetic"}, {"synthetic", to_json(c.data.synthetic)}, {"pool_size", c.data.pool_size}};
      break;
    case SourceKind::Csv: {
      data = {{"source", "csv"},
              {"path", c.data.path.string()},
              {"label_column", c.data.csv.label_column},
              {"header", c.data.csv.header},
              {"delimiter", std::string(1, c.data.csv.delimiter)},
              {"drop_non_numeric", c.data.csv.drop_non_numeric}};
      if (c.data.csv.label_map) {
        json map = json::object();
        for (const auto& [k, v] : *c.data.csv.label_map) map[format_double(k)] = v;
        data["label_map"] = map;
      }
      break;
    }
    case SourceKind::Epilepsy:
      data = {{"source", "epilepsy"}, {"url", c.data.fetch.url}};
      if (c.data.fetch.expected_sha256) data["sha256"] = *c.data.fetch.expected_sha256;
      break;
  }
  return {{"schema_version", c.schema_version},
          {"master_seed", c.master_seed.value},
          {"n_train", c.n_train},
          {"n_test", c.n_test},
          {"repetitions", c.repetitions},
          {"record_timings", c.record_timings},
          {"threads", c.threads},
          {"roster", roster},
          {"data", data}};
}

LabeledDataset load_source(const ExperimentConfig& config, json* notes) {
  json n = json::object();
  LabeledDataset data;
  switch (config.data.kind) {
    case SourceKind::Synthetic: {
      const Eigen::Index pool =
          config.data.pool_size > 0 ? config.data.pool_size : config.n_test + 10 * config.n_train;
      data = generate_synthetic(config.data.synthetic, pool, derive(config.master_seed, {kPoolStream}));
      const GaussianPopulation pop = config.data.synthetic.population();
      n["pool_size"] = pool;
      n["delta"] = pop.delta();
      n["bayes_risk"] = bayes_lda_risk(pop);
      break;
    }
    case SourceKind::Csv: {
      CsvInfo info;
      data = load_csv(config.data.path, config.data.csv, &info);
      n["file_columns"] = info.columns;
      n["dropped_columns"] = info.dropped_columns;
      break;
    }
    case SourceKind::Epilepsy: {
      const DatasetFile file = fetch_dataset(config.data.fetch);
      CsvInfo info;
      data = load_csv(file.path, epilepsy_csv_options(), &info);
      n["sha256"] = file.sha256;
      n["file_columns"] = info.columns;
      n["dropped_columns"] = info.dropped_columns;
      break;
    }
  }
  n["rows"] = data.size();
  n["feature_count"] = data.dim();
  n["class_counts"] = {data.count(0), data.count(1)};
  if (notes) *notes = std::move(n);
  return data;
}

RpEnsembleConfig ensemble_config(const MethodSpec& spec, RngSeed seed) {
  switch (spec.method) {
    case Method::RP_LDA: return rp_config(spec, BaseKind::LDA, seed);
    case Method::RP_QDA: return rp_config(spec, BaseKind::QDA, seed);
    case Method::RP_KNN: return rp_config(spec, BaseKind::KNN, seed);
    default: throw Error(ErrorCode::ConfigError, std::string(to_string(spec.method)) + " is not an RP ensemble method");
  }
}

AnyModel train_method(const MethodSpec& spec, const LabeledDataset& train, RngSeed seed) {
  const Eigen::Index sketch_d = spec.d.value_or(default_sketch_dim(train.size(), train.dim()));
  const ProjectionFamily family = spec.family.value_or(ProjectionFamily::Gaussian);
  switch (spec.method) {
    case Method::LDA: return FittedBase(lda_rule(fit_gaussian_model(train, true)));
    case Method::QDA: return FittedBase(qda_rule(fit_gaussian_model(train, false)));
    case Method::LDA_1: return fit_lda_ensemble(train, sketch_d, spec.b.value_or(1), family, seed);
    case Method::LDA_1000: return fit_lda_ensemble(train, sketch_d, spec.b.value_or(1000), family, seed);
    case Method::SKETCH_LDA: return fit_sketched_lda(train, sketch_d, family, seed);
    case Method::RP_LDA: return train_rp_ensemble(train, rp_config(spec, BaseKind::LDA, seed));
    case Method::RP_QDA: return train_rp_ensemble(train, rp_config(spec, BaseKind::QDA, seed));
    case Method::RP_KNN: return train_rp_ensemble(train, rp_config(spec, BaseKind::KNN, seed));
    case Method::CONSTANT: {
      // A zero-direction linear rule: discriminant is the constant offset.
      LdaRule rule;
      rule.log_prior_ratio = spec.constant_label == 1 ? 0.0 : -1.0;
      rule.midpoint = Eigen::VectorXd::Zero(train.dim());
      rule.direction = Eigen::VectorXd::Zero(train.dim());
      return FittedBase(rule);
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown method");
}

double evaluate_method(const MethodSpec& spec, const LabeledDataset& train, const LabeledDataset& test, RngSeed seed) {
  const AnyModel model = train_method(spec, train, seed);
  if (const auto* rp = std::get_if<RpEnsembleModel>(&model)) return test_error(*rp, test);
  return test_error([&](const Eigen::Ref<const Eigen::VectorXd>& x) { return predict(model, x); }, test);
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  json notes;
  const LabeledDataset data = load_source(config, &notes);
  return run_experiment(config, data, std::move(notes));
}

ExperimentReport run_experiment(const ExperimentConfig& config, const LabeledDataset& data, json notes) {
  if (config.repetitions < 1) throw Error(ErrorCode::ConfigError, "repetitions must be >= 1");
  if (config.roster.empty()) throw Error(ErrorCode::ConfigError, "roster is empty");

  const Split split = make_split(config, data);
  const LabeledDataset test = data.subset(split.test_rows);

  ExperimentReport report;
  report.config = to_json(config);
  report.master_seed = config.master_seed.value;
  report.feature_count = data.dim();
  report.data_notes = std::move(notes);
  for (int r = 0; r < config.repetitions; ++r) {
    report.repetition_seeds.push_back(repetition_seed(config, r).value);
  }

  const int methods = static_cast<int>(config.roster.size());
  const int tasks = config.repetitions * methods;
  report.rows.resize(static_cast<std::size_t>(tasks));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(tasks));

#ifdef _OPENMP
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#else
  const int threads = 1;
#endif
  (void)threads;

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int t = 0; t < tasks; ++t) {
    const int r = t / methods;
    const int m = t % methods;
    ReportRow& row = report.rows[static_cast<std::size_t>(t)];
    row.repetition = r;
    row.method = config.roster[static_cast<std::size_t>(m)].label();
    try {
      const RngSeed rep_seed{report.repetition_seeds[static_cast<std::size_t>(r)]};
      const LabeledDataset train =
          data.subset(sample_without_replacement(split.pool, static_cast<std::size_t>(config.n_train), rep_seed));
      const auto start = std::chrono::steady_clock::now();
      try {
        row.error = evaluate_method(config.roster[static_cast<std::size_t>(m)], train, test,
                                    derive(rep_seed, {kMethodStream, static_cast<std::uint64_t>(m)}));
      } catch (const Error& e) {
        if (!is_fit_failure(e.code())) throw;
        row.intractable = true;
        row.reason = std::string(to_string(e.code()));
      }
      if (config.record_timings) {
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    } catch (...) {
      failures[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return report;
}

TrainTest draw_train_test(const ExperimentConfig& config, const LabeledDataset& data, int repetition) {
  const Split split = make_split(config, data);
  const auto rows = sample_without_replacement(split.pool, static_cast<std::size_t>(config.n_train),
                                               repetition_seed(config, repetition));
  return {data.subset(rows), data.subset(split.test_rows), rows, split.test_rows};
}

std::vector<MethodSummary> summarize(const ExperimentReport& report) {
  std::vector<MethodSummary> out;
  std::vector<std::vector<double>> errors;
  for (const ReportRow& row : report.rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const MethodSummary& s) { return s.method == row.method; });
    if (it == out.end()) {
      out.push_back({row.method});
      errors.emplace_back();
      it = out.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - out.begin());
    if (row.intractable) {
      ++it->intractable;
    } else {
      ++it->tractable;
      errors[idx].push_back(*row.error);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_error = mean_of(errors[i]);
    out[i].sd_error = sd_of(errors[i]);
  }
  return out;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw Error(ErrorCode::ConfigError, "unknown report format '" + std::string(name) + "'");
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "repetition,method,error,intractable,seconds\n";
  for (const ReportRow& row : report.rows) {
    char seconds[32];
    std::snprintf(seconds, sizeof seconds, "%.6f", row.seconds);
    out << row.repetition << ',' << row.method << ',' << (row.error ? format_double(*row.error) : "") << ','
        << (row.intractable ? 1 : 0) << ',' << seconds << '\n';
  }
  return out.str();
}

json to_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const ReportRow& row : report.rows) {
    rows.push_back({{"repetition", row.repetition},
                    {"method", row.method},
                    {"error", row.error ? json(*row.error) : json(nullptr)},
                    {"intractable", row.intractable},
                    {"reason", row.reason},
                    {"seconds", row.seconds}});
  }
  return {{"schema_version", kConfigSchemaVersion},
          {"config", report.config},
          {"master_seed", report.master_seed},
          {"repetition_seeds", report.repetition_seeds},
          {"feature_count", report.feature_count},
          {"data_notes", report.data_notes},
          {"rows", rows}};
}

ExperimentReport report_from_json(const json& j) {
  try {
    ExperimentReport r;
    r.config = j.at("config");
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.repetition_seeds = j.at("repetition_seeds").get<std::vector<std::uint64_t>>();
    r.feature_count = j.at("feature_count").get<Eigen::Index>();
    r.data_notes = j.at("data_notes");
    for (const json& row : j.at("rows")) {
      ReportRow out;
      out.repetition = row.at("repetition").get<int>();
      out.method = row.at("method").get<std::string>();
      if (!row.at("error").is_null()) out.error = row.at("error").get<double>();
      out.intractable = row.at("intractable").get<bool>();
      out.reason = row.value("reason", std::string());
      out.seconds = row.at("seconds").get<double>();
      r.rows.push_back(std::move(out));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
  }
}

void emit_report(const ExperimentReport& report, ReportFormat format, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  if (format == ReportFormat::Csv)
    out << report_csv(report);
  else
    out << to_json(report).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<SweepRow> run_b1_sweep(const LabeledDataset& train, const LabeledDataset& test,
                                   const RpEnsembleConfig& base, const std::vector<int>& grid, int ensembles) {
  if (ensembles < 1) throw Error(ErrorCode::ConfigError, "ensemble count must be >= 1");
  std::vector<SweepRow> rows;
  for (int b1 : grid) {
    SweepRow row;
    row.b1 = b1;
    for (int e = 0; e < ensembles; ++e) {
      RpEnsembleConfig config = base;
      config.b1 = b1;
      config.seed = derive(base.seed, {static_cast<std::uint64_t>(b1), static_cast<std::uint64_t>(e)});
      row.errors.push_back(test_error(train_rp_ensemble(train, config), test));
    }
    row.mean_error = mean_of(row.errors);
    row.sd_error = sd_of(row.errors);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "B1,mean_error,sd_error\n";
  for (const SweepRow& r : rows) out << r.b1 << ',' << format_double(r.mean_error) << ',' << format_double(r.sd_error) << '\n';
  return out.str();
}

}  // namespace rpclass
