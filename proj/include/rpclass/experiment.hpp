#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rpclass/data_io.hpp"
#include "rpclass/fetch.hpp"
#include "rpclass/model_io.hpp"
#include "rpclass/rp_ensemble.hpp"
#include "rpclass/synthetic.hpp"

namespace rpclass {

inline constexpr int kConfigSchemaVersion = 1;

enum class Method { LDA, QDA, LDA_1, LDA_1000, RP_LDA, RP_QDA, RP_KNN, SKETCH_LDA, CONSTANT };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

// One roster entry. Unset hyperparameters take the method's defaults:
// RP_*: d=5, B1=500, B2=50, Gaussian, data-driven alpha, k=5;
// LDA_1/LDA_1000/SKETCH_LDA: d = floor(min(n-2, p)/2), Gaussian, B = 1/1000/1.
struct MethodSpec {
  Method method = Method::LDA;
  std::string name;  // report label; defaults to the method id
  std::optional<Eigen::Index> d;
  std::optional<int> b1;
  std::optional<int> b2;
  std::optional<int> b;  // LDA ensemble size
  std::optional<int> k;
  std::optional<ProjectionFamily> family;
  std::optional<double> alpha;
  std::optional<EstimatorKind> estimator;
  Label constant_label = 0;

  const std::string& label() const { return name; }
};

enum class SourceKind { Csv, Synthetic, Epilepsy };

struct DataSource {
  SourceKind kind = SourceKind::Synthetic;
  std::filesystem::path path;
  CsvOptions csv;
  SyntheticSpec synthetic;
  // Synthetic pool size; 0 means n_test + 10 * n_train.
  Eigen::Index pool_size = 0;
  FetchOptions fetch;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::vector<MethodSpec> roster;
  Eigen::Index n_train = 100;
  Eigen::Index n_test = 1000;
  int repetitions = 100;
  RngSeed master_seed;
  DataSource data;
  bool record_timings = true;
  int threads = 0;  // 0: OpenMP default
};

ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

struct ReportRow {
  int repetition = 0;
  std::string method;
  std::optional<double> error;  // unset when intractable
  bool intractable = false;
  std::string reason;  // error code of an intractable fit
  double seconds = 0.0;
};

struct ExperimentReport {
  nlohmann::json config;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> repetition_seeds;
  Eigen::Index feature_count = 0;
  nlohmann::json data_notes;
  std::vector<ReportRow> rows;
};

struct MethodSummary {
  std::string method;
  int tractable = 0;
  int intractable = 0;
  double mean_error = 0.0;
  double sd_error = 0.0;
};

// Resolves the configured source into one dataset; notes describe ingest decisions.
LabeledDataset load_source(const ExperimentConfig& config, nlohmann::json* notes = nullptr);

// Fits `spec` on train and returns its test error. Fit failures propagate as Error.
double evaluate_method(const MethodSpec& spec, const LabeledDataset& train, const LabeledDataset& test,
                       RngSeed seed);
// Ensemble settings of an RP_* roster entry; ConfigError for other methods.
RpEnsembleConfig ensemble_config(const MethodSpec& spec, RngSeed seed);
// Trains the method and returns it in serializable form.
AnyModel train_method(const MethodSpec& spec, const LabeledDataset& train, RngSeed seed);

ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config, const LabeledDataset& data,
                                nlohmann::json notes = nlohmann::json::object());

struct TrainTest {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// The split run_experiment uses for `repetition`: the fixed test set plus that
// repetition's training sample, disjoint from it and drawn without replacement.
TrainTest draw_train_test(const ExperimentConfig& config, const LabeledDataset& data, int repetition);

std::vector<MethodSummary> summarize(const ExperimentReport& report);

enum class ReportFormat { Json, Csv };
ReportFormat parse_report_format(std::string_view name);

void emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& path);
std::string report_csv(const ExperimentReport& report);
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

struct SweepRow {
  int b1 = 0;
  double mean_error = 0.0;
  double sd_error = 0.0;
  std::vector<double> errors;
};

// Trains `ensembles` independent RP ensembles per B1 on a fixed training set
// and reports the spread of their test errors.
std::vector<SweepRow> run_b1_sweep(const LabeledDataset& train, const LabeledDataset& test,
                                   const RpEnsembleConfig& base, const std::vector<int>& grid, int ensembles);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace rpclass
