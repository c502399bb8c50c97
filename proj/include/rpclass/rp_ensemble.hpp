#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "rpclass/base_classifiers.hpp"
#include "rpclass/error_estimation.hpp"
#include "rpclass/projections.hpp"
#include "rpclass/rng.hpp"

namespace rpclass {

struct RpEnsembleConfig {
  Eigen::Index d = 5;
  int b1 = 500;
  int b2 = 50;
  BaseClassifierSpec base;
  // Unset means the default pairing for the base classifier.
  std::optional<EstimatorKind> estimator;
  ProjectionFamily family = ProjectionFamily::Gaussian;
  std::optional<double> sparsity;
  // Fixed voting threshold; unset selects it from the training data.
  std::optional<double> alpha;
  RngSeed seed;
  // Retain every candidate's error estimate (memory B1 * B2).
  bool keep_candidates = false;

  EstimatorKind resolved_estimator() const {
    return estimator.value_or(default_estimator(base.kind));
  }
};

struct RpEnsembleModel {
  RpEnsembleConfig config;
  Eigen::Index ambient_dim = 0;
  std::vector<Projection> projections;
  std::vector<FittedBase> bases;
  std::vector<double> selected_errors;
  std::vector<int> selected_candidate;
  double alpha = 0.5;
  // candidate_errors[b1][b2], only with keep_candidates.
  std::vector<std::vector<double>> candidate_errors;

  int b1() const { return static_cast<int>(bases.size()); }
};

// Number of the B1 projected classifiers voting for class 1.
struct VoteFraction {
  int votes = 0;
  int total = 1;
  double nu() const { return static_cast<double>(votes) / total; }
};

// Stream of candidate (b1, b2); both indices are zero-based.
RngSeed candidate_seed(RngSeed master, int b1, int b2);

RpEnsembleModel train_rp_ensemble(const LabeledDataset& data, const RpEnsembleConfig& config);

VoteFraction vote_fraction(const RpEnsembleModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Label predict_rp_ensemble(const RpEnsembleModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

// Threshold minimizing the empirical error of 1{nu >= alpha} given vote
// counts at the training points.
double select_alpha(std::span<const VoteFraction> votes, std::span<const Label> labels);
// Evaluates votes of the fitted ensemble at every training point first.
double select_alpha(const RpEnsembleModel& model, const LabeledDataset& data);

using Classifier = std::function<Label(const Eigen::Ref<const Eigen::VectorXd>&)>;

double test_error(const Classifier& classify, const LabeledDataset& test);
double test_error(const RpEnsembleModel& model, const LabeledDataset& test);

}  // namespace rpclass
