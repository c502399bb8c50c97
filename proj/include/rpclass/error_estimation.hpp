#pragma once

#include <string_view>

#include "rpclass/base_classifiers.hpp"

namespace rpclass {

enum class EstimatorKind { TrainingError, LeaveOneOut };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);

// TrainingError for LDA/QDA, LeaveOneOut for kNN.
EstimatorKind default_estimator(BaseKind kind);

struct ErrorEstimate {
  double value = 0.0;
  EstimatorKind estimator = EstimatorKind::TrainingError;
  long n_evaluated = 0;
  long mistakes = 0;
};

ErrorEstimate training_error(const BaseClassifierSpec& spec, const LabeledDataset& data);
ErrorEstimate leave_one_out_error(const BaseClassifierSpec& spec, const LabeledDataset& data);
ErrorEstimate estimate_error(EstimatorKind kind, const BaseClassifierSpec& spec,
                             const LabeledDataset& data);

}  // namespace rpclass
