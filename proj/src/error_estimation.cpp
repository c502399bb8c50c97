#include "rpclass/error_estimation.hpp"

#include <string>

#include "rpclass/error.hpp"

namespace rpclass {

std::string_view to_string(EstimatorKind kind) {
  return kind == EstimatorKind::TrainingError ? "training" : "loo";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "training" || name == "training_error") return EstimatorKind::TrainingError;
  if (name == "loo" || name == "leave_one_out") return EstimatorKind::LeaveOneOut;
  throw Error(ErrorCode::InvalidArgument, "unknown error estimator '" + std::string(name) + "'");
}

EstimatorKind default_estimator(BaseKind kind) {
  return kind == BaseKind::KNN ? EstimatorKind::LeaveOneOut : EstimatorKind::TrainingError;
}

namespace {

ErrorEstimate make_estimate(EstimatorKind kind, long mistakes, long n) {
  return ErrorEstimate{static_cast<double>(mistakes) / static_cast<double>(n), kind, n, mistakes};
}

}  // namespace

ErrorEstimate training_error(const BaseClassifierSpec& spec, const LabeledDataset& data) {
  const FittedBase model = fit_base(spec, data);
  long mistakes = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    mistakes += predict(model, data.features.row(i).transpose()) != data.labels[static_cast<std::size_t>(i)];
  }
  return make_estimate(EstimatorKind::TrainingError, mistakes, data.size());
}

ErrorEstimate leave_one_out_error(const BaseClassifierSpec& spec, const LabeledDataset& data) {
  const Eigen::Index n = data.size();
  if (n < 2) throw Error(ErrorCode::InsufficientData, "leave-one-out needs n >= 2");
  long mistakes = 0;

  if (spec.kind == BaseKind::KNN) {
    if (spec.knn_k < 1 || spec.knn_k > n - 1) {
      throw Error(ErrorCode::InvalidK, "k=" + std::to_string(spec.knn_k) + " with " + std::to_string(n - 1) +
                                           " points per fold");
    }
    const KnnRule rule{data, spec.knn_k};
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = static_cast<std::size_t>(i);
      mistakes += rule.predict_held_out(row) != data.labels[row];
    }
    return make_estimate(EstimatorKind::LeaveOneOut, mistakes, n);
  }

  const std::size_t n1 = data.count(1);
  const std::size_t n0 = static_cast<std::size_t>(n) - n1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    const Label y = data.labels[row];
    if ((y == 0 ? n0 : n1) == 1) {
      throw Error(ErrorCode::FoldDegenerate, "removing row " + std::to_string(i) + " empties class " +
                                                 std::to_string(y));
    }
    const FittedBase model = fit_base(spec, data.without(row));
    mistakes += predict(model, data.features.row(i).transpose()) != y;
  }
  return make_estimate(EstimatorKind::LeaveOneOut, mistakes, n);
}

ErrorEstimate estimate_error(EstimatorKind kind, const BaseClassifierSpec& spec, const LabeledDataset& data) {
  return kind == EstimatorKind::TrainingError ? training_error(spec, data) : leave_one_out_error(spec, data);
}

}  // namespace rpclass
