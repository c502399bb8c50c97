#include "rpclass/dataset.hpp"

#include <algorithm>
#include <string>

#include "rpclass/error.hpp"

namespace rpclass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDims: return "InvalidDims";
    case ErrorCode::InvalidSparsity: return "InvalidSparsity";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::SingularSketch: return "SingularSketch";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::FoldDegenerate: return "FoldDegenerate";
    case ErrorCode::DegenerateSeparation: return "DegenerateSeparation";
    case ErrorCode::UntrainableEnsemble: return "UntrainableEnsemble";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelError: return "LabelError";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

LabeledDataset::LabeledDataset(Eigen::MatrixXd x, std::vector<Label> y)
    : features(std::move(x)), labels(std::move(y)) {
  if (features.rows() < 1) throw Error(ErrorCode::InsufficientData, "dataset has no rows");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw Error(ErrorCode::DimMismatch, "feature rows " + std::to_string(features.rows()) +
                                            " != label count " + std::to_string(labels.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorCode::LabelError, "label at row " + std::to_string(i) + " is not 0/1");
    }
  }
  if (!features.allFinite()) throw Error(ErrorCode::NonFinite, "feature matrix has NaN/Inf");
}

std::size_t LabeledDataset::count(Label r) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), r));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dim());
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels[i] = labels[rows[i]];
  }
  return out;
}

LabeledDataset LabeledDataset::without(std::size_t row) const {
  std::vector<std::size_t> keep;
  keep.reserve(labels.size() - 1);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (i != row) keep.push_back(i);
  return subset(keep);
}

void require_dim(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index dim) {
  if (x.size() != dim) {
    throw Error(ErrorCode::DimMismatch,
                "expected dimension " + std::to_string(dim) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace rpclass
