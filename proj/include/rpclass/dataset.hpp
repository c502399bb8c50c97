#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace rpclass {

using Label = int;

// n observations stored as the rows of `features`; labels are 0 or 1.
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<Label> labels;

  LabeledDataset() = default;
  // Validates shape, label range and finiteness; throws Error on violation.
  LabeledDataset(Eigen::MatrixXd x, std::vector<Label> y);

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  std::size_t count(Label r) const;

  LabeledDataset subset(std::span<const std::size_t> rows) const;
  LabeledDataset without(std::size_t row) const;
};

// Throws DimMismatch unless x has `dim` entries.
void require_dim(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index dim);

}  // namespace rpclass
