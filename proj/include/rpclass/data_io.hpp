#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpclass/dataset.hpp"

namespace rpclass {

struct CsvOptions {
  // Zero-based; negative counts from the last column (-1 is the last).
  int label_column = -1;
  bool header = false;
  char delimiter = ',';
  // Raw numeric label -> class. Unset means labels must already be 0/1.
  std::optional<std::map<double, Label>> label_map;
  // Drop feature columns whose first data cell is not numeric (e.g. row ids).
  bool drop_non_numeric = false;
  // False for feature-only files; labels are then filled with 0.
  bool has_labels = true;
};

struct CsvInfo {
  std::vector<std::string> feature_names;  // empty without a header
  std::vector<std::size_t> dropped_columns;
  std::size_t rows = 0;
  std::size_t columns = 0;  // in the file, before dropping
};

// Rows are kept in file order. Throws ParseError (naming row and column),
// LabelError for unmapped labels, NonFinite for NaN/Inf features.
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options, CsvInfo* info = nullptr);

// Writes features then label as the last column, full double precision.
void write_csv(const LabeledDataset& data, const std::filesystem::path& path, bool header = true);

// Four "no seizure" classes (2..5) collapse to 0, seizure (1) to 1.
std::map<double, Label> epilepsy_label_map();

}  // namespace rpclass
