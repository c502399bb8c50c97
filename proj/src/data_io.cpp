#include "rpclass/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "rpclass/error.hpp"

namespace rpclass {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    // from_chars rejects "inf"/"nan" spellings in some forms; treat them as numbers so NonFinite fires.
    if (s == "nan" || s == "NaN" || s == "NA") return std::nan("");
    if (s == "inf" || s == "Inf") return HUGE_VAL;
    if (s == "-inf" || s == "-Inf") return -HUGE_VAL;
    return std::nullopt;
  }
  return v;
}

std::string where(std::size_t line_no, std::size_t col) {
  return "line " + std::to_string(line_no) + ", column " + std::to_string(col);
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options, CsvInfo* info) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header_names;
  if (options.header) {
    if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + ": missing header");
    ++line_no;
    for (auto f : split(line, options.delimiter)) header_names.emplace_back(f);
  }

  std::size_t columns = header_names.size();
  std::size_t label_col = 0;
  std::vector<bool> keep;
  std::vector<double> values;
  std::vector<Label> labels;
  std::size_t features = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, options.delimiter);
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      throw Error(ErrorCode::ParseError, path.string() + ": line " + std::to_string(line_no) + " has " +
                                             std::to_string(fields.size()) + " fields, expected " +
                                             std::to_string(columns));
    }
    if (keep.empty()) {
      const int lc = options.label_column < 0 ? static_cast<int>(columns) + options.label_column : options.label_column;
      if (options.has_labels && (lc < 0 || static_cast<std::size_t>(lc) >= columns)) {
        throw Error(ErrorCode::ParseError, "label column " + std::to_string(options.label_column) + " out of range");
      }
      label_col = options.has_labels ? static_cast<std::size_t>(lc) : columns;
      keep.assign(columns, true);
      if (options.has_labels) keep[label_col] = false;
      for (std::size_t c = 0; c < columns; ++c) {
        if (c != label_col && options.drop_non_numeric && !parse_number(fields[c])) {
          keep[c] = false;
          if (info) info->dropped_columns.push_back(c);
        }
      }
      for (std::size_t c = 0; c < columns; ++c) features += keep[c];
      if (features == 0) throw Error(ErrorCode::ParseError, path.string() + ": no feature columns");
    }

    for (std::size_t c = 0; c < columns; ++c) {
      if (!keep[c]) continue;
      const auto v = parse_number(fields[c]);
      if (!v) throw Error(ErrorCode::ParseError, path.string() + ": non-numeric value at " + where(line_no, c));
      if (!std::isfinite(*v)) throw Error(ErrorCode::NonFinite, path.string() + ": non-finite value at " + where(line_no, c));
      values.push_back(*v);
    }

    if (!options.has_labels) {
      labels.push_back(0);
      continue;
    }
    const auto raw = parse_number(fields[label_col]);
    if (!raw) throw Error(ErrorCode::LabelError, path.string() + ": non-numeric label at " + where(line_no, label_col));
    Label y = -1;
    if (options.label_map) {
      const auto it = options.label_map->find(*raw);
      if (it == options.label_map->end()) {
        throw Error(ErrorCode::LabelError, path.string() + ": unmapped label '" + std::string(fields[label_col]) +
                                               "' at " + where(line_no, label_col));
      }
      y = it->second;
    } else if (*raw == 0.0 || *raw == 1.0) {
      y = static_cast<Label>(*raw);
    }
    if (y != 0 && y != 1) {
      throw Error(ErrorCode::LabelError, path.string() + ": label '" + std::string(fields[label_col]) +
                                             "' is not 0/1 at " + where(line_no, label_col));
    }
    labels.push_back(y);
  }
  if (labels.empty()) throw Error(ErrorCode::ParseError, path.string() + ": no data rows");

  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(features));
  if (info) {
    info->rows = labels.size();
    info->columns = columns;
    info->feature_names.clear();
    if (!header_names.empty())
      for (std::size_t c = 0; c < columns; ++c)
        if (keep[c]) info->feature_names.push_back(header_names[c]);
  }
  return LabeledDataset(std::move(x), std::move(labels));
}

void write_csv(const LabeledDataset& data, const std::filesystem::path& path, bool header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.precision(17);
  if (header) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << 'x' << j + 1 << ',';
    out << "y\n";
  }
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << data.features(i, j) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::map<double, Label> epilepsy_label_map() { return {{1.0, 1}, {2.0, 0}, {3.0, 0}, {4.0, 0}, {5.0, 0}}; }

}  // namespace rpclass
