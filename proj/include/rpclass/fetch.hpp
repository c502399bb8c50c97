#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "rpclass/data_io.hpp"

namespace rpclass {

inline constexpr const char* kEpilepsyUrl =
    "https://archive.ics.uci.edu/ml/machine-learning-databases/00388/data.csv";
inline constexpr const char* kCacheDirEnv = "RPCLASS_CACHE_DIR";

struct FetchOptions {
  std::string url = kEpilepsyUrl;
  // Empty: $RPCLASS_CACHE_DIR, else ./.rpclass-cache.
  std::filesystem::path cache_dir;
  std::string file_name = "epileptic_seizure_recognition.csv";
  // Hex SHA-256 the download must match. When unset, the digest recorded
  // next to the cached file on first fetch is used for later checks.
  std::optional<std::string> expected_sha256;
  std::chrono::seconds timeout{60};
};

struct DatasetFile {
  std::filesystem::path path;
  std::string sha256;
  bool from_cache = false;
};

std::filesystem::path resolve_cache_dir(const std::filesystem::path& configured);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// A cache hit performs no network access. Throws NetworkError or ChecksumMismatch.
DatasetFile fetch_dataset(const FetchOptions& options);
inline DatasetFile fetch_epilepsy_dataset(const FetchOptions& options = {}) { return fetch_dataset(options); }

// Loader settings for the UCI table: header row, non-numeric id column
// dropped, last column is the label, classes 2..5 collapsed to 0.
CsvOptions epilepsy_csv_options();

}  // namespace rpclass
