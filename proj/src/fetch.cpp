#include "rpclass/fetch.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include "rpclass/error.hpp"

namespace rpclass {

namespace fs = std::filesystem;

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::NetworkError, "unsupported URL '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string trim_digest(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

}  // namespace

fs::path resolve_cache_dir(const fs::path& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
  return ".rpclass-cache";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 computation failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

DatasetFile fetch_dataset(const FetchOptions& options) {
  const fs::path dir = resolve_cache_dir(options.cache_dir);
  const fs::path file = dir / options.file_name;
  const fs::path digest_file = dir / (options.file_name + ".sha256");

  std::optional<std::string> expected = options.expected_sha256;
  if (!expected && fs::exists(digest_file)) expected = trim_digest(read_file(digest_file));

  if (fs::exists(file)) {
    const std::string actual = sha256_file(file);
    if (expected && actual != *expected) {
      throw Error(ErrorCode::ChecksumMismatch, file.string() + " has digest " + actual + ", expected " + *expected);
    }
    if (!fs::exists(digest_file)) write_file(digest_file, actual + "\n");
    return {file, actual, true};
  }

  const Url url = split_url(options.url);
  httplib::Client client(url.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  auto res = client.Get(url.path);
  if (!res) {
    throw Error(ErrorCode::NetworkError, "GET " + options.url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::NetworkError, "GET " + options.url + " returned HTTP " + std::to_string(res->status));
  }
  if (res->has_header("Content-Length")) {
    const auto declared = std::stoull(res->get_header_value("Content-Length"));
    if (declared != res->body.size()) {
      throw Error(ErrorCode::ChecksumMismatch, "download truncated: " + std::to_string(res->body.size()) + " of " +
                                                   std::to_string(declared) + " bytes");
    }
  }
  const std::string actual = sha256_hex(res->body);
  if (expected && actual != *expected) {
    throw Error(ErrorCode::ChecksumMismatch, "download has digest " + actual + ", expected " + *expected);
  }

  fs::create_directories(dir);
  write_file(file, res->body);
  write_file(digest_file, actual + "\n");
  return {file, actual, false};
}

CsvOptions epilepsy_csv_options() {
  CsvOptions o;
  o.header = true;
  o.label_column = -1;
  o.label_map = epilepsy_label_map();
  o.drop_non_numeric = true;
  return o;
}

}  // namespace rpclass
