#include "cache.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace greenlab::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string config_digest(const ExperimentConfig& c) { return sha256_hex("greenlab-report-v1\n" + canonical_text(c)); }

std::string cache_directory(const ExperimentConfig& c) {
  if (const char* env = std::getenv("GREENLAB_CACHE_DIR"); env && *env) return env;
  return (fs::path(c.output) / "cache").string();
}

ResultCache::ResultCache(std::string dir, std::ostream& warnings) : dir_(std::move(dir)), warn_(warnings) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) disable("cannot create cache directory " + dir_);
}

std::string ResultCache::entry_path(const std::string& digest) const {
  return (fs::path(dir_) / (digest + ".json")).string();
}

void ResultCache::disable(const std::string& why) {
  if (enabled_) warn_ << "warning: " << why << "; running without cache\n";
  enabled_ = false;
}

std::optional<RunReport> ResultCache::lookup(const std::string& digest) {
  if (!enabled_) return std::nullopt;
  const std::string path = entry_path(digest);
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    disable("cannot read cache entry " + path);
    return std::nullopt;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const nlohmann::json entry = nlohmann::json::parse(ss.str());
    const nlohmann::json& body = entry.at("report");
    if (entry.at("digest").get<std::string>() == digest && body.at("digest").get<std::string>() == digest &&
        entry.at("checksum").get<std::string>() == sha256_hex(body.dump()))
      return RunReport::from_json(body);
  } catch (const std::exception&) {
  }
  warn_ << "warning: evicting corrupted cache entry " << path << "\n";
  fs::remove(path, ec);
  return std::nullopt;
}

void ResultCache::store(const RunReport& report) {
  if (!enabled_) return;
  nlohmann::json body = report.to_json();
  body["cache_hit"] = false;
  body["timings"] = nlohmann::json::object();
  const nlohmann::json entry = {{"digest", report.digest}, {"checksum", sha256_hex(body.dump())}, {"report", body}};
  const fs::path final_path = entry_path(report.digest);
  const fs::path tmp = fs::path(dir_) / ("." + report.digest + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary);
    out << entry.dump();
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      disable("cannot write cache entry " + tmp.string());
      return;
    }
  }
  std::error_code ec;
  fs::rename(tmp, final_path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    disable("cannot publish cache entry " + final_path.string());
  }
}

}  // namespace greenlab::cli
