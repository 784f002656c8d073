#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace greenlab::cli {

std::string sha256_hex(const std::string& data);

// SHA-256 of the canonical config text.
std::string config_digest(const ExperimentConfig& c);

// $GREENLAB_CACHE_DIR when set, otherwise <output>/cache.
std::string cache_directory(const ExperimentConfig& c);

// Content-addressed store of run reports, one JSON file per digest. Entries
// carry a checksum of their payload; entries that fail to parse or verify are
// deleted on lookup. IO failures print a warning and disable the cache for the
// rest of the run.
class ResultCache {
 public:
  ResultCache(std::string dir, std::ostream& warnings);

  std::optional<RunReport> lookup(const std::string& digest);
  void store(const RunReport& report);
  bool enabled() const { return enabled_; }
  std::string entry_path(const std::string& digest) const;

 private:
  void disable(const std::string& why);
  std::string dir_;
  std::ostream& warn_;
  bool enabled_ = true;
};

}  // namespace greenlab::cli
