#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace greenlab::cli {

// CSV table built row by row; numbers use 17 significant digits so the text
// is a pure function of the values.
class Table {
 public:
  Table() = default;
  Table(std::string name, std::vector<std::string> columns);

  void add(const std::vector<double>& row);
  const std::string& name() const { return name_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::string& csv() const { return csv_; }
  std::size_t rows() const { return rows_; }

  nlohmann::json to_json() const;
  static Table from_json(const nlohmann::json& j);

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::string csv_;
  std::size_t rows_ = 0;
};

std::string format_number(double v);

struct Plot {
  std::string name;
  std::string svg;
};

// Log-log scatter of (x, y) with the fitted line y = e^b x^a drawn and its
// slope annotated. Nonpositive points are skipped.
Plot loglog_plot(const std::string& name, const std::string& title, const std::string& xlabel,
                 const std::string& ylabel, const std::vector<double>& x, const std::vector<double>& y,
                 double slope, double intercept);

struct RunReport {
  std::string command;
  std::string digest;
  bool cache_hit = false;
  std::string status = "ok";  // ok | diverged
  std::string error;
  std::vector<std::pair<std::string, double>> timings;  // seconds per operation
  nlohmann::json diagnostics = nlohmann::json::object();
  nlohmann::json provenance = nlohmann::json::object();
  std::vector<Table> tables;
  std::vector<Plot> plots;

  nlohmann::json to_json() const;
  static RunReport from_json(const nlohmann::json& j);
};

// Writes <command>.json, <command>_<table>.csv and <command>_<plot>.svg into
// `dir`; throws IoError on failure.
void write_outputs(const RunReport& report, const std::string& dir);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace greenlab::cli
