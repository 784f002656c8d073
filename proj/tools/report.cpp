#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace greenlab::cli {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table::Table(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
  for (std::size_t i = 0; i < columns_.size(); ++i) csv_ += (i ? "," : "") + columns_[i];
  csv_ += "\n";
}

void Table::add(const std::vector<double>& row) {
  if (row.size() != columns_.size()) throw std::logic_error("Table::add: row width mismatch in " + name_);
  for (std::size_t i = 0; i < row.size(); ++i) csv_ += (i ? "," : "") + format_number(row[i]);
  csv_ += "\n";
  ++rows_;
}

nlohmann::json Table::to_json() const {
  return {{"name", name_}, {"columns", columns_}, {"rows", rows_}, {"csv", csv_}};
}

Table Table::from_json(const nlohmann::json& j) {
  Table t;
  t.name_ = j.at("name").get<std::string>();
  t.columns_ = j.at("columns").get<std::vector<std::string>>();
  t.rows_ = j.at("rows").get<std::size_t>();
  t.csv_ = j.at("csv").get<std::string>();
  return t;
}

Plot loglog_plot(const std::string& name, const std::string& title, const std::string& xlabel,
                 const std::string& ylabel, const std::vector<double>& x, const std::vector<double>& y,
                 double slope, double intercept) {
  constexpr double W = 480, H = 360, L = 70, R = 20, T = 40, B = 50;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    if (x[i] > 0 && y[i] > 0 && std::isfinite(x[i]) && std::isfinite(y[i]))
      pts.emplace_back(std::log10(x[i]), std::log10(y[i]));
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -x0;
    for (auto [a, b] : pts) {
      x0 = std::min(x0, a), x1 = std::max(x1, a);
      y0 = std::min(y0, b), y1 = std::max(y1, b);
    }
    if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  }
  auto px = [&](double a) { return L + (a - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double b) { return H - B - (b - y0) / (y1 - y0) * (H - T - B); };
  char buf[256];
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"360\" font-family=\"sans-serif\" "
                  "font-size=\"12\">\n<rect width=\"480\" height=\"360\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  s += buf;
  s += "<text x=\"240\" y=\"24\" text-anchor=\"middle\">" + title + "</text>\n";
  s += "<text x=\"240\" y=\"350\" text-anchor=\"middle\">log10 " + xlabel + "</text>\n";
  s += "<text x=\"16\" y=\"180\" text-anchor=\"middle\" transform=\"rotate(-90 16 180)\">log10 " + ylabel +
       "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\">%.3g</text><text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.3g</text>\n"
                "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.3g</text><text x=\"%g\" y=\"%g\" "
                "text-anchor=\"end\">%.3g</text>\n",
                L, H - B + 16, x0, W - R, H - B + 16, x1, L - 4, H - B, y0, L - 4, T + 10, y1);
  s += buf;
  for (auto [a, b] : pts) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"steelblue\"/>\n", px(a), py(b));
    s += buf;
  }
  if (std::isfinite(slope) && std::isfinite(intercept) && !pts.empty()) {
    // Fit is in natural logs: ln y = intercept + slope ln x.
    auto fit = [&](double a) { return (intercept + slope * a * std::log(10.0)) / std::log(10.0); };
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"firebrick\"/>\n"
                  "<text x=\"%g\" y=\"%g\" fill=\"firebrick\">slope %.4f</text>\n",
                  px(x0), py(fit(x0)), px(x1), py(fit(x1)), W - R - 110, T + 18, slope);
    s += buf;
  }
  s += "</svg>\n";
  return {name, s};
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["digest"] = digest;
  j["cache_hit"] = cache_hit;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  nlohmann::json t = nlohmann::json::object();
  for (const auto& [k, v] : timings) t[k] = v;
  j["timings"] = t;
  j["diagnostics"] = diagnostics;
  j["provenance"] = provenance;
  j["tables"] = nlohmann::json::array();
  for (const Table& tab : tables) j["tables"].push_back(tab.to_json());
  j["plots"] = nlohmann::json::array();
  for (const Plot& p : plots) j["plots"].push_back({{"name", p.name}, {"svg", p.svg}});
  return j;
}

RunReport RunReport::from_json(const nlohmann::json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.digest = j.at("digest").get<std::string>();
  r.cache_hit = j.at("cache_hit").get<bool>();
  r.status = j.at("status").get<std::string>();
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  for (const auto& [k, v] : j.at("timings").items()) r.timings.emplace_back(k, v.get<double>());
  r.diagnostics = j.at("diagnostics");
  r.provenance = j.at("provenance");
  for (const auto& t : j.at("tables")) r.tables.push_back(Table::from_json(t));
  for (const auto& p : j.at("plots")) r.plots.push_back({p.at("name").get<std::string>(), p.at("svg").get<std::string>()});
  return r;
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

void write_outputs(const RunReport& report, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  nlohmann::json j = report.to_json();
  // The JSON names the files instead of repeating their contents.
  for (auto& t : j["tables"]) {
    t["file"] = report.command + "_" + t["name"].get<std::string>() + ".csv";
    t.erase("csv");
  }
  for (auto& p : j["plots"]) {
    p["file"] = report.command + "_" + p["name"].get<std::string>() + ".svg";
    p.erase("svg");
  }
  for (const Table& t : report.tables) write_file(fs::path(dir) / (report.command + "_" + t.name() + ".csv"), t.csv());
  for (const Plot& p : report.plots) write_file(fs::path(dir) / (report.command + "_" + p.name + ".svg"), p.svg);
  write_file(fs::path(dir) / (report.command + ".json"), j.dump(2) + "\n");
}

}  // namespace greenlab::cli
