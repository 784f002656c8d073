#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cache.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "report.hpp"

using namespace greenlab::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("greenlab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_config(text).validate();
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

}  // namespace

TEST_CASE("config text round-trips") {
  ExperimentConfig c;
  CHECK(parse_config(to_text(c)) == c);

  c.command = "density";
  c.tau = 0.1;
  c.delta = 1.0 / 3.0;
  c.quad.tol = 1e-300;
  c.radii = {2.0, 3.141592653589793, 1e5, 7.0};
  c.seed = 18446744073709551615ULL;
  c.cache = false;
  c.output = "some dir/out";
  const ExperimentConfig back = parse_config(to_text(c));
  CHECK(back == c);
  CHECK(back.delta == c.delta);
  CHECK(back.radii == c.radii);
  CHECK(to_text(back) == to_text(c));

  const auto docs = documented_keys();
  std::size_t lines = 0;
  for (const std::string& line : {to_text(ExperimentConfig{})})
    for (char ch : line) lines += ch == '=';
  CHECK(docs.size() == lines);
  for (const KeyDoc& k : docs) {
    CHECK_FALSE(k.doc.empty());
    CHECK_FALSE(k.default_value.empty());
  }
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config("# comment\n; other\ncommand = eikonal\n[wavenumber]\n  tau = 7.5  \n");
  CHECK(c.command == "eikonal");
  CHECK(c.tau == 7.5);

  const auto bad = problems_of("[potential]\nkind = nope\n[sampling]\nwalkers = x\nbins = 2\nzzz = 1\nbins = 3\n[run]\ncache = maybe\n");
  auto mentions = [&](const std::string& s) {
    for (const std::string& p : bad)
      if (p.find(s) != std::string::npos) return true;
    return false;
  };
  CHECK(mentions("walkers"));
  CHECK(mentions("zzz"));
  CHECK(mentions("duplicate"));
  CHECK(mentions("cache"));
  CHECK(mentions("kind"));
  CHECK(bad.size() >= 5);

  CHECK_THROWS_AS(parse_config("[wavenumber\ntau = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("tau 1\n"), ConfigError);

  ExperimentConfig e;
  e.command = "eikonal";
  CHECK_THROWS_AS(e.validate(), ConfigError);  // needs the gaussian V and k >= 5
  e.potential = "gaussian";
  e.tau = 5.0;
  CHECK_NOTHROW(e.validate());
  e.grid_phi = 7;
  CHECK_THROWS_AS(e.validate(), ConfigError);
  ExperimentConfig a;
  a.command = "amplitude";
  a.potential = "gaussian-gradient";
  a.delta = 0.0;
  CHECK_THROWS_AS(a.validate(), ConfigError);
}

TEST_CASE("config digest") {
  ExperimentConfig c;
  const std::string d = config_digest(c);
  CHECK(d.size() == 64);
  CHECK(config_digest(c) == d);
  ExperimentConfig o = c;
  o.output = "elsewhere";
  o.cache = false;
  CHECK(config_digest(o) == d);
  ExperimentConfig t = c;
  t.quad.tol = 2e-10;
  CHECK(config_digest(t) != d);
  ExperimentConfig s = c;
  s.seed = 2;
  CHECK(config_digest(s) != d);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("report tables and plots") {
  Table t("demo", {"a", "b"});
  t.add({0.1, 1.0 / 3.0});
  CHECK(t.csv() == "a,b\n0.10000000000000001,0.33333333333333331\n");
  CHECK(t.rows() == 1);
  CHECK_THROWS(t.add({1.0}));
  const Table back = Table::from_json(t.to_json());
  CHECK(back.csv() == t.csv());
  const Plot p = loglog_plot("d", "title", "r", "y", {1, 2, 4}, {1, 0.25, 0.0625}, -2.0, 0.0);
  CHECK(p.svg.find("<svg") == 0);
  CHECK(p.svg.find("slope -2.0000") != std::string::npos);
  for (const std::string& name : command_names) CHECK_FALSE(command_help(name).empty());
}

TEST_CASE("result cache") {
  TempDir tmp;
  std::ostringstream warn;
  ResultCache cache((tmp.path / "c").string(), warn);
  REQUIRE(cache.enabled());
  CHECK_FALSE(cache.lookup(std::string(64, 'a')).has_value());

  RunReport r;
  r.command = "green";
  r.digest = std::string(64, 'b');
  Table t("kernel", {"x"});
  t.add({1.5});
  r.tables.push_back(t);
  r.diagnostics = {{"converged", true}};
  cache.store(r);
  const auto got = cache.lookup(r.digest);
  REQUIRE(got.has_value());
  CHECK(got->tables.at(0).csv() == t.csv());
  CHECK(got->diagnostics == r.diagnostics);
  for (const auto& e : fs::directory_iterator(tmp.path / "c"))
    CHECK(e.path().filename().string().rfind(".", 0) != 0);  // no temp files left

  // A tampered entry is evicted, not served.
  const std::string path = cache.entry_path(r.digest);
  std::string text = slurp(path);
  text.replace(text.find("1.5"), 3, "2.5");
  std::ofstream(path, std::ios::binary) << text;
  CHECK_FALSE(cache.lookup(r.digest).has_value());
  CHECK_FALSE(fs::exists(path));
  CHECK(warn.str().find("evicting") != std::string::npos);
  std::ofstream(path) << "{not json";
  CHECK_FALSE(cache.lookup(r.digest).has_value());
  CHECK_FALSE(fs::exists(path));

  // An unusable directory downgrades to a warning.
  std::ofstream(tmp.path / "file") << "x";
  std::ostringstream warn2;
  ResultCache broken((tmp.path / "file").string(), warn2);
  CHECK_FALSE(broken.enabled());
  CHECK(warn2.str().find("warning") != std::string::npos);
  broken.store(r);
  CHECK_FALSE(broken.lookup(r.digest).has_value());
}

TEST_CASE("green with Q = 0 and the cache") {
  TempDir tmp;
  ExperimentConfig c;
  c.command = "green";
  c.points = 20;
  c.output = (tmp.path / "out").string();
  ::unsetenv("GREENLAB_CACHE_DIR");
  std::ostringstream out, err;
  REQUIRE(execute(c, out, err) == kSuccess);
  const auto report = nlohmann::json::parse(slurp(tmp.path / "out" / "green.json"));
  CHECK(report["diagnostics"]["converged"] == true);
  CHECK(report["diagnostics"]["max_orders"] == 1);
  CHECK(report["diagnostics"]["max_rel_dev_from_free"].get<double>() < 1e-10);
  CHECK(report["cache_hit"] == false);
  const std::string first = slurp(tmp.path / "out" / "green_kernel.csv");

  std::ostringstream out2;
  REQUIRE(execute(c, out2, err) == kSuccess);
  const auto again = nlohmann::json::parse(slurp(tmp.path / "out" / "green.json"));
  CHECK(again["cache_hit"] == true);
  CHECK(again["digest"] == report["digest"]);
  CHECK(slurp(tmp.path / "out" / "green_kernel.csv") == first);
  CHECK(out2.str().find("cache hit") != std::string::npos);

  // Nothing outside the output directory.
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(tmp.path)) entries += e.path().filename() == "out" ? 1 : 100;
  CHECK(entries == 1);

  // Environment override of the cache location.
  ::setenv("GREENLAB_CACHE_DIR", (tmp.path / "envcache").c_str(), 1);
  c.seed = 5;
  REQUIRE(execute(c, out, err) == kSuccess);
  CHECK(fs::exists(tmp.path / "envcache" / (config_digest(c) + ".json")));
  ::unsetenv("GREENLAB_CACHE_DIR");

  c.cache = false;
  c.seed = 6;
  REQUIRE(execute(c, out, err) == kSuccess);
  CHECK_FALSE(fs::exists(tmp.path / "out" / "cache" / (config_digest(c) + ".json")));
}

TEST_CASE("entropy on the free indicator source") {
  TempDir tmp;
  ExperimentConfig c;
  c.command = "entropy";
  c.walkers = 20000;
  c.cache = false;
  c.output = tmp.path.string();
  std::ostringstream out, err;
  REQUIRE(execute(c, out, err) == kSuccess);
  const auto j = nlohmann::json::parse(slurp(tmp.path / "entropy.json"));
  const double gap = j["diagnostics"]["mean_value_gap"], se = j["diagnostics"]["gap_stderr"];
  CHECK(std::abs(gap) < 3.0 * se);
  CHECK(j["diagnostics"]["total_mass"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("exit codes") {
  TempDir tmp;
  std::ostringstream out, err;
  ExperimentConfig bad;
  bad.walkers = 0;
  bad.output = tmp.path.string();
  CHECK(execute(bad, out, err) == kConfigError);

  ExperimentConfig div;
  div.command = "green";
  div.potential = "bump";
  div.eta = 40.0;
  div.delta = 0.05;
  div.points = 2;
  div.output = (tmp.path / "div").string();
  CHECK(execute(div, out, err) == kDivergence);
  const auto j = nlohmann::json::parse(slurp(tmp.path / "div" / "green.json"));
  CHECK(j["status"] == "diverged");
  CHECK(j["error"].get<std::string>().find("divergence") != std::string::npos);
  CHECK(err.str().find("divergence") != std::string::npos);

  std::ofstream(tmp.path / "plain") << "x";
  ExperimentConfig io;
  io.points = 2;
  io.output = (tmp.path / "plain").string();
  std::ostringstream err2;
  CHECK(execute(io, out, err2) == kIoError);
  CHECK(err2.str().find("warning") != std::string::npos);
}
