#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenlab/field.hpp"
#include "greenlab/geometry.hpp"
#include "greenlab/quadrature.hpp"

namespace greenlab::cli {

// Carries every problem found while reading or validating a config.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

inline const std::vector<std::string> command_names = {
    "green",   "resolvent", "amplitude", "density",       "entropy",
    "eikonal", "helmholtz", "anderson",  "verify-lemmas", "dirac-check"};

struct ExperimentConfig {
  std::string command = "green";

  // [potential]
  std::string potential = "zero";  // zero | bump | gaussian-gradient | example1 | gaussian | anderson
  double eta = 1.0;
  double potential_radius = 1.0;
  double gamma = 0.75;
  double eps = 0.5;
  double anderson_ball = 100.0;
  double anderson_spacing = 3.0;
  std::string sign_law = "rademacher";

  // [source]
  std::string source = "indicator";  // indicator | bump
  double source_amplitude = 1.0;
  std::vector<double> point = {0.0, 0.0, 0.0};

  // [wavenumber]
  double tau = 1.0;
  double delta = 0.5;
  double k_min = 0.7;
  double k_max = 1.3;
  int k_count = 3;

  // [quadrature]
  QuadratureSpec quad{24, 48, 16, 0, 1e-10, 1e-12};  // Born source integrals

  // [sampling]
  std::vector<double> radii = {6, 8, 10, 12, 16, 20, 24, 32};
  int dir_theta = 4;
  int dir_phi = 4;
  int points = 100;
  double box = 4.0;
  int realizations = 200;
  long walkers = 100000;
  int bins = 64;
  double a1 = 0.5, a2 = 1.5, gamma1 = 3.0;
  double h = 0.2;
  int n_iter = 3;
  int grid_r = 24, grid_theta = 6, grid_phi = 8;
  double grid_rmin = 1.25, grid_rmax = 32.0;

  // [run]
  std::uint64_t seed = 1;
  std::string output = "greenlab-out";
  bool cache = true;

  bool operator==(const ExperimentConfig&) const;

  ComplexWavenumber k() const { return {tau, delta}; }
  std::vector<double> k_values() const;
  // Throws ConfigError listing every offending key.
  void validate() const;
};

// Parses `key = value` lines under `[section]` headers; `#` and `;` start
// comments. Unknown keys and unparsable values are all reported together.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

// Every key in a fixed order, doubles with 17 significant digits.
std::string to_text(const ExperimentConfig& c);
// to_text without the [run] output and cache keys, which do not affect results.
std::string canonical_text(const ExperimentConfig& c);

struct KeyDoc {
  std::string section, key, default_value, doc;
};
std::vector<KeyDoc> documented_keys();

FieldSpec build_potential(const ExperimentConfig& c);
FieldSpec build_source(const ExperimentConfig& c);

}  // namespace greenlab::cli
