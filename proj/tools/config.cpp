#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "greenlab/potentials.hpp"

namespace greenlab::cli {

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string format(int v) { return std::to_string(v); }
std::string format(long v) { return std::to_string(v); }
std::string format(std::uint64_t v) { return std::to_string(v); }
std::string format(bool v) { return v ? "true" : "false"; }
std::string format(const std::string& v) { return v; }
std::string format(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(format(x));
  return join(parts, ", ");
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && p == end;
}
bool parse_value(const std::string& s, double& out) { return parse_number(s, out); }
bool parse_value(const std::string& s, int& out) { return parse_number(s, out); }
bool parse_value(const std::string& s, long& out) { return parse_number(s, out); }
bool parse_value(const std::string& s, std::uint64_t& out) { return parse_number(s, out); }
bool parse_value(const std::string& s, std::string& out) {
  out = s;
  return true;
}
bool parse_value(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return out = true, true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return out = false, true;
  return false;
}
bool parse_value(const std::string& s, std::vector<double>& out) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double x;
    if (!parse_number(trim(item), x)) return false;
    v.push_back(x);
  }
  out = std::move(v);
  return true;
}

struct Key {
  std::string section, key, doc;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<bool(ExperimentConfig&, const std::string&)> set;
};

template <typename Proj>
Key key(std::string section, std::string name, std::string doc, Proj proj) {
  return {std::move(section), std::move(name), std::move(doc),
          [proj](const ExperimentConfig& c) { return format(proj(const_cast<ExperimentConfig&>(c))); },
          [proj](ExperimentConfig& c, const std::string& s) { return parse_value(s, proj(c)); }};
}

#define GL_KEY(section, name, member, doc) \
  key(section, name, doc, [](ExperimentConfig& c) -> auto& { return c.member; })

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      GL_KEY("", "command", command, "one of the ten commands"),
      GL_KEY("potential", "kind", potential, "zero | bump | gaussian-gradient | example1 | gaussian | anderson"),
      GL_KEY("potential", "eta", eta, "amplitude of Q (vector kinds) or V (gaussian)"),
      GL_KEY("potential", "radius", potential_radius, "bump radius, or gaussian width"),
      GL_KEY("potential", "gamma", gamma, "example1 decay exponent"),
      GL_KEY("potential", "eps", eps, "envelope exponent: |F| <= m/(1+|x|^(0.5+eps))"),
      GL_KEY("potential", "anderson_ball", anderson_ball, "radius of the ball holding lattice centers"),
      GL_KEY("potential", "anderson_spacing", anderson_spacing, "lattice spacing, above 2"),
      GL_KEY("potential", "sign_law", sign_law, "rademacher | uniform"),
      GL_KEY("source", "kind", source, "indicator | bump, supported in the unit ball"),
      GL_KEY("source", "amplitude", source_amplitude, "bump source amplitude"),
      GL_KEY("source", "point", point, "pole y of G(x, y) for `green`"),
      GL_KEY("wavenumber", "tau", tau, "Re k"),
      GL_KEY("wavenumber", "delta", delta, "Im k"),
      GL_KEY("wavenumber", "k_min", k_min, "first Re k of a sweep"),
      GL_KEY("wavenumber", "k_max", k_max, "last Re k of a sweep"),
      GL_KEY("wavenumber", "k_count", k_count, "number of sweep points"),
      GL_KEY("quadrature", "n_theta", quad.n_theta, "polar nodes"),
      GL_KEY("quadrature", "n_phi", quad.n_phi, "azimuthal nodes"),
      GL_KEY("quadrature", "n_radial", quad.n_radial, "Gauss-Legendre nodes per radial panel"),
      GL_KEY("quadrature", "max_refinements", quad.max_refinements, "node doublings allowed"),
      GL_KEY("quadrature", "tol", quad.tol, "relative refinement tolerance"),
      GL_KEY("quadrature", "truncation_tol", quad.truncation_tol, "exterior tail bound"),
      GL_KEY("sampling", "radii", radii, "sample radii for rays and extraction"),
      GL_KEY("sampling", "dir_theta", dir_theta, "polar directions of the sphere rule"),
      GL_KEY("sampling", "dir_phi", dir_phi, "azimuthal directions of the sphere rule"),
      GL_KEY("sampling", "points", points, "random targets for `green`"),
      GL_KEY("sampling", "box", box, "half-width of the target box for `green`"),
      GL_KEY("sampling", "realizations", realizations, "Monte Carlo realizations, at least 50"),
      GL_KEY("sampling", "walkers", walkers, "walk-on-spheres walkers"),
      GL_KEY("sampling", "bins", bins, "harmonic-measure bins per edge"),
      GL_KEY("sampling", "a1", a1, "left end of the base interval"),
      GL_KEY("sampling", "a2", a2, "right end of the base interval"),
      GL_KEY("sampling", "gamma1", gamma1, "base angles are pi/gamma1"),
      GL_KEY("sampling", "h", h, "coarse finite-difference step (halved once)"),
      GL_KEY("sampling", "n_iter", n_iter, "Picard iterations"),
      GL_KEY("sampling", "grid_r", grid_r, "eikonal shells"),
      GL_KEY("sampling", "grid_theta", grid_theta, "eikonal polar points"),
      GL_KEY("sampling", "grid_phi", grid_phi, "eikonal azimuthal points, even"),
      GL_KEY("sampling", "grid_rmin", grid_rmin, "inner eikonal radius, above 1"),
      GL_KEY("sampling", "grid_rmax", grid_rmax, "outer eikonal radius"),
      GL_KEY("run", "seed", seed, "base seed of every random stream"),
      GL_KEY("run", "output", output, "output directory"),
      GL_KEY("run", "cache", cache, "reuse stored results for an identical config"),
  };
  return table;
}

#undef GL_KEY

std::string render(const ExperimentConfig& c, bool with_run_io) {
  std::string out, section = "\x01";
  for (const Key& k : keys()) {
    if (!with_run_io && k.section == "run" && k.key != "seed") continue;
    if (k.section != section) {
      section = k.section;
      if (!section.empty()) out += "\n[" + section + "]\n";
    }
    out += k.key + " = " + k.get(c) + "\n";
  }
  return out;
}

const std::set<std::string> vector_kinds = {"zero", "bump", "gaussian-gradient", "example1"};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration:\n  " + join(problems, "\n  ")), problems_(std::move(problems)) {}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const { return render(*this, true) == render(o, true); }

std::vector<double> ExperimentConfig::k_values() const {
  std::vector<double> v;
  for (int i = 0; i < k_count; ++i) v.push_back(k_count == 1 ? k_min : k_min + (k_max - k_min) * i / (k_count - 1));
  return v;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const std::string& where, const std::string& msg) {
    if (!ok) bad.push_back(where + ": " + msg);
  };
  const std::set<std::string> commands(command_names.begin(), command_names.end());
  check(commands.count(command) == 1, "command", "unknown command '" + command + "'");
  check(vector_kinds.count(potential) || potential == "gaussian" || potential == "anderson", "[potential] kind",
        "unknown kind '" + potential + "'");
  check(std::isfinite(eta), "[potential] eta", "must be finite");
  check(potential_radius > 0, "[potential] radius", "must be positive");
  check(gamma > 0, "[potential] gamma", "must be positive");
  check(eps > 0, "[potential] eps", "must be positive");
  check(anderson_ball > 0, "[potential] anderson_ball", "must be positive");
  check(anderson_spacing > 2, "[potential] anderson_spacing", "must exceed 2 so bumps do not overlap");
  check(sign_law == "rademacher" || sign_law == "uniform", "[potential] sign_law", "rademacher or uniform");
  check(source == "indicator" || source == "bump", "[source] kind", "indicator or bump");
  check(std::isfinite(source_amplitude), "[source] amplitude", "must be finite");
  check(point.size() == 3, "[source] point", "needs three coordinates");
  check(std::isfinite(tau), "[wavenumber] tau", "must be finite");
  check(delta >= 0, "[wavenumber] delta", "must be nonnegative");
  check(k_min > 0, "[wavenumber] k_min", "must be positive");
  check(k_max >= k_min, "[wavenumber] k_max", "must be at least k_min");
  check(k_count >= 1, "[wavenumber] k_count", "must be positive");
  check(quad.n_theta >= 2, "[quadrature] n_theta", "at least 2");
  check(quad.n_phi >= 2, "[quadrature] n_phi", "at least 2");
  check(quad.n_radial >= 2, "[quadrature] n_radial", "at least 2");
  check(quad.max_refinements >= 0, "[quadrature] max_refinements", "must be nonnegative");
  check(quad.tol > 0, "[quadrature] tol", "must be positive");
  check(quad.truncation_tol > 0, "[quadrature] truncation_tol", "must be positive");
  bool radii_ok = radii.size() >= 4;
  for (double r : radii) radii_ok = radii_ok && r > 1.0;
  check(radii_ok, "[sampling] radii", "need at least 4 radii, all above 1");
  check(dir_theta >= 1, "[sampling] dir_theta", "must be positive");
  check(dir_phi >= 1, "[sampling] dir_phi", "must be positive");
  check(points >= 1, "[sampling] points", "must be positive");
  check(box > 0, "[sampling] box", "must be positive");
  check(realizations >= 50, "[sampling] realizations", "at least 50");
  check(walkers >= 1, "[sampling] walkers", "must be positive");
  check(bins >= 4, "[sampling] bins", "at least 4");
  check(a2 > a1 && a1 > 0, "[sampling] a1/a2", "need 0 < a1 < a2");
  check(gamma1 > 2, "[sampling] gamma1", "must exceed 2");
  check(h > 0, "[sampling] h", "must be positive");
  check(n_iter >= 1, "[sampling] n_iter", "must be positive");
  check(grid_r >= 5, "[sampling] grid_r", "at least 5");
  check(grid_theta >= 5, "[sampling] grid_theta", "at least 5");
  check(grid_phi >= 6 && grid_phi % 2 == 0, "[sampling] grid_phi", "even and at least 6");
  check(grid_rmin > 1 && grid_rmax > grid_rmin, "[sampling] grid_rmin/grid_rmax", "need 1 < grid_rmin < grid_rmax");
  check(!output.empty(), "[run] output", "must not be empty");

  // Command and potential compatibility.
  const std::string p = "[potential] kind";
  if (command == "green" || command == "resolvent" || command == "amplitude" || command == "density" ||
      command == "dirac-check")
    check(vector_kinds.count(potential) == 1, p, command + " needs a vector field Q");
  if (command == "eikonal" || command == "helmholtz")
    check(potential == "gaussian", p, command + " needs the scalar gaussian V");
  if (command == "anderson") check(potential == "anderson", p, "anderson needs kind = anderson");
  if (command == "entropy") check(potential == "zero", p, "entropy certificates are computed for Q = 0");
  if (command == "eikonal") check(tau >= 5, "[wavenumber] tau", "eikonal needs k >= 5");
  if ((command == "amplitude" || command == "density" || command == "resolvent") && delta == 0)
    check(potential == "zero" || potential == "bump", p, "delta = 0 needs a compactly supported Q");
  if (!bad.empty()) throw ConfigError(bad);
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::vector<std::string> bad;
  std::set<std::string> seen;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  for (int n = 1; std::getline(ss, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = "line " + std::to_string(n);
    if (t.front() == '[') {
      if (t.back() != ']') {
        bad.push_back(where + ": unterminated section header");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      bad.push_back(where + ": expected key = value");
      continue;
    }
    const std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
    const std::string name = section.empty() ? k : "[" + section + "] " + k;
    const Key* found = nullptr;
    for (const Key& key : keys())
      if (key.section == section && key.key == k) found = &key;
    if (!found) {
      bad.push_back(name + ": unknown key");
      continue;
    }
    if (!seen.insert(name).second) bad.push_back(name + ": duplicate key");
    if (!found->set(base, v)) bad.push_back(name + ": cannot parse '" + v + "'");
  }
  if (!bad.empty()) {
    // Report range problems of the keys that did parse as well.
    try {
      base.validate();
    } catch (const ConfigError& e) {
      bad.insert(bad.end(), e.problems().begin(), e.problems().end());
    }
    throw ConfigError(bad);
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string to_text(const ExperimentConfig& c) { return render(c, true); }
std::string canonical_text(const ExperimentConfig& c) { return render(c, false); }

std::vector<KeyDoc> documented_keys() {
  const ExperimentConfig d;
  std::vector<KeyDoc> out;
  for (const Key& k : keys()) out.push_back({k.section, k.key, k.get(d), k.doc});
  return out;
}

FieldSpec build_potential(const ExperimentConfig& c) {
  if (c.potential == "zero") return FieldSpec::zero_vector();
  if (c.potential == "example1") return build_example1(c.gamma, c.eps).Q.scaled(c.eta);
  FieldSpec F;
  if (c.potential == "bump")
    F = bump_vector_field(c.eta, Point3::UnitX(), Point3::Zero(), c.potential_radius);
  else if (c.potential == "gaussian-gradient")
    F = gaussian_gradient_field(c.eta);
  else if (c.potential == "gaussian")
    F = gaussian_scalar(c.eta, c.potential_radius);
  else
    throw ConfigError({"[potential] kind: '" + c.potential + "' has no single field"});
  if (c.eps != F.envelope.eps) measure_envelope(F, c.eps);
  return F;
}

FieldSpec build_source(const ExperimentConfig& c) {
  if (c.source == "indicator") return unit_ball_indicator();
  return bump_scalar(c.source_amplitude);
}

}  // namespace greenlab::cli
