#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace greenlab::cli;

int main(int argc, char** argv) {
  CLI::App app{"greenlab: numerical experiments for Schrodinger operators with divergence-form potentials"};
  app.require_subcommand(0, 1);
  bool defaults = false;
  app.add_flag("--defaults", defaults, "Print every config key with its default value and meaning");

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool no_cache = false;
  for (const std::string& name : command_names) {
    CLI::App* sub = app.add_subcommand(name, command_help(name));
    sub->add_option("config", config_path, "Config file (key = value lines under [section] headers)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override [run] seed");
    sub->add_option("--out", out_dir, "Override [run] output");
    sub->add_flag("--no-cache", no_cache, "Do not read or write the result cache");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  if (defaults) {
    std::string section = "\x01";
    for (const KeyDoc& k : documented_keys()) {
      if (k.section != section) {
        section = k.section;
        if (!section.empty()) std::cout << "\n[" << section << "]\n";
      }
      std::cout << k.key << " = " << k.default_value << "  # " << k.doc << "\n";
    }
    return kSuccess;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return kConfigError;
  }

  ExperimentConfig c;
  c.command = app.get_subcommands().front()->get_name();
  try {
    if (!config_path.empty()) c = load_config(config_path, c);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  c.command = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) c.seed = seed;
  if (sub->count("--out")) c.output = out_dir;
  if (no_cache) c.cache = false;
  return execute(c, std::cout, std::cerr);
}
