// Command-line front end: one subcommand per experiment mode.
//
//   jsq simulate --set params.n=1000 --set params.horizon=2 --output runs/a
//   jsq figure1 --config tools/configs/figure1.json
//   jsq sweep --print-config

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jsq/config.hpp"
#include "jsq/errors.hpp"
#include "jsq/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitModule = 3;

struct Options {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string output;
  bool serial = false;
  bool print_config = false;
};

nlohmann::json load_document(jsq::Mode mode, const Options& opts) {
  nlohmann::json doc = jsq::default_config(mode);
  if (!opts.config_file.empty()) {
    std::ifstream in(opts.config_file);
    if (!in) throw jsq::ConfigError("--config: cannot read " + opts.config_file);
    nlohmann::json file = nlohmann::json::parse(in, nullptr, false);
    if (file.is_discarded() || !file.is_object()) throw jsq::ConfigError("--config: not a JSON object");
    if (file.contains("mode") && file["mode"] != jsq::to_string(mode)) {
      throw jsq::ConfigError("mode: config file is for '" + file["mode"].dump() + "', subcommand is '" +
                             jsq::to_string(mode) + "'");
    }
    // The initial condition is one-of, so a file's choice replaces the default.
    if (file.contains("initial")) doc.erase("initial");
    doc.merge_patch(file);
  }
  bool initial_reset = false;
  for (const auto& a : opts.overrides) {
    if (a.rfind("initial.", 0) == 0 && !initial_reset) {
      doc["initial"] = nlohmann::json::object();
      initial_reset = true;
    }
    jsq::apply_override(doc, a);
  }
  if (!opts.output.empty()) doc["output"] = opts.output;
  return doc;
}

int run(jsq::Mode mode, const Options& opts) {
  try {
    const jsq::ExperimentConfig config = jsq::config_from_json(load_document(mode, opts));
    config.validate();
    if (opts.print_config) {
      std::cout << jsq::to_json(config).dump(2) << '\n';
      return 0;
    }
    const auto outcome =
        jsq::run_experiment(config, opts.serial ? jsq::Execution::kSerial : jsq::Execution::kParallel);
    std::cout << outcome.directory.string() << '\n';
    for (const auto& f : outcome.files) std::cout << "  " << f << '\n';
    std::cout << "  meta.json\n";
    std::cerr << "done in " << outcome.wall_seconds << " s\n";
    return 0;
  } catch (const jsq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const jsq::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModule;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"JSQ many-server simulation, limit solver and experiment runner"};
  app.set_version_flag("--version", std::string(jsq::kVersion));
  app.require_subcommand(1);

  Options opts;
  const char* modes[] = {"simulate", "simulate-truncated", "limit", "compare", "waits", "sweep", "figure1"};
  for (const char* name : modes) {
    CLI::App* sub = app.add_subcommand(name, "run the " + std::string(name) + " pipeline");
    sub->add_option("-c,--config", opts.config_file, "JSON config; fields override the mode defaults")
        ->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opts.overrides, "override a field, e.g. params.n=1000 (repeatable)");
    sub->add_option("-o,--output", opts.output, "output directory");
    sub->add_flag("--serial", opts.serial, "run replications with the serial reference loop");
    sub->add_flag("--print-config", opts.print_config, "print the resolved config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const jsq::Mode mode = jsq::parse_mode(app.get_subcommands().front()->get_name());
  return run(mode, opts);
}
