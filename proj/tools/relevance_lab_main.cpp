#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rlab/errors.hpp"
#include "rlab/experiments.hpp"

using nlohmann::json;

namespace {

json collect_extras(CLI::App* sub) {
  // parse leftover "--key value" pairs into a params object
  json out = json::object();
  auto extras = sub->remaining();
  for (size_t i = 0; i < extras.size(); ++i) {
    std::string key = extras[i];
    if (key.rfind("--", 0) != 0 || i + 1 >= extras.size()) {
      throw rlab::ValidationError("cannot parse option '" + key + "' (expected --key value)");
    }
    key = key.substr(2);
    const std::string& raw = extras[++i];
    if (raw == "true" || raw == "false") {
      out[key] = raw == "true";
    } else if (!raw.empty() && raw.front() == '[') {
      out[key] = json::parse(raw);
    } else {
      try {
        size_t pos = 0;
        if (raw.find_first_not_of("+-0123456789") == std::string::npos) {
          out[key] = std::stoll(raw, &pos);
          if (pos != raw.size()) out[key] = raw;
        } else {
          const double d = std::stod(raw, &pos);
          out[key] = pos == raw.size() ? json(d) : json(raw);
        }
      } catch (...) {
        out[key] = raw;
      }
    }
  }
  return out;
}

int dispatch(const rlab::cli::ExperimentConfig& cfg, bool validate_only) {
  if (validate_only) {
    const auto diag = rlab::cli::validate(cfg);
    for (const auto& e : diag.errors) std::cout << "error: " << e << "\n";
    for (const auto& w : diag.warnings) std::cout << "warning: " << w << "\n";
    if (diag.ok) {
      std::cout << "ok\n";
      for (const auto& c : diag.conventions) std::cout << "convention: " << c << "\n";
    }
    return 0;
  }
  rlab::cli::run(cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relevance-lab: eigenrelevance spectra, running couplings and "
               "coarse-graining flows for states seen through noisy channels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  std::uint64_t seed = 0;
  bool seed_set = false;

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a configuration and exit");
  validate_cmd->add_option("--config", config_path, "JSON configuration file");

  // experiment parameters mirror the JSON config keys one-to-one and are
  // accepted as loose --key value pairs; the experiments module enforces the
  // schema strictly
  std::map<const CLI::App*, std::string> experiment_of;
  for (const auto& name : rlab::cli::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--output", output_path, "CSV output path");
    sub->add_option("--seed", seed, "seed for randomized experiments")
        ->each([&](const std::string&) { seed_set = true; });
    sub->allow_extras();
    experiment_of[sub] = name;
  }

  try {
    app.parse(argc, argv);

    rlab::cli::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw rlab::ConfigError("cannot open config file " + config_path);
      json j = json::parse(in);
      cfg = rlab::cli::config_from_json(j);
    }

    if (validate_cmd->parsed()) {
      if (config_path.empty()) {
        throw rlab::ValidationError("validate requires --config");
      }
      return dispatch(cfg, true);
    }

    for (auto& [sub, name] : experiment_of) {
      if (!sub->parsed()) continue;
      if (!cfg.experiment.empty() && cfg.experiment != name) {
        throw rlab::ValidationError("config file is for experiment '" + cfg.experiment +
                                    "' but subcommand '" + name + "' was requested");
      }
      cfg.experiment = name;
      const json overrides = collect_extras(const_cast<CLI::App*>(sub));
      for (auto it = overrides.begin(); it != overrides.end(); ++it) {
        cfg.params[it.key()] = it.value();
      }
      if (!output_path.empty()) cfg.output_path = output_path;
      if (seed_set) cfg.seed = seed;
      return dispatch(cfg, false);
    }
    throw rlab::ValidationError("no experiment selected");
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const rlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rlab::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}
