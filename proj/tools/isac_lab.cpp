// isac-lab: runs the simulation studies and writes result grids.

#include <cstdint>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "isac/config.hpp"
#include "isac/experiments.hpp"
#include "isac/precoding.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "out";
  std::string scale = "desk";
  std::string whitening;
  std::vector<std::string> sets;    // key=value
  std::vector<std::string> sweeps;  // key=v1,v2,...
  bool verbose = false;
};

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected key=value, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

isac::ScenarioConfig resolve_config(const CommonOptions& opt) {
  std::map<std::string, std::string> entries;
  if (!opt.config.empty()) entries = isac::read_config_entries(opt.config);
  if (opt.scale == "desk") {
    for (const auto& [k, v] : isac::desk_scale_entries()) entries[k] = v;
  }
  for (const auto& s : opt.sets) {
    const auto [k, v] = split_assignment(s);
    entries[k] = v;
  }
  if (opt.seed_given) entries["run.seed"] = std::to_string(opt.seed);
  return isac::config_from_entries(entries);
}

isac::ExperimentSpec make_spec(const std::string& id, const CommonOptions& opt) {
  isac::ExperimentSpec spec;
  spec.id = id;
  spec.base = resolve_config(opt);
  spec.seeds = {spec.base.seed};
  spec.out_dir = opt.out;
  for (const auto& s : opt.sweeps) {
    const auto [key, list] = split_assignment(s);
    isac::SweepAxis axis{key, {}};
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) axis.values.push_back(item);
    }
    spec.sweeps.push_back(axis);
  }
  if (!opt.whitening.empty()) spec.modes = {isac::parse_whitening(opt.whitening)};
  return spec;
}

int run(const std::string& id, const CommonOptions& opt) {
  const isac::ExperimentSpec spec = make_spec(id, opt);
  spec.validate();
  spdlog::info("{}: {} x {} antennas, {} slots, {} subcarriers, seed {}", id, spec.base.bs_antennas,
               spec.base.ue_antennas, spec.base.slots, spec.base.subcarriers, spec.base.seed);
  const isac::ExperimentResult result = isac::run_experiment(spec);
  for (const auto& w : result.warnings) spdlog::warn("{}", w);
  const auto files = isac::write_experiment(spec, result);
  spdlog::info("wrote {} files to {}", files.size(), spec.out_dir);
  return 0;
}

int validate(const CommonOptions& opt) {
  const isac::ScenarioConfig cfg = resolve_config(opt);
  std::cout << isac::canonical_text(cfg);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(isac::config_hash(cfg)));
  std::cout << "\n# hash " << hash << "\n# ue snr " << isac::ue_snr_db(cfg) << " dB\n";
  return 0;
}

void add_common(CLI::App* app, CommonOptions& opt, bool experiment) {
  app->add_option("--config", opt.config, "INI configuration file (defaults when omitted)")->check(CLI::ExistingFile);
  app->add_option("--scale", opt.scale, "desk: reduced array and grid sizes; paper: the configuration as given")
      ->check(CLI::IsMember({"desk", "paper"}));
  app->add_option("--set", opt.sets, "Override one key, e.g. --set power.tradeoff=0.2");
  app->add_option("--seed", opt.seed, "Random seed")->each([&opt](const std::string&) { opt.seed_given = true; });
  if (!experiment) return;
  app->add_option("--out", opt.out, "Output directory");
  app->add_option("--sweep", opt.sweeps, "Sweep axis, e.g. --sweep ue.doppler_hz=50,100,500");
  app->add_option("--whitening", opt.whitening, "radar-maps whitening mode")
      ->check(CLI::IsMember({"none", "estimated", "true"}));
  app->add_flag("-v,--verbose", opt.verbose, "Debug logging");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel-aging and clutter-aware radar simulations"};
  app.require_subcommand(1);
  CommonOptions opt;

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"nmse-surface", "Mean in-frame NMSE over frame size and past pilots"},
      {"nmse-frame", "NMSE along the frame for several Dopplers"},
      {"clutter-nmse", "Clutter covariance estimation NMSE sweeps"},
      {"radar-maps", "Range-angle and range-velocity maps"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : experiments) {
    subs[name] = app.add_subcommand(name, help);
    add_common(subs[name], opt, true);
  }
  CLI::App* check = app.add_subcommand("validate-config", "Parse a configuration and print its canonical form");
  add_common(check, opt, false);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(opt.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (check->parsed()) return validate(opt);
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) return run(name == "clutter-nmse" ? "clutter-nmse-sweep" : name, opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "isac-lab: error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
