#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lgra/config.hpp"

namespace lgra {

struct ExperimentOptions {
  std::string config_file;  // optional flat key-value file
  std::vector<std::pair<std::string, std::string>> overrides;  // applied after the file
  int trials = 100;
  std::optional<std::uint64_t> seed;  // replaces rng_seed when set
  std::string out_dir = "out";
  int parallelism = 1;
};

struct ExperimentResult {
  std::vector<std::string> files;  // written paths, manifest last
  double wall_seconds = 0.0;
};

// Registered experiment names, in a fixed order.
const std::vector<std::string>& experiment_names();

// Resolved base configuration of an experiment: its preset, then the config
// file, then the overrides, then the seed. Throws ConfigError.
ScenarioConfig experiment_config(const std::string& name, const ExperimentOptions& options);

// Runs one experiment and writes its CSVs and manifest.txt into out_dir.
// Throws ConfigError for an unknown name, bad options or configuration, and
// std::runtime_error when the output cannot be written.
ExperimentResult run_experiment(const std::string& name, const ExperimentOptions& options);

}  // namespace lgra
