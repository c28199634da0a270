#pragma once

#include "chemo/stepper.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitialSpec {
  enum class Kind { Constant, Cosine, Random, File };
  Kind kind = Kind::Constant;
  double value = 1.0;       // constant
  double mean = 1.0;        // cosine, random
  double amplitude = 0.0;   // cosine: absolute; random: relative, in [0, 1)
  int mode = 1;             // cosine
  std::uint64_t seed = 1;   // random
  std::string path;         // file
};

struct ScenarioConfig {
  Grid grid;
  Parameters params;
  InitialSpec initial;
  StepperConfig stepper;
  double t_end = 1.0;
  double observe_every = 0.0;
  std::string diagnostics_path;
  std::string snapshot_prefix;
  std::vector<double> snapshot_times;
  std::string sweep_path;
};

/// Reads a sectioned "key = value" file ("[section]" headers, "#" comments).
/// Relative paths are resolved against the file's directory.
ScenarioConfig parse_config(const std::string& path);

/// Same, from text; origin names the source in error messages.
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin,
                                 const std::filesystem::path& base_dir = {});

/// Initial density described by config.initial on config.grid.
ScalarField make_initial(const ScenarioConfig& config);

}  // namespace chemo
