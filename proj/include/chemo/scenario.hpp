#pragma once

#include "chemo/config.hpp"
#include "chemo/constants.hpp"

#include <ostream>
#include <string>

namespace chemo {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitBlowUp = 2 };

int cmd_run(const ScenarioConfig& config, std::ostream& out, std::ostream& err);

int cmd_constants(const ScenarioConfig& config, std::ostream& out, std::ostream& err);

struct SweepSpec {
  std::string param;  // a, b, sigma, chi or k
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
  bool log_scale = false;
  std::string out_path;  // overrides config.sweep_path when set
};

int cmd_sweep(const ScenarioConfig& config, const SweepSpec& sweep, std::ostream& out, std::ostream& err);

/// which: "xi", "G" or "R".
int cmd_estimate_constant(const ScenarioConfig& config, const std::string& which, std::ostream& out,
                          std::ostream& err);

/// Human-readable regime line, e.g. "Converges case (1): b=1 > b2=0.5".
std::string regime_line(int n, const Parameters& params, const ConstantsReport& report);

}  // namespace chemo
