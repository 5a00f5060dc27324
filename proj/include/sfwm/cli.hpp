#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sfwm/config.hpp"

namespace sfwm {

struct CommandResult {
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

/// Birefringence from the config, calibrating when a target is given.
FiberSpec resolve_fiber(const RunConfig& cfg, std::optional<CalibrationResult>* calibration = nullptr);

struct ResolvedSource {
  SourceModel source;
  DetectionChain chain_s;
  DetectionChain chain_i;
  std::optional<SourceFit> fit;
};

/// kappa and backgrounds fitted to the measured rates, or kappa as given with the configured chains.
ResolvedSource resolve_source(const RunConfig& cfg, const ProcessConfig& pc);

CommandResult cmd_modes(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_phasematch(const RunConfig& cfg, std::ostream& log);
/// Empty `process` selects every configured process.
CommandResult cmd_jsi(const RunConfig& cfg, const std::optional<std::string>& process, std::ostream& log);
CommandResult cmd_rates(const RunConfig& cfg, const std::optional<std::string>& process, std::ostream& log);
/// Power defaults to the process's measured power, else the pump power.
CommandResult cmd_mc(const RunConfig& cfg, const std::optional<std::string>& process,
                     const std::optional<double>& power_mw, std::ostream& log);

/// Exit codes: 0 success, 1 computation failure, 2 usage or config error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfwm
