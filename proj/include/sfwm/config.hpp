#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfwm/counting.hpp"
#include "sfwm/fiber.hpp"
#include "sfwm/jsi.hpp"
#include "sfwm/phasematch.hpp"

namespace sfwm {

inline constexpr const char* kVersion = "0.1.0";

/// Config problem; the message names the source, line and field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalibrationTarget {
  double signal_nm = 830.0;
  double idler_nm = 1490.0;
  std::string process = "process1";
};

struct ProcessConfig {
  ProcessSpec spec;
  std::vector<std::string> mode_labels;  // pump1, pump2, signal, idler as written
  PairStatistics statistics = PairStatistics::poisson;
  double max_power_mw = std::numeric_limits<double>::infinity();
  std::optional<MeasuredRates> measured;     // fit kappa and backgrounds to these
  std::optional<double> pair_coefficient;    // or give kappa directly (pairs/pulse/mW^2)
};

struct CountingConfig {
  double window_ns = 2.0;
  std::int64_t bin_width_ps = 50;
  double span_ns = 70.0;
  std::vector<double> powers_mw{5.0, 10.0, 15.0, 20.0, 25.0};
  double duration_s = 60.0;
  double integration_s = 600.0;  // for the Poisson error bars of cmd_rates
  bool write_streams = false;
  std::string stream_format = "binary";  // binary | csv
};

struct RunConfig {
  FiberSpec fiber;
  std::optional<double> birefringence;
  std::optional<CalibrationTarget> calibrate = CalibrationTarget{};
  PumpSpec pump;
  std::vector<ProcessConfig> processes;
  DetectionChain chain_s = default_nir_chain();
  DetectionChain chain_i = default_telecom_chain();
  CountingConfig counting;
  JsiGridSpec jsi;
  std::vector<double> mode_wavelengths_nm{830.0, 850.0, 1064.0, 1430.0, 1490.0};
  ScanWindow scan;
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the lookup.
  const ProcessConfig& process(const std::string& label) const;
  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

/// Both measured processes with their quoted rates, the reference detection chains and a calibration to (830, 1490) nm.
RunConfig default_config();

RunConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical YAML of the effective configuration (round-trips through parse_config).
std::string to_yaml(const RunConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& data);
/// Hash of the canonical YAML (output_dir excluded), so CLI overrides are covered.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t h);
/// "# sfwm <version> config <hash>\n"
std::string output_header(const RunConfig& cfg);

}  // namespace sfwm
