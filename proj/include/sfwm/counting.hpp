#pragma once

#include <limits>
#include <string>
#include <vector>

namespace sfwm {

struct ChainComponent {
  std::string name;
  double transmittance = 1.0;
};

struct DetectionChain {
  std::string label = "NIR";
  std::vector<ChainComponent> components;
  double detector_efficiency = 1.0;
  double dark_count_rate_hz = 0.0;
  double background_rate_hz = 0.0;  // uncorrelated photons reaching the detector
  double jitter_sigma_ps = 0.0;
  double dead_time_ps = 0.0;  // 0 disables

  void validate() const;
  double total_efficiency() const;
  /// Uncorrelated (CW) detection rate: background plus dark counts.
  double uncorrelated_rate() const { return background_rate_hz + dark_count_rate_hz; }
};

/// 0.7 (CWDM) x 0.75 (free-space coupling) x 0.45 (APD), dark 250 Hz, jitter 350 ps.
DetectionChain default_nir_chain();
/// 0.9 (CWDM) x 0.75 (free-space coupling) x 0.9 (SNSPD), dark 100 Hz, jitter 50 ps.
DetectionChain default_telecom_chain();

enum class PairStatistics { poisson, thermal };

struct SourceModel {
  double pair_coefficient = 0.0;  // mean pairs per pulse per mW^2
  PairStatistics statistics = PairStatistics::poisson;
  double rep_rate_hz = 80e6;
  double max_power_mw = std::numeric_limits<double>::infinity();

  void validate() const;
  double mean_pairs(double power_mw) const { return pair_coefficient * power_mw * power_mw; }
  /// E[n(n-1)] / mu^2 for the per-pulse pair-number law.
  double multipair_factor() const { return statistics == PairStatistics::thermal ? 2.0 : 1.0; }
};

struct CountingResult {
  double power_mw = 0.0;
  double mean_pairs = 0.0;
  double singles_s = 0.0;
  double singles_i = 0.0;
  double coincidences = 0.0;  // true pair coincidences, R mu eta_s eta_i
  double accidentals = 0.0;   // expected rate in one window centred on a side peak
  double zero_delay = 0.0;    // expected rate in the window at zero delay (pairs + accidentals)
  double g2 = std::numeric_limits<double>::quiet_NaN();
  double car = std::numeric_limits<double>::quiet_NaN();
  bool g2_defined = false;
  double heralding_s_given_i = 0.0;
  double heralding_i_given_s = 0.0;
  /// Nc/Na as measured from a coincidence histogram: zero_delay / accidentals.
  double histogram_g2() const { return accidentals > 0.0 ? zero_delay / accidentals : std::numeric_limits<double>::quiet_NaN(); }
};

/// Fraction of a Gaussian delay distribution of std sigma_ps falling inside +-window/2.
double window_capture_fraction(double sigma_ps, double window_ns);

/// Expected rates for mean pair number mu = kappa P^2 per pulse. Pulse-synchronous photons
/// pile up in the periodic peaks; uncorrelated photons contribute rate_s * rate_i * window to
/// every window.
CountingResult analytic_rates(const SourceModel& src, const DetectionChain& chain_s, const DetectionChain& chain_i,
                              double power_mw, double window_ns = 2.0);

/// Pair rate at the source: coincidences / (eta_s eta_i). Throws DomainError on zero efficiency.
double backout_source_rate(double coincidences_hz, const DetectionChain& chain_s, const DetectionChain& chain_i);

/// S_s S_i / R: accidental rate when every single is pulse-synchronous.
double pulsed_accidental_rate(double singles_s, double singles_i, double rep_rate_hz);
/// C / (S_s S_i / R).
double g2_from_rates(double coincidences, double singles_s, double singles_i, double rep_rate_hz);

struct MeasuredRates {
  double power_mw = 0.0;
  double singles_s = 0.0;
  double singles_i = 0.0;
  double coincidences = 0.0;
};

struct SourceFit {
  SourceModel source;
  double source_pair_rate = 0.0;  // backed-out pairs per second at the fit power
  double background_s = 0.0;      // clamped at zero
  double background_i = 0.0;
  double raw_background_s = 0.0;  // measured single minus pair singles minus darks, may be negative
  double raw_background_i = 0.0;
  std::vector<std::string> warnings;
};

/// kappa from the measured coincidences, backgrounds from the excess singles.
SourceFit fit_source(const MeasuredRates& measured, const DetectionChain& chain_s, const DetectionChain& chain_i,
                     PairStatistics stats = PairStatistics::poisson, double rep_rate_hz = 80e6);

/// Copy of the chains with the fitted backgrounds applied.
DetectionChain with_background(DetectionChain chain, double background_hz);

struct PowerSweep {
  std::vector<CountingResult> rows;
  std::vector<std::string> warnings;
  bool coincidences_increasing = true;
  bool g2_decreasing = true;
};

/// Powers must be ascending; powers above the source's max_power_mw are dropped with a warning.
PowerSweep power_sweep(const SourceModel& src, const DetectionChain& chain_s, const DetectionChain& chain_i,
                       const std::vector<double>& powers_mw, double window_ns = 2.0);

struct Uncertainties {
  double singles_s = 0.0;
  double singles_i = 0.0;
  double coincidences = 0.0;
  double accidentals = 0.0;
  double g2 = 0.0;
  double car = 0.0;
  double heralding_s_given_i = 0.0;
  double heralding_i_given_s = 0.0;
};

/// Poisson standard deviations (rates, Hz) for counts accumulated over integration_s, first
/// order through the ratios.
Uncertainties poisson_uncertainties(const CountingResult& r, double integration_s);

/// sigma of a / b for independent Poisson counts a and b.
double ratio_sigma(double a, double b);

}  // namespace sfwm
