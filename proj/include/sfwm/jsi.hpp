#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfwm/phasematch.hpp"

namespace sfwm {

/// Pulsed pump. The spectral phase is chirp * (omega - omega_0)^2 * tau0^2 with tau0 the
/// transform-limited intensity FWHM implied by the bandwidth.
struct PumpSpec {
  double center_nm = 1064.0;
  double bandwidth_fwhm_nm = 6.0;  // intensity spectrum
  double pulse_duration_fs = 200.0;
  double rep_rate_hz = 80e6;
  double avg_power_mw = 25.0;
  double chirp = 0.0;

  void validate() const;
  double omega0() const;
  /// Standard deviation (rad/s) of the intensity spectrum in angular frequency.
  double sigma() const;
  /// Transform-limited intensity FWHM, seconds.
  double tau0() const;
  /// Set when pulse_duration_fs is shorter than the transform limit (a flag, not an error).
  bool below_transform_limit() const { return pulse_duration_fs * 1e-15 < tau0(); }
};

/// Spectral amplitude of one pump photon, unit modulus at the centre frequency.
std::complex<double> pump_envelope(const PumpSpec& pump, double omega);

/// sinc(x) exp(i x) with sinc(x) = sin(x)/x.
std::complex<double> sinc_exp(double x);

enum class PumpModel { fast, exact };

struct JsiGridSpec {
  int signal_points = 512;
  int idler_points = 512;
  /// Half widths in rad/s; zero selects automatic extents (pump_sigmas two-photon envelope
  /// widths along the phase-matching ridge plus pm_bandwidths ridge FWHMs across it).
  double signal_half_width = 0.0;
  double idler_half_width = 0.0;
  double pump_sigmas = 4.0;
  double pm_bandwidths = 4.0;
  PumpModel model = PumpModel::fast;
  int quadrature_points = 401;  // exact model, over +-4 sigma of the pump-split variable
  /// Grid centre; defaults to the first phase-matched solution.
  std::optional<double> center_signal_nm;
  std::optional<double> center_idler_nm;
};

struct JsiGrid {
  Eigen::VectorXd omega_s;     // rows
  Eigen::VectorXd omega_i;     // columns
  Eigen::MatrixXcd amplitude;  // N_s x N_i
  Eigen::MatrixXd intensity;   // |amplitude|^2
  bool max_normalized = false;
  double raw_peak_intensity = 0.0;
  bool brackets_solution = true;  // false: grid does not contain the phase-matched point (warning)
  double center_signal_nm = 0.0;
  double center_idler_nm = 0.0;

  double d_omega_s() const { return omega_s.size() > 1 ? omega_s(1) - omega_s(0) : 0.0; }
  double d_omega_i() const { return omega_i.size() > 1 ? omega_i(1) - omega_i(0) : 0.0; }
};

/// Joint spectral amplitude A(omega_s + omega_i) * sinc(dB L/2) exp(i dB L/2), max-normalized.
JsiGrid compute_jsa(const FiberSpec& fiber, const PumpSpec& pump, const ProcessSpec& proc, const JsiGridSpec& spec = {});

/// Divides the amplitude by sqrt(max intensity). Leaves all-zero grids untouched.
void max_normalize(JsiGrid& grid);

enum class Daughter { signal, idler };

struct MarginalSpectrum {
  Eigen::VectorXd omega;
  Eigen::VectorXd wavelength_nm;
  Eigen::VectorXd density;  // intensity integrated over the other frequency
};

MarginalSpectrum marginal_spectrum(const JsiGrid& grid, Daughter which);

/// Intensity along the idler axis at the signal row nearest the seed wavelength, as a
/// seeded (stimulated) scan samples the JSI. Throws RangeError if the seed is off the grid.
Eigen::VectorXd seeded_idler_spectrum(const JsiGrid& grid, double seed_signal_nm);

/// Total integral of the intensity over the grid (sum times cell area).
double total_intensity(const JsiGrid& grid);

struct SumFrequencyProfile {
  Eigen::VectorXd sum_omega;
  Eigen::VectorXd density;
};

/// Intensity integrated along constant omega_s + omega_i lines, binned in the sum frequency.
SumFrequencyProfile sum_frequency_profile(const JsiGrid& grid);

/// Full width at half maximum of a sampled curve, linear interpolation between samples.
double fwhm(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Intensity sampled (bilinearly) along omega_s + omega_i = sum_omega across the grid.
Eigen::VectorXd anti_diagonal_cut(const JsiGrid& grid, double sum_omega, int samples);

/// Strict local maxima at or above rel_threshold times the curve's maximum.
int count_local_maxima(const Eigen::VectorXd& curve, double rel_threshold = 0.1);

/// Largest count_local_maxima over `cuts` anti-diagonal cuts spread across +-1 two-photon
/// envelope width of the grid centre.
int anti_diagonal_peak_count(const JsiGrid& grid, const PumpSpec& pump, int cuts = 9, int samples = 1024,
                             double rel_threshold = 0.1);

/// FWHM in signal wavelength (nm) of sinc^2(dB L/2) along the energy-conserving line through
/// the phase-matched solution (degenerate pump). Uses the first solution when none is given.
double phase_matching_bandwidth(const FiberSpec& fiber, const ProcessSpec& proc, double pump_nm);
double phase_matching_bandwidth(const FiberSpec& fiber, const PhaseMatchSolution& solution);

struct SchmidtResult {
  double schmidt_number = 1.0;
  double purity = 1.0;
  std::vector<double> weights;  // first (up to) 8 normalized squared singular values
};

/// SVD of the amplitude matrix; throws DomainError for an all-zero grid.
SchmidtResult schmidt_diagnostics(const Eigen::MatrixXcd& amplitude);
inline SchmidtResult schmidt_diagnostics(const JsiGrid& grid) { return schmidt_diagnostics(grid.amplitude); }

/// CSV triples (omega_s, omega_i, intensity), preceded by `header` comment lines.
void write_jsi_csv(const JsiGrid& grid, const std::string& path, const std::string& header);

/// Little-endian binary: "SFWMJSI1", u64 config hash, u64 N_s, u64 N_i, N_s doubles omega_s,
/// N_i doubles omega_i, N_s*N_i doubles intensity (row-major, signal index slowest).
void write_jsi_binary(const JsiGrid& grid, const std::string& path, std::uint64_t config_hash);

struct JsiBinary {
  std::uint64_t config_hash = 0;
  Eigen::VectorXd omega_s;
  Eigen::VectorXd omega_i;
  Eigen::MatrixXd intensity;
};
JsiBinary read_jsi_binary(const std::string& path);

/// Two-column CSV (wavelength_nm, density).
void write_marginal_csv(const MarginalSpectrum& marginal, const std::string& path, const std::string& header);

}  // namespace sfwm
