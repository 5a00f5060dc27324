#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfwm/dispersion.hpp"
#include "sfwm/fiber.hpp"

namespace sfwm {

/// Mode assignment for the four SFWM fields. Pumps ride the slow axis, daughters the fast axis.
struct ProcessSpec {
  std::string label;
  ModeId pump1 = ModeId::lp(0, 1, Orientation::even, Axis::slow);
  ModeId pump2 = ModeId::lp(0, 1, Orientation::even, Axis::slow);
  ModeId signal = ModeId::lp(0, 1, Orientation::even, Axis::fast);
  ModeId idler = ModeId::lp(0, 1, Orientation::even, Axis::fast);

  /// Assigns the cross-polarized axes to the given spatial modes.
  static ProcessSpec cross_polarized(std::string label, ModeId pump1, ModeId pump2, ModeId signal, ModeId idler);

  /// Throws std::invalid_argument on wrong axes or a selection-rule-forbidden quadruple.
  void validate() const;
};

/// all-LP01 cross-polarized process.
ProcessSpec fundamental_process(std::string label = "process1");
/// (LP11e, LP01 | LP11e, LP01) cross-polarized process.
ProcessSpec higher_order_process(std::string label = "process2");

struct ScanWindow {
  double signal_min_nm = 750.0;
  double signal_max_nm = 1000.0;
  int samples = 1000;
};

struct PhaseMatchSolution {
  ProcessSpec process;
  double pump_nm = 0.0;
  double signal_nm = 0.0;
  double idler_nm = 0.0;
  double residual_per_m = 0.0;  // direct-solver Delta-beta at the root
  double birefringence = 0.0;
  bool signal_is_nir = true;
};

/// Delta-beta = beta_p1 + beta_p2 - beta_s - beta_i (1/m), idler frequency implied by energy
/// conservation. Uses the direct mode solver. Throws DomainError if omega_i <= 0,
/// ModeCutoffError if any field is unguided.
double delta_beta(const FiberSpec& fiber, const ProcessSpec& proc, double omega_p1, double omega_p2, double omega_s);

/// Tabulated Delta-beta for one process over a pump band and signal window. The tables do not
/// depend on birefringence, which enters additively as Delta-n (omega_p1 + omega_p2) / c.
class PhaseMismatch {
 public:
  PhaseMismatch(const FiberSpec& fiber, const ProcessSpec& proc, double pump_nm, const ScanWindow& window = {},
                double pump_half_band_nm = 40.0);

  double operator()(double omega_p1, double omega_p2, double omega_s) const;
  /// Degenerate pump at the nominal wavelength.
  double at_signal(double omega_s) const;

  void set_birefringence(double dn) { birefringence_ = dn; }
  double birefringence() const { return birefringence_; }

  double pump_omega() const { return pump_omega_; }
  /// Signal band actually scanned (wavelengths where the signal mode is guided), nm.
  double signal_min_nm() const { return signal_min_nm_; }
  double signal_max_nm() const { return signal_max_nm_; }

  /// Pump-sum part beta_p1(omega_p1) + beta_p2(omega_p2) without birefringence.
  double pump_part(double omega_p1, double omega_p2) const;
  /// Daughter part beta_s(omega_s) + beta_i(omega_i).
  double daughter_part(double omega_s, double omega_i) const;

  /// Signal roots of Delta-beta(omega_s) = 0 for a degenerate pump, bracketed on the window.
  std::vector<double> signal_roots(int samples) const;

 private:
  double pump_omega_;
  double birefringence_;
  double signal_min_nm_;
  double signal_max_nm_;
  ModeDispersion pump1_, pump2_, signal_, idler_;
};

/// All degenerate-pump roots in the signal window, refined to |Delta-beta| < 1e-3 1/m.
std::vector<PhaseMatchSolution> solve_phase_matching(const FiberSpec& fiber, const ProcessSpec& proc, double pump_nm,
                                                     const ScanWindow& window = {});

struct CalibrationResult {
  double birefringence = 0.0;
  double residual_nm = 0.0;
  bool degenerate = false;
  std::optional<PhaseMatchSolution> solution;
};

inline constexpr double kCalibrationMinDeltaN = 1e-4;
inline constexpr double kCalibrationMaxDeltaN = 1e-3;

/// Fits Delta-n in [1e-4, 1e-3] so the solved signal wavelength hits the target.
/// Throws DomainError if the target violates energy conservation by more than 0.5 %,
/// CalibrationError if no Delta-n gets within 25 nm.
CalibrationResult calibrate_birefringence(const FiberSpec& fiber, double target_signal_nm, double target_idler_nm,
                                          const ProcessSpec& proc, double pump_nm, const ScanWindow& window = {});

struct EnergyCheck {
  double mismatch = 0.0;  // relative
  bool within_bandwidth = false;
};

/// mismatch = |2/lp - 1/ls - 1/li| * lp/2; within_bandwidth when mismatch <= bandwidth/lp.
EnergyCheck check_energy_conservation(double pump_nm, double signal_nm, double idler_nm, double pump_bandwidth_nm);

}  // namespace sfwm
