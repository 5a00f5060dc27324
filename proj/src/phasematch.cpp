#include "sfwm/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfwm/errors.hpp"
#include "sfwm/units.hpp"

namespace sfwm {

ProcessSpec ProcessSpec::cross_polarized(std::string label, ModeId pump1, ModeId pump2, ModeId signal, ModeId idler) {
  return ProcessSpec{std::move(label), pump1.on(Axis::slow), pump2.on(Axis::slow), signal.on(Axis::fast),
                     idler.on(Axis::fast)};
}

void ProcessSpec::validate() const {
  if (pump1.axis != Axis::slow || pump2.axis != Axis::slow)
    throw std::invalid_argument("process '" + label + "': pump modes must be on the slow axis");
  if (signal.axis != Axis::fast || idler.axis != Axis::fast)
    throw std::invalid_argument("process '" + label + "': daughter modes must be on the fast axis");
  if (!azimuthal_selection(pump1, pump2, signal, idler))
    throw std::invalid_argument("process '" + label + "': mode quadruple " + mode_label(pump1) + "," +
                                mode_label(pump2) + "," + mode_label(signal) + "," + mode_label(idler) +
                                " is forbidden by the azimuthal selection rule");
}

ProcessSpec fundamental_process(std::string label) {
  const auto lp01 = ModeId::lp(0, 1);
  return ProcessSpec::cross_polarized(std::move(label), lp01, lp01, lp01, lp01);
}

ProcessSpec higher_order_process(std::string label) {
  const auto lp01 = ModeId::lp(0, 1);
  const auto lp11 = ModeId::lp(1, 1, Orientation::even);
  return ProcessSpec::cross_polarized(std::move(label), lp11, lp01, lp11, lp01);
}

double delta_beta(const FiberSpec& fiber, const ProcessSpec& proc, double omega_p1, double omega_p2,
                  double omega_s) {
  const double omega_i = omega_p1 + omega_p2 - omega_s;
  if (!(omega_i > 0.0)) throw DomainError("delta_beta: idler frequency must be positive");
  return beta(fiber, proc.pump1, omega_p1) + beta(fiber, proc.pump2, omega_p2) - beta(fiber, proc.signal, omega_s) -
         beta(fiber, proc.idler, omega_i);
}

namespace {

// Longest wavelength in [lo, hi] (nm) at which the mode is still guided; guidance is monotone in V.
double guided_upper_nm(const FiberSpec& fiber, const ModeId& mode, double lo_nm, double hi_nm) {
  auto guided = [&](double nm) { return lp_b(mode.l, mode.m, v_number(fiber, nm * 1e-3)).has_value(); };
  if (guided(hi_nm)) return hi_nm;
  if (!guided(lo_nm))
    throw ModeCutoffError(mode_label(mode) + " is not guided anywhere in [" + std::to_string(lo_nm) + ", " +
                          std::to_string(hi_nm) + "] nm");
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo_nm + hi_nm);
    (guided(mid) ? lo_nm : hi_nm) = mid;
  }
  return lo_nm * (1.0 - 1e-6);
}

ModeDispersion guided_table(const FiberSpec& fiber, const ModeId& mode, double lo_nm, double hi_nm) {
  const double upper = guided_upper_nm(fiber, mode, lo_nm, hi_nm);
  return ModeDispersion(fiber, mode, lo_nm * 1e-3, upper * 1e-3);
}

}  // namespace

PhaseMismatch::PhaseMismatch(const FiberSpec& fiber, const ProcessSpec& proc, double pump_nm,
                             const ScanWindow& window, double pump_half_band_nm)
    : pump_omega_(omega_from_nm(pump_nm)), birefringence_(fiber.birefringence) {
  if (!(window.signal_max_nm > window.signal_min_nm)) throw std::invalid_argument("scan window is empty");
  const double p_lo = pump_nm - pump_half_band_nm;
  const double p_hi = pump_nm + pump_half_band_nm;
  if (!lp_b(proc.pump1.l, proc.pump1.m, v_number(fiber, pump_nm * 1e-3)) ||
      !lp_b(proc.pump2.l, proc.pump2.m, v_number(fiber, pump_nm * 1e-3)))
    throw ModeCutoffError("process '" + proc.label + "': pump mode not guided at " + std::to_string(pump_nm) + " nm");
  pump1_ = guided_table(fiber, proc.pump1, p_lo, p_hi);
  pump2_ = guided_table(fiber, proc.pump2, p_lo, p_hi);
  signal_min_nm_ = window.signal_min_nm;
  signal_max_nm_ = guided_upper_nm(fiber, proc.signal, window.signal_min_nm, window.signal_max_nm);
  // small pad so roots refined at the window edge stay inside the table
  signal_ = ModeDispersion(fiber, proc.signal, signal_min_nm_ * 0.999e-3, signal_max_nm_ * 1e-3);

  const double op_min = std::max(pump1_.omega_min(), pump2_.omega_min());
  const double op_max = std::min(pump1_.omega_max(), pump2_.omega_max());
  const double oi_min = 2.0 * op_min - signal_.omega_max();
  const double oi_max = 2.0 * op_max - omega_from_nm(signal_max_nm_);
  if (!(oi_min > 0.0)) throw DomainError("phase matching: implied idler frequency is not positive");
  const double i_lo = std::max(nm_from_omega(oi_max), fiber.cladding.lambda_min_um * 1e3);
  const double i_hi = std::min(nm_from_omega(oi_min), fiber.cladding.lambda_max_um * 1e3);
  idler_ = guided_table(fiber, proc.idler, i_lo, i_hi);
}

double PhaseMismatch::pump_part(double omega_p1, double omega_p2) const {
  return pump1_.beta(omega_p1, Axis::fast) + pump2_.beta(omega_p2, Axis::fast);
}

double PhaseMismatch::daughter_part(double omega_s, double omega_i) const {
  return signal_.beta(omega_s, Axis::fast) + idler_.beta(omega_i, Axis::fast);
}

double PhaseMismatch::operator()(double omega_p1, double omega_p2, double omega_s) const {
  const double omega_i = omega_p1 + omega_p2 - omega_s;
  if (!(omega_i > 0.0)) throw DomainError("delta_beta: idler frequency must be positive");
  return pump_part(omega_p1, omega_p2) + birefringence_ * (omega_p1 + omega_p2) / kSpeedOfLight -
         daughter_part(omega_s, omega_i);
}

double PhaseMismatch::at_signal(double omega_s) const { return (*this)(pump_omega_, pump_omega_, omega_s); }

std::vector<double> PhaseMismatch::signal_roots(int samples) const {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto eval = [&](double omega) {
    try {
      return at_signal(omega);
    } catch (const RangeError&) {
      return nan;
    }
  };
  std::vector<double> roots;
  const int n = std::max(samples, 2);
  double lambda_prev = signal_min_nm_;
  double f_prev = eval(omega_from_nm(lambda_prev));
  for (int k = 1; k < n; ++k) {
    const double lambda = signal_min_nm_ + (signal_max_nm_ - signal_min_nm_) * k / (n - 1);
    const double f = eval(omega_from_nm(lambda));
    if (std::isfinite(f) && std::isfinite(f_prev) && (f == 0.0 || (f < 0.0) != (f_prev < 0.0))) {
      double hi = omega_from_nm(lambda_prev);  // shorter-wavelength side is higher frequency
      double lo = omega_from_nm(lambda);
      double f_lo = f;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = at_signal(mid);
        if (f_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    lambda_prev = lambda;
    f_prev = f;
  }
  return roots;
}

std::vector<PhaseMatchSolution> solve_phase_matching(const FiberSpec& fiber, const ProcessSpec& proc, double pump_nm,
                                                     const ScanWindow& window) {
  proc.validate();
  const PhaseMismatch mismatch(fiber, proc, pump_nm, window);
  const double omega_p = mismatch.pump_omega();
  std::vector<PhaseMatchSolution> out;
  for (double omega_s : mismatch.signal_roots(window.samples)) {
    // Polish against the direct solver with the tabulated slope.
    const double h = omega_s * 1e-6;
    const double slope = (mismatch.at_signal(omega_s + h) - mismatch.at_signal(omega_s - h)) / (2.0 * h);
    double residual = delta_beta(fiber, proc, omega_p, omega_p, omega_s);
    for (int iter = 0; iter < 4 && std::abs(residual) >= 1e-4 && slope != 0.0; ++iter) {
      omega_s -= residual / slope;
      residual = delta_beta(fiber, proc, omega_p, omega_p, omega_s);
    }
    PhaseMatchSolution sol;
    sol.process = proc;
    sol.pump_nm = pump_nm;
    sol.signal_nm = nm_from_omega(omega_s);
    sol.idler_nm = nm_from_omega(2.0 * omega_p - omega_s);
    sol.residual_per_m = residual;
    sol.birefringence = fiber.birefringence;
    sol.signal_is_nir = sol.signal_nm < sol.idler_nm;
    out.push_back(sol);
  }
  return out;
}

EnergyCheck check_energy_conservation(double pump_nm, double signal_nm, double idler_nm, double pump_bandwidth_nm) {
  if (!(pump_nm > 0.0 && signal_nm > 0.0 && idler_nm > 0.0))
    throw DomainError("energy check: wavelengths must be positive");
  EnergyCheck out;
  out.mismatch = std::abs(2.0 / pump_nm - 1.0 / signal_nm - 1.0 / idler_nm) * (pump_nm / 2.0);
  out.within_bandwidth = out.mismatch <= pump_bandwidth_nm / pump_nm;
  return out;
}

CalibrationResult calibrate_birefringence(const FiberSpec& fiber, double target_signal_nm, double target_idler_nm,
                                          const ProcessSpec& proc, double pump_nm, const ScanWindow& window) {
  proc.validate();
  const auto energy = check_energy_conservation(pump_nm, target_signal_nm, target_idler_nm, 0.0);
  if (energy.mismatch > 0.005)
    throw DomainError("calibration target violates energy conservation (mismatch " +
                      std::to_string(energy.mismatch * 100.0) + " %)");

  CalibrationResult result;
  if (std::abs(target_signal_nm - pump_nm) / pump_nm < 1e-3) {
    result.birefringence = kCalibrationMinDeltaN;
    result.degenerate = true;
    return result;
  }

  PhaseMismatch mismatch(fiber, proc, pump_nm, window);
  // Signed distance from the target to the nearest signal root; NaN when there is none.
  auto error_at = [&](double dn) {
    mismatch.set_birefringence(dn);
    double best = std::numeric_limits<double>::quiet_NaN();
    for (double omega : mismatch.signal_roots(window.samples)) {
      const double err = nm_from_omega(omega) - target_signal_nm;
      if (!std::isfinite(best) || std::abs(err) < std::abs(best)) best = err;
    }
    return best;
  };

  constexpr int kSamples = 37;
  std::vector<double> dns(kSamples), errs(kSamples);
  for (int k = 0; k < kSamples; ++k) {
    dns[k] = kCalibrationMinDeltaN + (kCalibrationMaxDeltaN - kCalibrationMinDeltaN) * k / (kSamples - 1);
    errs[k] = error_at(dns[k]);
  }

  double best_dn = kCalibrationMinDeltaN;
  double best_err = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kSamples; ++k)
    if (std::isfinite(errs[k]) && std::abs(errs[k]) < std::abs(best_err)) {
      best_err = errs[k];
      best_dn = dns[k];
    }

  for (int k = 0; k + 1 < kSamples; ++k) {
    if (!std::isfinite(errs[k]) || !std::isfinite(errs[k + 1]) || (errs[k] < 0.0) == (errs[k + 1] < 0.0)) continue;
    double lo = dns[k], hi = dns[k + 1], e_lo = errs[k];
    for (int iter = 0; iter < 80; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const double e_mid = error_at(mid);
      if (!std::isfinite(e_mid)) break;
      if (std::abs(e_mid) < std::abs(best_err)) {
        best_err = e_mid;
        best_dn = mid;
      }
      if ((e_mid < 0.0) == (e_lo < 0.0)) {
        lo = mid;
        e_lo = e_mid;
      } else {
        hi = mid;
      }
    }
  }

  if (!(std::abs(best_err) <= 25.0))
    throw CalibrationError("calibration failed: no Delta-n in [1e-4, 1e-3] reproduces the " +
                               std::to_string(target_signal_nm) + " nm target within 25 nm",
                           best_dn, std::abs(best_err));

  result.birefringence = best_dn;
  result.residual_nm = std::abs(best_err);
  FiberSpec calibrated = fiber;
  calibrated.birefringence = best_dn;
  for (const auto& sol : solve_phase_matching(calibrated, proc, pump_nm, window))
    if (!result.solution || std::abs(sol.signal_nm - target_signal_nm) < std::abs(result.solution->signal_nm - target_signal_nm))
      result.solution = sol;
  return result;
}

}  // namespace sfwm
