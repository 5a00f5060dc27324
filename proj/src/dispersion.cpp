#include "sfwm/dispersion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sfwm/errors.hpp"
#include "sfwm/units.hpp"

namespace sfwm {

double beta(const FiberSpec& fiber, const ModeId& mode, double omega) {
  const double lambda_um = um_from_omega(omega);
  const ModeSolution sol = solve_mode(fiber, mode, lambda_um);
  const double n = sol.n_eff + (mode.axis == Axis::slow ? fiber.birefringence : 0.0);
  return n * omega / kSpeedOfLight;
}

double material_beta(const SellmeierModel& model, double omega) {
  return refractive_index(model, um_from_omega(omega)) * omega / kSpeedOfLight;
}

double central_difference(const std::function<double(double)>& fn, double x, double h, int order) {
  if (!(h > 0.0)) throw std::invalid_argument("central_difference: step must be > 0");
  switch (order) {
    case 1:
      return (fn(x + h) - fn(x - h)) / (2.0 * h);
    case 2:
      return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h);
    default:
      throw std::invalid_argument("central_difference: order must be 1 or 2");
  }
}

double beta_derivative(const FiberSpec& fiber, const ModeId& mode, double omega, int order, double rel_step) {
  const double h = rel_step * omega;
  const double lambda_lo = um_from_omega(omega + h);
  const double lambda_hi = um_from_omega(omega - h);
  if (!fiber.cladding.in_range(lambda_lo) || !fiber.cladding.in_range(lambda_hi))
    throw RangeError("beta_derivative: finite-difference stencil at " + std::to_string(um_from_omega(omega)) +
                     " um leaves the material range");
  return central_difference([&](double w) { return beta(fiber, mode, w); }, omega, h, order);
}

ModeDispersion::ModeDispersion(const FiberSpec& fiber, const ModeId& mode, double lambda_min_um,
                               double lambda_max_um, int nodes)
    : fiber_(fiber), mode_(mode) {
  if (!(lambda_max_um > lambda_min_um)) throw std::invalid_argument("ModeDispersion: empty wavelength band");
  if (!fiber.cladding.in_range(lambda_min_um) || !fiber.cladding.in_range(lambda_max_um))
    throw RangeError("ModeDispersion: band outside material range");
  omega_min_ = omega_from_um(lambda_max_um);
  omega_max_ = omega_from_um(lambda_min_um);
  const double v_lo = v_number(fiber, lambda_max_um);
  const double v_hi = v_number(fiber, lambda_min_um);
  if (!lp_b(mode.l, mode.m, v_lo))
    throw ModeCutoffError(mode_label(mode) + " is not guided at " + std::to_string(lambda_max_um * 1e3) + " nm");
  b_of_v_ = ChebyshevInterpolant<double>(
      [&](double v) {
        const auto b = lp_b(mode.l, mode.m, v);
        if (!b) throw ModeCutoffError(mode_label(mode) + " lost guidance inside the band");
        return *b;
      },
      v_lo, v_hi, nodes);
}

double ModeDispersion::n_eff(double omega) const {
  if (omega < omega_min_ * (1 - 1e-12) || omega > omega_max_ * (1 + 1e-12))
    throw RangeError("ModeDispersion: " + std::to_string(um_from_omega(omega)) + " um outside tabulated band");
  const double lambda_um = um_from_omega(omega);
  const double ncl = fiber_.cladding_index(lambda_um);
  const double b = b_of_v_(v_number(fiber_, lambda_um));
  return std::sqrt(ncl * ncl + fiber_.numerical_aperture * fiber_.numerical_aperture * b);
}

double ModeDispersion::beta(double omega) const { return beta(omega, mode_.axis); }

double ModeDispersion::beta(double omega, Axis axis) const {
  return (n_eff(omega) + (axis == Axis::slow ? fiber_.birefringence : 0.0)) * omega / kSpeedOfLight;
}

}  // namespace sfwm
