#pragma once

#include <functional>

#include "sfwm/chebyshev.hpp"
#include "sfwm/fiber.hpp"
#include "sfwm/modes.hpp"

namespace sfwm {

/// Propagation constant (1/m) of a guided mode: n_eff omega / c, plus Delta-n omega / c on the slow axis.
/// Throws ModeCutoffError if the mode is not guided, RangeError outside the material range.
double beta(const FiberSpec& fiber, const ModeId& mode, double omega);

/// Bulk-material propagation constant n(omega) omega / c.
double material_beta(const SellmeierModel& model, double omega);

/// Central finite difference of order 1 or 2 with absolute step h.
double central_difference(const std::function<double(double)>& fn, double x, double h, int order);

inline constexpr double kDefaultRelativeStep = 1e-3;

/// d^order beta / d omega^order (order 1: s/m, order 2: s^2/m) by central differences with h = rel_step * omega.
/// Throws RangeError when omega +- h leaves the material range.
double beta_derivative(const FiberSpec& fiber, const ModeId& mode, double omega, int order,
                       double rel_step = kDefaultRelativeStep);

/// Fast n_eff(omega) for one spatial mode over a wavelength band, built from a Chebyshev
/// interpolant of the universal LP curve b(V). Evaluation outside the band throws RangeError.
class ModeDispersion {
 public:
  ModeDispersion() = default;
  ModeDispersion(const FiberSpec& fiber, const ModeId& mode, double lambda_min_um, double lambda_max_um,
                 int nodes = 48);

  double n_eff(double omega) const;
  double beta(double omega) const;  // uses the mode's axis
  double beta(double omega, Axis axis) const;

  const ModeId& mode() const { return mode_; }
  double omega_min() const { return omega_min_; }
  double omega_max() const { return omega_max_; }

 private:
  FiberSpec fiber_;
  ModeId mode_;
  double omega_min_ = 0.0;
  double omega_max_ = 0.0;
  ChebyshevInterpolant<double> b_of_v_;
};

}  // namespace sfwm
