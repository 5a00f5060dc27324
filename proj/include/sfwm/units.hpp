#pragma once

#include <numbers>

namespace sfwm {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

/// Angular frequency (rad/s) of a vacuum wavelength given in micrometres.
inline constexpr double omega_from_um(double lambda_um) { return 2.0 * kPi * kSpeedOfLight / (lambda_um * 1e-6); }
inline constexpr double omega_from_nm(double lambda_nm) { return 2.0 * kPi * kSpeedOfLight / (lambda_nm * 1e-9); }

inline constexpr double um_from_omega(double omega) { return 2.0 * kPi * kSpeedOfLight / omega * 1e6; }
inline constexpr double nm_from_omega(double omega) { return 2.0 * kPi * kSpeedOfLight / omega * 1e9; }

/// Converts a wavelength interval of width d_lambda centred on lambda into angular frequency width.
inline constexpr double omega_width_from_nm(double lambda_nm, double d_lambda_nm) {
  return 2.0 * kPi * kSpeedOfLight * (d_lambda_nm * 1e-9) / ((lambda_nm * 1e-9) * (lambda_nm * 1e-9));
}

}  // namespace sfwm
