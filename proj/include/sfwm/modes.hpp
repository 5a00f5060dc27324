#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sfwm/fiber.hpp"

namespace sfwm {

/// Polar quadrature used for mode normalization and overlap integrals.
struct PolarGrid {
  int radial_points = 400;
  int angular_points = 256;
  double extent_in_core_radii = 4.0;
};

/// A guided LP mode at one wavelength. `norm` makes the profile unit-normalized
/// on the PolarGrid it was solved with.
struct ModeSolution {
  ModeId mode;
  double lambda_um = 0.0;
  double omega = 0.0;
  double n_eff = 0.0;
  double u = 0.0;
  double w = 0.0;
  double v = 0.0;
  double core_radius_um = 0.0;
  double norm = 0.0;  // 1/um
  PolarGrid grid;
};

/// V = 2 pi a NA / lambda.
double v_number(const FiberSpec& fiber, double lambda_um);

/// Pole-free form of the LP eigenvalue equation; zero exactly at guided u for order l.
double lp_characteristic(int l, double u, double v);

/// Roots u of order l in (0, V), ascending (m = 1, 2, ...). Bracketing over 200 samples + bisection.
std::vector<double> lp_roots(int l, double v);

/// Normalized propagation constant b = w^2 / V^2 for LP_{l,m}; empty if not guided at V.
std::optional<double> lp_b(int l, int m, double v);

/// All guided LP modes (even and odd orientations listed separately), by descending n_eff.
std::vector<ModeSolution> solve_modes(const FiberSpec& fiber, double lambda_um, const PolarGrid& grid = {});

/// One mode; throws ModeCutoffError when it is not guided.
ModeSolution solve_mode(const FiberSpec& fiber, const ModeId& mode, double lambda_um, const PolarGrid& grid = {});

/// Unnormalized radial factor: J_l(u r/a) inside the core, J_l(u)/K_l(w) K_l(w r/a) outside.
double radial_profile(const ModeSolution& sol, double r_um);

/// cos(l theta) for even orientation, sin(l theta) for odd.
double angular_profile(const ModeId& mode, double theta);

/// Unit-normalized transverse field F(r, theta), units 1/um.
double mode_profile(const ModeSolution& sol, double r_um, double theta);

/// Integral of |F|^2 over the solution's quadrature grid.
double profile_norm_on_grid(const ModeSolution& sol);

/// True iff the angular integral of the four trig factors is nonzero.
bool azimuthal_selection(const ModeId& p1, const ModeId& p2, const ModeId& s, const ModeId& i);

struct OverlapResult {
  double value = 0.0;  // 1/um^2
  bool forbidden = false;
};

/// Four-field transverse overlap on a polar grid (the first solution's grid).
OverlapResult overlap_integral(const ModeSolution& p1, const ModeSolution& p2, const ModeSolution& s,
                               const ModeSolution& i);

}  // namespace sfwm
