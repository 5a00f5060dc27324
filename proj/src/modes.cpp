#include "sfwm/modes.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "sfwm/errors.hpp"
#include "sfwm/units.hpp"

namespace sfwm {
namespace {

constexpr int kBracketSamples = 200;

double bessel_j(int order, double x) {
  if (order < 0) return (order % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(double(-order), x);
  return std::cyl_bessel_j(double(order), x);
}

double bessel_k(int order, double x) { return std::cyl_bessel_k(double(std::abs(order)), x); }

double bisect_root(int l, double v, double lo, double hi) {
  double f_lo = lp_characteristic(l, lo, v);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = lp_characteristic(l, mid, v);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ModeSolution make_solution(const FiberSpec& fiber, const ModeId& mode, double lambda_um, double u, double v,
                           const PolarGrid& grid) {
  ModeSolution sol;
  sol.mode = mode;
  sol.lambda_um = lambda_um;
  sol.omega = omega_from_um(lambda_um);
  sol.v = v;
  sol.u = u;
  sol.w = std::sqrt(std::max(v * v - u * u, 0.0));
  const double ncl = fiber.cladding_index(lambda_um);
  const double b = 1.0 - (u * u) / (v * v);
  sol.n_eff = std::sqrt(ncl * ncl + fiber.numerical_aperture * fiber.numerical_aperture * b);
  sol.core_radius_um = fiber.core_radius_um;
  sol.grid = grid;
  sol.norm = 1.0;
  sol.norm = 1.0 / std::sqrt(profile_norm_on_grid(sol));
  return sol;
}

}  // namespace

double v_number(const FiberSpec& fiber, double lambda_um) {
  return 2.0 * kPi * fiber.core_radius_um * fiber.numerical_aperture / lambda_um;
}

double lp_characteristic(int l, double u, double v) {
  const double w = std::sqrt(std::max(v * v - u * u, 0.0));
  const double k_ratio = bessel_k(l - 1, w) / bessel_k(l, w);
  return u * bessel_j(l - 1, u) + w * k_ratio * bessel_j(l, u);
}

std::vector<double> lp_roots(int l, double v) {
  std::vector<double> roots;
  if (!(v > 0.0)) return roots;
  const double u_max = v * (1.0 - 1e-9);
  double u_prev = v / (kBracketSamples + 1);
  double f_prev = lp_characteristic(l, u_prev, v);
  for (int k = 2; k <= kBracketSamples; ++k) {
    const double u = k == kBracketSamples ? u_max : v * k / (kBracketSamples + 1);
    const double f = lp_characteristic(l, u, v);
    if (f == 0.0) {
      roots.push_back(u);
    } else if (f_prev != 0.0 && (f < 0.0) != (f_prev < 0.0)) {
      roots.push_back(bisect_root(l, v, u_prev, u));
    }
    u_prev = u;
    f_prev = f;
  }
  // LP01 has no cutoff; for tiny V its root sits closer to V than any sample.
  if (l == 0 && roots.empty()) roots.push_back(v * (1.0 - 1e-15));
  return roots;
}

std::optional<double> lp_b(int l, int m, double v) {
  const auto roots = lp_roots(l, v);
  if (m < 1 || static_cast<std::size_t>(m) > roots.size()) return std::nullopt;
  const double u = roots[m - 1];
  return 1.0 - (u * u) / (v * v);
}

std::vector<ModeSolution> solve_modes(const FiberSpec& fiber, double lambda_um, const PolarGrid& grid) {
  fiber.cladding_index(lambda_um);  // range check
  const double v = v_number(fiber, lambda_um);
  std::vector<ModeSolution> out;
  if (!(v > 0.0)) return out;
  for (int l = 0;; ++l) {
    const auto roots = lp_roots(l, v);
    if (roots.empty()) break;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      const int m = static_cast<int>(j) + 1;
      out.push_back(make_solution(fiber, ModeId::lp(l, m, Orientation::even), lambda_um, roots[j], v, grid));
      if (l > 0) out.push_back(make_solution(fiber, ModeId::lp(l, m, Orientation::odd), lambda_um, roots[j], v, grid));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ModeSolution& a, const ModeSolution& b) { return a.n_eff > b.n_eff; });
  return out;
}

ModeSolution solve_mode(const FiberSpec& fiber, const ModeId& mode, double lambda_um, const PolarGrid& grid) {
  fiber.cladding_index(lambda_um);
  const double v = v_number(fiber, lambda_um);
  const auto roots = lp_roots(mode.l, v);
  if (mode.m < 1 || static_cast<std::size_t>(mode.m) > roots.size())
    throw ModeCutoffError(mode_label(mode) + " is not guided at " + std::to_string(lambda_um * 1e3) +
                          " nm (V = " + std::to_string(v) + ")");
  return make_solution(fiber, mode, lambda_um, roots[mode.m - 1], v, grid);
}

double radial_profile(const ModeSolution& sol, double r_um) {
  const double a = sol.core_radius_um;
  const int l = sol.mode.l;
  if (r_um <= a) return bessel_j(l, sol.u * r_um / a);
  return bessel_j(l, sol.u) / bessel_k(l, sol.w) * bessel_k(l, sol.w * r_um / a);
}

double angular_profile(const ModeId& mode, double theta) {
  if (mode.l == 0) return 1.0;
  return mode.orientation == Orientation::even ? std::cos(mode.l * theta) : std::sin(mode.l * theta);
}

double mode_profile(const ModeSolution& sol, double r_um, double theta) {
  return sol.norm * radial_profile(sol, r_um) * angular_profile(sol.mode, theta);
}

namespace {

// Midpoint rule in r and uniform rule in theta; the angular sum is exact for the
// trigonometric polynomials that appear here.
double radial_sum(const std::vector<const ModeSolution*>& fields, const PolarGrid& grid, double a) {
  const double r_max = grid.extent_in_core_radii * a;
  const double dr = r_max / grid.radial_points;
  double acc = 0.0;
  for (int k = 0; k < grid.radial_points; ++k) {
    const double r = (k + 0.5) * dr;
    double prod = r;
    for (const auto* f : fields) prod *= radial_profile(*f, r);
    acc += prod;
  }
  return acc * dr;
}

double angular_sum(const std::vector<ModeId>& modes, const PolarGrid& grid) {
  const double dtheta = 2.0 * kPi / grid.angular_points;
  double acc = 0.0;
  for (int k = 0; k < grid.angular_points; ++k) {
    const double theta = k * dtheta;
    double prod = 1.0;
    for (const auto& m : modes) prod *= angular_profile(m, theta);
    acc += prod;
  }
  return acc * dtheta;
}

}  // namespace

double profile_norm_on_grid(const ModeSolution& sol) {
  return sol.norm * sol.norm * radial_sum({&sol, &sol}, sol.grid, sol.core_radius_um) *
         angular_sum({sol.mode, sol.mode}, sol.grid);
}

bool azimuthal_selection(const ModeId& p1, const ModeId& p2, const ModeId& s, const ModeId& i) {
  // Expand each factor into exponentials e^{+-i l theta}; the integral is 2 pi times the
  // total coefficient of the zero-frequency terms.
  using cd = std::complex<double>;
  struct Term {
    int freq;
    cd coeff;
  };
  auto expand = [](const ModeId& m) -> std::vector<Term> {
    if (m.l == 0) return {{0, cd(1.0, 0.0)}};
    if (m.orientation == Orientation::even) return {{m.l, cd(0.5, 0.0)}, {-m.l, cd(0.5, 0.0)}};
    return {{m.l, cd(0.0, -0.5)}, {-m.l, cd(0.0, 0.5)}};
  };
  std::vector<Term> acc{{0, cd(1.0, 0.0)}};
  for (const auto* m : {&p1, &p2, &s, &i}) {
    std::vector<Term> next;
    for (const auto& a : acc)
      for (const auto& b : expand(*m)) next.push_back({a.freq + b.freq, a.coeff * b.coeff});
    acc = std::move(next);
  }
  cd dc{0.0, 0.0};
  for (const auto& t : acc)
    if (t.freq == 0) dc += t.coeff;
  return std::abs(dc) > 1e-12;
}

OverlapResult overlap_integral(const ModeSolution& p1, const ModeSolution& p2, const ModeSolution& s,
                               const ModeSolution& i) {
  if (!azimuthal_selection(p1.mode, p2.mode, s.mode, i.mode)) return {0.0, true};
  const PolarGrid& grid = p1.grid;
  const double a = p1.core_radius_um;
  double norms = 1.0;
  for (const auto* f : {&p1, &p2, &s, &i})
    norms /= std::sqrt(radial_sum({f, f}, grid, a) * angular_sum({f->mode, f->mode}, grid));
  const double value = norms * radial_sum({&p1, &p2, &s, &i}, grid, a) *
                       angular_sum({p1.mode, p2.mode, s.mode, i.mode}, grid);
  return {value, false};
}

}  // namespace sfwm
