#include "sfwm/jsi.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "sfwm/errors.hpp"
#include "sfwm/io.hpp"
#include "sfwm/parallel.hpp"
#include "sfwm/units.hpp"

namespace sfwm {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)
constexpr double kSincSquaredHalf = 1.3915573782515103;  // sin^2(x)/x^2 = 1/2

}  // namespace

void PumpSpec::validate() const {
  if (!(center_nm > 0.0 && bandwidth_fwhm_nm > 0.0 && pulse_duration_fs > 0.0 && rep_rate_hz > 0.0 &&
        avg_power_mw > 0.0))
    throw std::invalid_argument("pump: wavelength, bandwidth, duration, repetition rate and power must be positive");
  if (!std::isfinite(chirp)) throw std::invalid_argument("pump: chirp must be finite");
}

double PumpSpec::omega0() const { return omega_from_nm(center_nm); }

double PumpSpec::sigma() const { return omega_width_from_nm(center_nm, bandwidth_fwhm_nm) / kFwhmPerSigma; }

double PumpSpec::tau0() const {
  // amplitude exp(-x^2/(4 s^2)) <-> temporal intensity exp(-2 s^2 t^2)
  return kFwhmPerSigma / (2.0 * sigma());
}

std::complex<double> pump_envelope(const PumpSpec& pump, double omega) {
  const double x = omega - pump.omega0();
  const double s = pump.sigma();
  const double tau = pump.tau0();
  return std::exp(std::complex<double>(-x * x / (4.0 * s * s), pump.chirp * x * x * tau * tau));
}

std::complex<double> sinc_exp(double x) {
  using namespace std::complex_literals;
  if (std::abs(x) < 1e-4) return {1.0 - 2.0 * x * x / 3.0, x - x * x * x / 3.0};
  return (std::exp(2i * x) - 1.0) / (2i * x);
}

namespace {

struct Extents {
  double half_s;
  double half_i;
};

Extents automatic_extents(const PhaseMismatch& mm, const PumpSpec& pump, double length_m, double omega_s0,
                          double omega_i0, const JsiGridSpec& spec) {
  auto fast_db = [&](double ws, double wi) { return mm(0.5 * (ws + wi), 0.5 * (ws + wi), ws); };
  const double h = 1e-5 * omega_s0;
  const double f_s = (fast_db(omega_s0 + h, omega_i0) - fast_db(omega_s0 - h, omega_i0)) / (2.0 * h);
  const double f_i = (fast_db(omega_s0, omega_i0 + h) - fast_db(omega_s0, omega_i0 - h)) / (2.0 * h);
  const double grad = std::hypot(f_s, f_i);
  const double sigma_sum = std::sqrt(2.0) * pump.sigma();  // two-photon intensity std
  const double reach = spec.pump_sigmas * sigma_sum;
  if (grad == 0.0) return {reach, reach};
  // ridge tangent and its rate of change of the sum frequency
  const double t_s = f_i / grad;
  const double t_i = -f_s / grad;
  const double sum_rate = std::max(std::abs(t_s + t_i), 0.02);
  const double along = reach / sum_rate;
  const double pm_fwhm = 4.0 * kSincSquaredHalf / (length_m * grad);
  return {std::abs(t_s) * along + spec.pm_bandwidths * pm_fwhm, std::abs(t_i) * along + spec.pm_bandwidths * pm_fwhm};
}

double nm_half_band(double center_nm, double omega_half) {
  const double omega0 = omega_from_nm(center_nm);
  return std::max(nm_from_omega(omega0 - omega_half) - center_nm, center_nm - nm_from_omega(omega0 + omega_half));
}

Eigen::VectorXd centered_axis(double center, double half, int n) {
  if (n == 1) return Eigen::VectorXd::Constant(1, center);
  return Eigen::VectorXd::LinSpaced(n, center - half, center + half);
}

}  // namespace

JsiGrid compute_jsa(const FiberSpec& fiber, const PumpSpec& pump, const ProcessSpec& proc, const JsiGridSpec& spec) {
  pump.validate();
  proc.validate();
  if (spec.signal_points < 1 || spec.idler_points < 1) throw std::invalid_argument("jsi: grid needs >= 1 point per axis");
  if (spec.model == PumpModel::exact && spec.quadrature_points < 3)
    throw std::invalid_argument("jsi: exact model needs >= 3 quadrature points");

  const double omega_p0 = pump.omega0();
  double signal_nm = 0.0;
  double idler_nm = 0.0;
  if (spec.center_signal_nm) {
    signal_nm = *spec.center_signal_nm;
    idler_nm = spec.center_idler_nm ? *spec.center_idler_nm : nm_from_omega(2.0 * omega_p0 - omega_from_nm(signal_nm));
  } else {
    const auto sols = solve_phase_matching(fiber, proc, pump.center_nm);
    if (sols.empty()) throw DomainError("jsi: process '" + proc.label + "' has no phase-matched solution to centre on");
    signal_nm = sols.front().signal_nm;
    idler_nm = sols.front().idler_nm;
  }
  const double omega_s0 = omega_from_nm(signal_nm);
  const double omega_i0 = omega_from_nm(idler_nm);

  double half_s = spec.signal_half_width;
  double half_i = spec.idler_half_width;
  if (half_s <= 0.0 || half_i <= 0.0) {
    const PhaseMismatch probe(fiber, proc, pump.center_nm, ScanWindow{signal_nm - 20.0, signal_nm + 20.0, 16}, 40.0);
    const Extents ext = automatic_extents(probe, pump, fiber.length_m, omega_s0, omega_i0, spec);
    if (half_s <= 0.0) half_s = ext.half_s;
    if (half_i <= 0.0) half_i = ext.half_i;
  }

  JsiGrid grid;
  grid.center_signal_nm = signal_nm;
  grid.center_idler_nm = idler_nm;
  grid.omega_s = centered_axis(omega_s0, half_s, spec.signal_points);
  grid.omega_i = centered_axis(omega_i0, half_i, spec.idler_points);

  const double sigma = pump.sigma();
  const double sum_offset = std::abs(omega_s0 + omega_i0 - 2.0 * omega_p0);
  const double pump_reach = 0.5 * (half_s + half_i) + sum_offset + 4.5 * sigma;
  const ScanWindow window{signal_nm - nm_half_band(signal_nm, half_s) - 1.0,
                          signal_nm + nm_half_band(signal_nm, half_s) + 1.0, 16};
  const PhaseMismatch mm(fiber, proc, pump.center_nm, window, nm_half_band(pump.center_nm, pump_reach) + 1.0);

  const double L = fiber.length_m;
  const double tau = pump.tau0();
  const std::complex<double> q(-1.0 / (4.0 * sigma * sigma), pump.chirp * tau * tau);
  const Eigen::Index ns = grid.omega_s.size();
  const Eigen::Index ni = grid.omega_i.size();
  grid.amplitude.resize(ns, ni);

  // Exact model: factor alpha(S/2 + y) alpha(S/2 - y) = exp(q S^2/2) exp(2 q y^2) and tabulate
  // the split-dependent part of the pump mismatch on a sum-frequency lattice.
  const int nq = spec.quadrature_points;
  Eigen::VectorXcd split_weight;
  Eigen::VectorXd lattice;
  Eigen::MatrixXd split_mismatch;
  if (spec.model == PumpModel::exact) {
    const double y_max = 4.0 * sigma;
    const double dy = 2.0 * y_max / (nq - 1);
    split_weight.resize(nq);
    Eigen::VectorXd ys(nq);
    for (int k = 0; k < nq; ++k) {
      ys(k) = -y_max + k * dy;
      const double trap = (k == 0 || k == nq - 1) ? 0.5 : 1.0;
      split_weight(k) = std::exp(2.0 * q * ys(k) * ys(k)) * (trap * dy);
    }
    const double sum_lo = grid.omega_s.minCoeff() + grid.omega_i.minCoeff();
    const double sum_hi = grid.omega_s.maxCoeff() + grid.omega_i.maxCoeff();
    const int nl = std::max<int>(64, static_cast<int>(2 * std::max(ns, ni) + 1));
    if (sum_hi > sum_lo)
      lattice = Eigen::VectorXd::LinSpaced(nl, sum_lo, sum_hi);
    else
      lattice = Eigen::VectorXd::Constant(1, sum_lo);
    split_mismatch.resize(lattice.size(), nq);
    parallel_for(static_cast<std::size_t>(lattice.size()), [&](std::size_t j) {
      const double half = 0.5 * lattice(j);
      const double centre = mm.pump_part(half, half);
      for (int k = 0; k < nq; ++k) split_mismatch(j, k) = mm.pump_part(half + ys(k), half - ys(k)) - centre;
    });
  }

  std::vector<char> sign_seen(static_cast<std::size_t>(ns) * 2, 0);
  parallel_for(static_cast<std::size_t>(ns), [&](std::size_t row) {
    const double ws = grid.omega_s(static_cast<Eigen::Index>(row));
    for (Eigen::Index col = 0; col < ni; ++col) {
      const double wi = grid.omega_i(col);
      const double sum = ws + wi;
      const double s = sum - 2.0 * omega_p0;
      const double centre_db = mm(0.5 * sum, 0.5 * sum, ws);
      (centre_db <= 0.0 ? sign_seen[2 * row] : sign_seen[2 * row + 1]) = 1;
      if (spec.model == PumpModel::fast) {
        const std::complex<double> envelope =
            std::exp(std::complex<double>(-s * s / (8.0 * sigma * sigma), pump.chirp * tau * tau * s * s / 2.0));
        grid.amplitude(static_cast<Eigen::Index>(row), col) = envelope * sinc_exp(centre_db * L / 2.0);
      } else {
        double pos = 0.0;
        if (lattice.size() > 1) pos = (sum - lattice(0)) / (lattice(1) - lattice(0));
        const Eigen::Index j0 = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(pos), 0, std::max<Eigen::Index>(lattice.size() - 2, 0));
        const double frac = lattice.size() > 1 ? std::clamp(pos - j0, 0.0, 1.0) : 0.0;
        const Eigen::Index j1 = std::min<Eigen::Index>(j0 + 1, lattice.size() - 1);
        std::complex<double> acc{0.0, 0.0};
        for (int k = 0; k < nq; ++k) {
          const double split = (1.0 - frac) * split_mismatch(j0, k) + frac * split_mismatch(j1, k);
          acc += split_weight(k) * sinc_exp((centre_db + split) * L / 2.0);
        }
        grid.amplitude(static_cast<Eigen::Index>(row), col) = std::exp(q * s * s / 2.0) * acc;
      }
    }
  });

  bool neg = false, pos = false;
  for (std::size_t r = 0; r < static_cast<std::size_t>(ns); ++r) {
    neg = neg || sign_seen[2 * r];
    pos = pos || sign_seen[2 * r + 1];
  }
  grid.brackets_solution = neg && pos;
  grid.intensity = grid.amplitude.cwiseAbs2();
  max_normalize(grid);
  return grid;
}

void max_normalize(JsiGrid& grid) {
  grid.intensity = grid.amplitude.cwiseAbs2();
  const double peak = grid.intensity.size() ? grid.intensity.maxCoeff() : 0.0;
  grid.raw_peak_intensity = peak;
  if (peak > 0.0) {
    grid.amplitude /= std::sqrt(peak);
    grid.intensity /= peak;
  }
  grid.max_normalized = true;
}

MarginalSpectrum marginal_spectrum(const JsiGrid& grid, Daughter which) {
  MarginalSpectrum out;
  if (which == Daughter::signal) {
    out.omega = grid.omega_s;
    out.density = grid.intensity.rowwise().sum() * (grid.d_omega_i() > 0 ? grid.d_omega_i() : 1.0);
  } else {
    out.omega = grid.omega_i;
    out.density = grid.intensity.colwise().sum().transpose() * (grid.d_omega_s() > 0 ? grid.d_omega_s() : 1.0);
  }
  out.wavelength_nm = out.omega.unaryExpr([](double w) { return nm_from_omega(w); });
  return out;
}

Eigen::VectorXd seeded_idler_spectrum(const JsiGrid& grid, double seed_signal_nm) {
  const double w = omega_from_nm(seed_signal_nm);
  const Eigen::Index n = grid.omega_s.size();
  const double half = 0.5 * grid.d_omega_s();
  if (n == 0 || w < grid.omega_s(0) - half || w > grid.omega_s(n - 1) + half)
    throw RangeError("seeded_idler_spectrum: seed wavelength is outside the signal axis");
  Eigen::Index row = 0;
  (grid.omega_s.array() - w).abs().minCoeff(&row);
  return grid.intensity.row(row).transpose();
}

double total_intensity(const JsiGrid& grid) {
  const double ds = grid.d_omega_s() > 0 ? grid.d_omega_s() : 1.0;
  const double di = grid.d_omega_i() > 0 ? grid.d_omega_i() : 1.0;
  return grid.intensity.sum() * ds * di;
}

SumFrequencyProfile sum_frequency_profile(const JsiGrid& grid) {
  const double ds = grid.d_omega_s() > 0 ? grid.d_omega_s() : 1.0;
  const double di = grid.d_omega_i() > 0 ? grid.d_omega_i() : 1.0;
  const double bin = std::max(ds, di);
  const double lo = grid.omega_s.minCoeff() + grid.omega_i.minCoeff();
  const double hi = grid.omega_s.maxCoeff() + grid.omega_i.maxCoeff();
  const Eigen::Index bins = static_cast<Eigen::Index>(std::floor((hi - lo) / bin)) + 1;
  SumFrequencyProfile out;
  out.sum_omega = Eigen::VectorXd::LinSpaced(bins, lo + 0.5 * bin, lo + (bins - 0.5) * bin);
  out.density = Eigen::VectorXd::Zero(bins);
  for (Eigen::Index r = 0; r < grid.omega_s.size(); ++r)
    for (Eigen::Index c = 0; c < grid.omega_i.size(); ++c) {
      const Eigen::Index b = std::min<Eigen::Index>(
          static_cast<Eigen::Index>((grid.omega_s(r) + grid.omega_i(c) - lo) / bin), bins - 1);
      out.density(b) += grid.intensity(r, c) * ds * di / bin;
    }
  return out;
}

double fwhm(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fwhm: need >= 3 matching samples");
  Eigen::Index peak = 0;
  const double ymax = y.maxCoeff(&peak);
  if (!(ymax > 0.0)) throw DomainError("fwhm: curve has no positive maximum");
  const double half = 0.5 * ymax;
  Eigen::Index l = peak;
  while (l > 0 && y(l) > half) --l;
  Eigen::Index r = peak;
  while (r < y.size() - 1 && y(r) > half) ++r;
  if (y(l) > half || y(r) > half) throw DomainError("fwhm: half-maximum not reached inside the sampled range");
  auto cross = [&](Eigen::Index a, Eigen::Index b) {
    return x(a) + (half - y(a)) * (x(b) - x(a)) / (y(b) - y(a));
  };
  return std::abs(cross(r - 1, r) - cross(l, l + 1));
}

namespace {

double bilinear(const JsiGrid& grid, double ws, double wi) {
  const Eigen::Index ns = grid.omega_s.size();
  const Eigen::Index ni = grid.omega_i.size();
  if (ns < 2 || ni < 2) return 0.0;
  const double fs = (ws - grid.omega_s(0)) / grid.d_omega_s();
  const double fi = (wi - grid.omega_i(0)) / grid.d_omega_i();
  if (fs < 0.0 || fi < 0.0 || fs > ns - 1 || fi > ni - 1) return 0.0;
  const Eigen::Index r = std::min<Eigen::Index>(static_cast<Eigen::Index>(fs), ns - 2);
  const Eigen::Index c = std::min<Eigen::Index>(static_cast<Eigen::Index>(fi), ni - 2);
  const double a = fs - r;
  const double b = fi - c;
  return (1 - a) * (1 - b) * grid.intensity(r, c) + a * (1 - b) * grid.intensity(r + 1, c) +
         (1 - a) * b * grid.intensity(r, c + 1) + a * b * grid.intensity(r + 1, c + 1);
}

}  // namespace

Eigen::VectorXd anti_diagonal_cut(const JsiGrid& grid, double sum_omega, int samples) {
  const double lo = std::max(grid.omega_s.minCoeff(), sum_omega - grid.omega_i.maxCoeff());
  const double hi = std::min(grid.omega_s.maxCoeff(), sum_omega - grid.omega_i.minCoeff());
  if (!(hi > lo) || samples < 2) return Eigen::VectorXd();
  Eigen::VectorXd cut(samples);
  for (int k = 0; k < samples; ++k) {
    const double ws = lo + (hi - lo) * k / (samples - 1);
    cut(k) = bilinear(grid, ws, sum_omega - ws);
  }
  return cut;
}

int count_local_maxima(const Eigen::VectorXd& curve, double rel_threshold) {
  if (curve.size() < 3) return curve.size() > 0 && curve.maxCoeff() > 0.0 ? 1 : 0;
  const double floor = rel_threshold * curve.maxCoeff();
  int count = 0;
  for (Eigen::Index k = 1; k + 1 < curve.size(); ++k) {
    if (curve(k) < floor || curve(k) <= curve(k - 1)) continue;
    // plateau-tolerant: walk over equal samples before the descent
    Eigen::Index j = k;
    while (j + 1 < curve.size() && curve(j + 1) == curve(k)) ++j;
    if (j + 1 < curve.size() && curve(j + 1) < curve(k)) ++count;
    k = j;
  }
  return count;
}

int anti_diagonal_peak_count(const JsiGrid& grid, const PumpSpec& pump, int cuts, int samples, double rel_threshold) {
  const double centre = omega_from_nm(grid.center_signal_nm) + omega_from_nm(grid.center_idler_nm);
  const double width = std::sqrt(2.0) * pump.sigma();
  int best = 0;
  for (int c = 0; c < cuts; ++c) {
    const double t = cuts == 1 ? 0.0 : -1.0 + 2.0 * c / (cuts - 1);
    best = std::max(best, count_local_maxima(anti_diagonal_cut(grid, centre + t * width, samples), rel_threshold));
  }
  return best;
}

double phase_matching_bandwidth(const FiberSpec& fiber, const ProcessSpec& proc, double pump_nm) {
  const auto sols = solve_phase_matching(fiber, proc, pump_nm);
  if (sols.empty()) throw DomainError("phase_matching_bandwidth: no phase-matched solution for '" + proc.label + "'");
  return phase_matching_bandwidth(fiber, sols.front());
}

double phase_matching_bandwidth(const FiberSpec& fiber, const PhaseMatchSolution& solution) {
  const double lo_nm = std::max(solution.signal_nm - 60.0, fiber.cladding.lambda_min_um * 1e3);
  const PhaseMismatch mm(fiber, solution.process, solution.pump_nm,
                         ScanWindow{lo_nm, solution.signal_nm + 60.0, 16}, 1.0);
  const double omega0 = omega_from_nm(solution.signal_nm);
  const double target = 2.0 * kSincSquaredHalf / fiber.length_m;  // |dB| at sinc^2 = 1/2
  auto excess = [&](double w) { return std::abs(mm.at_signal(w)) - target; };
  auto edge = [&](double direction) {
    double step = omega0 * 1e-7;
    double inner = omega0;
    double outer = omega0 + direction * step;
    try {
      while (excess(outer) < 0.0) {
        inner = outer;
        step *= 2.0;
        outer = omega0 + direction * step;
      }
    } catch (const RangeError&) {
      throw DomainError("phase_matching_bandwidth: bandwidth exceeds the tabulated +-60 nm window");
    }
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (inner + outer);
      if (mid == inner || mid == outer) break;
      (excess(mid) < 0.0 ? inner : outer) = mid;
    }
    return 0.5 * (inner + outer);
  };
  const double w_hi = edge(+1.0);
  const double w_lo = edge(-1.0);
  return nm_from_omega(w_lo) - nm_from_omega(w_hi);
}

SchmidtResult schmidt_diagnostics(const Eigen::MatrixXcd& amplitude) {
  if (amplitude.size() == 0 || amplitude.cwiseAbs2().sum() == 0.0)
    throw DomainError("schmidt_diagnostics: undefined for an all-zero amplitude");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(amplitude);
  const Eigen::VectorXd weights = svd.singularValues().cwiseAbs2();
  const double total = weights.sum();
  SchmidtResult out;
  const double sum_sq = (weights / total).squaredNorm();
  out.schmidt_number = 1.0 / sum_sq;
  out.purity = sum_sq;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(8, weights.size()); ++k) out.weights.push_back(weights(k) / total);
  return out;
}


void write_jsi_csv(const JsiGrid& grid, const std::string& path, const std::string& header) {
  auto os = open_output(path);
  os << header << "omega_s_rad_per_s,omega_i_rad_per_s,intensity\n";
  os.precision(12);
  for (Eigen::Index r = 0; r < grid.omega_s.size(); ++r)
    for (Eigen::Index c = 0; c < grid.omega_i.size(); ++c)
      os << grid.omega_s(r) << ',' << grid.omega_i(c) << ',' << grid.intensity(r, c) << '\n';
}

void write_jsi_binary(const JsiGrid& grid, const std::string& path, std::uint64_t config_hash) {
  auto os = open_output(path, true);
  os.write("SFWMJSI1", 8);
  put<std::uint64_t>(os, config_hash);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(grid.omega_s.size()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(grid.omega_i.size()));
  for (Eigen::Index r = 0; r < grid.omega_s.size(); ++r) put<double>(os, grid.omega_s(r));
  for (Eigen::Index c = 0; c < grid.omega_i.size(); ++c) put<double>(os, grid.omega_i(c));
  for (Eigen::Index r = 0; r < grid.omega_s.size(); ++r)
    for (Eigen::Index c = 0; c < grid.omega_i.size(); ++c) put<double>(os, grid.intensity(r, c));
}

JsiBinary read_jsi_binary(const std::string& path) {
  auto is = open_input(path, true);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "SFWMJSI1", 8) != 0) throw std::runtime_error("'" + path + "' is not an SFWMJSI1 file");
  JsiBinary out;
  out.config_hash = get<std::uint64_t>(is);
  const auto ns = static_cast<Eigen::Index>(get<std::uint64_t>(is));
  const auto ni = static_cast<Eigen::Index>(get<std::uint64_t>(is));
  out.omega_s.resize(ns);
  out.omega_i.resize(ni);
  out.intensity.resize(ns, ni);
  for (Eigen::Index r = 0; r < ns; ++r) out.omega_s(r) = get<double>(is);
  for (Eigen::Index c = 0; c < ni; ++c) out.omega_i(c) = get<double>(is);
  for (Eigen::Index r = 0; r < ns; ++r)
    for (Eigen::Index c = 0; c < ni; ++c) out.intensity(r, c) = get<double>(is);
  return out;
}

void write_marginal_csv(const MarginalSpectrum& marginal, const std::string& path, const std::string& header) {
  auto os = open_output(path);
  os << header << "wavelength_nm,density\n";
  os.precision(12);
  for (Eigen::Index k = 0; k < marginal.omega.size(); ++k)
    os << marginal.wavelength_nm(k) << ',' << marginal.density(k) << '\n';
}

}  // namespace sfwm
