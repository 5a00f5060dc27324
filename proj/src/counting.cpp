#include "sfwm/counting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sfwm/errors.hpp"

namespace sfwm {

void DetectionChain::validate() const {
  for (const auto& c : components)
    if (!(c.transmittance > 0.0 && c.transmittance <= 1.0))
      throw std::invalid_argument("chain '" + label + "': transmittance of '" + c.name + "' must lie in (0, 1]");
  if (!(detector_efficiency > 0.0 && detector_efficiency <= 1.0))
    throw std::invalid_argument("chain '" + label + "': detector_efficiency must lie in (0, 1]");
  if (dark_count_rate_hz < 0.0 || background_rate_hz < 0.0)
    throw std::invalid_argument("chain '" + label + "': rates must be non-negative");
  if (jitter_sigma_ps < 0.0 || dead_time_ps < 0.0)
    throw std::invalid_argument("chain '" + label + "': jitter and dead time must be non-negative");
}

double DetectionChain::total_efficiency() const {
  double eta = detector_efficiency;
  for (const auto& c : components) eta *= c.transmittance;
  return eta;
}

DetectionChain default_nir_chain() {
  DetectionChain c;
  c.label = "NIR";
  c.components = {{"cwdm", 0.7}, {"free_space_coupling", 0.75}};
  c.detector_efficiency = 0.45;
  c.dark_count_rate_hz = 250.0;
  c.jitter_sigma_ps = 350.0;
  return c;
}

DetectionChain default_telecom_chain() {
  DetectionChain c;
  c.label = "telecom";
  c.components = {{"cwdm", 0.9}, {"free_space_coupling", 0.75}};
  c.detector_efficiency = 0.9;
  c.dark_count_rate_hz = 100.0;
  c.jitter_sigma_ps = 50.0;
  return c;
}

void SourceModel::validate() const {
  if (!(pair_coefficient >= 0.0)) throw std::invalid_argument("source: pair_coefficient must be >= 0");
  if (!(rep_rate_hz > 0.0)) throw std::invalid_argument("source: rep_rate_hz must be > 0");
  if (!(max_power_mw > 0.0)) throw std::invalid_argument("source: max_power_mw must be > 0");
}

double window_capture_fraction(double sigma_ps, double window_ns) {
  const double half = 0.5 * window_ns * 1e3;
  if (sigma_ps <= 0.0) return half > 0.0 ? 1.0 : 0.0;
  return std::erf(half / (std::sqrt(2.0) * sigma_ps));
}

CountingResult analytic_rates(const SourceModel& src, const DetectionChain& chain_s, const DetectionChain& chain_i,
                              double power_mw, double window_ns) {
  src.validate();
  chain_s.validate();
  chain_i.validate();
  if (power_mw < 0.0) throw std::invalid_argument("analytic_rates: power must be >= 0");
  const double rate = src.rep_rate_hz;
  const double window_s = window_ns * 1e-9;
  if (!(window_s > 0.0) || window_s >= 1.0 / rate)
    throw std::invalid_argument("analytic_rates: window must be positive and shorter than the pulse period");

  const double eta_s = chain_s.total_efficiency();
  const double eta_i = chain_i.total_efficiency();
  const double mu = src.mean_pairs(power_mw);
  const double pulsed_s = rate * mu * eta_s;
  const double pulsed_i = rate * mu * eta_i;
  const double cw_s = chain_s.uncorrelated_rate();
  const double cw_i = chain_i.uncorrelated_rate();
  const double sigma = std::hypot(chain_s.jitter_sigma_ps, chain_i.jitter_sigma_ps);
  const double f = window_capture_fraction(sigma, window_ns);

  CountingResult r;
  r.power_mw = power_mw;
  r.mean_pairs = mu;
  r.singles_s = pulsed_s + cw_s;
  r.singles_i = pulsed_i + cw_i;
  r.coincidences = rate * mu * eta_s * eta_i;

  const double pulse_pulse = pulsed_s * pulsed_i / rate;
  const double with_cw = (r.singles_s * r.singles_i - pulsed_s * pulsed_i) * window_s;
  r.accidentals = f * pulse_pulse + with_cw;
  r.zero_delay = f * (r.coincidences + src.multipair_factor() * pulse_pulse) + with_cw;

  r.g2_defined = r.coincidences > 0.0 && r.accidentals > 0.0;
  if (r.g2_defined) {
    r.g2 = r.coincidences / r.accidentals;
    r.car = (r.zero_delay - r.accidentals) / r.accidentals;
  }
  r.heralding_i_given_s = r.singles_s > 0.0 ? r.coincidences / r.singles_s : 0.0;
  r.heralding_s_given_i = r.singles_i > 0.0 ? r.coincidences / r.singles_i : 0.0;
  return r;
}

double backout_source_rate(double coincidences_hz, const DetectionChain& chain_s, const DetectionChain& chain_i) {
  const double eta = chain_s.total_efficiency() * chain_i.total_efficiency();
  if (!(eta > 0.0)) throw DomainError("backout_source_rate: zero chain efficiency");
  return coincidences_hz / eta;
}

double pulsed_accidental_rate(double singles_s, double singles_i, double rep_rate_hz) {
  if (!(rep_rate_hz > 0.0)) throw DomainError("pulsed_accidental_rate: repetition rate must be > 0");
  return singles_s * singles_i / rep_rate_hz;
}

double g2_from_rates(double coincidences, double singles_s, double singles_i, double rep_rate_hz) {
  const double a = pulsed_accidental_rate(singles_s, singles_i, rep_rate_hz);
  if (!(a > 0.0)) throw DomainError("g2_from_rates: zero accidental rate");
  return coincidences / a;
}

SourceFit fit_source(const MeasuredRates& measured, const DetectionChain& chain_s, const DetectionChain& chain_i,
                     PairStatistics stats, double rep_rate_hz) {
  if (!(measured.power_mw > 0.0)) throw std::invalid_argument("fit_source: power must be > 0");
  if (measured.coincidences < 0.0 || measured.singles_s < 0.0 || measured.singles_i < 0.0)
    throw std::invalid_argument("fit_source: measured rates must be >= 0");

  SourceFit fit;
  fit.source_pair_rate = backout_source_rate(measured.coincidences, chain_s, chain_i);
  fit.source.statistics = stats;
  fit.source.rep_rate_hz = rep_rate_hz;
  fit.source.pair_coefficient = fit.source_pair_rate / rep_rate_hz / (measured.power_mw * measured.power_mw);

  const double pair_s = fit.source_pair_rate * chain_s.total_efficiency();
  const double pair_i = fit.source_pair_rate * chain_i.total_efficiency();
  fit.raw_background_s = measured.singles_s - pair_s - chain_s.dark_count_rate_hz;
  fit.raw_background_i = measured.singles_i - pair_i - chain_i.dark_count_rate_hz;
  fit.background_s = std::max(0.0, fit.raw_background_s);
  fit.background_i = std::max(0.0, fit.raw_background_i);

  auto note = [&](const DetectionChain& c, double pair, double measured_single, double raw) {
    if (raw >= 0.0) return;
    std::ostringstream os;
    os << "arm '" << c.label << "': pair-correlated singles " << pair << " Hz plus darks exceed the measured "
       << measured_single << " Hz; background clamped to 0 (excess " << -raw << " Hz)";
    fit.warnings.push_back(os.str());
  };
  note(chain_s, pair_s, measured.singles_s, fit.raw_background_s);
  note(chain_i, pair_i, measured.singles_i, fit.raw_background_i);
  return fit;
}

DetectionChain with_background(DetectionChain chain, double background_hz) {
  chain.background_rate_hz = background_hz;
  return chain;
}

PowerSweep power_sweep(const SourceModel& src, const DetectionChain& chain_s, const DetectionChain& chain_i,
                       const std::vector<double>& powers_mw, double window_ns) {
  if (!std::is_sorted(powers_mw.begin(), powers_mw.end()))
    throw std::invalid_argument("power_sweep: powers must be sorted ascending");
  PowerSweep sweep;
  for (double p : powers_mw) {
    if (p > src.max_power_mw) {
      std::ostringstream os;
      os << "power " << p << " mW exceeds the maximum coupled power " << src.max_power_mw << " mW; skipped";
      sweep.warnings.push_back(os.str());
      continue;
    }
    sweep.rows.push_back(analytic_rates(src, chain_s, chain_i, p, window_ns));
  }
  for (std::size_t k = 1; k < sweep.rows.size(); ++k) {
    const auto& a = sweep.rows[k - 1];
    const auto& b = sweep.rows[k];
    if (!(b.coincidences > a.coincidences)) sweep.coincidences_increasing = false;
    if (a.g2_defined && b.g2_defined && !(b.g2 < a.g2)) sweep.g2_decreasing = false;
  }
  if (!sweep.coincidences_increasing) sweep.warnings.push_back("coincidences are not strictly increasing with power");
  if (!sweep.g2_decreasing) sweep.warnings.push_back("g2 is not strictly decreasing with power");
  return sweep;
}

double ratio_sigma(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return a / b * std::sqrt(1.0 / a + 1.0 / b);
}

Uncertainties poisson_uncertainties(const CountingResult& r, double integration_s) {
  if (!(integration_s > 0.0)) throw std::invalid_argument("poisson_uncertainties: integration time must be > 0");
  const double t = integration_s;
  auto rate_sigma = [t](double rate) { return std::sqrt(std::max(rate, 0.0) * t) / t; };
  Uncertainties u;
  u.singles_s = rate_sigma(r.singles_s);
  u.singles_i = rate_sigma(r.singles_i);
  u.coincidences = rate_sigma(r.coincidences);
  u.accidentals = rate_sigma(r.accidentals);
  u.g2 = ratio_sigma(r.coincidences * t, r.accidentals * t);
  u.car = ratio_sigma(r.zero_delay * t, r.accidentals * t);
  u.heralding_i_given_s = ratio_sigma(r.coincidences * t, r.singles_s * t);
  u.heralding_s_given_i = ratio_sigma(r.coincidences * t, r.singles_i * t);
  return u;
}

}  // namespace sfwm
