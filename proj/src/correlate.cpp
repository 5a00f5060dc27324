#include "sfwm/correlate.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sfwm/io.hpp"

namespace sfwm {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Histogram::Histogram(std::int64_t bin_width, double span_ns) : bin_width_ps(bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("histogram: bin width must be > 0");
  if (!(span_ns > 0.0)) throw std::invalid_argument("histogram: span must be > 0");
  half_bins = static_cast<std::int64_t>(std::ceil(span_ns * 1e3 / static_cast<double>(bin_width) - 1e-9));
  counts.assign(static_cast<std::size_t>(2 * half_bins), 0);
}

std::uint64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

Histogram& Histogram::operator+=(const Histogram& other) {
  if (other.bin_width_ps != bin_width_ps || other.half_bins != half_bins)
    throw std::invalid_argument("histogram: incompatible binning");
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
  return *this;
}

void accumulate(Histogram& hist, std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  const std::int64_t span = hist.span_ps();
  const std::int64_t w = hist.bin_width_ps;
  std::size_t lo = 0;
  for (std::uint64_t ta_u : a) {
    const auto ta = static_cast<std::int64_t>(ta_u);
    while (lo < b.size() && static_cast<std::int64_t>(b[lo]) - ta < -span) ++lo;
    for (std::size_t j = lo; j < b.size(); ++j) {
      const std::int64_t d = static_cast<std::int64_t>(b[j]) - ta;
      if (d >= span) break;
      ++hist.counts[static_cast<std::size_t>(floor_div(d, w) + hist.half_bins)];
    }
  }
}

Histogram correlate(std::span<const std::uint64_t> channel0, std::span<const std::uint64_t> channel1,
                    std::int64_t bin_width_ps, double span_ns) {
  Histogram h(bin_width_ps, span_ns);
  accumulate(h, channel0, channel1);
  return h;
}

std::uint64_t window_counts(const Histogram& hist, double centre_ps, double window_ps) {
  std::uint64_t n = 0;
  const double lo = centre_ps - 0.5 * window_ps;
  const double hi = centre_ps + 0.5 * window_ps;
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    const double c = hist.bin_center_ps(k);
    if (c >= lo && c < hi) n += hist.counts[k];
  }
  return n;
}

G2Estimate g2_from_histogram(const Histogram& hist, double window_ns, double rep_period_ns) {
  if (!(window_ns > 0.0) || !(rep_period_ns > 0.0))
    throw std::invalid_argument("g2_from_histogram: window and period must be > 0");
  if (window_ns >= rep_period_ns) throw std::invalid_argument("g2_from_histogram: window must be shorter than the period");
  const double w = window_ns * 1e3;
  const double period = rep_period_ns * 1e3;
  const double span = static_cast<double>(hist.span_ps());

  G2Estimate g;
  g.nc = static_cast<double>(window_counts(hist, 0.0, w));
  double side_sum = 0.0;
  for (int k = 1; k * period + 0.5 * w <= span; ++k) {
    side_sum += static_cast<double>(window_counts(hist, k * period, w));
    side_sum += static_cast<double>(window_counts(hist, -k * period, w));
    g.side_peaks += 2;
  }
  if (g.side_peaks < 5)
    throw std::invalid_argument("g2_from_histogram: histogram span covers fewer than 5 side peaks");
  g.na = side_sum / g.side_peaks;
  if (g.na <= 0.0) {
    g.infinite = true;
    g.g2 = g.car = std::numeric_limits<double>::infinity();
    g.sigma_g2 = g.sigma_car = std::numeric_limits<double>::quiet_NaN();
    return g;
  }
  g.g2 = g.nc / g.na;
  g.car = (g.nc - g.na) / g.na;
  // sigma(Na) = sqrt(sum)/n
  const double rel_na = std::sqrt(side_sum) / side_sum;
  const double rel_nc = g.nc > 0.0 ? 1.0 / std::sqrt(g.nc) : 0.0;
  g.sigma_g2 = g.g2 * std::hypot(rel_nc, rel_na);
  g.sigma_car = std::hypot(std::sqrt(g.nc) / g.na, g.nc / g.na * rel_na);
  return g;
}

void write_histogram_csv(const Histogram& hist, const std::string& path, const std::string& header) {
  std::ofstream out = open_output(path);
  out << header;
  out << "delay_ps,counts\n";
  for (std::size_t k = 0; k < hist.counts.size(); ++k) out << hist.bin_center_ps(k) << ',' << hist.counts[k] << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace sfwm
