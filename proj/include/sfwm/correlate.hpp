#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sfwm {

/// Coincidence histogram of delays t_1 - t_0 over [-span, span), edge-aligned bins
/// [k w, (k+1) w).
struct Histogram {
  std::int64_t bin_width_ps = 50;
  std::int64_t half_bins = 0;  // bins on each side of zero delay
  std::vector<std::uint64_t> counts;

  Histogram() = default;
  Histogram(std::int64_t bin_width_ps, double span_ns);

  std::int64_t span_ps() const { return half_bins * bin_width_ps; }
  double bin_center_ps(std::size_t k) const {
    return (static_cast<double>(static_cast<std::int64_t>(k) - half_bins) + 0.5) * static_cast<double>(bin_width_ps);
  }
  std::uint64_t total() const;
  Histogram& operator+=(const Histogram& other);
};

/// Adds every delay b - a within the span; both sequences sorted ascending. Two-pointer sweep,
/// linear in the number of events plus the number of counted pairs.
void accumulate(Histogram& hist, std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

Histogram correlate(std::span<const std::uint64_t> channel0, std::span<const std::uint64_t> channel1,
                    std::int64_t bin_width_ps, double span_ns);

struct G2Estimate {
  double nc = 0.0;  // counts within +-window/2 of zero delay
  double na = 0.0;  // mean counts over side-peak windows
  double g2 = 0.0;
  double car = 0.0;
  double sigma_g2 = 0.0;
  double sigma_car = 0.0;
  int side_peaks = 0;
  bool infinite = false;  // na == 0
};

/// Side peaks are the k != 0 multiples of rep_period whose full window lies inside the span;
/// at least five are required.
G2Estimate g2_from_histogram(const Histogram& hist, double window_ns, double rep_period_ns);

/// Counts inside [centre - window/2, centre + window/2), by bin centre.
std::uint64_t window_counts(const Histogram& hist, double centre_ps, double window_ps);

/// Two-column CSV (delay_ps at bin centre, counts), preceded by `header` comment lines.
void write_histogram_csv(const Histogram& hist, const std::string& path, const std::string& header);

}  // namespace sfwm
