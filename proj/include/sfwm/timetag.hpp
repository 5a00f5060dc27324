#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfwm/correlate.hpp"
#include "sfwm/counting.hpp"

namespace sfwm {

enum class Origin : std::uint8_t { pair = 0, background = 1, dark = 2 };

const char* origin_name(Origin o);

/// Events of one detector channel, timestamps non-decreasing.
struct TimeTagStream {
  std::uint8_t channel = 0;
  std::vector<std::uint64_t> timestamp_ps;
  std::vector<Origin> origin;

  std::size_t size() const { return timestamp_ps.size(); }
};

struct StreamPair {
  TimeTagStream signal{0, {}, {}};  // channel 0
  TimeTagStream idler{1, {}, {}};   // channel 1
  std::uint64_t pulses = 0;
  double duration_s = 0.0;
};

struct SimulationOptions {
  std::uint64_t batch_pulses = std::uint64_t{1} << 22;
  unsigned threads = 0;  // 0: worker_count()
};

/// Pulse k fires at (k + 1/2)/R. Each batch of pulses draws from its own mt19937_64 seeded by
/// seed_seq{seed, batch}, so output depends only on (inputs, seed, batch_pulses).
StreamPair simulate_stream(const SourceModel& src, const DetectionChain& chain_s, const DetectionChain& chain_i,
                           double power_mw, double duration_s, std::uint64_t seed, const SimulationOptions& opts = {});

/// Same stream as simulate_stream, correlated batch by batch without holding the whole run.
struct MonteCarloRun {
  Histogram histogram;
  std::uint64_t pulses = 0;
  double duration_s = 0.0;
  std::uint64_t events_s = 0;
  std::uint64_t events_i = 0;
};

MonteCarloRun simulate_and_correlate(const SourceModel& src, const DetectionChain& chain_s,
                                     const DetectionChain& chain_i, double power_mw, double duration_s,
                                     std::uint64_t seed, std::int64_t bin_width_ps, double span_ns,
                                     const SimulationOptions& opts = {});

inline Histogram correlate(const StreamPair& streams, std::int64_t bin_width_ps, double span_ns) {
  return correlate(streams.signal.timestamp_ps, streams.idler.timestamp_ps, bin_width_ps, span_ns);
}

/// Drops events closer than dead_time_ps to the previous kept event.
void apply_dead_time(TimeTagStream& stream, double dead_time_ps);

/// CSV rows "channel,timestamp_ps,origin", both channels merged in time order.
void write_timetags_csv(const StreamPair& streams, const std::string& path, const std::string& header);
StreamPair read_timetags_csv(const std::string& path);

/// Little-endian: "SFWMTT01", u64 config hash, u64 record count, then packed 10-byte records
/// (u8 channel, u64 timestamp_ps, u8 origin) in time order.
void write_timetags_binary(const StreamPair& streams, const std::string& path, std::uint64_t config_hash);
StreamPair read_timetags_binary(const std::string& path, std::uint64_t* config_hash = nullptr);

}  // namespace sfwm
