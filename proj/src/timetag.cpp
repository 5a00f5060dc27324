#include "sfwm/timetag.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sfwm/io.hpp"
#include "sfwm/parallel.hpp"

namespace sfwm {

const char* origin_name(Origin o) {
  switch (o) {
    case Origin::pair: return "pair";
    case Origin::background: return "background";
    case Origin::dark: return "dark";
  }
  return "?";
}

namespace {

Origin parse_origin(const std::string& s) {
  if (s == "pair") return Origin::pair;
  if (s == "background") return Origin::background;
  if (s == "dark") return Origin::dark;
  throw std::invalid_argument("unknown time-tag origin '" + s + "'");
}

using Event = std::pair<std::uint64_t, Origin>;

struct Batch {
  std::vector<Event> s;
  std::vector<Event> i;
};

struct Plan {
  double mu = 0.0;
  PairStatistics stats = PairStatistics::poisson;
  double eta_s = 1.0, eta_i = 1.0;
  double jitter_s = 0.0, jitter_i = 0.0;
  double background_s = 0.0, dark_s = 0.0, background_i = 0.0, dark_i = 0.0;
  double period_ps = 0.0;
  std::uint64_t pulses = 0;
  std::uint64_t batch_pulses = 0;
  std::uint64_t batches = 0;
  std::uint64_t seed = 0;
};

Plan make_plan(const SourceModel& src, const DetectionChain& chain_s, const DetectionChain& chain_i, double power_mw,
               double duration_s, std::uint64_t seed, std::uint64_t batch_pulses) {
  src.validate();
  chain_s.validate();
  chain_i.validate();
  if (!(duration_s > 0.0)) throw std::invalid_argument("simulate_stream: duration must be > 0");
  if (power_mw < 0.0) throw std::invalid_argument("simulate_stream: power must be >= 0");
  if (batch_pulses == 0) throw std::invalid_argument("simulate_stream: batch_pulses must be > 0");
  Plan p;
  p.mu = src.mean_pairs(power_mw);
  p.stats = src.statistics;
  p.eta_s = chain_s.total_efficiency();
  p.eta_i = chain_i.total_efficiency();
  p.jitter_s = chain_s.jitter_sigma_ps;
  p.jitter_i = chain_i.jitter_sigma_ps;
  p.background_s = chain_s.background_rate_hz;
  p.dark_s = chain_s.dark_count_rate_hz;
  p.background_i = chain_i.background_rate_hz;
  p.dark_i = chain_i.dark_count_rate_hz;
  p.period_ps = 1e12 / src.rep_rate_hz;
  p.pulses = static_cast<std::uint64_t>(std::llround(duration_s * src.rep_rate_hz));
  if (p.pulses == 0) throw std::invalid_argument("simulate_stream: duration shorter than one pulse period");
  p.batch_pulses = batch_pulses;
  p.batches = (p.pulses + batch_pulses - 1) / batch_pulses;
  p.seed = seed;
  return p;
}

// Mean-mu law conditioned on n >= 1, by inversion.
std::uint64_t truncated_poisson(double mu, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double u = uni(rng);
  double p = mu / std::expm1(mu);
  double cdf = p;
  std::uint64_t n = 1;
  while (u > cdf && n < 10000) {
    ++n;
    p *= mu / static_cast<double>(n);
    cdf += p;
  }
  return n;
}

void add_cw(std::vector<Event>& out, double rate_hz, Origin tag, double t0_ps, double t1_ps, std::mt19937_64& rng) {
  if (rate_hz <= 0.0) return;
  std::poisson_distribution<std::uint64_t> count(rate_hz * (t1_ps - t0_ps) * 1e-12);
  std::uniform_real_distribution<double> when(t0_ps, t1_ps);
  const std::uint64_t n = count(rng);
  for (std::uint64_t k = 0; k < n; ++k) out.emplace_back(static_cast<std::uint64_t>(std::floor(when(rng))), tag);
}

Batch generate(const Plan& p, std::uint64_t b) {
  const std::uint64_t first = b * p.batch_pulses;
  const std::uint64_t n = std::min(p.batch_pulses, p.pulses - first);
  std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Batch out;
  const double p_nonempty = p.stats == PairStatistics::thermal ? p.mu / (1.0 + p.mu) : -std::expm1(-p.mu);
  if (p_nonempty > 0.0) {
    std::geometric_distribution<std::uint64_t> skip(p_nonempty);
    // thermal: P(n) ~ q^n, so n - 1 is geometric with success probability 1 - q
    std::geometric_distribution<std::uint64_t> thermal_extra(1.0 - p.mu / (1.0 + p.mu));
    auto stamp = [&](double t_ps, double jitter) {
      if (jitter > 0.0) t_ps += jitter * gauss(rng);
      return static_cast<std::uint64_t>(std::llround(std::max(t_ps, 0.0)));
    };
    for (std::uint64_t k = skip(rng); k < n; k += 1 + skip(rng)) {
      const std::uint64_t pairs = p.stats == PairStatistics::thermal ? 1 + thermal_extra(rng) : truncated_poisson(p.mu, rng);
      const double t = (static_cast<double>(first + k) + 0.5) * p.period_ps;
      for (std::uint64_t j = 0; j < pairs; ++j) {
        if (uni(rng) < p.eta_s) out.s.emplace_back(stamp(t, p.jitter_s), Origin::pair);
        if (uni(rng) < p.eta_i) out.i.emplace_back(stamp(t, p.jitter_i), Origin::pair);
      }
    }
  }
  const double t0 = static_cast<double>(first) * p.period_ps;
  const double t1 = static_cast<double>(first + n) * p.period_ps;
  add_cw(out.s, p.background_s, Origin::background, t0, t1, rng);
  add_cw(out.s, p.dark_s, Origin::dark, t0, t1, rng);
  add_cw(out.i, p.background_i, Origin::background, t0, t1, rng);
  add_cw(out.i, p.dark_i, Origin::dark, t0, t1, rng);
  std::sort(out.s.begin(), out.s.end());
  std::sort(out.i.begin(), out.i.end());
  return out;
}

// Keeps events at least dead_ps after the previous kept one; `last` carries across calls.
void dead_time_filter(std::vector<Event>& events, double dead_ps, std::int64_t& last) {
  if (dead_ps <= 0.0) return;
  std::size_t w = 0;
  for (const auto& e : events) {
    const auto t = static_cast<std::int64_t>(e.first);
    if (last < 0 || static_cast<double>(t - last) >= dead_ps) {
      events[w++] = e;
      last = t;
    }
  }
  events.resize(w);
}

std::vector<std::uint64_t> times_of(const std::vector<Event>& events) {
  std::vector<std::uint64_t> t(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) t[k] = events[k].first;
  return t;
}

void fill(TimeTagStream& stream, std::vector<Event>& events) {
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.first < b.first; });
  stream.timestamp_ps.resize(events.size());
  stream.origin.resize(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    stream.timestamp_ps[k] = events[k].first;
    stream.origin[k] = events[k].second;
  }
}

}  // namespace

StreamPair simulate_stream(const SourceModel& src, const DetectionChain& chain_s, const DetectionChain& chain_i,
                           double power_mw, double duration_s, std::uint64_t seed, const SimulationOptions& opts) {
  const Plan plan = make_plan(src, chain_s, chain_i, power_mw, duration_s, seed, opts.batch_pulses);
  std::vector<Batch> batches(plan.batches);
  parallel_for(batches.size(), [&](std::size_t b) { batches[b] = generate(plan, b); },
               opts.threads ? opts.threads : worker_count());

  std::vector<Event> s, i;
  for (auto& b : batches) {
    s.insert(s.end(), b.s.begin(), b.s.end());
    i.insert(i.end(), b.i.begin(), b.i.end());
    b = Batch{};
  }
  StreamPair out;
  out.pulses = plan.pulses;
  out.duration_s = static_cast<double>(plan.pulses) / src.rep_rate_hz;
  std::int64_t last_s = -1, last_i = -1;
  std::stable_sort(s.begin(), s.end(), [](const Event& a, const Event& b) { return a.first < b.first; });
  std::stable_sort(i.begin(), i.end(), [](const Event& a, const Event& b) { return a.first < b.first; });
  dead_time_filter(s, chain_s.dead_time_ps, last_s);
  dead_time_filter(i, chain_i.dead_time_ps, last_i);
  fill(out.signal, s);
  fill(out.idler, i);
  return out;
}

MonteCarloRun simulate_and_correlate(const SourceModel& src, const DetectionChain& chain_s,
                                     const DetectionChain& chain_i, double power_mw, double duration_s,
                                     std::uint64_t seed, std::int64_t bin_width_ps, double span_ns,
                                     const SimulationOptions& opts) {
  // Only neighbouring batches can share a delay pair, so each batch needs to last well beyond
  // the span plus the jitter tails.
  const double period_ps = 1e12 / src.rep_rate_hz;
  const double reach_ps = span_ns * 1e3 + 20.0 * std::max(chain_s.jitter_sigma_ps, chain_i.jitter_sigma_ps);
  const auto min_batch = static_cast<std::uint64_t>(std::ceil(2.0 * reach_ps / period_ps)) + 1;
  const Plan plan = make_plan(src, chain_s, chain_i, power_mw, duration_s, seed, std::max(opts.batch_pulses, min_batch));
  const unsigned threads = opts.threads ? opts.threads : worker_count();

  MonteCarloRun run;
  run.histogram = Histogram(bin_width_ps, span_ns);
  run.pulses = plan.pulses;
  run.duration_s = static_cast<double>(plan.pulses) / src.rep_rate_hz;

  struct Times {
    std::vector<std::uint64_t> s, i;
  };
  Times prev;
  bool have_prev = false;
  std::int64_t last_s = -1, last_i = -1;
  const std::uint64_t group = std::max<std::uint64_t>(2, 2 * threads);
  for (std::uint64_t g0 = 0; g0 < plan.batches; g0 += group) {
    const std::size_t n = static_cast<std::size_t>(std::min(group, plan.batches - g0));
    std::vector<Batch> raw(n);
    parallel_for(n, [&](std::size_t j) { raw[j] = generate(plan, g0 + j); }, threads);
    std::vector<Times> cur(n);
    for (std::size_t j = 0; j < n; ++j) {
      dead_time_filter(raw[j].s, chain_s.dead_time_ps, last_s);
      dead_time_filter(raw[j].i, chain_i.dead_time_ps, last_i);
      cur[j].s = times_of(raw[j].s);
      cur[j].i = times_of(raw[j].i);
      run.events_s += cur[j].s.size();
      run.events_i += cur[j].i.size();
      raw[j] = Batch{};
    }
    std::vector<Histogram> partial(n, Histogram(bin_width_ps, span_ns));
    parallel_for(n, [&](std::size_t j) {
      accumulate(partial[j], cur[j].s, cur[j].i);
      const Times* before = j > 0 ? &cur[j - 1] : (have_prev ? &prev : nullptr);
      if (before) {
        accumulate(partial[j], before->s, cur[j].i);
        accumulate(partial[j], cur[j].s, before->i);
      }
    }, threads);
    for (const auto& h : partial) run.histogram += h;
    prev = std::move(cur.back());
    have_prev = true;
  }
  return run;
}

void apply_dead_time(TimeTagStream& stream, double dead_time_ps) {
  if (dead_time_ps <= 0.0) return;
  std::vector<Event> events(stream.size());
  for (std::size_t k = 0; k < events.size(); ++k) events[k] = {stream.timestamp_ps[k], stream.origin[k]};
  std::int64_t last = -1;
  dead_time_filter(events, dead_time_ps, last);
  fill(stream, events);
}

namespace {

struct Record {
  std::uint8_t channel;
  std::uint64_t t;
  Origin origin;
};

std::vector<Record> merged(const StreamPair& streams) {
  std::vector<Record> out;
  out.reserve(streams.signal.size() + streams.idler.size());
  std::size_t a = 0, b = 0;
  const auto& s = streams.signal;
  const auto& i = streams.idler;
  while (a < s.size() || b < i.size()) {
    if (b >= i.size() || (a < s.size() && s.timestamp_ps[a] <= i.timestamp_ps[b])) {
      out.push_back({0, s.timestamp_ps[a], s.origin[a]});
      ++a;
    } else {
      out.push_back({1, i.timestamp_ps[b], i.origin[b]});
      ++b;
    }
  }
  return out;
}

void push(StreamPair& out, std::uint8_t channel, std::uint64_t t, Origin origin) {
  if (channel > 1) throw std::runtime_error("time-tag channel must be 0 or 1");
  auto& s = channel == 0 ? out.signal : out.idler;
  if (!s.timestamp_ps.empty() && t < s.timestamp_ps.back())
    throw std::runtime_error("time-tag timestamps decrease within a channel");
  s.timestamp_ps.push_back(t);
  s.origin.push_back(origin);
}

}  // namespace

void write_timetags_csv(const StreamPair& streams, const std::string& path, const std::string& header) {
  auto os = open_output(path);
  os << header << "channel,timestamp_ps,origin\n";
  for (const auto& r : merged(streams))
    os << static_cast<int>(r.channel) << ',' << r.t << ',' << origin_name(r.origin) << '\n';
  if (!os) throw std::runtime_error("failed writing " + path);
}

StreamPair read_timetags_csv(const std::string& path) {
  auto is = open_input(path);
  StreamPair out;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("channel", 0) == 0) continue;
    }
    std::istringstream ls(line);
    std::string ch, t, origin;
    if (!std::getline(ls, ch, ',') || !std::getline(ls, t, ',') || !std::getline(ls, origin))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected channel,timestamp_ps,origin");
    push(out, static_cast<std::uint8_t>(std::stoul(ch)), std::stoull(t), parse_origin(origin));
  }
  return out;
}

void write_timetags_binary(const StreamPair& streams, const std::string& path, std::uint64_t config_hash) {
  auto os = open_output(path, true);
  os.write("SFWMTT01", 8);
  put<std::uint64_t>(os, config_hash);
  put<std::uint64_t>(os, streams.signal.size() + streams.idler.size());
  for (const auto& r : merged(streams)) {
    put<std::uint8_t>(os, r.channel);
    put<std::uint64_t>(os, r.t);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(r.origin));
  }
  if (!os) throw std::runtime_error("failed writing " + path);
}

StreamPair read_timetags_binary(const std::string& path, std::uint64_t* config_hash) {
  auto is = open_input(path, true);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "SFWMTT01", 8) != 0) throw std::runtime_error("'" + path + "' is not an SFWMTT01 file");
  const auto hash = get<std::uint64_t>(is);
  if (config_hash) *config_hash = hash;
  const auto n = get<std::uint64_t>(is);
  StreamPair out;
  for (std::uint64_t k = 0; k < n; ++k) {
    const auto ch = get<std::uint8_t>(is);
    const auto t = get<std::uint64_t>(is);
    const auto o = get<std::uint8_t>(is);
    if (o > 2) throw std::runtime_error("'" + path + "': bad origin tag");
    push(out, ch, t, static_cast<Origin>(o));
  }
  return out;
}

}  // namespace sfwm
