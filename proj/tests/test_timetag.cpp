#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "sfwm/timetag.hpp"

using namespace sfwm;
namespace fs = std::filesystem;

namespace {

DetectionChain chain(double eta, double background = 0.0, double jitter = 0.0) {
  DetectionChain c;
  c.components = {{"t", eta}};
  c.background_rate_hz = background;
  c.jitter_sigma_ps = jitter;
  return c;
}

std::vector<std::uint64_t> poisson_times(std::mt19937_64& rng, double rate_hz, double duration_s) {
  std::exponential_distribution<double> gap(rate_hz * 1e-12);
  std::vector<std::uint64_t> out;
  double t = 0.0;
  while ((t += gap(rng)) < duration_s * 1e12) out.push_back(static_cast<std::uint64_t>(t));
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sfwm_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("correlate") {
  TEST_CASE("histogram geometry") {
    Histogram h(50, 70.0);
    CHECK(h.half_bins == 1400);
    CHECK(h.counts.size() == 2800);
    CHECK(h.span_ps() == 70000);
    CHECK(h.bin_center_ps(1400) == 25.0);
    CHECK(h.bin_center_ps(0) == -69975.0);
    Histogram odd(30, 0.1);
    CHECK(odd.half_bins == 4);  // rounded up to cover the span
  }

  TEST_CASE("span edges and bin assignment") {
    const std::vector<std::uint64_t> a{100000};
    const std::vector<std::uint64_t> b{100000 - 1000, 100000 - 1, 100000, 100000 + 49, 100000 + 50, 100000 + 1000};
    const auto h = correlate(a, b, 50, 1.0);
    CHECK(h.total() == 5);  // +1000 sits on the excluded upper edge
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[h.half_bins - 1] == 1);
    CHECK(h.counts[h.half_bins] == 2);
    CHECK(h.counts[h.half_bins + 1] == 1);
  }

  TEST_CASE("histogram conserves the number of delay pairs") {
    std::mt19937_64 rng(3);
    const auto a = poisson_times(rng, 2e6, 1e-3);
    const auto b = poisson_times(rng, 3e6, 1e-3);
    const auto h = correlate(a, b, 50, 20.0);
    std::uint64_t brute = 0;
    for (auto ta : a)
      for (auto tb : b) {
        const auto d = static_cast<std::int64_t>(tb) - static_cast<std::int64_t>(ta);
        if (d >= -20000 && d < 20000) ++brute;
      }
    CHECK(h.total() == brute);
    CHECK(brute > 100);
  }

  TEST_CASE("independent Poisson streams give a flat histogram") {
    std::mt19937_64 rng(11);
    const auto a = poisson_times(rng, 1e6, 1.0);
    const auto b = poisson_times(rng, 1e6, 1.0);
    const auto h = correlate(a, b, 1000, 70.0);
    const double mean = static_cast<double>(h.total()) / h.counts.size();
    double chi2 = 0.0;
    for (auto c : h.counts) chi2 += (c - mean) * (c - mean) / mean;
    const double dof = static_cast<double>(h.counts.size() - 1);
    CHECK(std::abs(chi2 / dof - 1.0) < 5.0 * std::sqrt(2.0 / dof));

    const auto g = g2_from_histogram(h, 2.0, 12.5);
    CHECK(std::abs(g.g2 - 1.0) < 3.0 * g.sigma_g2);
  }

  TEST_CASE("window counts select by bin centre") {
    Histogram h(50, 1.0);
    for (auto& c : h.counts) c = 1;
    CHECK(window_counts(h, 0.0, 200.0) == 4);
    CHECK(window_counts(h, 0.0, 2000.0) == 40);
    CHECK(window_counts(h, 12.5, 50.0) == 1);
  }

  TEST_CASE("g2 estimator edge cases") {
    Histogram h(50, 70.0);
    h.counts[h.half_bins] = 100;
    const auto g = g2_from_histogram(h, 2.0, 12.5);
    CHECK(g.side_peaks == 10);
    CHECK(g.infinite);
    CHECK(g.nc == 100.0);
    CHECK(std::isinf(g.g2));
    Histogram narrow(50, 30.0);
    CHECK_THROWS_AS(g2_from_histogram(narrow, 2.0, 12.5), std::invalid_argument);
    CHECK_THROWS_AS(g2_from_histogram(h, 13.0, 12.5), std::invalid_argument);
  }

  TEST_CASE("histogram CSV") {
    const auto dir = scratch_dir("hist");
    Histogram h(50, 0.2);
    h.counts[3] = 9;
    write_histogram_csv(h, (dir / "h.csv").string(), "# h\n");
    std::ifstream in(dir / "h.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 2 + h.counts.size());
    CHECK(lines[1] == "delay_ps,counts");
    CHECK(lines[2 + 3] == "-25,9");
    fs::remove_all(dir);
  }
}

TEST_SUITE("timetag") {
  TEST_CASE("lossless pairs match the binomial oracle") {
    const double mu = 1e-3;
    const std::uint64_t pulses = 10'000'000;
    SourceModel src{mu};  // 1 mW
    const auto s = simulate_stream(src, chain(1.0), chain(1.0), 1.0, pulses / src.rep_rate_hz, 5);
    CHECK(s.pulses == pulses);
    const double expected = pulses * mu;
    CHECK(std::abs(static_cast<double>(s.signal.size()) - expected) < 3.0 * std::sqrt(expected));
    CHECK(s.signal.size() == s.idler.size());
    CHECK(s.signal.timestamp_ps == s.idler.timestamp_ps);
    CHECK(std::all_of(s.signal.origin.begin(), s.signal.origin.end(), [](Origin o) { return o == Origin::pair; }));
    // every event sits on a pulse slot
    const double period_ps = 1e12 / src.rep_rate_hz;
    for (std::size_t k = 0; k < s.signal.size(); k += 97) {
      const double slot = s.signal.timestamp_ps[k] / period_ps - 0.5;
      CHECK(std::abs(slot - std::round(slot)) * period_ps <= 1.0);
    }
  }

  TEST_CASE("no pairs: only background, flat correlation") {
    SourceModel src{0.0};
    const auto s = simulate_stream(src, chain(0.5, 1e6), chain(0.5, 1e6), 10.0, 0.5, 9);
    CHECK(std::none_of(s.signal.origin.begin(), s.signal.origin.end(), [](Origin o) { return o == Origin::pair; }));
    const auto g = g2_from_histogram(correlate(s, 50, 70.0), 2.0, 12.5);
    CHECK(std::abs(g.g2 - 1.0) < 3.0 * g.sigma_g2);
  }

  TEST_CASE("deterministic for a seed, independent of thread count") {
    SourceModel src{4.5e-6};
    const auto cs = chain(0.24, 1.2e5, 350.0);
    auto ci = chain(0.6, 0.0, 50.0);
    ci.dark_count_rate_hz = 100.0;
    SimulationOptions one{1 << 18, 1};
    SimulationOptions many{1 << 18, 4};
    const auto a = simulate_stream(src, cs, ci, 25.0, 0.05, 42, one);
    const auto b = simulate_stream(src, cs, ci, 25.0, 0.05, 42, many);
    const auto c = simulate_stream(src, cs, ci, 25.0, 0.05, 43, many);
    CHECK(a.signal.timestamp_ps == b.signal.timestamp_ps);
    CHECK(a.idler.timestamp_ps == b.idler.timestamp_ps);
    CHECK(a.signal.origin == b.signal.origin);
    CHECK(a.signal.timestamp_ps != c.signal.timestamp_ps);

    const auto ra = simulate_and_correlate(src, cs, ci, 25.0, 0.05, 42, 50, 70.0, one);
    const auto rb = simulate_and_correlate(src, cs, ci, 25.0, 0.05, 42, 50, 70.0, many);
    CHECK(ra.histogram.counts == rb.histogram.counts);
    // the streaming correlation equals correlating the full stream
    CHECK(ra.histogram.counts == correlate(a, 50, 70.0).counts);
    CHECK(ra.events_s == a.signal.size());
  }

  TEST_CASE("timestamps are sorted per channel") {
    SourceModel src{1e-3};
    const auto s = simulate_stream(src, chain(0.5, 1e5, 300.0), chain(0.5, 1e5, 300.0), 5.0, 0.01, 2);
    CHECK(std::is_sorted(s.signal.timestamp_ps.begin(), s.signal.timestamp_ps.end()));
    CHECK(std::is_sorted(s.idler.timestamp_ps.begin(), s.idler.timestamp_ps.end()));
  }

  TEST_CASE("side peaks every repetition period") {
    SourceModel src{4.5e-6};
    const auto r = simulate_and_correlate(src, chain(0.236, 1.2e5, 350.0), chain(0.6075, 0.0, 50.0), 25.0, 2.0, 1,
                                          50, 70.0);
    const auto& h = r.histogram;
    for (int k = 1; k <= 5; ++k) {
      for (int sign : {-1, 1}) {
        const auto on = window_counts(h, sign * k * 12500.0, 2000.0);
        const auto off = window_counts(h, sign * (k + 0.5) * 12500.0, 2000.0);
        CHECK(on > off + 5.0 * std::sqrt(static_cast<double>(on + off)));
      }
    }
    CHECK(window_counts(h, 0.0, 2000.0) > 50 * window_counts(h, 12500.0, 2000.0));
  }

  TEST_CASE("uncorrelated pulsed channels give S_s S_i / R accidentals") {
    SourceModel src{1e-2};
    const double duration = 0.5;
    const auto a = simulate_stream(src, chain(1.0), chain(1.0), 1.0, duration, 100);
    const auto b = simulate_stream(src, chain(1.0), chain(1.0), 1.0, duration, 200);
    const auto h = correlate(a.signal.timestamp_ps, b.idler.timestamp_ps, 50, 70.0);
    const auto g = g2_from_histogram(h, 2.0, 12.5);
    const double ss = a.signal.size() / duration;
    const double si = b.idler.size() / duration;
    const double expected = pulsed_accidental_rate(ss, si, src.rep_rate_hz) * duration;
    CHECK(std::abs(g.na - expected) < 3.0 * std::sqrt(expected / g.side_peaks) + 0.01 * expected);
    CHECK(std::abs(g.g2 - 1.0) < 3.0 * g.sigma_g2);
  }

  TEST_CASE("dead time") {
    TimeTagStream t{0, {0, 10, 100, 105, 149, 150, 300}, std::vector<Origin>(7, Origin::dark)};
    apply_dead_time(t, 50.0);
    CHECK(t.timestamp_ps == std::vector<std::uint64_t>{0, 100, 150, 300});
    CHECK(t.origin.size() == 4);
    TimeTagStream u{0, {0, 10}, std::vector<Origin>(2, Origin::dark)};
    apply_dead_time(u, 0.0);
    CHECK(u.size() == 2);
  }

  TEST_CASE("stream files round trip") {
    const auto dir = scratch_dir("tt");
    SourceModel src{1e-3};
    const auto s = simulate_stream(src, chain(0.5, 1e5, 100.0), chain(0.7, 1e4), 10.0, 0.002, 8);
    REQUIRE(s.signal.size() > 10);

    write_timetags_csv(s, (dir / "t.csv").string(), "# tt\n");
    const auto c = read_timetags_csv((dir / "t.csv").string());
    CHECK(c.signal.timestamp_ps == s.signal.timestamp_ps);
    CHECK(c.idler.timestamp_ps == s.idler.timestamp_ps);
    CHECK(c.signal.origin == s.signal.origin);

    write_timetags_binary(s, (dir / "t.bin").string(), 77);
    std::uint64_t hash = 0;
    const auto b = read_timetags_binary((dir / "t.bin").string(), &hash);
    CHECK(hash == 77);
    CHECK(b.signal.timestamp_ps == s.signal.timestamp_ps);
    CHECK(b.idler.origin == s.idler.origin);
    CHECK(fs::file_size(dir / "t.bin") == 24 + 10 * (s.signal.size() + s.idler.size()));

    std::ofstream(dir / "bad.csv") << "channel,timestamp_ps,origin\n0,500,pair\n0,400,pair\n";
    CHECK_THROWS(read_timetags_csv((dir / "bad.csv").string()));
    std::ofstream(dir / "short.csv") << "0,500\n";
    CHECK_THROWS(read_timetags_csv((dir / "short.csv").string()));
    fs::remove_all(dir);
  }

  TEST_CASE("origin names") {
    CHECK(std::string(origin_name(Origin::pair)) == "pair");
    CHECK(std::string(origin_name(Origin::background)) == "background");
    CHECK(std::string(origin_name(Origin::dark)) == "dark");
  }
}
