#include "sfwm/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace sfwm {

namespace {

struct Reader {
  std::string source;

  [[noreturn]] void fail(const YAML::Mark& mark, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << source;
    if (!mark.is_null()) os << ':' << mark.line + 1 << ':' << mark.column + 1;
    os << ": field '" << field << "': " << msg;
    throw ConfigError(os.str());
  }

  template <typename T>
  T as(const YAML::Node& n, const std::string& field, const char* type) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n.Mark(), field, std::string("expected ") + type);
    }
  }

  double number(const YAML::Node& n, const std::string& field) const {
    const double v = as<double>(n, field, "a number");
    if (!std::isfinite(v)) fail(n.Mark(), field, "must be finite");
    return v;
  }

  void keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!n.IsMap()) fail(n.Mark(), path, "expected a mapping");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first.Mark(), path.empty() ? key : path + "." + key, "unknown key");
    }
  }

  void get(const YAML::Node& parent, const char* key, const std::string& path, double& out) const {
    if (auto n = parent[key]) out = number(n, path + key);
  }
  void get(const YAML::Node& parent, const char* key, const std::string& path, int& out) const {
    if (auto n = parent[key]) out = as<int>(n, path + key, "an integer");
  }
  void get(const YAML::Node& parent, const char* key, const std::string& path, std::int64_t& out) const {
    if (auto n = parent[key]) out = as<std::int64_t>(n, path + key, "an integer");
  }
  void get(const YAML::Node& parent, const char* key, const std::string& path, bool& out) const {
    if (auto n = parent[key]) out = as<bool>(n, path + key, "true or false");
  }
  void get(const YAML::Node& parent, const char* key, const std::string& path, std::string& out) const {
    if (auto n = parent[key]) out = as<std::string>(n, path + key, "a string");
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence()) fail(n.Mark(), field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < n.size(); ++k) out.push_back(number(n[k], field + "[" + std::to_string(k) + "]"));
    return out;
  }

  template <typename Fn>
  void check(const YAML::Node& n, const std::string& field, Fn&& fn) const {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      fail(n.Mark(), field, e.what());
    } catch (const std::domain_error& e) {
      fail(n.Mark(), field, e.what());
    }
  }
};

PairStatistics parse_statistics(const Reader& r, const YAML::Node& n, const std::string& field) {
  const auto s = r.as<std::string>(n, field, "a string");
  if (s == "poisson") return PairStatistics::poisson;
  if (s == "thermal") return PairStatistics::thermal;
  r.fail(n.Mark(), field, "expected poisson or thermal, got '" + s + "'");
}

void parse_fiber(const Reader& r, const YAML::Node& n, RunConfig& cfg) {
  r.keys(n, "fiber", {"core_radius_um", "numerical_aperture", "length_m", "birefringence", "calibrate"});
  r.get(n, "core_radius_um", "fiber.", cfg.fiber.core_radius_um);
  r.get(n, "numerical_aperture", "fiber.", cfg.fiber.numerical_aperture);
  r.get(n, "length_m", "fiber.", cfg.fiber.length_m);
  const bool has_dn = static_cast<bool>(n["birefringence"]);
  const bool has_cal = static_cast<bool>(n["calibrate"]);
  // neither keeps the default calibration target
  if (has_dn && has_cal)
    r.fail(n.Mark(), "fiber", "give either 'birefringence' or 'calibrate', not both");
  if (has_dn) {
    cfg.birefringence = r.number(n["birefringence"], "fiber.birefringence");
    cfg.calibrate.reset();
  } else if (has_cal) {
    const auto c = n["calibrate"];
    r.keys(c, "fiber.calibrate", {"signal_nm", "idler_nm", "process"});
    CalibrationTarget t;
    r.get(c, "signal_nm", "fiber.calibrate.", t.signal_nm);
    r.get(c, "idler_nm", "fiber.calibrate.", t.idler_nm);
    r.get(c, "process", "fiber.calibrate.", t.process);
    cfg.calibrate = t;
    cfg.birefringence.reset();
  }
  r.check(n, "fiber", [&] { cfg.fiber.validate(); });
}

void parse_pump(const Reader& r, const YAML::Node& n, RunConfig& cfg) {
  r.keys(n, "pump", {"center_nm", "bandwidth_nm", "duration_fs", "rep_rate_hz", "power_mw", "chirp"});
  auto& p = cfg.pump;
  r.get(n, "center_nm", "pump.", p.center_nm);
  r.get(n, "bandwidth_nm", "pump.", p.bandwidth_fwhm_nm);
  r.get(n, "duration_fs", "pump.", p.pulse_duration_fs);
  r.get(n, "rep_rate_hz", "pump.", p.rep_rate_hz);
  r.get(n, "power_mw", "pump.", p.avg_power_mw);
  r.get(n, "chirp", "pump.", p.chirp);
  r.check(n, "pump", [&] { p.validate(); });
}

DetectionChain parse_chain(const Reader& r, const YAML::Node& n, const std::string& path, DetectionChain c) {
  r.keys(n, path, {"label", "components", "detector_efficiency", "dark_count_rate_hz", "background_rate_hz",
                   "jitter_sigma_ps", "dead_time_ps"});
  const std::string pre = path + ".";
  r.get(n, "label", pre, c.label);
  if (auto comps = n["components"]) {
    if (!comps.IsSequence()) r.fail(comps.Mark(), pre + "components", "expected a list");
    c.components.clear();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const auto item = comps[k];
      const std::string ip = pre + "components[" + std::to_string(k) + "]";
      r.keys(item, ip, {"name", "transmittance"});
      ChainComponent cc;
      r.get(item, "name", ip + ".", cc.name);
      if (!item["transmittance"]) r.fail(item.Mark(), ip + ".transmittance", "missing");
      cc.transmittance = r.number(item["transmittance"], ip + ".transmittance");
      c.components.push_back(cc);
    }
  }
  r.get(n, "detector_efficiency", pre, c.detector_efficiency);
  r.get(n, "dark_count_rate_hz", pre, c.dark_count_rate_hz);
  r.get(n, "background_rate_hz", pre, c.background_rate_hz);
  r.get(n, "jitter_sigma_ps", pre, c.jitter_sigma_ps);
  r.get(n, "dead_time_ps", pre, c.dead_time_ps);
  r.check(n, path, [&] { c.validate(); });
  return c;
}

ProcessConfig parse_process(const Reader& r, const YAML::Node& n, const std::string& path) {
  r.keys(n, path, {"label", "modes", "statistics", "max_power_mw", "measured", "pair_coefficient"});
  ProcessConfig pc;
  std::string label;
  if (!n["label"]) r.fail(n.Mark(), path + ".label", "missing");
  r.get(n, "label", path + ".", label);
  const auto modes = n["modes"];
  if (!modes) r.fail(n.Mark(), path + ".modes", "missing (four mode labels: pump1, pump2, signal, idler)");
  if (!modes.IsSequence() || modes.size() != 4)
    r.fail(modes.Mark(), path + ".modes", "expected four mode labels: pump1, pump2, signal, idler");
  std::vector<ModeId> ids;
  for (std::size_t k = 0; k < 4; ++k) {
    const std::string field = path + ".modes[" + std::to_string(k) + "]";
    const auto s = r.as<std::string>(modes[k], field, "a mode label");
    try {
      ids.push_back(parse_mode_label(s));
    } catch (const std::invalid_argument& e) {
      r.fail(modes[k].Mark(), field, e.what());
    }
    pc.mode_labels.push_back(s);
  }
  pc.spec = ProcessSpec::cross_polarized(label, ids[0], ids[1], ids[2], ids[3]);
  r.check(modes, path + ".modes", [&] { pc.spec.validate(); });
  if (auto s = n["statistics"]) pc.statistics = parse_statistics(r, s, path + ".statistics");
  r.get(n, "max_power_mw", path + ".", pc.max_power_mw);
  if (!(pc.max_power_mw > 0.0)) r.fail(n["max_power_mw"].Mark(), path + ".max_power_mw", "must be > 0");
  if (auto m = n["measured"]) {
    const std::string mp = path + ".measured";
    r.keys(m, mp, {"power_mw", "singles_s_hz", "singles_i_hz", "coincidences_hz"});
    MeasuredRates mr;
    for (const char* key : {"power_mw", "singles_s_hz", "singles_i_hz", "coincidences_hz"})
      if (!m[key]) r.fail(m.Mark(), mp + "." + key, "missing");
    r.get(m, "power_mw", mp + ".", mr.power_mw);
    r.get(m, "singles_s_hz", mp + ".", mr.singles_s);
    r.get(m, "singles_i_hz", mp + ".", mr.singles_i);
    r.get(m, "coincidences_hz", mp + ".", mr.coincidences);
    if (!(mr.power_mw > 0.0)) r.fail(m["power_mw"].Mark(), mp + ".power_mw", "must be > 0");
    if (mr.singles_s < 0 || mr.singles_i < 0 || mr.coincidences < 0) r.fail(m.Mark(), mp, "rates must be >= 0");
    pc.measured = mr;
  }
  if (auto k = n["pair_coefficient"]) {
    pc.pair_coefficient = r.number(k, path + ".pair_coefficient");
    if (*pc.pair_coefficient < 0.0) r.fail(k.Mark(), path + ".pair_coefficient", "must be >= 0");
  }
  if (pc.measured && pc.pair_coefficient)
    r.fail(n.Mark(), path, "give either 'measured' or 'pair_coefficient', not both");
  return pc;
}

void parse_counting(const Reader& r, const YAML::Node& n, CountingConfig& c) {
  r.keys(n, "counting", {"window_ns", "bin_width_ps", "span_ns", "powers_mw", "duration_s", "integration_s",
                         "write_streams", "stream_format"});
  r.get(n, "window_ns", "counting.", c.window_ns);
  r.get(n, "bin_width_ps", "counting.", c.bin_width_ps);
  r.get(n, "span_ns", "counting.", c.span_ns);
  if (auto p = n["powers_mw"]) c.powers_mw = r.numbers(p, "counting.powers_mw");
  r.get(n, "duration_s", "counting.", c.duration_s);
  r.get(n, "integration_s", "counting.", c.integration_s);
  r.get(n, "write_streams", "counting.", c.write_streams);
  r.get(n, "stream_format", "counting.", c.stream_format);
}

void parse_jsi(const Reader& r, const YAML::Node& n, JsiGridSpec& j) {
  r.keys(n, "jsi", {"signal_points", "idler_points", "signal_half_width", "idler_half_width", "pump_sigmas",
                    "pm_bandwidths", "model", "quadrature_points", "center_signal_nm", "center_idler_nm"});
  r.get(n, "signal_points", "jsi.", j.signal_points);
  r.get(n, "idler_points", "jsi.", j.idler_points);
  r.get(n, "signal_half_width", "jsi.", j.signal_half_width);
  r.get(n, "idler_half_width", "jsi.", j.idler_half_width);
  r.get(n, "pump_sigmas", "jsi.", j.pump_sigmas);
  r.get(n, "pm_bandwidths", "jsi.", j.pm_bandwidths);
  r.get(n, "quadrature_points", "jsi.", j.quadrature_points);
  if (auto m = n["model"]) {
    const auto s = r.as<std::string>(m, "jsi.model", "a string");
    if (s == "fast")
      j.model = PumpModel::fast;
    else if (s == "exact")
      j.model = PumpModel::exact;
    else
      r.fail(m.Mark(), "jsi.model", "expected fast or exact, got '" + s + "'");
  }
  if (auto c = n["center_signal_nm"]) j.center_signal_nm = r.number(c, "jsi.center_signal_nm");
  if (auto c = n["center_idler_nm"]) j.center_idler_nm = r.number(c, "jsi.center_idler_nm");
  if (j.signal_points < 2 || j.idler_points < 2)
    r.fail(n.Mark(), "jsi", "signal_points and idler_points must be >= 2");
  if (j.quadrature_points < 3) r.fail(n.Mark(), "jsi.quadrature_points", "must be >= 3");
}

void parse_root(const Reader& r, const YAML::Node& root, RunConfig& cfg) {
  if (root.IsNull()) return;
  r.keys(root, "", {"fiber", "pump", "processes", "chains", "counting", "jsi", "modes", "scan", "output_dir", "seed"});
  if (auto n = root["fiber"]) parse_fiber(r, n, cfg);
  if (auto n = root["pump"]) parse_pump(r, n, cfg);
  if (auto n = root["processes"]) {
    if (!n.IsSequence() || n.size() == 0) r.fail(n.Mark(), "processes", "expected a non-empty list");
    cfg.processes.clear();
    for (std::size_t k = 0; k < n.size(); ++k) {
      auto pc = parse_process(r, n[k], "processes[" + std::to_string(k) + "]");
      for (const auto& other : cfg.processes)
        if (other.spec.label == pc.spec.label)
          r.fail(n[k].Mark(), "processes[" + std::to_string(k) + "].label", "duplicate label '" + pc.spec.label + "'");
      cfg.processes.push_back(std::move(pc));
    }
  }
  if (auto n = root["chains"]) {
    r.keys(n, "chains", {"signal", "idler"});
    if (auto c = n["signal"]) cfg.chain_s = parse_chain(r, c, "chains.signal", cfg.chain_s);
    if (auto c = n["idler"]) cfg.chain_i = parse_chain(r, c, "chains.idler", cfg.chain_i);
  }
  if (auto n = root["counting"]) parse_counting(r, n, cfg.counting);
  if (auto n = root["jsi"]) parse_jsi(r, n, cfg.jsi);
  if (auto n = root["modes"]) {
    r.keys(n, "modes", {"wavelengths_nm"});
    if (auto w = n["wavelengths_nm"]) cfg.mode_wavelengths_nm = r.numbers(w, "modes.wavelengths_nm");
  }
  if (auto n = root["scan"]) {
    r.keys(n, "scan", {"signal_min_nm", "signal_max_nm", "samples"});
    r.get(n, "signal_min_nm", "scan.", cfg.scan.signal_min_nm);
    r.get(n, "signal_max_nm", "scan.", cfg.scan.signal_max_nm);
    r.get(n, "samples", "scan.", cfg.scan.samples);
  }
  if (auto n = root["output_dir"]) cfg.output_dir = r.as<std::string>(n, "output_dir", "a string");
  if (auto n = root["seed"]) cfg.seed = r.as<std::uint64_t>(n, "seed", "a non-negative integer");
}

const char* statistics_name(PairStatistics s) { return s == PairStatistics::thermal ? "thermal" : "poisson"; }

}  // namespace

const ProcessConfig& RunConfig::process(const std::string& label) const {
  for (const auto& p : processes)
    if (p.spec.label == label) return p;
  std::string known;
  for (const auto& p : processes) known += (known.empty() ? "" : ", ") + p.spec.label;
  throw ConfigError("unknown process '" + label + "' (configured: " + known + ")");
}

void RunConfig::validate() const {
  if (birefringence.has_value() == calibrate.has_value())
    throw ConfigError("fiber: exactly one of 'birefringence' or 'calibrate' must be given");
  if (calibrate) process(calibrate->process);
  if (processes.empty()) throw ConfigError("processes: at least one process is required");
  const double period_ns = 1e9 / pump.rep_rate_hz;
  const auto& c = counting;
  if (!(c.window_ns > 0.0) || c.window_ns >= period_ns)
    throw ConfigError("counting.window_ns: must be positive and shorter than the pulse period");
  if (c.bin_width_ps <= 0) throw ConfigError("counting.bin_width_ps: must be > 0");
  if (c.span_ns < 3.0 * period_ns + 0.5 * c.window_ns)
    throw ConfigError("counting.span_ns: must cover at least 3 repetition periods on each side");
  if (!(c.duration_s > 0.0)) throw ConfigError("counting.duration_s: must be > 0");
  if (!(c.integration_s > 0.0)) throw ConfigError("counting.integration_s: must be > 0");
  if (!std::is_sorted(c.powers_mw.begin(), c.powers_mw.end()))
    throw ConfigError("counting.powers_mw: must be sorted ascending");
  for (double p : c.powers_mw)
    if (p < 0.0) throw ConfigError("counting.powers_mw: powers must be >= 0");
  if (c.stream_format != "binary" && c.stream_format != "csv")
    throw ConfigError("counting.stream_format: expected binary or csv");
  if (!(scan.signal_min_nm > 0.0) || !(scan.signal_max_nm > scan.signal_min_nm) || scan.samples < 2)
    throw ConfigError("scan: need 0 < signal_min_nm < signal_max_nm and samples >= 2");
  for (double w : mode_wavelengths_nm)
    if (!(w > 0.0)) throw ConfigError("modes.wavelengths_nm: wavelengths must be > 0");
}

RunConfig default_config() {
  RunConfig cfg;
  ProcessConfig p1;
  p1.spec = fundamental_process("process1");
  p1.mode_labels = {"LP01", "LP01", "LP01", "LP01"};
  p1.max_power_mw = 25.0;
  p1.measured = MeasuredRates{25.0, 175e3, 112e3, 32.5e3};
  ProcessConfig p2;
  p2.spec = higher_order_process("process2");
  p2.mode_labels = {"LP11e", "LP01", "LP11e", "LP01"};
  p2.max_power_mw = 15.0;
  p2.measured = MeasuredRates{14.0, 40.2e3, 79e3, 910.0};
  cfg.processes = {p1, p2};
  return cfg;
}

RunConfig parse_config(const std::string& text, const std::string& source_name) {
  Reader r{source_name};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    r.fail(e.mark, "<syntax>", e.msg);
  }
  RunConfig cfg = default_config();
  parse_root(r, root, cfg);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

std::string to_yaml(const RunConfig& cfg) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "fiber" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "core_radius_um" << YAML::Value << cfg.fiber.core_radius_um;
  e << YAML::Key << "numerical_aperture" << YAML::Value << cfg.fiber.numerical_aperture;
  e << YAML::Key << "length_m" << YAML::Value << cfg.fiber.length_m;
  if (cfg.birefringence) e << YAML::Key << "birefringence" << YAML::Value << *cfg.birefringence;
  if (cfg.calibrate) {
    e << YAML::Key << "calibrate" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "signal_nm" << YAML::Value << cfg.calibrate->signal_nm;
    e << YAML::Key << "idler_nm" << YAML::Value << cfg.calibrate->idler_nm;
    e << YAML::Key << "process" << YAML::Value << cfg.calibrate->process;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;

  const auto& p = cfg.pump;
  e << YAML::Key << "pump" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "center_nm" << YAML::Value << p.center_nm;
  e << YAML::Key << "bandwidth_nm" << YAML::Value << p.bandwidth_fwhm_nm;
  e << YAML::Key << "duration_fs" << YAML::Value << p.pulse_duration_fs;
  e << YAML::Key << "rep_rate_hz" << YAML::Value << p.rep_rate_hz;
  e << YAML::Key << "power_mw" << YAML::Value << p.avg_power_mw;
  e << YAML::Key << "chirp" << YAML::Value << p.chirp;
  e << YAML::EndMap;

  e << YAML::Key << "processes" << YAML::Value << YAML::BeginSeq;
  for (const auto& pc : cfg.processes) {
    e << YAML::BeginMap;
    e << YAML::Key << "label" << YAML::Value << pc.spec.label;
    e << YAML::Key << "modes" << YAML::Value << YAML::Flow << pc.mode_labels;
    e << YAML::Key << "statistics" << YAML::Value << statistics_name(pc.statistics);
    if (std::isfinite(pc.max_power_mw)) e << YAML::Key << "max_power_mw" << YAML::Value << pc.max_power_mw;
    if (pc.measured) {
      e << YAML::Key << "measured" << YAML::Value << YAML::BeginMap;
      e << YAML::Key << "power_mw" << YAML::Value << pc.measured->power_mw;
      e << YAML::Key << "singles_s_hz" << YAML::Value << pc.measured->singles_s;
      e << YAML::Key << "singles_i_hz" << YAML::Value << pc.measured->singles_i;
      e << YAML::Key << "coincidences_hz" << YAML::Value << pc.measured->coincidences;
      e << YAML::EndMap;
    }
    if (pc.pair_coefficient) e << YAML::Key << "pair_coefficient" << YAML::Value << *pc.pair_coefficient;
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;

  e << YAML::Key << "chains" << YAML::Value << YAML::BeginMap;
  for (const auto* c : {&cfg.chain_s, &cfg.chain_i}) {
    e << YAML::Key << (c == &cfg.chain_s ? "signal" : "idler") << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "label" << YAML::Value << c->label;
    e << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
    for (const auto& cc : c->components)
      e << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << cc.name << YAML::Key
        << "transmittance" << YAML::Value << cc.transmittance << YAML::EndMap;
    e << YAML::EndSeq;
    e << YAML::Key << "detector_efficiency" << YAML::Value << c->detector_efficiency;
    e << YAML::Key << "dark_count_rate_hz" << YAML::Value << c->dark_count_rate_hz;
    e << YAML::Key << "background_rate_hz" << YAML::Value << c->background_rate_hz;
    e << YAML::Key << "jitter_sigma_ps" << YAML::Value << c->jitter_sigma_ps;
    e << YAML::Key << "dead_time_ps" << YAML::Value << c->dead_time_ps;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;

  const auto& c = cfg.counting;
  e << YAML::Key << "counting" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "window_ns" << YAML::Value << c.window_ns;
  e << YAML::Key << "bin_width_ps" << YAML::Value << c.bin_width_ps;
  e << YAML::Key << "span_ns" << YAML::Value << c.span_ns;
  e << YAML::Key << "powers_mw" << YAML::Value << YAML::Flow << c.powers_mw;
  e << YAML::Key << "duration_s" << YAML::Value << c.duration_s;
  e << YAML::Key << "integration_s" << YAML::Value << c.integration_s;
  e << YAML::Key << "write_streams" << YAML::Value << c.write_streams;
  e << YAML::Key << "stream_format" << YAML::Value << c.stream_format;
  e << YAML::EndMap;

  const auto& j = cfg.jsi;
  e << YAML::Key << "jsi" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "signal_points" << YAML::Value << j.signal_points;
  e << YAML::Key << "idler_points" << YAML::Value << j.idler_points;
  e << YAML::Key << "signal_half_width" << YAML::Value << j.signal_half_width;
  e << YAML::Key << "idler_half_width" << YAML::Value << j.idler_half_width;
  e << YAML::Key << "pump_sigmas" << YAML::Value << j.pump_sigmas;
  e << YAML::Key << "pm_bandwidths" << YAML::Value << j.pm_bandwidths;
  e << YAML::Key << "model" << YAML::Value << (j.model == PumpModel::exact ? "exact" : "fast");
  e << YAML::Key << "quadrature_points" << YAML::Value << j.quadrature_points;
  if (j.center_signal_nm) e << YAML::Key << "center_signal_nm" << YAML::Value << *j.center_signal_nm;
  if (j.center_idler_nm) e << YAML::Key << "center_idler_nm" << YAML::Value << *j.center_idler_nm;
  e << YAML::EndMap;

  e << YAML::Key << "modes" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "wavelengths_nm" << YAML::Value << YAML::Flow << cfg.mode_wavelengths_nm;
  e << YAML::EndMap;

  e << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "signal_min_nm" << YAML::Value << cfg.scan.signal_min_nm;
  e << YAML::Key << "signal_max_nm" << YAML::Value << cfg.scan.signal_max_nm;
  e << YAML::Key << "samples" << YAML::Value << cfg.scan.samples;
  e << YAML::EndMap;

  e << YAML::Key << "output_dir" << YAML::Value << cfg.output_dir;
  e << YAML::Key << "seed" << YAML::Value << cfg.seed;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // where results go is not part of what they depend on
  RunConfig c = cfg;
  c.output_dir.clear();
  return fnv1a(to_yaml(c));
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string output_header(const RunConfig& cfg) {
  return std::string("# sfwm ") + kVersion + " config " + hash_hex(config_hash(cfg)) + "\n";
}

}  // namespace sfwm
