#include "sfwm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sfwm/errors.hpp"
#include "sfwm/io.hpp"
#include "sfwm/modes.hpp"
#include "sfwm/timetag.hpp"
#include "sfwm/units.hpp"

namespace sfwm {

using nlohmann::json;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

json stamp(const RunConfig& cfg) {
  return json{{"generator", std::string("sfwm ") + kVersion}, {"config_hash", hash_hex(config_hash(cfg))}};
}

void write_json(const json& j, const std::string& path, CommandResult& res) {
  auto os = open_output(path);
  os << std::setw(2) << j << '\n';
  if (!os) throw std::runtime_error("failed writing " + path);
  res.files.push_back(path);
}

void write_effective_config(const RunConfig& cfg, CommandResult& res) {
  const auto path = out_path(cfg, "config.yaml");
  auto os = open_output(path);
  os << output_header(cfg) << to_yaml(cfg);
  res.files.push_back(path);
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<const ProcessConfig*> select(const RunConfig& cfg, const std::optional<std::string>& label) {
  std::vector<const ProcessConfig*> out;
  if (label) {
    out.push_back(&cfg.process(*label));
  } else {
    for (const auto& p : cfg.processes) out.push_back(&p);
  }
  return out;
}

void warn(CommandResult& res, std::ostream& log, const std::string& msg) {
  res.warnings.push_back(msg);
  log << "warning: " << msg << '\n';
}

json solution_json(const FiberSpec& fiber, const PhaseMatchSolution& s, const PumpSpec& pump) {
  const auto ec = check_energy_conservation(s.pump_nm, s.signal_nm, s.idler_nm, pump.bandwidth_fwhm_nm);
  json j{{"pump_nm", s.pump_nm},
         {"signal_nm", s.signal_nm},
         {"idler_nm", s.idler_nm},
         {"residual_per_m", s.residual_per_m},
         {"signal_is_nir", s.signal_is_nir},
         {"energy_mismatch", ec.mismatch},
         {"energy_within_bandwidth", ec.within_bandwidth}};
  j["phase_matching_bandwidth_nm"] = number(phase_matching_bandwidth(fiber, s));
  return j;
}

json counting_row(const CountingResult& r, const Uncertainties& u) {
  return json{{"power_mw", r.power_mw},
              {"mean_pairs", r.mean_pairs},
              {"singles_s_hz", r.singles_s},
              {"singles_i_hz", r.singles_i},
              {"coincidences_hz", r.coincidences},
              {"accidentals_hz", r.accidentals},
              {"zero_delay_hz", r.zero_delay},
              {"g2", number(r.g2)},
              {"g2_defined", r.g2_defined},
              {"car", number(r.car)},
              {"heralding_s_given_i", r.heralding_s_given_i},
              {"heralding_i_given_s", r.heralding_i_given_s},
              {"sigma_g2", number(u.g2)},
              {"sigma_coincidences_hz", u.coincidences},
              {"sigma_accidentals_hz", u.accidentals}};
}

json chain_json(const DetectionChain& c) {
  return json{{"label", c.label},
              {"total_efficiency", c.total_efficiency()},
              {"background_rate_hz", c.background_rate_hz},
              {"dark_count_rate_hz", c.dark_count_rate_hz},
              {"jitter_sigma_ps", c.jitter_sigma_ps},
              {"dead_time_ps", c.dead_time_ps}};
}

}  // namespace

FiberSpec resolve_fiber(const RunConfig& cfg, std::optional<CalibrationResult>* calibration) {
  FiberSpec fiber = cfg.fiber;
  if (cfg.birefringence) {
    fiber.birefringence = *cfg.birefringence;
    return fiber;
  }
  const auto& t = *cfg.calibrate;
  auto cal = calibrate_birefringence(fiber, t.signal_nm, t.idler_nm, cfg.process(t.process).spec, cfg.pump.center_nm,
                                     cfg.scan);
  fiber.birefringence = cal.birefringence;
  if (calibration) *calibration = cal;
  return fiber;
}

ResolvedSource resolve_source(const RunConfig& cfg, const ProcessConfig& pc) {
  ResolvedSource r;
  r.chain_s = cfg.chain_s;
  r.chain_i = cfg.chain_i;
  if (pc.measured) {
    auto fit = fit_source(*pc.measured, cfg.chain_s, cfg.chain_i, pc.statistics, cfg.pump.rep_rate_hz);
    r.chain_s = with_background(cfg.chain_s, fit.background_s);
    r.chain_i = with_background(cfg.chain_i, fit.background_i);
    r.source = fit.source;
    r.fit = std::move(fit);
  } else if (pc.pair_coefficient) {
    r.source.pair_coefficient = *pc.pair_coefficient;
    r.source.statistics = pc.statistics;
    r.source.rep_rate_hz = cfg.pump.rep_rate_hz;
  } else {
    throw ConfigError("process '" + pc.spec.label + "': needs 'measured' rates or a 'pair_coefficient'");
  }
  r.source.max_power_mw = pc.max_power_mw;
  return r;
}

CommandResult cmd_modes(const RunConfig& cfg, std::ostream& log) {
  CommandResult res;
  const auto path = out_path(cfg, "modes.csv");
  auto os = open_output(path);
  os << output_header(cfg) << "wavelength_nm,mode,n_eff,u,w,v_number\n";
  os << std::setprecision(12);
  for (double nm : cfg.mode_wavelengths_nm) {
    const double um = nm * 1e-3;
    const double v = v_number(cfg.fiber, um);
    const auto modes = solve_modes(cfg.fiber, um);
    log << std::fixed << std::setprecision(1) << nm << " nm (V = " << std::setprecision(3) << v << "):";
    for (const auto& m : modes) {
      os << nm << ',' << mode_label(m.mode) << ',' << m.n_eff << ',' << m.u << ',' << m.w << ',' << v << '\n';
      log << ' ' << mode_label(m.mode);
    }
    log << '\n' << std::defaultfloat;
  }
  res.files.push_back(path);
  write_effective_config(cfg, res);
  return res;
}

CommandResult cmd_phasematch(const RunConfig& cfg, std::ostream& log) {
  CommandResult res;
  std::optional<CalibrationResult> cal;
  const FiberSpec fiber = resolve_fiber(cfg, &cal);
  json j = stamp(cfg);
  j["birefringence"] = fiber.birefringence;
  if (cal) {
    j["calibration"] = {{"target_signal_nm", cfg.calibrate->signal_nm},
                        {"target_idler_nm", cfg.calibrate->idler_nm},
                        {"process", cfg.calibrate->process},
                        {"residual_nm", cal->residual_nm},
                        {"degenerate", cal->degenerate}};
    log << "calibrated birefringence " << fiber.birefringence << " (residual " << cal->residual_nm << " nm)\n";
    if (cal->degenerate) warn(res, log, "calibration target is degenerate with the pump; birefringence left at the lower bound");
  } else {
    j["calibration"] = nullptr;
    log << "birefringence " << fiber.birefringence << '\n';
  }
  j["processes"] = json::array();
  for (const auto& pc : cfg.processes) {
    const auto sols = solve_phase_matching(fiber, pc.spec, cfg.pump.center_nm, cfg.scan);
    json p{{"label", pc.spec.label}, {"modes", pc.mode_labels}, {"solutions", json::array()}};
    if (sols.empty()) warn(res, log, "process '" + pc.spec.label + "': no phase-matched solution in the scan window");
    for (const auto& s : sols) {
      p["solutions"].push_back(solution_json(fiber, s, cfg.pump));
      log << pc.spec.label << ": " << std::fixed << std::setprecision(2) << s.pump_nm << " nm -> " << s.signal_nm
          << " nm + " << s.idler_nm << " nm" << std::defaultfloat << " (residual " << s.residual_per_m << " 1/m)\n";
    }
    if (!sols.empty()) {
      const auto& s = sols.front();
      try {
        const auto ov = overlap_integral(solve_mode(fiber, pc.spec.pump1, s.pump_nm * 1e-3),
                                         solve_mode(fiber, pc.spec.pump2, s.pump_nm * 1e-3),
                                         solve_mode(fiber, pc.spec.signal, s.signal_nm * 1e-3),
                                         solve_mode(fiber, pc.spec.idler, s.idler_nm * 1e-3));
        p["overlap_per_um2"] = ov.value;
        p["overlap_forbidden"] = ov.forbidden;
      } catch (const ModeCutoffError& e) {
        warn(res, log, "process '" + pc.spec.label + "': overlap not computed: " + e.what());
      }
    }
    j["processes"].push_back(p);
  }
  j["warnings"] = res.warnings;
  write_json(j, out_path(cfg, "phasematch.json"), res);
  write_effective_config(cfg, res);
  return res;
}

CommandResult cmd_jsi(const RunConfig& cfg, const std::optional<std::string>& process, std::ostream& log) {
  CommandResult res;
  const auto procs = select(cfg, process);
  const FiberSpec fiber = resolve_fiber(cfg);
  const std::string header = output_header(cfg);
  if (cfg.pump.below_transform_limit())
    warn(res, log, "pump duration is shorter than the transform limit of the configured bandwidth");
  for (const auto* pc : procs) {
    const auto& label = pc->spec.label;
    const auto sols = solve_phase_matching(fiber, pc->spec, cfg.pump.center_nm, cfg.scan);
    if (sols.empty()) throw DomainError("process '" + label + "': no phase-matched solution, JSI not computed");
    auto grid = compute_jsa(fiber, cfg.pump, pc->spec, cfg.jsi);
    if (!grid.brackets_solution) warn(res, log, "process '" + label + "': grid does not contain the phase-matched point");

    const auto csv = out_path(cfg, "jsi_" + label + ".csv");
    write_jsi_csv(grid, csv, header);
    res.files.push_back(csv);
    const auto bin = out_path(cfg, "jsi_" + label + ".bin");
    write_jsi_binary(grid, bin, config_hash(cfg));
    res.files.push_back(bin);
    const auto ms = marginal_spectrum(grid, Daughter::signal);
    const auto mi = marginal_spectrum(grid, Daughter::idler);
    for (auto [m, name] : {std::pair{&ms, "signal"}, std::pair{&mi, "idler"}}) {
      const auto path = out_path(cfg, "marginal_" + label + "_" + name + ".csv");
      write_marginal_csv(*m, path, header);
      res.files.push_back(path);
    }

    json j = stamp(cfg);
    j["process"] = label;
    j["model"] = cfg.jsi.model == PumpModel::exact ? "exact" : "fast";
    j["grid"] = {{"signal_points", grid.omega_s.size()}, {"idler_points", grid.omega_i.size()},
                 {"center_signal_nm", grid.center_signal_nm}, {"center_idler_nm", grid.center_idler_nm},
                 {"brackets_solution", grid.brackets_solution}};
    try {
      const auto sd = schmidt_diagnostics(grid);
      j["schmidt_number"] = sd.schmidt_number;
      j["purity"] = sd.purity;
      j["schmidt_weights"] = sd.weights;
      log << label << ": centre " << std::fixed << std::setprecision(2) << grid.center_signal_nm << " / "
          << grid.center_idler_nm << " nm, K = " << std::setprecision(3) << sd.schmidt_number << std::defaultfloat
          << '\n';
    } catch (const DomainError& e) {
      warn(res, log, "process '" + label + "': " + e.what());
      j["schmidt_number"] = nullptr;
    }
    j["phase_matching_bandwidth_nm"] = number(phase_matching_bandwidth(fiber, sols.front()));
    j["signal_marginal_fwhm_nm"] = number(fwhm(ms.wavelength_nm, ms.density));
    j["idler_marginal_fwhm_nm"] = number(fwhm(mi.wavelength_nm, mi.density));
    j["anti_diagonal_peaks"] = anti_diagonal_peak_count(grid, cfg.pump);
    j["warnings"] = res.warnings;
    write_json(j, out_path(cfg, "schmidt_" + label + ".json"), res);
  }
  write_effective_config(cfg, res);
  return res;
}

CommandResult cmd_rates(const RunConfig& cfg, const std::optional<std::string>& process, std::ostream& log) {
  CommandResult res;
  const auto procs = select(cfg, process);
  const std::string header = output_header(cfg);
  for (const auto* pc : procs) {
    const auto& label = pc->spec.label;
    const auto rs = resolve_source(cfg, *pc);
    json j = stamp(cfg);
    j["process"] = label;
    j["window_ns"] = cfg.counting.window_ns;
    j["integration_s"] = cfg.counting.integration_s;
    j["pair_coefficient_per_mw2"] = rs.source.pair_coefficient;
    j["chains"] = {chain_json(rs.chain_s), chain_json(rs.chain_i)};
    if (rs.fit) {
      const auto& f = *rs.fit;
      const auto& m = *pc->measured;
      for (const auto& w : f.warnings) warn(res, log, "process '" + label + "': " + w);
      const double simple_acc = pulsed_accidental_rate(m.singles_s, m.singles_i, cfg.pump.rep_rate_hz);
      j["fit"] = {{"measured", {{"power_mw", m.power_mw},
                                {"singles_s_hz", m.singles_s},
                                {"singles_i_hz", m.singles_i},
                                {"coincidences_hz", m.coincidences}}},
                  {"source_pair_rate_hz", f.source_pair_rate},
                  {"background_s_hz", f.background_s},
                  {"background_i_hz", f.background_i},
                  {"raw_background_s_hz", f.raw_background_s},
                  {"raw_background_i_hz", f.raw_background_i},
                  {"pulsed_accidentals_hz", simple_acc},
                  {"g2_from_rates", m.coincidences / simple_acc},
                  {"heralding_i_given_s_from_rates", m.coincidences / m.singles_s},
                  {"heralding_s_given_i_from_rates", m.coincidences / m.singles_i}};
      const auto at = analytic_rates(rs.source, rs.chain_s, rs.chain_i, m.power_mw, cfg.counting.window_ns);
      j["model_at_measured_power"] = counting_row(at, poisson_uncertainties(at, cfg.counting.integration_s));
      log << label << ": source pair rate (back-out) " << std::fixed << std::setprecision(1)
          << f.source_pair_rate * 1e-3 << " kcps; g2 from quoted rates " << m.coincidences / simple_acc
          << ", model g2 " << at.g2 << std::defaultfloat << '\n';
    }
    const auto sweep = power_sweep(rs.source, rs.chain_s, rs.chain_i, cfg.counting.powers_mw, cfg.counting.window_ns);
    for (const auto& w : sweep.warnings) warn(res, log, "process '" + label + "': " + w);
    j["sweep"] = json::array();
    const auto csv = out_path(cfg, "rates_" + label + ".csv");
    auto os = open_output(csv);
    os << header
       << "power_mw,mean_pairs,singles_s_hz,singles_i_hz,coincidences_hz,accidentals_hz,zero_delay_hz,g2,sigma_g2,car,"
          "heralding_s_given_i,heralding_i_given_s\n";
    os << std::setprecision(10);
    for (const auto& r : sweep.rows) {
      const auto u = poisson_uncertainties(r, cfg.counting.integration_s);
      j["sweep"].push_back(counting_row(r, u));
      os << r.power_mw << ',' << r.mean_pairs << ',' << r.singles_s << ',' << r.singles_i << ',' << r.coincidences
         << ',' << r.accidentals << ',' << r.zero_delay << ',' << r.g2 << ',' << u.g2 << ','
         << r.car << ',' << r.heralding_s_given_i << ',' << r.heralding_i_given_s << '\n';
    }
    res.files.push_back(csv);
    j["coincidences_increasing"] = sweep.coincidences_increasing;
    j["g2_decreasing"] = sweep.g2_decreasing;
    j["warnings"] = res.warnings;
    write_json(j, out_path(cfg, "rates_" + label + ".json"), res);
  }
  write_effective_config(cfg, res);
  return res;
}

CommandResult cmd_mc(const RunConfig& cfg, const std::optional<std::string>& process,
                     const std::optional<double>& power_mw, std::ostream& log) {
  CommandResult res;
  const auto procs = select(cfg, process);
  const std::string header = output_header(cfg);
  const auto& c = cfg.counting;
  if (!(c.duration_s > 0.0)) throw ConfigError("counting.duration_s: must be > 0");
  for (const auto* pc : procs) {
    const auto& label = pc->spec.label;
    const auto rs = resolve_source(cfg, *pc);
    const double power = power_mw ? *power_mw : pc->measured ? pc->measured->power_mw : cfg.pump.avg_power_mw;
    if (power > pc->max_power_mw) {
      std::ostringstream os;
      os << "process '" << label << "': power " << power << " mW exceeds max_power_mw " << pc->max_power_mw;
      throw ConfigError(os.str());
    }
    Histogram hist;
    std::uint64_t events_s = 0, events_i = 0;
    double duration = c.duration_s;
    if (c.write_streams) {
      const auto streams = simulate_stream(rs.source, rs.chain_s, rs.chain_i, power, c.duration_s, cfg.seed);
      hist = correlate(streams, c.bin_width_ps, c.span_ns);
      events_s = streams.signal.size();
      events_i = streams.idler.size();
      duration = streams.duration_s;
      const bool csv = c.stream_format == "csv";
      const auto path = out_path(cfg, "timetags_" + label + (csv ? ".csv" : ".bin"));
      if (csv)
        write_timetags_csv(streams, path, header);
      else
        write_timetags_binary(streams, path, config_hash(cfg));
      res.files.push_back(path);
    } else {
      const auto run = simulate_and_correlate(rs.source, rs.chain_s, rs.chain_i, power, c.duration_s, cfg.seed,
                                              c.bin_width_ps, c.span_ns);
      hist = run.histogram;
      events_s = run.events_s;
      events_i = run.events_i;
      duration = run.duration_s;
    }
    const auto hpath = out_path(cfg, "histogram_" + label + ".csv");
    write_histogram_csv(hist, hpath, header);
    res.files.push_back(hpath);

    const auto g = g2_from_histogram(hist, c.window_ns, 1e9 / cfg.pump.rep_rate_hz);
    const auto an = analytic_rates(rs.source, rs.chain_s, rs.chain_i, power, c.window_ns);
    json j = stamp(cfg);
    j["process"] = label;
    j["power_mw"] = power;
    j["duration_s"] = duration;
    j["seed"] = cfg.seed;
    j["singles_s_hz"] = static_cast<double>(events_s) / duration;
    j["singles_i_hz"] = static_cast<double>(events_i) / duration;
    j["histogram"] = {{"nc", g.nc},     {"na", g.na},           {"g2", number(g.g2)},
                      {"car", number(g.car)}, {"sigma_g2", number(g.sigma_g2)}, {"sigma_car", number(g.sigma_car)},
                      {"side_peaks", g.side_peaks}, {"infinite", g.infinite}};
    j["analytic"] = {{"nc", an.zero_delay * duration},
                     {"na", an.accidentals * duration},
                     {"g2", number(an.histogram_g2())},
                     {"singles_s_hz", an.singles_s},
                     {"singles_i_hz", an.singles_i}};
    if (g.infinite) warn(res, log, "process '" + label + "': no accidental counts; g2 is unbounded");
    j["warnings"] = res.warnings;
    write_json(j, out_path(cfg, "mc_" + label + ".json"), res);
    log << label << ": " << duration << " s at " << power << " mW, g2 = " << g.g2 << " +- " << g.sigma_g2
        << " (analytic " << an.histogram_g2() << ")\n";
  }
  write_effective_config(cfg, res);
  return res;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spontaneous four-wave mixing pair-source model"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir, process;
  std::uint64_t seed = 0;
  double duration = 0.0;
  std::vector<double> powers;
  bool show_version = false;
  app.add_option("--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--power", powers, "pump power(s) in mW, comma separated")->delimiter(',');
  app.add_option("--duration", duration, "Monte Carlo duration in seconds");
  app.add_option("--process", process, "process label");
  app.add_flag("--version", show_version, "print version");
  auto* modes = app.add_subcommand("modes", "guided modes and effective indices");
  auto* pm = app.add_subcommand("phasematch", "calibrate and solve phase matching");
  auto* jsi = app.add_subcommand("jsi", "joint spectral intensity, marginals, Schmidt number");
  auto* rates = app.add_subcommand("rates", "analytic counting rates versus pump power");
  auto* mc = app.add_subcommand("mc", "Monte Carlo time tags and coincidence histogram");

  if (argc > 1 && std::string(argv[1]) == "--version") {
    out << "sfwm " << kVersion << '\n';
    return 0;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--duration")) {
      if (!(duration > 0.0)) throw ConfigError("--duration: must be > 0");
      cfg.counting.duration_s = duration;
    }
    if (!powers.empty() && !mc->parsed()) cfg.counting.powers_mw = powers;
    std::optional<double> mc_power;
    if (mc->parsed() && !powers.empty()) {
      if (powers.size() != 1) throw ConfigError("--power: mc takes a single power");
      mc_power = powers.front();
    }
    cfg.validate();
    std::optional<std::string> proc;
    if (!process.empty()) {
      cfg.process(process);
      proc = process;
    }

    CommandResult res;
    if (modes->parsed()) res = cmd_modes(cfg, out);
    if (pm->parsed()) res = cmd_phasematch(cfg, out);
    if (jsi->parsed()) res = cmd_jsi(cfg, proc, out);
    if (rates->parsed()) res = cmd_rates(cfg, proc, out);
    if (mc->parsed()) res = cmd_mc(cfg, proc, mc_power, out);
    for (const auto& f : res.files) out << "wrote " << f << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const CalibrationError& e) {
    err << "calibration failed: " << e.what() << " (best birefringence " << e.best_delta_n() << ", residual "
        << e.best_residual_nm() << " nm)\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sfwm
