#pragma once

// Command-line front end. `cli_dispatch` is the whole program; main() only
// forwards argv, so tests drive it with string vectors.
//
// Exit status: 0 success, 1 configuration / input error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gebench/csv.hpp"
#include "gebench/scenario_yaml.hpp"
#include "gebench/simulation.hpp"

namespace gebench {

namespace cli {

inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kUsageError = 2;

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void write_summary(std::ostream& os, const ScenarioConfig& cfg,
                          const TrajectoryRecord& rec, const ScenarioSummary& s) {
  const auto& ev = cfg.evaluation;
  os << "scenario " << cfg.name << ": " << rec.rows.size() << " samples, dt " << cfg.dt
     << " s, seed " << cfg.noise.seed << "\n";
  os << "altitude error, hover window [" << ev.hover.begin << ", " << ev.hover.end
     << "] s: max " << fixed(s.altitude_hover.max_abs * 1e3, 3) << " mm, rmsd "
     << fixed(s.altitude_hover.rmsd * 1e3, 3) << " mm -> "
     << (s.altitude_claim ? "PASS" : "FAIL") << " (< " << ev.altitude_tolerance * 1e3 << " mm)\n";
  os << "pitch error, hover and maneuver windows: max " << fixed(s.pitch_max_both, 5)
     << " rad, maneuver rmsd " << fixed(s.pitch_maneuver.rmsd * 1e3, 3) << " mrad -> "
     << (s.pitch_claim ? "PASS" : "FAIL") << " (< " << ev.pitch_tolerance << " rad)\n";
  os << "events: ground contacts " << rec.events.ground_contacts << ", thrust clamps "
     << rec.events.thrust_clamps << ", rejected current samples " << rec.events.rejected_samples
     << "\n";
}

inline void write_sweep_table(std::ostream& os, const SweepReport& rep) {
  os << "  C_an/C_a  C_bn/C_b   e_z max [mm]  e_z rmsd [mm]  e_th max [rad]  e_th rmsd [mrad]\n";
  for (const auto& c : rep.cases) {
    char line[160];
    std::snprintf(line, sizeof line, "  %8.2f  %8.2f   %+12.2f  %13.2f  %+14.4f  %16.2f\n",
                  c.scaling.c_a, c.scaling.c_b, c.altitude.signed_max * 1e3,
                  c.altitude.rmsd * 1e3, c.pitch.signed_max, c.pitch.rmsd * 1e3);
    os << line;
  }
}

inline nlohmann::ordered_json fit_json(const FitResult& f, const std::vector<CurrentTrace>& traces,
                                       const std::vector<double>& dc) {
  nlohmann::ordered_json j;
  j["c_a"] = f.c_a;
  j["c_b"] = f.c_b;
  j["i_m_inf"] = f.i_m_inf;
  j["residual_rms"] = f.residual_rms;
  j["iterations"] = f.iterations;
  j["converged"] = f.converged;
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    pts.push_back({{"altitude_m", traces[i].altitude}, {"i_dc_a", dc[i]}});
  }
  j["residuals"] = f.residuals;
  return j;
}

/// Parses "a:b:n" into n evenly spaced values from a to b.
inline std::vector<double> parse_range(const std::string& spec) {
  double a = 0.0, b = 0.0;
  int n = 0;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &a, &b, &n, &tail) != 3 || n < 2 || !(b > a)) {
    throw CLI::ValidationError("--z-range", "expected begin:end:count with end > begin, count >= 2");
  }
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace cli

inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  CLI::App app{"Ground-effect bench simulator and estimation toolkit", "gebench"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".", manifest, log_path, json_path, scenario_opt;
  std::uint64_t seed = 0;
  bool serial = false, compare = false;
  double k_value = 0.0, z_max = 1.0, radius = 0.34, fixed_i_inf = 0.0;
  std::string z_range;
  int points = 101;

  auto* sim = app.add_subcommand("simulate", "Run a scenario; write trajectory CSV and summary");
  sim->add_option("scenario", scenario_path, "Scenario YAML")->required();
  sim->add_option("--out", out_dir, "Output directory");
  auto* sim_seed = sim->add_option("--seed", seed, "Override the noise seed");

  auto* sweep = app.add_subcommand("sweep", "Coefficient-error sweep (+-5% on C_a, C_b)");
  sweep->add_option("scenario", scenario_path, "Scenario YAML")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  auto* sweep_seed = sweep->add_option("--seed", seed, "Override the base seed");
  sweep->add_flag("--serial", serial, "Run cases on one thread");

  auto* ident = app.add_subcommand("identify", "Fit C_a, C_b, I_inf from current logs");
  ident->add_option("manifest", manifest, "CSV manifest with columns file, altitude_m")->required();
  ident->add_option("--radius", radius, "Rotor radius [m]");
  auto* fix_opt = ident->add_option("--fix-i-inf", fixed_i_inf, "Hold I_inf at this value [A]");
  ident->add_option("--json", json_path, "Also write the result as JSON");

  auto* eff = app.add_subcommand("efficiency", "Inductive link efficiency");
  auto* k_opt = eff->add_option("--k", k_value, "Coupling coefficient");
  auto* z_opt = eff->add_option("--z-range", z_range, "Altitudes begin:end:count -> CSV z,k,eta");
  eff->add_option("--scenario", scenario_opt, "Take circuit and coupling map from a scenario");
  k_opt->excludes(z_opt);

  auto* models = app.add_subcommand("models", "Ground-effect model curves as CSV");
  models->add_flag("--compare", compare, "Emit all four models")->required();
  models->add_option("--z-max", z_max, "Largest altitude [m]");
  models->add_option("--points", points, "Number of samples")->check(CLI::Range(2, 1000000));
  models->add_option("--radius", radius, "Rotor radius [m]");

  auto* est = app.add_subcommand("estimate", "Batch attitude estimation over a current log");
  est->add_option("scenario", scenario_path, "Scenario YAML (estimator settings)")->required();
  est->add_option("log", log_path, "CSV with columns t_s, i1_a, i2_a")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return cli::kUsageError;
  }

  try {
    if (*sim) {
      auto cfg = load_scenario(scenario_path);
      if (*sim_seed) cfg.noise.seed = seed;
      for (const auto& w : validate(cfg).warnings) err << "warning: " << w << "\n";
      const auto rec = run_scenario(cfg);
      const auto summary = summarize(rec, cfg);
      fs::create_directories(out_dir);
      const auto csv = fs::path(out_dir) / (cfg.name + "_trajectory.csv");
      emit_csv(rec, csv);
      std::ostringstream text;
      cli::write_summary(text, cfg, rec, summary);
      std::ofstream(fs::path(out_dir) / (cfg.name + "_summary.txt"), std::ios::binary) << text.str();
      out << text.str() << "trajectory: " << csv.string() << "\n";
      return cli::kOk;
    }
    if (*sweep) {
      auto cfg = load_scenario(scenario_path);
      if (*sweep_seed) cfg.noise.seed = seed;
      const auto rep = run_parameter_error_sweep(cfg, coefficient_sweep_scalings(), !serial);
      fs::create_directories(out_dir);
      const auto csv = fs::path(out_dir) / (cfg.name + "_sweep.csv");
      emit_csv(rep, csv);
      cli::write_sweep_table(out, rep);
      out << "report: " << csv.string() << "\n";
      return cli::kOk;
    }
    if (*ident) {
      const auto traces = read_manifest(manifest);
      std::vector<double> dc;
      std::vector<CurrentPoint> pts;
      for (const auto& t : traces) {
        dc.push_back(extract_dc(t).value);
        pts.push_back({t.altitude, dc.back(), 1.0});
      }
      FitOptions opt;
      if (*fix_opt) {
        opt.fix_i_inf = true;
        opt.i_inf_value = fixed_i_inf;
      }
      const auto fit = fit_ge_current_model(pts, radius, opt);
      out << "C_a     " << format_number(fit.c_a) << "\n"
          << "C_b     " << format_number(fit.c_b) << "\n"
          << "I_inf   " << format_number(fit.i_m_inf) << " A\n"
          << "rms     " << format_number(fit.residual_rms) << " A over " << traces.size()
          << " traces, " << fit.iterations << " iterations"
          << (fit.converged ? "" : " (not converged)") << "\n";
      if (!json_path.empty()) {
        std::ofstream js(json_path, std::ios::binary);
        if (!js) throw IoError("cannot open " + json_path + " for writing");
        js << cli::fit_json(fit, traces, dc).dump(2) << "\n";
      }
      return cli::kOk;
    }
    if (*eff) {
      ScenarioConfig cfg = bench_scenario();
      if (!scenario_opt.empty()) cfg = load_scenario(scenario_opt);
      if (*k_opt) {
        out << cli::fixed(max_efficiency(k_value, cfg.ipt), 3) << "\n";
        return cli::kOk;
      }
      CsvWriter w(out);
      if (*z_opt) {
        w.row({"z", "k", "eta"});
        for (double z : cli::parse_range(z_range)) {
          const double k = coupling_from_altitude(z, cfg.coupling).k;
          w.numbers({z, k, max_efficiency(k, cfg.ipt)});
        }
        return cli::kOk;
      }
      w.row({"k", "eta"});
      for (int i = 1; i <= 30; ++i) {
        const double k = 0.01 * i;
        w.numbers({k, max_efficiency(k, cfg.ipt)});
      }
      return cli::kOk;
    }
    if (*models) {
      if (!(z_max > 0.0)) throw CLI::ValidationError("--z-max", "must be > 0");
      PropellerGeParams ge;
      ge.rotor_radius = radius;
      CsvWriter w(out);
      w.row({"z", "betz", "cheeseman", "hayden", "he"});
      for (int i = 1; i <= points; ++i) {
        const double z = z_max * i / points;
        w.numbers({z, betz_power_ratio(z, radius), cheeseman_power_ratio(z, radius),
                   hayden_power_ratio(z, radius), current_ratio_ige(z, ge)});
      }
      return cli::kOk;
    }
    if (*est) {
      const auto cfg = load_scenario(scenario_path);
      AttitudeEstimator estimator(make_estimator_config(cfg));
      CsvWriter w(out);
      w.row({"t", "z_hat", "theta_hat", "z1_hat", "z2_hat"});
      for (const auto& s : read_dual_current_log(log_path)) {
        const auto e = estimator.step(s.t, s.i1, s.i2);
        w.numbers({s.t, e.z_hat, e.theta_hat, e.z1_hat, e.z2_hat});
      }
      return cli::kOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return cli::kUsageError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return cli::kConfigError;
  }
  return cli::kUsageError;
}

}  // namespace gebench
