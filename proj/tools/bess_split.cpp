// bess_split: receding-horizon power split of a multi-string battery system.
//
//   bess_split simulate  [--config FILE] [--demand CSV] [--out DIR]
//   bess_split pareto    [--config FILE] [--sweep S1:1:0,S2:0.5:0.5] [--out DIR]
//   bess_split calibrate [--config FILE]
//
// Exit codes: 0 ok, 2 solver failure, 3 input error, 4 calibration gate.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bess/cosim.hpp"
#include "bess/errors.hpp"
#include "bess/kpi.hpp"
#include "bess/pareto.hpp"
#include "bess/report.hpp"
#include "bess/scenario_config.hpp"

namespace fs = std::filesystem;
using namespace bess;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 2;
constexpr int kExitInput = 3;
constexpr int kExitGate = 4;

struct Options {
  std::string config;
  std::string demand;
  std::string out;
  std::optional<std::string> sweep;
  std::optional<int> apply_steps;
  std::optional<int> horizon;
  std::optional<int> steps;
  bool verbose_solver = false;
};

struct InputFailure {
  std::string message;
};

fs::path out_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("BESS_SPLIT_OUT"); env && *env) return env;
  return "bess_out";
}

LoadedScenario load(const Options& o) {
  LoadedScenario sc;
  if (!o.config.empty()) sc = load_scenario(o.config);
  ScenarioConfig& cfg = sc.config;
  if (!o.demand.empty()) {
    cfg.demand.kind = DemandSpec::Kind::Direct;
    cfg.demand.values = load_profile_csv(o.demand);
  }
  if (o.horizon) {
    cfg.horizon_steps = *o.horizon;
    if (!o.apply_steps) cfg.apply_steps = *o.horizon;
  }
  if (o.apply_steps) cfg.apply_steps = *o.apply_steps;
  if (o.steps) cfg.sim_duration = *o.steps;
  if (o.sweep) {
    sc.sweep = parse_sweep(*o.sweep);
    if (sc.sweep.empty()) throw InputError("--sweep: empty sweep list");
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  return sc;
}

RunManifest manifest(const std::string& command, const Options& o, const LoadedScenario& sc) {
  RunManifest m;
  m.command = command;
  m.config_path = o.config;
  m.out_dir = out_dir(o).string();
  m.version = BESS_VERSION;
  m.config_checksum = fnv1a64(scenario_to_ini(sc.config, sc.sweep));
  m.generated = utc_timestamp();
  return m;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << content)) throw InputError(fmt::format("cannot write {}", path.string()), path.string());
}

fs::path prepare_out(const Options& o) {
  const fs::path dir = out_dir(o);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
  return dir;
}

void print_kpis(const KpiReport& k) {
  fmt::print("availability   {:8.4f} %\n", k.availability);
  fmt::print("derating_eff   {:8.4f} %\n", k.derating_eff);
  fmt::print("inverter_eff   {:8.4f} %\n", k.inverter_eff);
  fmt::print("battery_eff    {:8.4f} %\n", k.battery_eff);
  fmt::print("system_eff     {:8.4f} %\n", k.system_eff);
  fmt::print("peak_mean_temp {:8.3f} degC\n", k.peak_mean_temp);
  fmt::print("final_soc_gap  {:8.4f}\n", k.final_soc_spread);
  if (k.degenerate) fmt::print("(no setpoint energy: efficiencies reported as 100 %)\n");
}

int cmd_simulate(const Options& o) {
  const LoadedScenario sc = load(o);
  const fs::path dir = prepare_out(o);
  const RunManifest m = manifest("simulate", o, sc);

  TraceLog trace;
  try {
    trace = run_cosim(sc.config);
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitSolver;
  }
  for (const auto& w : trace.warnings) fmt::print(stderr, "warning: {}\n", w);
  if (o.verbose_solver)
    for (const auto& h : trace.horizons)
      fmt::print(stderr, "horizon {:3d} t0 {:4d} steps {} slp_iters {} converged {} heat_residual {:.4f} wall {:.3f}s\n",
                 h.index, h.t0, h.steps, h.slp_iterations, h.converged ? "yes" : "no", h.heat_residual, h.wall_s);

  const KpiReport kpi = compute_kpis(trace);
  write_file(dir / "trace.csv", trace_csv(trace, m));
  write_file(dir / "horizons.csv", horizons_csv(trace, m));
  write_file(dir / "kpis.json", kpis_json(trace, kpi, m));
  print_kpis(kpi);
  fmt::print("outputs in {}\n", dir.string());
  return kExitOk;
}

int cmd_pareto(const Options& o) {
  const LoadedScenario sc = load(o);
  const fs::path dir = prepare_out(o);
  const RunManifest m = manifest("pareto", o, sc);

  SweepSpec spec;
  spec.points = sc.sweep;
  spec.base = sc.config;
  try {
    spec.validate();
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  const auto results = pareto_sweep(spec);

  write_file(dir / "pareto.csv", pareto_csv(results, m));
  write_file(dir / "pareto.json", pareto_json(results, m));
  write_file(dir / "radar.csv", radar_csv(results, m));

  bool failed = false;
  for (const auto& r : results) {
    if (!r.ok) {
      failed = true;
      fmt::print(stderr, "error: sweep point {}: {}\n", r.point.label, r.error);
      continue;
    }
    for (const auto& w : r.trace.warnings) fmt::print(stderr, "warning: {}: {}\n", r.point.label, w);
    if (o.verbose_solver)
      for (const auto& h : r.trace.horizons)
        fmt::print(stderr, "{}: horizon {:3d} slp_iters {} converged {} wall {:.3f}s\n", r.point.label, h.index,
                   h.slp_iterations, h.converged ? "yes" : "no", h.wall_s);
    fmt::print("{:4s} w_inv {:4.2f} w_bat {:4.2f} | inv {:8.4f} % bat {:8.4f} % sys {:8.4f} % avail {:8.4f} % peak {:7.3f} degC\n",
               r.point.label, r.point.w_inverter, r.point.w_battery, r.kpi.inverter_eff, r.kpi.battery_eff,
               r.kpi.system_eff, r.kpi.availability, r.kpi.peak_mean_temp);
  }
  fmt::print("outputs in {}\n", dir.string());
  return failed ? kExitSolver : kExitOk;
}

int cmd_calibrate(const Options& o) {
  const LoadedScenario sc = load(o);
  if (!o.config.empty() && !sc.has_thermal_section)
    throw InputError(fmt::format("{}: missing [thermal] section", o.config), o.config);
  bool ok = true;
  for (std::size_t m = 0; m < sc.config.strings.size(); ++m) {
    const CalibrationReport r = calibrate_plant(sc.config.strings[m], sc.config.dt_s);
    fmt::print("string {}: sensitivity {:.5f} degC/kW [{}, {}] {}\n", m, r.sensitivity, kSensitivityGateLo,
               kSensitivityGateHi, r.sensitivity_ok() ? "ok" : "FAIL");
    fmt::print("string {}: lumped-vs-FDM deviation {:.4f} degC (< {}) {}\n", m, r.lumped_deviation,
               kLumpedDeviationGate, r.lumped_ok() ? "ok" : "FAIL");
    fmt::print("string {}: ECM root residual {:.3e} over {} points (<= {:g}) {}\n", m, r.ecm_residual, r.ecm_points,
               kEcmResidualGate, r.ecm_ok() ? "ok" : "FAIL");
    ok = ok && r.ok();
  }
  return ok ? kExitOk : kExitGate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-string battery power split: receding-horizon MILP controller with plant co-simulation"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "scenario INI file (default: built-in reference scenario)");
    sub->add_option("--horizon", o.horizon, "optimization horizon in steps")->check(CLI::PositiveNumber);
    sub->add_option("--apply-steps", o.apply_steps, "steps applied per horizon")->check(CLI::PositiveNumber);
    sub->add_option("--steps", o.steps, "simulated steps")->check(CLI::PositiveNumber);
  };
  auto outputs = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output directory (default: $BESS_SPLIT_OUT or ./bess_out)");
    sub->add_option("--demand", o.demand, "demand CSV (signed kW, + charge); switches to direct mode");
    sub->add_flag("--verbose-solver", o.verbose_solver, "per-horizon solver diagnostics on stderr");
  };

  auto* simulate = app.add_subcommand("simulate", "co-simulate one scenario; writes trace.csv, horizons.csv, kpis.json");
  common(simulate);
  outputs(simulate);
  auto* pareto = app.add_subcommand("pareto", "weight sweep; writes pareto.csv, pareto.json, radar.csv");
  common(pareto);
  outputs(pareto);
  pareto->add_option("--sweep", o.sweep, "label:w_inverter:w_battery,... (default S1:1:0,S2:0.5:0.5,S3:0:1)");
  auto* calibrate = app.add_subcommand("calibrate", "check thermal sensitivity, FDM model and ECM roots");
  common(calibrate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o);
    if (pareto->parsed()) return cmd_pareto(o);
    return cmd_calibrate(o);
  } catch (const InputError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInput;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitSolver;
  }
}
