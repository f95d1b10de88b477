#include "bess/report.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "bess/csv.hpp"

namespace bess {

using io::fmt_num;
using json = nlohmann::ordered_json;

namespace {

const char* mode_name(Mode m) { return m == Mode::Charge ? "charge" : "discharge"; }

// JSON numbers go through the same %.10g formatting as the CSVs.
double rounded(double v) { return std::stod(fmt_num(v)); }

json kpi_object(const KpiReport& k) {
  return json{{"availability_pct", rounded(k.availability)},
              {"derating_eff_pct", rounded(k.derating_eff)},
              {"inverter_eff_pct", rounded(k.inverter_eff)},
              {"battery_eff_pct", rounded(k.battery_eff)},
              {"system_eff_pct", rounded(k.system_eff)},
              {"peak_mean_temp_c", rounded(k.peak_mean_temp)},
              {"final_soc_spread", rounded(k.final_soc_spread)},
              {"degenerate", k.degenerate},
              {"energy_kwh",
               {{"demand", rounded(k.demand_kwh)},
                {"setpoint", rounded(k.setpoint_kwh)},
                {"availability_loss", rounded(k.avail_loss_kwh)},
                {"derating_loss", rounded(k.derate_loss_kwh)},
                {"inverter_loss", rounded(k.inverter_loss_kwh)},
                {"heat_loss", rounded(k.heat_loss_kwh)}}}};
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ';';
    s += fmt_num(x);
  }
  return s;
}

struct KpiColumn {
  const char* name;
  double KpiReport::*field;
};

constexpr std::array<KpiColumn, 7> kKpiColumns{{
    {"availability_pct", &KpiReport::availability},
    {"derating_eff_pct", &KpiReport::derating_eff},
    {"inverter_eff_pct", &KpiReport::inverter_eff},
    {"battery_eff_pct", &KpiReport::battery_eff},
    {"system_eff_pct", &KpiReport::system_eff},
    {"peak_mean_temp_c", &KpiReport::peak_mean_temp},
    {"final_soc_spread", &KpiReport::final_soc_spread},
}};

}  // namespace

std::string header_line(const RunManifest& m, std::string_view schema) {
  return fmt::format("# bess_split {} command={} schema={} config={} config_fnv1a={:016x} generated={}", m.version,
                     m.command, schema, m.config_path.empty() ? "<reference>" : m.config_path, m.config_checksum,
                     m.generated);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string trace_csv(const TraceLog& trace, const RunManifest& m) {
  std::size_t nodes = 0;
  for (const auto& r : trace.rows) nodes = std::max(nodes, r.node_temps.size());
  std::string s = header_line(m, kTraceSchema) + "\n";
  s += "step,string,time_h,demand_kw,mode,setpoint_kw,applied_kw,p_inv_kw,p_heat_kw,p_derate_kw,p_avail_kw,"
       "stored_kw,soc,temp_mean_c,k_derate,b_high,b_low,b_inv,ecm_clamped,planned_avail_kw,planned_soc,"
       "planned_temp_c";
  for (std::size_t i = 0; i < nodes; ++i) s += fmt::format(",node_{}_c", i);
  s += '\n';
  for (const auto& r : trace.rows) {
    s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.step, r.string,
                     fmt_num((r.step + 1) * trace.dt_s / 3600.0), fmt_num(r.demand_kw), mode_name(r.mode),
                     fmt_num(r.setpoint_kw), fmt_num(r.applied_kw), fmt_num(r.p_inv_kw), fmt_num(r.p_heat_kw),
                     fmt_num(r.p_derate_kw), fmt_num(r.p_avail_kw), fmt_num(r.stored_kw), fmt_num(r.soc),
                     fmt_num(r.temp_mean), fmt_num(r.k_derate), r.b_high, r.b_low, r.b_inv, r.ecm_clamped ? 1 : 0,
                     fmt_num(r.planned_avail_kw), fmt_num(r.planned_soc), fmt_num(r.planned_temp));
    for (std::size_t i = 0; i < nodes; ++i) s += ',' + (i < r.node_temps.size() ? fmt_num(r.node_temps[i]) : "");
    s += '\n';
  }
  return s;
}

std::string horizons_csv(const TraceLog& trace, const RunManifest& m) {
  std::string s = header_line(m, kHorizonSchema) + "\n";
  s += "horizon,t0,steps,applied_steps,truncated,slp_iterations,converged,heat_residual,max_balance_residual,"
       "stage_optima,stage_values,init_soc,init_temp_c\n";
  for (const auto& h : trace.horizons)
    s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", h.index, h.t0, h.steps, h.applied_steps,
                     h.truncated ? 1 : 0, h.slp_iterations, h.converged ? 1 : 0, fmt_num(h.heat_residual),
                     fmt_num(h.max_balance_residual), join(h.stage_optima), join(h.stage_values),
                     join(h.init_soc), join(h.init_temp));
  return s;
}

std::string kpis_json(const TraceLog& trace, const KpiReport& kpi, const RunManifest& m) {
  const EnergyAccount e = energy_account(trace);
  int nonconverged = 0;
  for (const auto& h : trace.horizons) nonconverged += h.converged ? 0 : 1;
  json j;
  j["header"] = header_line(m, kKpiSchema);
  j["kpis"] = kpi_object(kpi);
  j["energy_account_kwh"] = {{"applied", rounded(e.applied_kwh)},
                             {"stored", rounded(e.stored_kwh)},
                             {"heat", rounded(e.heat_kwh)},
                             {"inverter", rounded(e.inverter_kwh)},
                             {"relative_residual", rounded(e.relative_residual())}};
  j["steps"] = trace.n_steps();
  j["strings"] = trace.n_strings;
  j["horizons"] = trace.horizons.size();
  j["nonconverged_horizons"] = nonconverged;
  j["warnings"] = trace.warnings;
  return j.dump(2) + "\n";
}

std::string pareto_csv(const std::vector<SweepResult>& results, const RunManifest& m) {
  std::string s = header_line(m, kParetoSchema) + "\n";
  s += "label,w_inverter,w_battery,status";
  for (const auto& c : kKpiColumns) s += fmt::format(",{}", c.name);
  s += '\n';
  for (const auto& r : results) {
    s += fmt::format("{},{},{},{}", r.point.label, fmt_num(r.point.w_inverter), fmt_num(r.point.w_battery),
                     r.ok ? "ok" : "failed");
    for (const auto& c : kKpiColumns) s += ',' + (r.ok ? fmt_num(r.kpi.*c.field) : "");
    s += '\n';
  }
  return s;
}

std::string pareto_json(const std::vector<SweepResult>& results, const RunManifest& m) {
  json j;
  j["header"] = header_line(m, kParetoSchema);
  json points = json::array();
  for (const auto& r : results) {
    json p{{"label", r.point.label},
           {"w_inverter", rounded(r.point.w_inverter)},
           {"w_battery", rounded(r.point.w_battery)},
           {"ok", r.ok}};
    if (r.ok) {
      p["kpis"] = kpi_object(r.kpi);
      p["warnings"] = r.trace.warnings.size();
    } else {
      p["error"] = r.error;
    }
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  return j.dump(2) + "\n";
}

std::string radar_csv(const std::vector<SweepResult>& results, const RunManifest& m) {
  std::string s = header_line(m, kRadarSchema) + "\n";
  s += "label";
  for (const auto& c : kKpiColumns) s += fmt::format(",{}", c.name);
  s += '\n';
  std::array<double, kKpiColumns.size()> lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& r : results) {
    if (!r.ok) continue;
    for (std::size_t i = 0; i < kKpiColumns.size(); ++i) {
      lo[i] = std::min(lo[i], r.kpi.*kKpiColumns[i].field);
      hi[i] = std::max(hi[i], r.kpi.*kKpiColumns[i].field);
    }
  }
  for (const auto& r : results) {
    if (!r.ok) continue;
    s += r.point.label;
    for (std::size_t i = 0; i < kKpiColumns.size(); ++i) {
      const double v = r.kpi.*kKpiColumns[i].field;
      s += ',' + fmt_num(hi[i] > lo[i] ? (v - lo[i]) / (hi[i] - lo[i]) : 1.0);
    }
    s += '\n';
  }
  return s;
}

}  // namespace bess
