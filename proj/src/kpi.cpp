#include "bess/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bess/errors.hpp"

namespace bess {

KpiReport compute_kpis(const TraceLog& trace) {
  if (trace.rows.empty() || trace.n_strings <= 0) throw DomainError("KPI of an empty trace");
  const double dt_h = trace.dt_s / 3600.0;
  KpiReport k;
  k.peak_mean_temp = -std::numeric_limits<double>::infinity();
  for (const auto& r : trace.rows) {
    if (r.string == 0) k.demand_kwh += std::abs(r.demand_kw) * dt_h;
    k.setpoint_kwh += r.setpoint_kw * dt_h;
    k.avail_loss_kwh += r.p_avail_kw * dt_h;
    k.derate_loss_kwh += r.p_derate_kw * dt_h;
    k.inverter_loss_kwh += r.p_inv_kw * dt_h;
    k.heat_loss_kwh += r.p_heat_kw * dt_h;
    k.peak_mean_temp = std::max(k.peak_mean_temp, r.temp_mean);
  }

  const int last = trace.n_steps() - 1;
  double lo = 1.0, hi = 0.0;
  for (int m = 0; m < trace.n_strings; ++m) {
    lo = std::min(lo, trace.at(last, m).soc);
    hi = std::max(hi, trace.at(last, m).soc);
  }
  k.final_soc_spread = hi - lo;

  if (k.demand_kwh > 0.0) k.availability = 100.0 * (1.0 - k.avail_loss_kwh / k.demand_kwh);
  if (k.setpoint_kwh <= 0.0) {
    k.degenerate = true;
    return k;
  }
  k.derating_eff = 100.0 * (1.0 - k.derate_loss_kwh / k.setpoint_kwh);
  k.inverter_eff = 100.0 * (1.0 - k.inverter_loss_kwh / k.setpoint_kwh);
  k.battery_eff = 100.0 * (1.0 - k.heat_loss_kwh / k.setpoint_kwh);
  k.system_eff = k.inverter_eff + k.battery_eff - 100.0;
  return k;
}

double EnergyAccount::relative_residual() const {
  return throughput_kwh > 0.0 ? std::abs(residual_kwh()) / throughput_kwh : 0.0;
}

EnergyAccount energy_account(const TraceLog& trace) {
  const double dt_h = trace.dt_s / 3600.0;
  EnergyAccount e;
  for (const auto& r : trace.rows) {
    const double signed_applied = r.mode == Mode::Charge ? r.applied_kw : -r.applied_kw;
    e.applied_kwh += signed_applied * dt_h;
    e.throughput_kwh += r.applied_kw * dt_h;
    e.stored_kwh += r.stored_kw * dt_h;
    e.heat_kwh += r.p_heat_kw * dt_h;
    e.inverter_kwh += r.p_inv_kw * dt_h;
  }
  return e;
}

}  // namespace bess
