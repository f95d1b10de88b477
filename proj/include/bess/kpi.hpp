#pragma once

#include "bess/cosim.hpp"

namespace bess {

/// Run-level indicators, efficiencies in percent.
///
/// Availability is measured against the fleet demand; the loss efficiencies
/// against the commanded setpoints. system_eff is formed as
/// inverter_eff + battery_eff - 100 so the identity holds bit-exactly; it is
/// the same quantity as 1 - (inv + heat) / setpoint. Derating losses are not
/// part of it.
struct KpiReport {
  double availability = 100.0;
  double derating_eff = 100.0;
  double inverter_eff = 100.0;
  double battery_eff = 100.0;
  double system_eff = 100.0;
  double peak_mean_temp = 0.0;   // degC, over strings and steps
  double final_soc_spread = 0.0;
  bool degenerate = false;       // no setpoint energy at all

  double demand_kwh = 0.0;
  double setpoint_kwh = 0.0;
  double avail_loss_kwh = 0.0;
  double derate_loss_kwh = 0.0;
  double inverter_loss_kwh = 0.0;
  double heat_loss_kwh = 0.0;
};

/// Throws DomainError on an empty trace.
KpiReport compute_kpis(const TraceLog& trace);

/// Energy bookkeeping of a trace: signed applied energy (+ charge) against
/// stored + heat + inverter loss.
struct EnergyAccount {
  double applied_kwh = 0.0;
  double stored_kwh = 0.0;
  double heat_kwh = 0.0;
  double inverter_kwh = 0.0;
  double throughput_kwh = 0.0;   // sum of |applied|

  double residual_kwh() const { return applied_kwh - (stored_kwh + heat_kwh + inverter_kwh); }
  double relative_residual() const;
};

EnergyAccount energy_account(const TraceLog& trace);

}  // namespace bess
