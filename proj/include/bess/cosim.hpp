#pragma once

#include <string>
#include <vector>

#include "bess/branch_and_bound.hpp"
#include "bess/ems.hpp"
#include "bess/horizon_model.hpp"
#include "bess/slp.hpp"
#include "bess/thermal_plant.hpp"

namespace bess {

struct DemandSpec {
  enum class Kind { Direct, Arbitrage };
  Kind kind = Kind::Arbitrage;
  std::vector<double> values;       // demand kW (direct) or prices (arbitrage); empty -> two-level prices
  double arbitrage_fraction = 0.5;  // of fleet power
  int price_period_steps = 8;
};

struct ScenarioConfig {
  std::vector<StringPlant> strings;
  std::vector<StringInit> initial;
  int horizon_steps = 8;
  double dt_s = 900.0;
  int apply_steps = 8;
  int sim_duration = 96;
  ObjectiveWeights weights;
  BigM big_m;
  ModelTolerances eps;
  int heat_breakpoints = 11;
  SlpConfig slp;
  BnbConfig bnb;
  DemandSpec demand;

  /// Two identical default strings at soc 0.5 / 25 degC, 24 h of 15 min steps.
  static ScenarioConfig reference();
  double fleet_kw() const;
  Ems make_ems() const;
  void validate() const;
};

struct TraceRow {
  int step = 0;
  int string = 0;
  double demand_kw = 0.0;   // fleet demand, signed
  Mode mode = Mode::Charge;
  double setpoint_kw = 0.0;
  double applied_kw = 0.0;
  double p_inv_kw = 0.0;
  double p_heat_kw = 0.0;
  double p_derate_kw = 0.0;
  double p_avail_kw = 0.0;
  double stored_kw = 0.0;
  double soc = 0.0;         // end of step
  double temp_mean = 0.0;   // end of step
  double k_derate = 1.0;    // factor applied during the step
  std::vector<double> node_temps;
  bool ecm_clamped = false;
  int b_high = 0, b_low = 0, b_inv = 0;
  double planned_avail_kw = 0.0;
  double planned_soc = 0.0;
  double planned_temp = 0.0;
};

struct HorizonRecord {
  int index = 0;
  int t0 = 0;
  int steps = 0;
  int applied_steps = 0;
  bool truncated = false;
  int slp_iterations = 0;
  bool converged = true;
  double heat_residual = 0.0;
  double max_balance_residual = 0.0;
  std::vector<double> stage_optima;
  std::vector<double> stage_values;
  std::vector<double> init_soc;
  std::vector<double> init_temp;
  double wall_s = 0.0;
};

struct TraceLog {
  int n_strings = 0;
  double dt_s = 900.0;
  std::vector<TraceRow> rows;        // step-major
  std::vector<HorizonRecord> horizons;
  std::vector<StringState> final_states;
  std::vector<std::string> warnings;

  int n_steps() const { return n_strings > 0 ? static_cast<int>(rows.size()) / n_strings : 0; }
  const TraceRow& at(int step, int m) const { return rows[static_cast<std::size_t>(step * n_strings + m)]; }
};

/// Receding-horizon loop: EMS window, SLP solve from the measured plant
/// state, apply the first `apply_steps` setpoints through the plant, repeat.
/// Throws SolverError naming the horizon when a solve fails.
TraceLog run_cosim(const ScenarioConfig& cfg);

}  // namespace bess
