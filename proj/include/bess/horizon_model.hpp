#pragma once

#include <array>
#include <string>
#include <vector>

#include "bess/battery_ecm.hpp"
#include "bess/math_program.hpp"
#include "bess/thermal_plant.hpp"

namespace bess {

/// Loss objectives in the fixed order used by weights and priorities.
enum class Objective { Availability = 0, Derating = 1, Inverter = 2, Battery = 3 };
inline constexpr int kNumObjectives = 4;
const char* to_string(Objective o);

struct ObjectiveWeights {
  std::array<double, kNumObjectives> weight{1.0, 1.0, 1.0, 1.0};
  std::array<int, kNumObjectives> priority{2, 1, 1, 1};
  double slack_penalty = 1e3;     // on the top stage, normalised units
  double regularization = 1e-3;   // stands in for a zero weight on the lowest stage

  void validate() const;
};

struct BigM {
  double avail_kw = 100.0;
  double inv_kw = 100.0;
  double soc = 1.0;
};

struct ModelTolerances {
  double eps = 0.01;        // SOC indicator band, also the availability link slack (kW)
  double eps_inv_kw = 0.1;  // inverter on/off slack
  double eps1 = 1e-6;       // lexicographic preservation
};

/// Coefficients evaluated outside the MILP on the previous iterate.
struct FrozenCoefficients {
  double r_ohm = 0.24;
  double ocv_v = 710.4;     // for the step's mode
  double k_derate = 1.0;
};

struct StringInit {
  double soc = 0.5;
  double temp_c = 25.0;
  double k_derate = 1.0;   // factor the plant applies during the first step
};

struct HorizonInput {
  int n_strings = 0;
  int n_steps = 0;
  double dt_s = 900.0;
  std::vector<double> demand_kw;                 // signed, + charge
  std::vector<StringInit> init;                  // per string
  std::vector<FrozenCoefficients> frozen;        // [m * n_steps + t]
  std::vector<StringPlant> strings;              // per string parameters
  ObjectiveWeights weights;
  BigM big_m;
  ModelTolerances eps;
  int heat_breakpoints = 11;

  const FrozenCoefficients& frozen_at(int m, int t) const {
    return frozen[static_cast<std::size_t>(m * n_steps + t)];
  }
  Mode mode_at(int t) const { return demand_kw[static_cast<std::size_t>(t)] >= 0.0 ? Mode::Charge : Mode::Discharge; }
  void validate() const;
};

struct ObjectiveScales {
  double base_kwh = 0.0;
  double scale = 1.0;   // multiplier applied to each loss energy sum (1 / base)
  bool degenerate = false;
};

ObjectiveScales normalize_objectives(const HorizonInput& input);

struct CellVars {
  int pb, pch, pdch, pinv, pheat, pder, pah, pal, sp, sn, soc, temp, bh, bl, binv;
};

struct HorizonModel {
  MathProgram program;
  std::vector<CellVars> vars;   // [m * n_steps + t]
  std::vector<int> balance_rows;
  ObjectiveScales scales;
  std::array<LinearExpr, kNumObjectives> objectives;  // normalised loss sums
  LinearExpr slack;                                   // normalised slack sum
  int n_strings = 0;
  int n_steps = 0;
  // interchangeable[m]: string m and m+1 have identical data, so their
  // trajectories can be swapped without changing feasibility or objectives
  std::vector<bool> interchangeable;

  const CellVars& at(int m, int t) const { return vars[static_cast<std::size_t>(m * n_steps + t)]; }
};

/// Convex piecewise-linear heat curve (kW vs setpoint kW) for one cell,
/// sampled through the exact inverter + Rint chain at frozen coefficients.
PwlTable heat_curve(const StringPlant& plant, const FrozenCoefficients& frozen, Mode mode, int breakpoints);

HorizonModel build_horizon_model(const HorizonInput& input);

struct CellPlan {
  Mode mode = Mode::Charge;
  double pb = 0, pch = 0, pdch = 0, pinv = 0, pheat = 0, pder = 0, pah = 0, pal = 0, sp = 0, sn = 0;
  double soc = 0, temp = 0;
  int bh = 0, bl = 0, binv = 0;
};

struct DispatchPlan {
  int n_strings = 0;
  int n_steps = 0;
  std::vector<CellPlan> cells;  // [m * n_steps + t]
  double max_balance_residual = 0.0;
  std::vector<double> stage_optima;
  std::vector<double> stage_values;
  std::array<double, kNumObjectives> objective_values{};
  int slp_iterations = 0;
  bool converged = true;
  double heat_residual = 0.0;   // aggregate |planned - recomputed| / recomputed

  const CellPlan& at(int m, int t) const { return cells[static_cast<std::size_t>(m * n_steps + t)]; }
};

/// Throws ExtractionError naming the worst row if `x` violates the program
/// by more than `tol`. Interchangeable strings are reordered so the one
/// carrying more power at the first differing step comes first.
DispatchPlan extract_solution(const HorizonModel& model, const std::vector<double>& x, double tol = 1e-6);

}  // namespace bess
