#pragma once

#include <vector>

#include "bess/battery_ecm.hpp"
#include "bess/inverter.hpp"
#include "bess/piecewise.hpp"

namespace bess {

/// 1D finite-difference thermal field of one string.
///
/// The string is a rod of `n_nodes` equal heat capacities. Heat is injected
/// uniformly, neighbours exchange `k_cond * dT`, and only the two end nodes
/// are cooled by air, each with half of `h_conv`. The lumped optimizer model
/// uses k1 = 1 / c_total and k2 = h_conv / c_total.
struct ThermalParams {
  int n_nodes = 10;
  double c_total = 4.0e6;   // J/K
  double k_cond = 4.0e4;    // W/K between neighbouring nodes
  double h_conv = 200.0;    // W/K, total over both boundary nodes
  double t_air = 25.0;      // degC

  void validate() const;
  double k1() const { return 1.0 / c_total; }
  double k2() const { return h_conv / c_total; }
};

/// Plant-side PI derating. The proportional term acts on the excess over
/// `t_start`; the integral accumulates the signed excess once per control
/// step (clamped to stay non-negative and below the saturation point).
struct PiDerateController {
  double kp = 0.035;    // 1/degC
  double ki = 0.0035;   // 1/(degC * step)
  double t_start = 45.0;
  double t_stop = 60.0;

  void validate() const;
};

struct StringState {
  double soc = 0.5;
  std::vector<double> temps;
  double temp_mean = 25.0;
  double pi_integral = 0.0;
  double k_derate_applied = 1.0;

  static StringState uniform(const ThermalParams& params, double soc, double temp_c);
  void refresh_mean();
};

/// Everything needed to simulate one string: battery, inverter, thermal field
/// and derating controller, plus the optimizer's derating lookup table.
struct StringPlant {
  StringElectricalParams electrical = StringElectricalParams::defaults();
  CellResistanceModel resistance = CellResistanceModel::defaults();
  InverterLossModel inverter = InverterLossModel::linear(100.0);
  ThermalParams thermal;
  PiDerateController controller;
  PwlTable derate_lut = default_derate_lut();

  static PwlTable default_derate_lut();
  void validate() const;
};

struct FdmBalance {
  double injected_j = 0.0;
  double convected_j = 0.0;
  double stored_j = 0.0;   // c_node * sum(dT)
  int sub_steps = 0;

  double residual() const { return stored_j - (injected_j - convected_j); }
  double relative_residual() const;
};

/// Advances the thermal field by `dt_s` with `heat_w` of uniform heat input.
/// Sub-steps internally to keep the explicit update stable.
StringState fdm_step(const StringState& state, const ThermalParams& params, double heat_w,
                     double dt_s, FdmBalance* balance = nullptr);

struct DerateUpdate {
  double k_derate;
  double pi_integral;
};

DerateUpdate pi_derate_update(const PiDerateController& ctrl, const StringState& state);

struct PlantStepResult {
  StringState state;
  double setpoint_kw = 0.0;
  double applied_kw = 0.0;       // power that actually crossed the inverter
  double derate_loss_kw = 0.0;   // setpoint - k * setpoint
  double heat_kw = 0.0;          // I^2 R
  double inverter_kw = 0.0;
  double avail_loss_kw = 0.0;    // SOC bound overflow plus ECM clamp shortfall
  double stored_kw = 0.0;        // chemical power into the cells, signed (+ charge)
  double overflow_kwh = 0.0;
  double current_a = 0.0;
  bool ecm_clamped = false;
};

/// Applies one control step of `setpoint_kw` to the string using the derating
/// factor already held in `state.k_derate_applied`.
PlantStepResult plant_apply(const StringPlant& plant, const StringState& state, double setpoint_kw,
                            Mode mode, double dt_s);

/// Mean temperature rise per kW of string power for one full-power discharge
/// step from ambient (degC/kW).
double calibrate_sensitivity(const StringPlant& plant, double dt_s = 900.0);

/// Acceptable range for calibrate_sensitivity on a validated scenario.
inline constexpr double kSensitivityGateLo = 0.008;
inline constexpr double kSensitivityGateHi = 0.016;
inline constexpr double kLumpedDeviationGate = 0.1;  // degC over one day
inline constexpr double kEcmResidualGate = 1e-9;     // relative power

struct CalibrationReport {
  double sensitivity = 0.0;         // degC per kW per step
  double lumped_deviation = 0.0;    // max |FDM mean - lumped ODE|, degC
  double ecm_residual = 0.0;        // max relative power error of solve_current
  int ecm_points = 0;

  bool sensitivity_ok() const { return sensitivity >= kSensitivityGateLo && sensitivity <= kSensitivityGateHi; }
  bool lumped_ok() const { return lumped_deviation < kLumpedDeviationGate; }
  bool ecm_ok() const { return ecm_residual <= kEcmResidualGate; }
  bool ok() const { return sensitivity_ok() && lumped_ok() && ecm_ok(); }
};

/// Sensitivity, FDM-vs-lumped deviation over one day of alternating heat
/// (96 steps) and the ECM root residual over a grid of SOC, mode and power.
CalibrationReport calibrate_plant(const StringPlant& plant, double dt_s = 900.0);

}  // namespace bess
