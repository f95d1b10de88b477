#pragma once

#include "bess/piecewise.hpp"

namespace bess {

enum class Mode { Charge, Discharge };

inline const char* to_string(Mode m) { return m == Mode::Charge ? "charge" : "discharge"; }

/// SOC- and temperature-dependent cell resistance of the Rint model.
///
/// Below the SOC threshold the resistance is the product of the SOC table and
/// the temperature table normalised by `r_temp_max_mohm`; above it only the
/// temperature table applies. Inside +/- `eps_soc` around the threshold the
/// two branches are blended linearly so the plant sees a continuous function.
struct CellResistanceModel {
  PwlTable r_soc;    // mOhm vs SOC fraction
  PwlTable r_temp;   // mOhm vs degC
  double r_temp_max_mohm = 2.5;
  double soc_threshold = 0.1;
  double eps_soc = 0.01;

  static CellResistanceModel defaults();
};

/// Which resistance expression applies. The optimizer selects it with a hard
/// switch at the threshold; the plant uses the blended form.
enum class ResistanceBranch { LowSoc, TemperatureOnly };

ResistanceBranch select_branch(const CellResistanceModel& model, double soc);

/// Cell resistance in mOhm for an explicitly chosen branch.
double cell_resistance_mohm(const CellResistanceModel& model, ResistanceBranch branch, double soc,
                            double temp_c);

/// Cell resistance in mOhm with the blended threshold band.
double cell_resistance_mohm(const CellResistanceModel& model, double soc, double temp_c);

struct StringElectricalParams {
  double p_nominal_kw = 100.0;
  double q_nominal_ah = 156.0;
  int n_series = 192;
  int n_parallel = 2;
  PwlTable ocv_charge;     // V vs SOC, string level
  PwlTable ocv_discharge;  // V vs SOC, string level

  static StringElectricalParams defaults();
  void validate() const;

  double resistance_scale() const { return static_cast<double>(n_series) / n_parallel; }
};

/// Typical NMC cell OCV curve (11 points, V per cell, discharge branch).
PwlTable default_cell_ocv();

/// String-level resistance in Ohm (blended band). Throws DomainError for SOC
/// outside [0, 1].
double total_resistance(const CellResistanceModel& model, const StringElectricalParams& params,
                        double soc, double temp_c);

/// String-level resistance in Ohm using the hard branch switch.
double total_resistance_switched(const CellResistanceModel& model,
                                 const StringElectricalParams& params, double soc, double temp_c);

double ocv(const StringElectricalParams& params, double soc, Mode mode);

/// Battery current (A, non-negative) that moves `power_w` of terminal power
/// through the Rint circuit:
///   discharge: ocv*I - I^2 r = P
///   charge:    ocv*I + I^2 r = P
/// Throws InfeasiblePowerError if a discharge exceeds ocv^2 / (4 r).
double solve_current(double ocv_v, double r_ohm, double power_w, Mode mode);

/// Largest terminal power the circuit can deliver on discharge.
double max_discharge_power_w(double ocv_v, double r_ohm);

inline double heat_power(double current_a, double r_ohm) { return current_a * current_a * r_ohm; }

struct CoulombResult {
  double soc;
  double overflow_ah;  // charge that did not fit in [0, 1]; always >= 0
};

/// Coulomb counting over `dt_s`. At most one current may be non-zero.
CoulombResult coulomb_update(double soc, double i_charge_a, double i_discharge_a, double dt_s,
                             double q_nominal_ah);

}  // namespace bess
