#pragma once

#include "bess/battery_ecm.hpp"
#include "bess/piecewise.hpp"

namespace bess {

/// Inverter conversion loss of one string.
///
/// While the inverter is on, the loss follows a convex table of AC power
/// (kW -> kW); the value at zero power is the fixed no-load term. An inverter
/// carrying no power is switched off and loses nothing.
struct InverterLossModel {
  PwlTable charge;
  PwlTable discharge;

  /// Fixed term `fixed_fraction * p_nominal` plus a linear term per mode.
  /// The defaults reproduce 1.93 % (charge) and 1.77 % (discharge) of
  /// nominal power lost at full load.
  static InverterLossModel linear(double p_nominal_kw, double fixed_fraction = 0.01,
                                  double charge_slope = 0.0093, double discharge_slope = 0.0077);

  const PwlTable& table(Mode mode) const { return mode == Mode::Charge ? charge : discharge; }

  /// Loss in kW at AC power `p_kw` (0 when p_kw == 0).
  double loss_kw(double p_kw, Mode mode) const;

  void validate() const;
};

}  // namespace bess
