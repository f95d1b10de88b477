#include "bess/battery_ecm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

namespace {

void check_soc(double soc) {
  if (!(soc >= 0.0 && soc <= 1.0)) throw DomainError(fmt::format("SOC {} outside [0, 1]", soc));
}

}  // namespace

CellResistanceModel CellResistanceModel::defaults() {
  return CellResistanceModel{
      PwlTable::build({{0.0, 40.0}, {0.02, 24.0}, {0.05, 10.0}, {0.08, 4.5}, {0.1, 2.5}}),
      PwlTable::build({{25.0, 2.5}, {40.0, 1.9}, {60.0, 1.2}, {80.0, 0.75}}),
  };
}

ResistanceBranch select_branch(const CellResistanceModel& model, double soc) {
  return soc <= model.soc_threshold ? ResistanceBranch::LowSoc : ResistanceBranch::TemperatureOnly;
}

double cell_resistance_mohm(const CellResistanceModel& model, ResistanceBranch branch, double soc,
                            double temp_c) {
  check_soc(soc);
  const double r_t = model.r_temp.eval(temp_c);
  if (branch == ResistanceBranch::TemperatureOnly) return r_t;
  return model.r_soc.eval(soc) * r_t / model.r_temp_max_mohm;
}

double cell_resistance_mohm(const CellResistanceModel& model, double soc, double temp_c) {
  check_soc(soc);
  const double lo = model.soc_threshold - model.eps_soc;
  const double hi = model.soc_threshold + model.eps_soc;
  if (soc <= lo) return cell_resistance_mohm(model, ResistanceBranch::LowSoc, soc, temp_c);
  if (soc >= hi) return cell_resistance_mohm(model, ResistanceBranch::TemperatureOnly, soc, temp_c);
  const double w = (soc - lo) / (hi - lo);
  return (1.0 - w) * cell_resistance_mohm(model, ResistanceBranch::LowSoc, soc, temp_c) +
         w * cell_resistance_mohm(model, ResistanceBranch::TemperatureOnly, soc, temp_c);
}

PwlTable default_cell_ocv() {
  return PwlTable::build({{0.0, 3.00},
                          {0.1, 3.45},
                          {0.2, 3.55},
                          {0.3, 3.61},
                          {0.4, 3.66},
                          {0.5, 3.70},
                          {0.6, 3.76},
                          {0.7, 3.85},
                          {0.8, 3.95},
                          {0.9, 4.07},
                          {1.0, 4.20}});
}

StringElectricalParams StringElectricalParams::defaults() {
  const PwlTable cell = default_cell_ocv();
  const int n_series = 192;
  return StringElectricalParams{100.0, 156.0, n_series, 2, cell.shifted(0.05).scaled(n_series),
                                cell.scaled(n_series)};
}

void StringElectricalParams::validate() const {
  if (!(p_nominal_kw > 0.0)) throw DomainError("p_nominal must be > 0");
  if (!(q_nominal_ah > 0.0)) throw DomainError("q_nominal must be > 0");
  if (n_series < 1 || n_parallel < 1) throw DomainError("n_series and n_parallel must be >= 1");
  if (!ocv_charge.is_strictly_increasing() || !ocv_discharge.is_strictly_increasing())
    throw DomainError("OCV tables must be strictly increasing in SOC");
}

double total_resistance(const CellResistanceModel& model, const StringElectricalParams& params,
                        double soc, double temp_c) {
  return cell_resistance_mohm(model, soc, temp_c) * 1e-3 * params.resistance_scale();
}

double total_resistance_switched(const CellResistanceModel& model,
                                 const StringElectricalParams& params, double soc, double temp_c) {
  return cell_resistance_mohm(model, select_branch(model, soc), soc, temp_c) * 1e-3 *
         params.resistance_scale();
}

double ocv(const StringElectricalParams& params, double soc, Mode mode) {
  check_soc(soc);
  return mode == Mode::Charge ? params.ocv_charge.eval(soc) : params.ocv_discharge.eval(soc);
}

double max_discharge_power_w(double ocv_v, double r_ohm) {
  if (r_ohm <= 0.0) return std::numeric_limits<double>::infinity();
  return ocv_v * ocv_v / (4.0 * r_ohm);
}

double solve_current(double ocv_v, double r_ohm, double power_w, Mode mode) {
  if (r_ohm < 0.0) throw DomainError(fmt::format("negative resistance {}", r_ohm));
  if (power_w < 0.0) throw DomainError(fmt::format("negative power {}", power_w));
  if (power_w == 0.0) return 0.0;
  if (r_ohm == 0.0) return power_w / ocv_v;
  // Rationalised roots: 2P / (ocv + sqrt(disc)) avoids cancellation when r*P << ocv^2.
  if (mode == Mode::Discharge) {
    const double disc = ocv_v * ocv_v - 4.0 * r_ohm * power_w;
    if (disc < 0.0) {
      const double p_max = max_discharge_power_w(ocv_v, r_ohm);
      throw InfeasiblePowerError(
          fmt::format("discharge of {:.1f} W exceeds deliverable {:.1f} W", power_w, p_max), p_max);
    }
    return 2.0 * power_w / (ocv_v + std::sqrt(disc));
  }
  const double disc = ocv_v * ocv_v + 4.0 * r_ohm * power_w;
  return 2.0 * power_w / (ocv_v + std::sqrt(disc));
}

CoulombResult coulomb_update(double soc, double i_charge_a, double i_discharge_a, double dt_s,
                             double q_nominal_ah) {
  if (i_charge_a < 0.0 || i_discharge_a < 0.0) throw DomainError("currents must be non-negative");
  if (i_charge_a > 0.0 && i_discharge_a > 0.0)
    throw ModeViolationError("charge and discharge current both non-zero");
  const double next = soc + (dt_s / 3600.0) / q_nominal_ah * (i_charge_a - i_discharge_a);
  if (next > 1.0) return {1.0, (next - 1.0) * q_nominal_ah};
  if (next < 0.0) return {0.0, -next * q_nominal_ah};
  return {next, 0.0};
}

}  // namespace bess
