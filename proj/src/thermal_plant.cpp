#include "bess/thermal_plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bess/errors.hpp"
#include "bess/simd/kernels.hpp"

namespace bess {

void ThermalParams::validate() const {
  if (n_nodes < 2) throw DomainError("thermal n_nodes must be >= 2");
  if (!(c_total > 0.0 && k_cond > 0.0 && h_conv > 0.0))
    throw DomainError("thermal capacity and conductances must be > 0");
}

void PiDerateController::validate() const {
  if (kp < 0.0 || ki < 0.0) throw DomainError("PI gains must be >= 0");
  if (!(t_start < t_stop)) throw DomainError("derating t_start must be below t_stop");
}

StringState StringState::uniform(const ThermalParams& params, double soc, double temp_c) {
  StringState s;
  s.soc = soc;
  s.temps.assign(static_cast<std::size_t>(params.n_nodes), temp_c);
  s.temp_mean = temp_c;
  return s;
}

void StringState::refresh_mean() {
  temp_mean = std::accumulate(temps.begin(), temps.end(), 0.0) / static_cast<double>(temps.size());
}

PwlTable StringPlant::default_derate_lut() { return PwlTable::build({{45.0, 1.0}, {60.0, 0.0}}); }

void StringPlant::validate() const {
  electrical.validate();
  inverter.validate();
  thermal.validate();
  controller.validate();
  if (!resistance.r_temp.is_non_increasing() || !resistance.r_soc.is_non_increasing())
    throw DomainError("resistance tables must be non-increasing");
  for (const auto& bp : derate_lut.breakpoints())
    if (bp.y < 0.0 || bp.y > 1.0) throw DomainError("derating table values must lie in [0, 1]");
}

double FdmBalance::relative_residual() const {
  const double scale = std::max({std::abs(injected_j), std::abs(convected_j), std::abs(stored_j), 1.0});
  return std::abs(residual()) / scale;
}

StringState fdm_step(const StringState& state, const ThermalParams& params, double heat_w,
                     double dt_s, FdmBalance* balance) {
  const std::size_t n = state.temps.size();
  const double c_node = params.c_total / static_cast<double>(n);
  const double dt_max = 0.4 * c_node / (2.0 * params.k_cond + params.h_conv);
  const int sub_steps = std::max(1, static_cast<int>(std::ceil(dt_s / dt_max)));
  const double h = dt_s / sub_steps;

  const double source = heat_w / static_cast<double>(n) * h / c_node;
  const double coupling = params.k_cond * h / c_node;
  const double cooling = 0.5 * params.h_conv * h / c_node;
  const double t_air = params.t_air;

  StringState next = state;
  std::vector<double> scratch(n);
  std::vector<double>* cur = &next.temps;
  std::vector<double>* nxt = &scratch;
  double convected = 0.0;
  const auto& k = simd::kernels();

  for (int s = 0; s < sub_steps; ++s) {
    const std::vector<double>& in = *cur;
    std::vector<double>& out = *nxt;
    k.diffuse_interior(in.data(), out.data(), n, source, coupling);
    const double first = in[0];
    const double last = in[n - 1];
    out[0] = first + (source + coupling * (in[1] - first) - cooling * (first - t_air));
    out[n - 1] = last + (source + coupling * (in[n - 2] - last) - cooling * (last - t_air));
    convected += 0.5 * params.h_conv * ((first - t_air) + (last - t_air)) * h;
    std::swap(cur, nxt);
  }
  if (cur != &next.temps) next.temps = *cur;
  next.refresh_mean();

  if (balance) {
    balance->injected_j = heat_w * dt_s;
    balance->convected_j = convected;
    double d_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) d_sum += next.temps[i] - state.temps[i];
    balance->stored_j = c_node * d_sum;
    balance->sub_steps = sub_steps;
  }
  return next;
}

DerateUpdate pi_derate_update(const PiDerateController& ctrl, const StringState& state) {
  const double excess = state.temp_mean - ctrl.t_start;
  const double e = std::max(0.0, excess);
  double k = std::clamp(1.0 - (ctrl.kp * e + ctrl.ki * state.pi_integral), 0.0, 1.0);
  if (state.temp_mean >= ctrl.t_stop) k = 0.0;

  double integral = state.pi_integral + excess;
  double ceiling = 0.0;
  if (ctrl.ki > 0.0) ceiling = std::max(0.0, (1.0 - ctrl.kp * e) / ctrl.ki);
  integral = std::clamp(integral, 0.0, ceiling);
  return {k, integral};
}

PlantStepResult plant_apply(const StringPlant& plant, const StringState& state, double setpoint_kw,
                            Mode mode, double dt_s) {
  const auto& el = plant.electrical;
  if (setpoint_kw < 0.0 || setpoint_kw > el.p_nominal_kw * (1.0 + 1e-9))
    throw DomainError("setpoint outside [0, p_nominal]");

  PlantStepResult r;
  r.setpoint_kw = setpoint_kw;
  const double k = std::clamp(state.k_derate_applied, 0.0, 1.0);
  double applied = k * setpoint_kw;
  r.derate_loss_kw = setpoint_kw - applied;

  double inv = plant.inverter.loss_kw(applied, mode);
  double dc_kw = mode == Mode::Charge ? applied - inv : applied + inv;
  if (dc_kw < 0.0) {  // charge too small to cover the no-load loss
    inv = applied;
    dc_kw = 0.0;
  }

  const double r_ohm = total_resistance(plant.resistance, el, state.soc, state.temp_mean);
  const double v = ocv(el, state.soc, mode);
  double shortfall_kw = 0.0;
  if (mode == Mode::Discharge) {
    const double p_max_kw = 0.999 * max_discharge_power_w(v, r_ohm) / 1000.0;
    if (dc_kw > p_max_kw) {
      shortfall_kw = dc_kw - p_max_kw;
      dc_kw = p_max_kw;
      applied = std::max(0.0, dc_kw - inv);
      r.ecm_clamped = true;
    }
  }

  const double current = solve_current(v, r_ohm, dc_kw * 1000.0, mode);
  const double heat_w = heat_power(current, r_ohm);
  const CoulombResult cc = mode == Mode::Charge
                               ? coulomb_update(state.soc, current, 0.0, dt_s, el.q_nominal_ah)
                               : coulomb_update(state.soc, 0.0, current, dt_s, el.q_nominal_ah);
  const double dt_h = dt_s / 3600.0;
  r.current_a = current;
  r.overflow_kwh = cc.overflow_ah * v / 1000.0;

  // A string that hits a SOC bound only runs for the part of the step that
  // fit; the rest of the commanded power is unavailable.
  const double requested_ah = current * dt_h;
  const double f = requested_ah > 0.0 ? std::clamp(1.0 - cc.overflow_ah / requested_ah, 0.0, 1.0) : 1.0;
  r.applied_kw = applied * f;
  r.inverter_kw = inv * f;
  r.heat_kw = heat_w * f / 1000.0;
  r.stored_kw = (cc.soc - state.soc) * el.q_nominal_ah * v / 1000.0 / dt_h;
  r.avail_loss_kw = applied * (1.0 - f) + shortfall_kw;

  r.state = fdm_step(state, plant.thermal, heat_w * f, dt_s);
  r.state.soc = cc.soc;
  return r;
}

double calibrate_sensitivity(const StringPlant& plant, double dt_s) {
  const StringState start = StringState::uniform(plant.thermal, 0.5, plant.thermal.t_air);
  const double p = plant.electrical.p_nominal_kw;
  const PlantStepResult step = plant_apply(plant, start, p, Mode::Discharge, dt_s);
  return (step.state.temp_mean - start.temp_mean) / p;
}

CalibrationReport calibrate_plant(const StringPlant& plant, double dt_s) {
  plant.validate();
  CalibrationReport rep;
  rep.sensitivity = calibrate_sensitivity(plant, dt_s);

  const ThermalParams& th = plant.thermal;
  StringState s = StringState::uniform(th, 0.5, th.t_air);
  double exact = th.t_air;
  for (int k = 0; k < 96; ++k) {
    const double q = (k / 8) % 2 == 0 ? 5200.0 : 600.0;
    const double steady = th.t_air + q / th.h_conv;
    exact = steady + (exact - steady) * std::exp(-th.k2() * dt_s);
    s = fdm_step(s, th, q, dt_s);
    rep.lumped_deviation = std::max(rep.lumped_deviation, std::abs(s.temp_mean - exact));
  }

  const auto& el = plant.electrical;
  for (int i = 1; i <= 19; ++i) {
    const double soc = 0.05 * i;
    for (Mode mode : {Mode::Charge, Mode::Discharge}) {
      const double v = ocv(el, soc, mode);
      const double r = total_resistance(plant.resistance, el, soc, th.t_air);
      const double cap_w = mode == Mode::Discharge ? 0.999 * max_discharge_power_w(v, r) : std::numeric_limits<double>::infinity();
      for (int j = 1; j <= 10; ++j) {
        const double p_w = std::min(el.p_nominal_kw * 100.0 * j, cap_w);
        const double i_a = solve_current(v, r, p_w, mode);
        const double back = mode == Mode::Charge ? v * i_a + i_a * i_a * r : v * i_a - i_a * i_a * r;
        rep.ecm_residual = std::max(rep.ecm_residual, std::abs(back - p_w) / p_w);
        ++rep.ecm_points;
      }
    }
  }
  return rep;
}

}  // namespace bess
