#include "bess/slp.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

void SlpConfig::validate() const {
  if (max_iters < 1) throw DomainError("SLP needs at least one iteration");
  if (!(temp_tol > 0.0) || !(soc_tol > 0.0)) throw DomainError("SLP tolerances must be > 0");
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("SLP damping must lie in (0, 1]");
}

std::vector<FrozenCoefficients> freeze(const HorizonInput& in, const Trajectory& traj) {
  std::vector<FrozenCoefficients> out(static_cast<std::size_t>(in.n_strings * in.n_steps));
  for (int m = 0; m < in.n_strings; ++m) {
    const StringPlant& p = in.strings[static_cast<std::size_t>(m)];
    for (int t = 0; t < in.n_steps; ++t) {
      const std::size_t c = static_cast<std::size_t>(m * in.n_steps + t);
      const double soc = std::clamp(traj.soc[c], 0.0, 1.0);
      FrozenCoefficients& f = out[c];
      f.r_ohm = total_resistance_switched(p.resistance, p.electrical, soc, traj.temp[c]);
      f.ocv_v = ocv(p.electrical, soc, in.mode_at(t));
      f.k_derate = t == 0 ? in.init[static_cast<std::size_t>(m)].k_derate
                          : std::clamp(p.derate_lut.eval(traj.temp[c]), 0.0, 1.0);
    }
  }
  return out;
}

Trajectory propagate(const HorizonInput& in, const DispatchPlan& plan, const std::vector<FrozenCoefficients>& frozen,
                     std::vector<double>* heat_kw) {
  const std::size_t cells = static_cast<std::size_t>(in.n_strings * in.n_steps);
  Trajectory next{std::vector<double>(cells), std::vector<double>(cells)};
  if (heat_kw) heat_kw->assign(cells, 0.0);
  for (int m = 0; m < in.n_strings; ++m) {
    const StringPlant& p = in.strings[static_cast<std::size_t>(m)];
    double soc = in.init[static_cast<std::size_t>(m)].soc;
    double temp = in.init[static_cast<std::size_t>(m)].temp_c;
    for (int t = 0; t < in.n_steps; ++t) {
      const std::size_t c = static_cast<std::size_t>(m * in.n_steps + t);
      next.soc[c] = soc;
      next.temp[c] = temp;
      const Mode mode = in.mode_at(t);
      const double applied = frozen[c].k_derate * plan.cells[c].pb;
      const double inv = p.inverter.loss_kw(applied, mode);
      double dc_w = (mode == Mode::Charge ? std::max(0.0, applied - inv) : applied + inv) * 1000.0;
      const double r = total_resistance_switched(p.resistance, p.electrical, soc, temp);
      const double v = ocv(p.electrical, soc, mode);
      if (mode == Mode::Discharge) dc_w = std::min(dc_w, 0.999 * max_discharge_power_w(v, r));
      const double i = solve_current(v, r, dc_w, mode);
      const double heat_w = heat_power(i, r);
      if (heat_kw) (*heat_kw)[c] = heat_w / 1000.0;
      soc = mode == Mode::Charge ? coulomb_update(soc, i, 0.0, in.dt_s, p.electrical.q_nominal_ah).soc
                                 : coulomb_update(soc, 0.0, i, in.dt_s, p.electrical.q_nominal_ah).soc;
      temp += in.dt_s * (p.thermal.k1() * heat_w - p.thermal.k2() * (temp - p.thermal.t_air));
    }
  }
  return next;
}

DispatchPlan slp_solve(const HorizonInput& input, const SlpConfig& cfg, const BnbConfig& bnb) {
  cfg.validate();
  HorizonInput in = input;
  const std::size_t cells = static_cast<std::size_t>(in.n_strings * in.n_steps);
  in.frozen.assign(cells, FrozenCoefficients{});
  in.validate();

  Trajectory traj{std::vector<double>(cells), std::vector<double>(cells)};
  for (int m = 0; m < in.n_strings; ++m)
    for (int t = 0; t < in.n_steps; ++t) {
      traj.soc[static_cast<std::size_t>(m * in.n_steps + t)] = in.init[static_cast<std::size_t>(m)].soc;
      traj.temp[static_cast<std::size_t>(m * in.n_steps + t)] = in.init[static_cast<std::size_t>(m)].temp_c;
    }

  DispatchPlan plan;
  std::vector<double> previous;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    try {
      in.frozen = freeze(in, traj);
      const HorizonModel hm = build_horizon_model(in);
      const LexSolution lex = solve_lexicographic(hm.program, in.eps.eps1, bnb, previous.empty() ? nullptr : &previous);
      if (!lex.ok())
        throw SolverError(fmt::format("stage {} ({}) failed: {}", lex.failed_stage, lex.failed_stage_name,
                                      to_string(lex.status)));
      plan = extract_solution(hm, lex.values);
      previous = lex.values;
      plan.stage_optima = lex.stage_optima;
      plan.stage_values = lex.stage_values;
    } catch (const Error& e) {
      throw SolverError(fmt::format("SLP iteration {}: {}", it, e.what()));
    }
    std::vector<double> exact_heat;
    const Trajectory next = propagate(in, plan, in.frozen, &exact_heat);

    double d_soc = 0.0, d_temp = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      d_soc = std::max(d_soc, std::abs(next.soc[c] - traj.soc[c]));
      d_temp = std::max(d_temp, std::abs(next.temp[c] - traj.temp[c]));
      traj.soc[c] += cfg.damping * (next.soc[c] - traj.soc[c]);
      traj.temp[c] += cfg.damping * (next.temp[c] - traj.temp[c]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      num += std::abs(plan.cells[c].pheat - exact_heat[c]);
      den += exact_heat[c];
    }
    plan.heat_residual = den > 0.0 ? num / den : 0.0;
    plan.slp_iterations = it;
    plan.converged = d_soc < cfg.soc_tol && d_temp < cfg.temp_tol;
    if (plan.converged) break;
  }
  return plan;
}

}  // namespace bess
