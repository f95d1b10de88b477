#include "bess/cosim.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

ScenarioConfig ScenarioConfig::reference() {
  ScenarioConfig c;
  c.strings.assign(2, StringPlant{});
  c.initial.assign(2, StringInit{0.5, 25.0, 1.0});
  return c;
}

double ScenarioConfig::fleet_kw() const {
  double p = 0.0;
  for (const auto& s : strings) p += s.electrical.p_nominal_kw;
  return p;
}

Ems ScenarioConfig::make_ems() const {
  if (demand.kind == DemandSpec::Kind::Direct) return Ems::direct(demand.values);
  const auto prices =
      demand.values.empty() ? two_level_prices(sim_duration, demand.price_period_steps) : demand.values;
  return Ems::price_arbitrage(prices, demand.arbitrage_fraction * fleet_kw());
}

void ScenarioConfig::validate() const {
  if (strings.empty()) throw ModelError("scenario needs at least one string");
  if (initial.size() != strings.size()) throw ModelError("one initial state per string required");
  for (const auto& s : strings) s.validate();
  for (const auto& i : initial) {
    if (i.soc < 0.0 || i.soc > 1.0) throw DomainError("initial soc outside [0, 1]");
    if (i.k_derate < 0.0 || i.k_derate > 1.0) throw DomainError("initial derating factor outside [0, 1]");
  }
  if (horizon_steps < 1) throw ModelError("horizon must have at least one step");
  if (apply_steps < 1 || apply_steps > horizon_steps) throw ModelError("apply_steps must lie in [1, horizon]");
  if (sim_duration < apply_steps) throw ModelError("sim_duration must be >= apply_steps");
  if (!(dt_s > 0.0)) throw ModelError("dt must be > 0");
  if (demand.arbitrage_fraction < 0.0 || demand.arbitrage_fraction > 1.0)
    throw DomainError("arbitrage fraction must lie in [0, 1]");
  weights.validate();
  slp.validate();
  bnb.validate();
}

TraceLog run_cosim(const ScenarioConfig& cfg) {
  cfg.validate();
  const int M = static_cast<int>(cfg.strings.size());
  const Ems ems = cfg.make_ems();

  TraceLog log;
  log.n_strings = M;
  log.dt_s = cfg.dt_s;
  std::vector<StringState> states;
  for (int m = 0; m < M; ++m) {
    const auto& plant = cfg.strings[static_cast<std::size_t>(m)];
    const auto& init = cfg.initial[static_cast<std::size_t>(m)];
    StringState s = StringState::uniform(plant.thermal, init.soc, init.temp_c);
    s.k_derate_applied = init.k_derate;
    states.push_back(std::move(s));
  }

  int t0 = 0;
  for (int h = 0; t0 < cfg.sim_duration; ++h) {
    const int want = std::min(cfg.horizon_steps, cfg.sim_duration - t0);
    const EmsHorizon window = ems.horizon(t0, want);
    if (window.demand_kw.empty()) {
      log.warnings.push_back(fmt::format("demand profile ends at step {}; simulation stopped", t0));
      break;
    }
    HorizonRecord rec;
    rec.index = h;
    rec.t0 = t0;
    rec.steps = static_cast<int>(window.demand_kw.size());
    rec.truncated = window.truncated;
    if (window.truncated) log.warnings.push_back(fmt::format("horizon {} truncated to {} steps", h, rec.steps));

    HorizonInput in;
    in.n_strings = M;
    in.n_steps = rec.steps;
    in.dt_s = cfg.dt_s;
    in.demand_kw = window.demand_kw;
    in.strings = cfg.strings;
    in.weights = cfg.weights;
    in.big_m = cfg.big_m;
    in.eps = cfg.eps;
    in.heat_breakpoints = cfg.heat_breakpoints;
    for (const auto& s : states) {
      in.init.push_back(StringInit{s.soc, s.temp_mean, s.k_derate_applied});
      rec.init_soc.push_back(s.soc);
      rec.init_temp.push_back(s.temp_mean);
    }

    const auto start = std::chrono::steady_clock::now();
    DispatchPlan plan;
    try {
      plan = slp_solve(in, cfg.slp, cfg.bnb);
    } catch (const Error& e) {
      throw SolverError(fmt::format("horizon {} (step {}): {}", h, t0, e.what()));
    }
    rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.slp_iterations = plan.slp_iterations;
    rec.converged = plan.converged;
    rec.heat_residual = plan.heat_residual;
    rec.max_balance_residual = plan.max_balance_residual;
    rec.stage_optima = plan.stage_optima;
    rec.stage_values = plan.stage_values;
    if (!plan.converged)
      log.warnings.push_back(fmt::format("horizon {}: SLP not converged after {} iterations", h, plan.slp_iterations));

    rec.applied_steps = std::min(cfg.apply_steps, rec.steps);
    for (int t = 0; t < rec.applied_steps; ++t) {
      const double demand = window.demand_kw[static_cast<std::size_t>(t)];
      const Mode mode = in.mode_at(t);
      for (int m = 0; m < M; ++m) {
        const StringPlant& plant = cfg.strings[static_cast<std::size_t>(m)];
        StringState& s = states[static_cast<std::size_t>(m)];
        const CellPlan& cell = plan.at(m, t);
        const double setpoint = std::clamp(cell.pb, 0.0, plant.electrical.p_nominal_kw);

        TraceRow row;
        row.step = t0 + t;
        row.string = m;
        row.demand_kw = demand;
        row.mode = mode;
        row.setpoint_kw = setpoint;
        row.k_derate = s.k_derate_applied;
        row.b_high = cell.bh;
        row.b_low = cell.bl;
        row.b_inv = cell.binv;
        row.planned_avail_kw = cell.pah + cell.pal;
        row.planned_soc = cell.soc;
        row.planned_temp = cell.temp;

        const PlantStepResult r = plant_apply(plant, s, setpoint, mode, cfg.dt_s);
        if (r.ecm_clamped)
          log.warnings.push_back(
              fmt::format("step {} string {}: discharge clamped to deliverable power", row.step, m));
        row.applied_kw = r.applied_kw;
        row.p_inv_kw = r.inverter_kw;
        row.p_heat_kw = r.heat_kw;
        row.p_derate_kw = r.derate_loss_kw;
        row.p_avail_kw = r.avail_loss_kw;
        row.stored_kw = r.stored_kw;
        row.ecm_clamped = r.ecm_clamped;

        s = r.state;
        const DerateUpdate u = pi_derate_update(plant.controller, s);
        s.k_derate_applied = u.k_derate;
        s.pi_integral = u.pi_integral;

        row.soc = s.soc;
        row.temp_mean = s.temp_mean;
        row.node_temps = s.temps;
        log.rows.push_back(std::move(row));
      }
    }
    t0 += rec.applied_steps;
    log.horizons.push_back(std::move(rec));
  }
  log.final_states = states;
  return log;
}

}  // namespace bess
