#include "bess/horizon_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess {

const char* to_string(Objective o) {
  switch (o) {
    case Objective::Availability: return "availability";
    case Objective::Derating: return "derating";
    case Objective::Inverter: return "inverter";
    case Objective::Battery: return "battery";
  }
  return "?";
}

void ObjectiveWeights::validate() const {
  for (double w : weight)
    if (!(w >= 0.0)) throw DomainError("objective weights must be >= 0");
  if (slack_penalty <= 0.0 || regularization < 0.0) throw DomainError("bad slack/regularization weight");
}

void HorizonInput::validate() const {
  if (n_strings < 1 || n_steps < 1) throw ModelError("horizon needs at least one string and one step");
  if (demand_kw.size() != static_cast<std::size_t>(n_steps)) throw ModelError("demand length != n_steps");
  if (init.size() != static_cast<std::size_t>(n_strings) || strings.size() != static_cast<std::size_t>(n_strings))
    throw ModelError("per-string init/params size mismatch");
  if (frozen.size() != static_cast<std::size_t>(n_strings * n_steps)) throw ModelError("frozen size mismatch");
  if (!(dt_s > 0.0)) throw ModelError("dt must be > 0");
  if (heat_breakpoints < 2) throw ModelError("heat curve needs >= 2 breakpoints");
  weights.validate();
  double fleet = 0.0;
  for (const auto& s : strings) fleet += s.electrical.p_nominal_kw;
  for (int t = 0; t < n_steps; ++t) {
    const double d = demand_kw[static_cast<std::size_t>(t)];
    if (std::abs(d) > fleet * (1.0 + 1e-12))
      throw ModelError(fmt::format("step {}: |demand| {} kW exceeds fleet power {} kW", t, std::abs(d), fleet));
  }
}

ObjectiveScales normalize_objectives(const HorizonInput& input) {
  ObjectiveScales s;
  const double dt_h = input.dt_s / 3600.0;
  for (double d : input.demand_kw) s.base_kwh += std::abs(d) * dt_h;
  if (s.base_kwh > 0.0) {
    s.scale = 1.0 / s.base_kwh;
  } else {
    s.scale = 1.0;
    s.degenerate = true;
  }
  return s;
}

namespace {

double dc_power_kw(const StringPlant& plant, double applied_kw, Mode mode) {
  const double inv = plant.inverter.loss_kw(applied_kw, mode);
  return mode == Mode::Charge ? std::max(0.0, applied_kw - inv) : applied_kw + inv;
}

double heat_at(const StringPlant& plant, const FrozenCoefficients& f, Mode mode, double pb_kw) {
  const double dc = dc_power_kw(plant, f.k_derate * pb_kw, mode);
  const double i = solve_current(f.ocv_v, f.r_ohm, dc * 1000.0, mode);
  return heat_power(i, f.r_ohm) / 1000.0;
}

// Lower convex hull of points sorted by x.
std::vector<Breakpoint> convex_hull(const std::vector<Breakpoint>& pts) {
  std::vector<Breakpoint> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  return hull;
}

bool same_table(const PwlTable& a, const PwlTable& b) {
  const auto x = a.breakpoints();
  const auto y = b.breakpoints();
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].x != y[i].x || x[i].y != y[i].y) return false;
  return true;
}

bool interchangeable(const HorizonInput& in, int a, int b) {
  const auto& pa = in.strings[static_cast<std::size_t>(a)];
  const auto& pb = in.strings[static_cast<std::size_t>(b)];
  const auto& ia = in.init[static_cast<std::size_t>(a)];
  const auto& ib = in.init[static_cast<std::size_t>(b)];
  if (pa.electrical.p_nominal_kw != pb.electrical.p_nominal_kw ||
      pa.electrical.q_nominal_ah != pb.electrical.q_nominal_ah || pa.thermal.c_total != pb.thermal.c_total ||
      pa.thermal.h_conv != pb.thermal.h_conv || pa.thermal.t_air != pb.thermal.t_air ||
      !same_table(pa.inverter.charge, pb.inverter.charge) ||
      !same_table(pa.inverter.discharge, pb.inverter.discharge) || ia.soc != ib.soc || ia.temp_c != ib.temp_c)
    return false;
  for (int t = 0; t < in.n_steps; ++t) {
    const auto& fa = in.frozen_at(a, t);
    const auto& fb = in.frozen_at(b, t);
    if (fa.r_ohm != fb.r_ohm || fa.ocv_v != fb.ocv_v || fa.k_derate != fb.k_derate) return false;
  }
  return true;
}

}  // namespace

PwlTable heat_curve(const StringPlant& plant, const FrozenCoefficients& f, Mode mode, int breakpoints) {
  const double pn = plant.electrical.p_nominal_kw;
  double cap = pn;
  if (mode == Mode::Discharge) {
    const double dc_max = 0.999 * max_discharge_power_w(f.ocv_v, f.r_ohm) / 1000.0;
    if (dc_power_kw(plant, f.k_derate * pn, mode) > dc_max) {
      double lo = 0.0, hi = pn;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dc_power_kw(plant, f.k_derate * mid, mode) > dc_max ? hi : lo) = mid;
      }
      cap = lo;
    }
  }
  std::vector<Breakpoint> pts;
  for (int i = 0; i < breakpoints; ++i) {
    const double p = cap * i / (breakpoints - 1);
    pts.push_back({p, heat_at(plant, f, mode, p)});
  }
  if (cap <= 0.0) pts = {{0.0, 0.0}, {pn, 0.0}};
  return PwlTable::build(convex_hull(pts));
}

HorizonModel build_horizon_model(const HorizonInput& in) {
  in.validate();
  HorizonModel hm;
  hm.n_strings = in.n_strings;
  hm.n_steps = in.n_steps;
  hm.scales = normalize_objectives(in);
  MathProgram& p = hm.program;
  const int M = in.n_strings;
  const int T = in.n_steps;
  const double dt_h = in.dt_s / 3600.0;
  hm.vars.resize(static_cast<std::size_t>(M * T));
  hm.interchangeable.assign(static_cast<std::size_t>(M), false);
  for (int m = 0; m + 1 < M; ++m) hm.interchangeable[static_cast<std::size_t>(m)] = interchangeable(in, m, m + 1);

  for (int m = 0; m < M; ++m) {
    const StringPlant& sp = in.strings[static_cast<std::size_t>(m)];
    const double pn = sp.electrical.p_nominal_kw;
    // Loose boxes instead of infinite bounds: never binding in practice, but
    // they keep the simplex away from its artificial bounds.
    const double loose = 10.0 * pn;
    for (int t = 0; t < T; ++t) {
      const Mode mode = in.mode_at(t);
      const bool charge = mode == Mode::Charge;
      auto name = [&](const char* what) { return fmt::format("{}[{},{}]", what, m, t); };
      CellVars& v = hm.vars[static_cast<std::size_t>(m * T + t)];
      v.pb = p.add_var(name("pb"), 0.0, pn);
      v.pch = p.add_var(name("pch"), 0.0, charge ? loose : 0.0);
      v.pdch = p.add_var(name("pdch"), 0.0, charge ? 0.0 : loose);
      v.pinv = p.add_var(name("pinv"), 0.0, pn);
      v.pheat = p.add_var(name("pheat"), 0.0, loose);
      v.pder = p.add_var(name("pder"), 0.0, pn);
      v.pah = p.add_var(name("pah"), 0.0, charge ? pn : 0.0);
      v.pal = p.add_var(name("pal"), 0.0, charge ? 0.0 : pn);
      v.sp = p.add_var(name("sp"), 0.0, loose);
      v.sn = p.add_var(name("sn"), 0.0, loose);
      v.soc = p.add_var(name("soc"), 0.0, 1.0);
      v.temp = p.add_var(name("temp"), -1e4, 1e4);
      v.bh = p.add_binary(name("bh"));
      v.bl = p.add_binary(name("bl"));
      v.binv = p.add_binary(name("binv"));
    }
  }

  // Fleet demand split.
  for (int t = 0; t < T; ++t) {
    LinearExpr e;
    for (int m = 0; m < M; ++m) e.add(hm.at(m, t).pb, 1.0);
    p.add_constraint(fmt::format("demand[{}]", t), std::move(e), Sense::Eq,
                     std::abs(in.demand_kw[static_cast<std::size_t>(t)]));
  }

  const double M_soc = in.big_m.soc;
  const double eps = in.eps.eps;
  for (int m = 0; m < M; ++m) {
    const StringPlant& sp = in.strings[static_cast<std::size_t>(m)];
    const StringInit& init = in.init[static_cast<std::size_t>(m)];
    const double q = sp.electrical.q_nominal_ah;
    const double k1 = sp.thermal.k1();
    const double k2 = sp.thermal.k2();
    const double t_air = sp.thermal.t_air;
    for (int t = 0; t < T; ++t) {
      const CellVars& v = hm.at(m, t);
      const FrozenCoefficients& f = in.frozen_at(m, t);
      const Mode mode = in.mode_at(t);
      const bool charge = mode == Mode::Charge;
      auto name = [&](const char* what) { return fmt::format("{}[{},{}]", what, m, t); };

      // Power balance, charge or discharge form.
      LinearExpr bal;
      if (charge) {
        bal.add(v.pch, 1.0).add(v.pinv, 1.0).add(v.pheat, 1.0).add(v.pah, 1.0);
      } else {
        bal.add(v.pdch, 1.0).add(v.pinv, -1.0).add(v.pheat, -1.0).add(v.pal, 1.0);
      }
      bal.add(v.pder, 1.0).add(v.pb, -1.0).add(v.sp, -1.0).add(v.sn, 1.0);
      hm.balance_rows.push_back(p.add_constraint(name("balance"), std::move(bal), Sense::Eq, 0.0));

      // Coulomb counting with I = P / OCV at the frozen OCV.
      const double c = dt_h * 1000.0 / (f.ocv_v * q);
      LinearExpr soc;
      soc.add(v.soc, 1.0).add(v.pch, -c).add(v.pdch, c);
      double soc_rhs = 0.0;
      if (t == 0) soc_rhs = init.soc;
      else soc.add(hm.at(m, t - 1).soc, -1.0);
      p.add_constraint(name("soc"), std::move(soc), Sense::Eq, soc_rhs);

      // Lumped thermal recursion.
      LinearExpr th;
      th.add(v.temp, 1.0).add(v.pheat, -in.dt_s * k1 * 1000.0);
      double th_rhs = in.dt_s * k2 * t_air;
      if (t == 0) th_rhs += (1.0 - in.dt_s * k2) * init.temp_c;
      else th.add(hm.at(m, t - 1).temp, -(1.0 - in.dt_s * k2));
      p.add_constraint(name("thermal"), std::move(th), Sense::Eq, th_rhs);

      // SOC indicators.
      p.add_constraint(name("high_on"), LinearExpr{}.add(v.soc, 1.0).add(v.bh, -M_soc), Sense::Ge,
                       1.0 - eps - M_soc);
      p.add_constraint(name("high_off"), LinearExpr{}.add(v.soc, 1.0).add(v.bh, -M_soc), Sense::Le, 1.0 - eps);
      p.add_constraint(name("low_on"), LinearExpr{}.add(v.soc, 1.0).add(v.bl, M_soc), Sense::Le, eps + M_soc);
      p.add_constraint(name("low_off"), LinearExpr{}.add(v.soc, 1.0).add(v.bl, M_soc), Sense::Ge, eps);

      // Availability losses only at the SOC limits.
      p.add_constraint(name("avail_high"), LinearExpr{}.add(v.pah, 1.0).add(v.bh, -in.big_m.avail_kw), Sense::Le, eps);
      p.add_constraint(name("avail_low"), LinearExpr{}.add(v.pal, 1.0).add(v.bl, -in.big_m.avail_kw), Sense::Le, eps);
      p.add_constraint(name("exclusive"), LinearExpr{}.add(v.bh, 1.0).add(v.bl, 1.0), Sense::Le, 1.0);

      // Inverter on/off and loss table on the derated power.
      const double k = f.k_derate;
      p.add_constraint(name("inv_on"), LinearExpr{}.add(v.pb, 1.0).add(v.binv, -in.big_m.inv_kw), Sense::Le,
                       in.eps.eps_inv_kw);
      const PwlTable& inv_table = sp.inverter.table(mode);
      const auto inv_segs = inv_table.segments();
      if (inv_segs.size() == 1) {
        p.add_constraint(name("inv_loss"),
                         LinearExpr{}.add(v.pinv, 1.0).add(v.pb, -inv_segs[0].slope * k).add(v.binv, -inv_segs[0].intercept),
                         Sense::Eq, 0.0);
      } else {
        for (std::size_t s = 0; s < inv_segs.size(); ++s)
          p.add_constraint(fmt::format("inv_seg{}[{},{}]", s, m, t),
                           LinearExpr{}.add(v.pinv, 1.0).add(v.pb, -inv_segs[s].slope * k).add(v.binv, -inv_segs[s].intercept),
                           Sense::Ge, 0.0);
        const auto bps = inv_table.breakpoints();
        const double chord = (bps.back().y - bps.front().y) / (bps.back().x - bps.front().x);
        p.add_constraint(name("inv_chord"),
                         LinearExpr{}.add(v.pinv, 1.0).add(v.pb, -chord * k * (1.0 + 1e-9)).add(v.binv, -bps.front().y),
                         Sense::Le, 1e-9);
      }

      // Convex heat curve: epigraph rows plus the chord over [0, pN].
      const PwlTable curve = heat_curve(sp, f, mode, in.heat_breakpoints);
      const auto segs = curve.segments();
      for (std::size_t s = 0; s < segs.size(); ++s)
        p.add_constraint(fmt::format("heat_seg{}[{},{}]", s, m, t),
                         LinearExpr{}.add(v.pheat, 1.0).add(v.pb, -segs[s].slope), Sense::Ge, segs[s].intercept);
      // The chord meets the last segment at pN; the margin keeps that corner
      // from vanishing in round-off.
      const double pn = sp.electrical.p_nominal_kw;
      double h_end = 0.0;
      for (const auto& sg : segs) h_end = std::max(h_end, sg(pn));
      const double h0 = curve.breakpoints().front().y;
      p.add_constraint(name("heat_chord"), LinearExpr{}.add(v.pheat, 1.0).add(v.pb, -(h_end - h0) / pn * (1.0 + 1e-9)),
                       Sense::Le, h0 + 1e-9);

      // Derating curtailment.
      p.add_constraint(name("derate"), LinearExpr{}.add(v.pder, 1.0).add(v.pb, -(1.0 - k)), Sense::Eq, 0.0);
    }
  }

  // Normalised loss sums.
  const double w = dt_h * hm.scales.scale;
  for (int m = 0; m < M; ++m) {
    for (int t = 0; t < T; ++t) {
      const CellVars& v = hm.at(m, t);
      hm.objectives[0].add(v.pah, w).add(v.pal, w);
      hm.objectives[1].add(v.pder, w);
      hm.objectives[2].add(v.pinv, w);
      hm.objectives[3].add(v.pheat, w);
      hm.slack.add(v.sp, w).add(v.sn, w);
    }
  }

  // Stages: one per distinct priority, highest first.
  const auto& W = in.weights;
  std::vector<int> prios(W.priority.begin(), W.priority.end());
  std::sort(prios.begin(), prios.end(), std::greater<>());
  prios.erase(std::unique(prios.begin(), prios.end()), prios.end());
  for (std::size_t s = 0; s < prios.size(); ++s) {
    LinearExpr stage;
    std::string label;
    for (int i = 0; i < kNumObjectives; ++i) {
      if (W.priority[static_cast<std::size_t>(i)] != prios[s]) continue;
      double wi = W.weight[static_cast<std::size_t>(i)];
      if (wi == 0.0 && s + 1 == prios.size()) wi = W.regularization;
      stage.add(hm.objectives[static_cast<std::size_t>(i)], wi);
      label += label.empty() ? "" : "+";
      label += to_string(static_cast<Objective>(i));
    }
    if (s == 0) stage.add(hm.slack, W.slack_penalty);
    p.add_stage(prios[s], label, std::move(stage));
  }
  return hm;
}

DispatchPlan extract_solution(const HorizonModel& model, const std::vector<double>& x, double tol) {
  std::string worst;
  const double viol = model.program.max_violation(x, &worst);
  if (viol > tol)
    throw ExtractionError(fmt::format("assignment violates '{}' by {:.3g}", worst, viol), worst, viol);

  // Canonical order among interchangeable neighbours (bubble pass).
  std::vector<double> xs = x;
  auto var_block = [&](int m, int t) {
    const CellVars& v = model.at(m, t);
    return std::array<int, 15>{v.pb, v.pch, v.pdch, v.pinv, v.pheat, v.pder, v.pah, v.pal,
                               v.sp, v.sn, v.soc, v.temp, v.bh, v.bl, v.binv};
  };
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (int m = 0; m + 1 < model.n_strings; ++m) {
      if (!model.interchangeable[static_cast<std::size_t>(m)]) continue;
      int order = 0;
      for (int t = 0; t < model.n_steps && order == 0; ++t) {
        const double a = xs[static_cast<std::size_t>(model.at(m, t).pb)];
        const double b = xs[static_cast<std::size_t>(model.at(m + 1, t).pb)];
        if (std::abs(a - b) > 1e-9) order = a > b ? 1 : -1;
      }
      if (order >= 0) continue;
      for (int t = 0; t < model.n_steps; ++t) {
        const auto ja = var_block(m, t);
        const auto jb = var_block(m + 1, t);
        for (std::size_t k = 0; k < ja.size(); ++k)
          std::swap(xs[static_cast<std::size_t>(ja[k])], xs[static_cast<std::size_t>(jb[k])]);
      }
      swapped = true;
    }
  }

  DispatchPlan plan;
  plan.n_strings = model.n_strings;
  plan.n_steps = model.n_steps;
  plan.cells.resize(model.vars.size());
  auto val = [&](int j) { return xs[static_cast<std::size_t>(j)]; };
  auto clean = [&](int j) { return std::max(0.0, val(j)); };
  for (std::size_t c = 0; c < model.vars.size(); ++c) {
    const CellVars& v = model.vars[c];
    CellPlan& cp = plan.cells[c];
    cp.mode = model.program.vars()[static_cast<std::size_t>(v.pdch)].ub > 0.0 ? Mode::Discharge : Mode::Charge;
    cp.pb = clean(v.pb);
    cp.pch = clean(v.pch);
    cp.pdch = clean(v.pdch);
    cp.pinv = clean(v.pinv);
    cp.pheat = clean(v.pheat);
    cp.pder = clean(v.pder);
    cp.pah = clean(v.pah);
    cp.pal = clean(v.pal);
    cp.sp = clean(v.sp);
    cp.sn = clean(v.sn);
    cp.soc = std::clamp(val(v.soc), 0.0, 1.0);
    cp.temp = val(v.temp);
    cp.bh = static_cast<int>(std::lround(val(v.bh)));
    cp.bl = static_cast<int>(std::lround(val(v.bl)));
    cp.binv = static_cast<int>(std::lround(val(v.binv)));
  }
  for (int row : model.balance_rows)
    plan.max_balance_residual = std::max(plan.max_balance_residual,
                                         model.program.constraints()[static_cast<std::size_t>(row)].violation(xs));
  for (int i = 0; i < kNumObjectives; ++i)
    plan.objective_values[static_cast<std::size_t>(i)] = model.objectives[static_cast<std::size_t>(i)].eval(xs);
  return plan;
}

}  // namespace bess
