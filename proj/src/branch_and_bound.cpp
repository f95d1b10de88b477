#include "bess/branch_and_bound.hpp"

#include <algorithm>

#include <cmath>
#include <memory>
#include <queue>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bess/errors.hpp"

namespace bess {

void BnbConfig::validate() const {
  if (!(integrality_tol > 0.0 && gap_tol > 0.0)) throw DomainError("B&B tolerances must be > 0");
  if (max_nodes < 1) throw DomainError("max_nodes must be >= 1");
}

std::string_view to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal: return "optimal";
    case MipStatus::Infeasible: return "infeasible";
    case MipStatus::Unbounded: return "unbounded";
    case MipStatus::NodeLimit: return "node_limit";
    case MipStatus::NoIncumbent: return "node_limit_no_incumbent";
    case MipStatus::LpFailure: return "lp_failure";
  }
  return "unknown";
}

namespace {

struct BoundChange {
  int var;
  double lb, ub;
};

struct Node {
  long id;
  long parent;
  int depth;
  double bound;
  std::vector<BoundChange> path;           // all changes from the root
  std::shared_ptr<const DualSimplex> warm;  // parent's solved engine, if kept
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

double gap_abs(const BnbConfig& cfg, double incumbent) {
  return cfg.gap_tol * std::max(std::abs(incumbent), 1e-3);
}

}  // namespace

MipSolution bnb_solve(const MathProgram& program, const LinearExpr& objective, const BnbConfig& cfg,
                      const std::vector<double>* hint) {
  cfg.validate();
  const std::vector<int> binaries = program.binary_indices();
  MipSolution out;

  DualSimplex root(program, objective, cfg.lp);
  double incumbent = kInf;
  std::vector<double> best;
  if (hint && hint->size() == program.num_vars() && program.max_violation(*hint) <= 1e-7) {
    bool integral = true;
    for (int b : binaries) {
      const double v = (*hint)[static_cast<std::size_t>(b)];
      integral = integral && std::abs(v - std::round(v)) <= cfg.integrality_tol;
    }
    if (integral) {
      best = *hint;
      incumbent = objective.eval(best);
    }
  }

  std::size_t live_bytes = 0;
  auto keep = [&](DualSimplex&& engine) -> std::shared_ptr<const DualSimplex> {
    const std::size_t bytes = engine.memory_bytes();
    if (live_bytes + bytes > cfg.snapshot_budget_bytes) return nullptr;
    live_bytes += bytes;
    return std::shared_ptr<const DualSimplex>(new DualSimplex(std::move(engine)),
                                              [&live_bytes, bytes](const DualSimplex* p) {
                                                live_bytes -= bytes;
                                                delete p;
                                              });
  };

  if (cfg.node_log) fmt::print(*cfg.node_log, "node,parent,depth,bound,incumbent,status\n");
  auto log = [&](const Node& n, double bound, std::string_view status) {
    if (cfg.node_log)
      fmt::print(*cfg.node_log, "{},{},{},{:.10g},{:.10g},{}\n", n.id, n.parent, n.depth, bound,
                 incumbent, status);
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(Node{0, -1, 0, -kInf, {}, nullptr});
  long next_id = 1;
  long processed = 0;
  bool root_done = false;

  while (!open.empty()) {
    if (std::isfinite(incumbent) && open.top().bound >= incumbent - gap_abs(cfg, incumbent)) break;
    if (processed >= cfg.max_nodes) break;
    Node node = open.top();
    open.pop();
    ++processed;

    const bool warm = static_cast<bool>(node.warm);
    DualSimplex engine = warm ? *node.warm : root;
    node.warm.reset();
    if (warm) {
      const auto& c = node.path.back();
      engine.set_bounds(c.var, c.lb, c.ub);
    } else {
      for (const auto& c : node.path) engine.set_bounds(c.var, c.lb, c.ub);
    }
    const int iters_before = engine.iterations();
    const LpStatus st = engine.solve();
    out.lp_iterations += engine.iterations() - iters_before;

    if (!root_done) {
      root_done = true;
      if (st == LpStatus::Unbounded) {
        out.status = MipStatus::Unbounded;
        return out;
      }
      if (st == LpStatus::IterationLimit) {
        out.status = MipStatus::LpFailure;
        return out;
      }
      root = engine;
      // Seed the incumbent: fix the binaries of the hint, then of the rounded
      // relaxation, and re-solve the continuous part.
      if (st == LpStatus::Optimal) {
        auto try_fixing = [&](const std::vector<double>& src) {
          DualSimplex fixed = root;
          for (int b : binaries) {
            const double v = std::clamp(std::round(src[static_cast<std::size_t>(b)]), 0.0, 1.0);
            fixed.set_bounds(b, v, v);
          }
          const int before = fixed.iterations();
          const LpStatus fs = fixed.solve();
          out.lp_iterations += fixed.iterations() - before;
          if (fs == LpStatus::Optimal && fixed.objective() < incumbent - gap_abs(cfg, fixed.objective())) {
            incumbent = fixed.objective();
            best = fixed.values();
            for (int b : binaries) best[static_cast<std::size_t>(b)] = std::round(best[static_cast<std::size_t>(b)]);
          }
        };
        if (hint && hint->size() == program.num_vars()) try_fixing(*hint);
        try_fixing(engine.values());
      }
    }
    if (st != LpStatus::Optimal) {
      log(node, node.bound, to_string(st));
      continue;
    }
    const double obj = engine.objective();
    if (std::isfinite(incumbent) && obj >= incumbent - gap_abs(cfg, incumbent)) {
      log(node, obj, "pruned");
      continue;
    }

    const std::vector<double> x = engine.values();
    int branch_var = -1;
    double best_frac = cfg.integrality_tol;
    for (int b : binaries) {
      const double v = x[static_cast<std::size_t>(b)];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        branch_var = b;
      }
    }
    if (branch_var < 0) {
      incumbent = obj;
      best = x;
      log(node, obj, "integral");
      continue;
    }
    log(node, obj, "branched");

    auto shared = keep(std::move(engine));
    for (int dir = 0; dir < 2; ++dir) {
      Node child{next_id++, node.id, node.depth + 1, obj, node.path, shared};
      const double lo = dir == 0 ? 0.0 : 1.0;
      child.path.push_back({branch_var, lo, lo});
      open.push(std::move(child));
    }
  }
  out.nodes = processed;

  double best_bound = incumbent;
  if (!open.empty()) best_bound = std::min(best_bound, open.top().bound);

  if (best.empty()) {
    out.status = open.empty() ? MipStatus::Infeasible : MipStatus::NoIncumbent;
    out.best_bound = best_bound;
    return out;
  }

  // Polish: fix the rounded binaries and re-solve the continuous part.
  DualSimplex polish = root;
  for (int b : binaries) {
    const double v = std::round(best[static_cast<std::size_t>(b)]);
    polish.set_bounds(b, v, v);
  }
  if (polish.solve() == LpStatus::Optimal) {
    best = polish.values();
  } else {
    for (int b : binaries) best[static_cast<std::size_t>(b)] = std::round(best[static_cast<std::size_t>(b)]);
  }
  out.values = std::move(best);
  out.objective = objective.eval(out.values);
  const bool exhausted = !open.empty() && open.top().bound < incumbent - gap_abs(cfg, incumbent);
  out.status = exhausted ? MipStatus::NodeLimit : MipStatus::Optimal;
  out.best_bound = exhausted ? best_bound : std::min(out.objective, best_bound);
  out.gap = out.objective - out.best_bound;
  return out;
}

MipSolution bnb_solve(const MathProgram& program, const BnbConfig& cfg) {
  if (program.stages().empty()) throw ModelError("program has no objective stage");
  return bnb_solve(program, program.stages().front().expr, cfg);
}

}  // namespace bess
