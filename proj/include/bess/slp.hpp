#pragma once

#include <vector>

#include "bess/branch_and_bound.hpp"
#include "bess/horizon_model.hpp"

namespace bess {

struct SlpConfig {
  int max_iters = 10;
  double temp_tol = 0.1;    // degC
  double soc_tol = 0.005;
  double damping = 1.0;     // trajectory blending, (0, 1]

  void validate() const;
};

/// Start-of-step state per (string, step), [m * n_steps + t].
struct Trajectory {
  std::vector<double> soc;
  std::vector<double> temp;
};

/// Coefficients frozen on a trajectory: switched resistance, OCV of the
/// step's mode and the derating table. Step 0 keeps the plant's current k.
std::vector<FrozenCoefficients> freeze(const HorizonInput& input, const Trajectory& traj);

/// Pushes a plan through the exact Rint circuit and the one-step lumped
/// thermal recursion from the initial state.
Trajectory propagate(const HorizonInput& input, const DispatchPlan& plan, const std::vector<FrozenCoefficients>& frozen,
                     std::vector<double>* heat_kw = nullptr);

/// Iterated linearisation of the horizon problem. `input.frozen` is ignored
/// and rebuilt every iteration. Throws SolverError carrying the iteration
/// index when a stage is infeasible. Non-convergence is flagged on the plan.
DispatchPlan slp_solve(const HorizonInput& input, const SlpConfig& cfg = {}, const BnbConfig& bnb = {});

}  // namespace bess
