#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bess/dual_simplex.hpp"
#include "bess/math_program.hpp"

namespace bess {

struct BnbConfig {
  double integrality_tol = 1e-6;
  double gap_tol = 1e-6;            // relative
  long max_nodes = 100000;
  std::size_t snapshot_budget_bytes = std::size_t{256} << 20;
  LpOptions lp;
  std::ostream* node_log = nullptr;  // CSV: node,parent,depth,bound,incumbent,status

  void validate() const;
};

enum class MipStatus { Optimal, Infeasible, Unbounded, NodeLimit, NoIncumbent, LpFailure };
std::string_view to_string(MipStatus s);

struct MipSolution {
  MipStatus status = MipStatus::Infeasible;
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;                 // incumbent - best bound at exit
  std::vector<double> values;
  long nodes = 0;
  long lp_iterations = 0;

  bool has_solution() const { return status == MipStatus::Optimal || status == MipStatus::NodeLimit; }
};

/// Best-bound branch and bound over the binaries of `program`.
///
/// Branches on the most fractional binary (lowest index on ties); open nodes
/// are ordered by bound, then depth (deeper first), then creation order.
/// `hint`, when feasible, seeds the incumbent. The returned binaries are
/// exact 0/1 and the continuous part is re-solved with them fixed.
MipSolution bnb_solve(const MathProgram& program, const LinearExpr& objective, const BnbConfig& cfg,
                      const std::vector<double>* hint = nullptr);

/// Uses the first objective stage.
MipSolution bnb_solve(const MathProgram& program, const BnbConfig& cfg);

struct LexSolution {
  MipStatus status = MipStatus::Infeasible;
  int failed_stage = -1;
  std::string failed_stage_name;
  std::vector<double> values;
  std::vector<double> stage_optima;   // F*_k
  std::vector<double> stage_values;   // stage expressions on the final solution
  long nodes = 0;

  bool ok() const { return failed_stage < 0 && !values.empty(); }
};

/// Solves the stages in order; after stage k adds `expr_k <= F*_k + eps1`.
/// `hint` seeds the first stage (it need not be feasible).
LexSolution solve_lexicographic(const MathProgram& program, double eps1, const BnbConfig& cfg,
                                const std::vector<double>* hint = nullptr);

}  // namespace bess
