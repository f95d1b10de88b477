#include <fmt/format.h>

#include "bess/branch_and_bound.hpp"
#include "bess/errors.hpp"

namespace bess {

LexSolution solve_lexicographic(const MathProgram& program, double eps1, const BnbConfig& cfg,
                                const std::vector<double>* first_hint) {
  if (program.stages().empty()) throw ModelError("program has no objective stage");
  LexSolution out;
  MathProgram work = program;
  const std::vector<double>* hint = first_hint;
  std::vector<double> previous;

  for (std::size_t k = 0; k < program.stages().size(); ++k) {
    const ObjectiveStage& stage = program.stages()[k];
    MipSolution sol = bnb_solve(work, stage.expr, cfg, hint);
    out.nodes += sol.nodes;
    if (!sol.has_solution()) {
      out.status = sol.status;
      out.failed_stage = static_cast<int>(k);
      out.failed_stage_name = stage.name;
      return out;
    }
    out.status = sol.status;
    out.stage_optima.push_back(sol.objective);
    if (k + 1 < program.stages().size()) {
      LinearExpr keep = stage.expr;
      keep.constant = 0.0;
      work.add_constraint(fmt::format("lex_keep_{}", stage.name), std::move(keep), Sense::Le,
                          sol.objective - stage.expr.constant + eps1);
    }
    previous = std::move(sol.values);
    hint = &previous;
  }
  out.values = previous;
  for (const auto& stage : program.stages()) out.stage_values.push_back(stage.expr.eval(out.values));
  return out;
}

}  // namespace bess
