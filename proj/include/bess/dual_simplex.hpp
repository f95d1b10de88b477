#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "bess/math_program.hpp"

namespace bess {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
std::string_view to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;
  std::vector<double> duals;  // one per constraint row
  int iterations = 0;
};

struct LpOptions {
  int max_iterations = 50000;
  int refactor_every = 200;       // pivots between tableau rebuilds
  int stall_before_bland = 60;    // degenerate pivots before switching rules
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-7;
  bool scale = true;              // geometric power-of-two scaling
  double box = 1e7;               // stand-in for infinite structural bounds
};

/// Dense bounded-variable dual simplex on the full tableau.
///
/// Every row i gets a logical y_i = a_i x bounded by the row's bounds. The
/// starting basis is all logicals, and each structural starts at whichever
/// bound its cost sign prefers, so the start is always dual feasible. That
/// also makes bound tightening (branch and bound) a warm start: copy the
/// engine, tighten, call solve() again.
class DualSimplex {
 public:
  DualSimplex(const MathProgram& program, const LinearExpr& objective, LpOptions opts = {});

  /// Structural bound change; keeps the basis.
  void set_bounds(int var, double lb, double ub);
  double lower(int var) const { return lb_[static_cast<std::size_t>(var)] * col_scale_[static_cast<std::size_t>(var)]; }
  double upper(int var) const { return ub_[static_cast<std::size_t>(var)] * col_scale_[static_cast<std::size_t>(var)]; }

  LpStatus solve();

  std::vector<double> values() const;
  std::vector<double> duals() const;
  double objective() const;
  int iterations() const { return iterations_; }
  LpSolution solution(LpStatus status) const;

  std::size_t rows() const { return m_; }
  std::size_t structurals() const { return n_; }
  std::size_t memory_bytes() const;

 private:
  double& t(std::size_t i, std::size_t j) { return tab_[i * cols_ + j]; }
  double t(std::size_t i, std::size_t j) const { return tab_[i * cols_ + j]; }

  void compute_scaling(const std::vector<double>& a);
  void place_nonbasic(std::size_t j);
  void recompute_basics();
  void recompute_reduced_costs();
  void pivot(std::size_t r, std::size_t q, double delta_leave, bool leave_to_upper);
  bool refactor();
  void reset_basis();
  int choose_leaving(bool bland) const;
  int choose_entering(std::size_t r, bool below, bool bland) const;

  LpOptions opts_;
  std::size_t m_ = 0, n_ = 0, cols_ = 0;
  std::shared_ptr<const std::vector<double>> a_;  // original m x n, row-major; shared by copies
  std::vector<double> tab_;   // m x cols
  std::vector<double> cost_, lb_, ub_, x_, d_;
  std::vector<double> row_scale_, col_scale_;
  std::vector<std::uint8_t> at_upper_, artificial_lb_, artificial_ub_;
  std::vector<int> basis_;    // column basic in row i
  std::vector<int> row_of_;   // row if basic, else -1
  double cost_constant_ = 0.0;
  int iterations_ = 0;
  int since_refactor_ = 0;
};

/// Solves the LP relaxation (binaries in [0, 1]) of `program` with the given
/// objective. Defaults to the first stage objective when `objective` is null.
LpSolution lp_solve(const MathProgram& program, const LinearExpr* objective = nullptr,
                    LpOptions opts = {});

}  // namespace bess
