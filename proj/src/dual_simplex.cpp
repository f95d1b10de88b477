#include "bess/dual_simplex.hpp"

#include <algorithm>
#include <cmath>

#include "bess/errors.hpp"
#include "bess/simd/kernels.hpp"

namespace bess {

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

DualSimplex::DualSimplex(const MathProgram& program, const LinearExpr& objective, LpOptions opts)
    : opts_(opts) {
  n_ = program.num_vars();
  m_ = program.num_constraints();
  cols_ = n_ + m_;
  auto a = std::make_shared<std::vector<double>>(m_ * n_, 0.0);
  tab_.assign(m_ * cols_, 0.0);
  cost_.assign(cols_, 0.0);
  lb_.assign(cols_, 0.0);
  ub_.assign(cols_, 0.0);
  x_.assign(cols_, 0.0);
  at_upper_.assign(cols_, 0);
  artificial_lb_.assign(cols_, 0);
  artificial_ub_.assign(cols_, 0);
  basis_.resize(m_);
  row_of_.assign(cols_, -1);

  const auto& rows = program.constraints();
  for (std::size_t i = 0; i < m_; ++i)
    for (const auto& term : rows[i].expr.terms) (*a)[i * n_ + static_cast<std::size_t>(term.var)] += term.coef;
  compute_scaling(*a);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < n_; ++j) (*a)[i * n_ + j] *= row_scale_[i] * col_scale_[j];

  for (const auto& term : objective.terms)
    cost_[static_cast<std::size_t>(term.var)] += term.coef * col_scale_[static_cast<std::size_t>(term.var)];
  cost_constant_ = objective.constant;

  const auto& vars = program.vars();
  for (std::size_t j = 0; j < n_; ++j) {
    lb_[j] = vars[j].lb;
    ub_[j] = vars[j].ub;
    if (vars[j].kind == VarKind::Binary) {
      lb_[j] = std::max(lb_[j], 0.0);
      ub_[j] = std::min(ub_[j], 1.0);
    }
    lb_[j] /= col_scale_[j];
    ub_[j] /= col_scale_[j];
    if (!std::isfinite(lb_[j])) {
      lb_[j] = -opts_.box;
      artificial_lb_[j] = 1;
    }
    if (!std::isfinite(ub_[j])) {
      ub_[j] = opts_.box;
      artificial_ub_[j] = 1;
    }
  }

  for (std::size_t i = 0; i < m_; ++i) {
    const auto& row = rows[i];
    const double rhs = (row.rhs - row.expr.constant) * row_scale_[i];
    const std::size_t y = n_ + i;
    lb_[y] = row.sense == Sense::Le ? -kInf : rhs;
    ub_[y] = row.sense == Sense::Ge ? kInf : rhs;
    for (std::size_t j = 0; j < n_; ++j) t(i, j) = -(*a)[i * n_ + j];
    t(i, y) = 1.0;
    basis_[i] = static_cast<int>(y);
    row_of_[y] = static_cast<int>(i);
  }

  a_ = std::move(a);
  d_ = cost_;
  for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j);
  recompute_basics();
}

// Geometric row/column scaling rounded to powers of two, so scaling itself
// introduces no rounding.
void DualSimplex::compute_scaling(const std::vector<double>& a) {
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  if (!opts_.scale) return;
  auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };
  for (int pass = 0; pass < 4; ++pass) {
    for (std::size_t i = 0; i < m_; ++i) {
      double lo = kInf, hi = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = std::abs(a[i * n_ + j]) * col_scale_[j];
        if (v == 0.0) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > 0.0) row_scale_[i] = pow2(1.0 / std::sqrt(lo * hi));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      double lo = kInf, hi = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double v = std::abs(a[i * n_ + j]) * row_scale_[i];
        if (v == 0.0) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > 0.0) col_scale_[j] = pow2(1.0 / std::sqrt(lo * hi));
    }
  }
}

void DualSimplex::place_nonbasic(std::size_t j) {
  if (lb_[j] == ub_[j]) {
    at_upper_[j] = 0;
    x_[j] = lb_[j];
    return;
  }
  at_upper_[j] = d_[j] < 0.0 ? 1 : 0;
  x_[j] = at_upper_[j] ? ub_[j] : lb_[j];
}

void DualSimplex::set_bounds(int var, double lb, double ub) {
  const auto j = static_cast<std::size_t>(var);
  if (lb > ub) throw ModelError("set_bounds: lb > ub");
  lb_[j] = lb / col_scale_[j];
  ub_[j] = ub / col_scale_[j];
  artificial_lb_[j] = 0;
  artificial_ub_[j] = 0;
  if (row_of_[j] >= 0) return;
  const double old = x_[j];
  place_nonbasic(j);
  const double delta = x_[j] - old;
  if (delta == 0.0) return;
  for (std::size_t i = 0; i < m_; ++i) {
    const double f = t(i, j);
    if (f != 0.0) x_[static_cast<std::size_t>(basis_[i])] -= f * delta;
  }
}

void DualSimplex::recompute_basics() {
  std::vector<double> xn = x_;
  for (std::size_t i = 0; i < m_; ++i) xn[static_cast<std::size_t>(basis_[i])] = 0.0;
  for (std::size_t i = 0; i < m_; ++i)
    x_[static_cast<std::size_t>(basis_[i])] = -simd::dot(std::span<const double>(&tab_[i * cols_], cols_), xn);
}

void DualSimplex::recompute_reduced_costs() {
  d_ = cost_;
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < m_; ++i) {
    const double cb = cost_[static_cast<std::size_t>(basis_[i])];
    if (cb != 0.0) k.axpy(-cb, &tab_[i * cols_], d_.data(), cols_);
  }
  for (std::size_t i = 0; i < m_; ++i) d_[static_cast<std::size_t>(basis_[i])] = 0.0;
}

void DualSimplex::pivot(std::size_t r, std::size_t q, double delta_leave, bool leave_to_upper) {
  const double piv = t(r, q);
  const double step = -delta_leave / piv;
  const auto leaving = static_cast<std::size_t>(basis_[r]);

  for (std::size_t i = 0; i < m_; ++i) {
    const double f = t(i, q);
    if (f != 0.0) x_[static_cast<std::size_t>(basis_[i])] -= f * step;
  }
  x_[q] += step;
  x_[leaving] = leave_to_upper ? ub_[leaving] : lb_[leaving];
  at_upper_[leaving] = leave_to_upper ? 1 : 0;

  const auto& k = simd::kernels();
  double* prow = &tab_[r * cols_];
  k.scale(1.0 / piv, prow, cols_);
  prow[q] = 1.0;
  for (std::size_t i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* row = &tab_[i * cols_];
    const double f = row[q];
    if (f == 0.0) continue;
    k.axpy(-f, prow, row, cols_);
    row[q] = 0.0;
  }
  const double dq = d_[q];
  if (dq != 0.0) k.axpy(-dq, prow, d_.data(), cols_);
  d_[q] = 0.0;

  basis_[r] = static_cast<int>(q);
  row_of_[q] = static_cast<int>(r);
  row_of_[leaving] = -1;
  at_upper_[q] = 0;
}

void DualSimplex::reset_basis() {
  since_refactor_ = 0;
  std::fill(tab_.begin(), tab_.end(), 0.0);
  std::fill(row_of_.begin(), row_of_.end(), -1);
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) t(i, j) = -(*a_)[i * n_ + j];
    t(i, n_ + i) = 1.0;
    basis_[i] = static_cast<int>(n_ + i);
    row_of_[n_ + i] = static_cast<int>(i);
  }
  d_ = cost_;
  for (std::size_t j = 0; j < n_; ++j) place_nonbasic(j);
  recompute_basics();
}

// Rebuilds the tableau for the current basis from the original matrix by
// Gauss-Jordan with partial pivoting. Leaves the engine untouched on a
// (numerically) singular basis.
bool DualSimplex::refactor() {
  since_refactor_ = 0;
  std::vector<double> fresh(m_ * cols_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) fresh[i * cols_ + j] = -(*a_)[i * n_ + j];
    fresh[i * cols_ + n_ + i] = 1.0;
  }
  std::vector<int> owner(m_);
  std::vector<std::uint8_t> in_target(cols_, 0);
  for (std::size_t i = 0; i < m_; ++i) {
    owner[i] = static_cast<int>(n_ + i);
    in_target[static_cast<std::size_t>(basis_[i])] = 1;
  }
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < m_; ++i) {
    const auto j = static_cast<std::size_t>(basis_[i]);
    if (j >= n_) continue;
    std::size_t best = m_;
    double best_abs = 1e-11;
    for (std::size_t r = 0; r < m_; ++r) {
      if (in_target[static_cast<std::size_t>(owner[r])]) continue;
      const double v = std::abs(fresh[r * cols_ + j]);
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best == m_) return false;
    double* prow = &fresh[best * cols_];
    k.scale(1.0 / prow[j], prow, cols_);
    prow[j] = 1.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == best) continue;
      double* row = &fresh[r * cols_];
      const double f = row[j];
      if (f == 0.0) continue;
      k.axpy(-f, prow, row, cols_);
      row[j] = 0.0;
    }
    owner[best] = static_cast<int>(j);
  }
  tab_ = std::move(fresh);
  basis_ = owner;
  std::fill(row_of_.begin(), row_of_.end(), -1);
  for (std::size_t i = 0; i < m_; ++i) row_of_[static_cast<std::size_t>(basis_[i])] = static_cast<int>(i);
  recompute_reduced_costs();
  recompute_basics();
  return true;
}

int DualSimplex::choose_leaving(bool bland) const {
  int best = -1;
  double best_v = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    const auto b = static_cast<std::size_t>(basis_[i]);
    const double v = x_[b];
    double infeas = 0.0;
    if (v < lb_[b]) infeas = lb_[b] - v;
    else if (v > ub_[b]) infeas = v - ub_[b];
    const double bound = v < lb_[b] ? lb_[b] : ub_[b];
    if (infeas <= opts_.primal_tol * std::max(1.0, std::abs(bound))) continue;
    if (bland) {
      if (best < 0 || basis_[i] < basis_[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    } else if (infeas > best_v) {
      best_v = infeas;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int DualSimplex::choose_entering(std::size_t r, bool below, bool bland) const {
  const double* row = &tab_[r * cols_];
  auto alpha = [&](std::size_t j) {
    const double a = below ? -row[j] : row[j];
    return at_upper_[j] ? -a : a;
  };
  auto dual_slack = [&](std::size_t j) { return std::max(0.0, at_upper_[j] ? -d_[j] : d_[j]); };
  auto candidate = [&](std::size_t j) {
    return row_of_[j] < 0 && lb_[j] != ub_[j] && alpha(j) > opts_.pivot_tol;
  };

  if (bland) {
    int best = -1;
    double best_ratio = kInf;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (!candidate(j)) continue;
      const double ratio = dual_slack(j) / alpha(j);
      if (ratio < best_ratio - 1e-12) {
        best_ratio = ratio;
        best = static_cast<int>(j);
      }
    }
    return best;
  }

  // Harris two-pass: loosen the bound by the dual tolerance, then take the
  // largest pivot among the entries inside it.
  double bound = kInf;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (!candidate(j)) continue;
    bound = std::min(bound, (dual_slack(j) + opts_.dual_tol) / alpha(j));
  }
  if (!std::isfinite(bound)) return -1;
  int best = -1;
  double best_alpha = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (!candidate(j)) continue;
    const double a = alpha(j);
    if (dual_slack(j) / a <= bound && a > best_alpha) {
      best_alpha = a;
      best = static_cast<int>(j);
    }
  }
  return best;
}

LpStatus DualSimplex::solve() {
  int stall = 0;
  int final_checks = 0;
  bool restarted = false;
  while (true) {
    if (iterations_ >= opts_.max_iterations) return LpStatus::IterationLimit;
    if (since_refactor_ >= opts_.refactor_every) refactor();

    const bool bland = stall > opts_.stall_before_bland;
    const int r = choose_leaving(bland);
    if (r < 0) {
      // Confirm with freshly recomputed basics before declaring optimality.
      if (since_refactor_ > 0 && final_checks++ < 3) {
        recompute_basics();
        if (choose_leaving(false) >= 0) continue;
      }
      for (std::size_t j = 0; j < n_; ++j) {
        if ((artificial_ub_[j] && x_[j] >= ub_[j] - 1e-6) ||
            (artificial_lb_[j] && x_[j] <= lb_[j] + 1e-6))
          return LpStatus::Unbounded;
      }
      return LpStatus::Optimal;
    }
    const auto ru = static_cast<std::size_t>(r);
    const auto b = static_cast<std::size_t>(basis_[ru]);
    const bool below = x_[b] < lb_[b];
    const int q = choose_entering(ru, below, bland);
    if (q < 0) {
      if (since_refactor_ > 0) {
        if (refactor()) continue;
        // Basis lost to round-off: start over from the slack basis once.
        if (!restarted) {
          restarted = true;
          reset_basis();
          continue;
        }
      }
      return LpStatus::Infeasible;
    }
    const auto qu = static_cast<std::size_t>(q);
    const double ds = std::max(0.0, at_upper_[qu] ? -d_[qu] : d_[qu]);
    stall = ds <= 1e-12 ? stall + 1 : 0;
    const double delta = below ? lb_[b] - x_[b] : ub_[b] - x_[b];
    pivot(ru, qu, delta, !below);
    ++iterations_;
    ++since_refactor_;
  }
}

std::vector<double> DualSimplex::values() const {
  std::vector<double> v(n_);
  for (std::size_t j = 0; j < n_; ++j) v[j] = x_[j] * col_scale_[j];
  return v;
}

std::vector<double> DualSimplex::duals() const {
  std::vector<double> v(m_);
  for (std::size_t i = 0; i < m_; ++i) v[i] = d_[n_ + i] * row_scale_[i];
  return v;
}

double DualSimplex::objective() const {
  double s = cost_constant_;
  for (std::size_t j = 0; j < n_; ++j) s += cost_[j] * x_[j];
  return s;
}

LpSolution DualSimplex::solution(LpStatus status) const {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  if (status == LpStatus::Optimal) {
    sol.values = values();
    sol.duals = duals();
    sol.objective = objective();
  }
  return sol;
}

std::size_t DualSimplex::memory_bytes() const {
  return sizeof(double) * (tab_.size() + 5 * cols_ + m_ + n_) + 4 * cols_ + sizeof(*this);
}

LpSolution lp_solve(const MathProgram& program, const LinearExpr* objective, LpOptions opts) {
  static const LinearExpr empty;
  if (!objective) objective = program.stages().empty() ? &empty : &program.stages().front().expr;
  DualSimplex engine(program, *objective, opts);
  return engine.solution(engine.solve());
}

}  // namespace bess
