#include "bess/math_program.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bess/csv.hpp"
#include "bess/errors.hpp"

namespace bess {

LinearExpr& LinearExpr::add(const LinearExpr& other, double factor) {
  for (const auto& t : other.terms) add(t.var, t.coef * factor);
  constant += other.constant * factor;
  return *this;
}

double LinearExpr::eval(const std::vector<double>& x) const {
  double s = constant;
  for (const auto& t : terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

const char* to_string(Sense s) {
  switch (s) {
    case Sense::Le: return "<=";
    case Sense::Eq: return "=";
    case Sense::Ge: return ">=";
  }
  return "?";
}

double Constraint::violation(const std::vector<double>& x) const {
  const double lhs = expr.eval(x);
  switch (sense) {
    case Sense::Le: return std::max(0.0, lhs - rhs);
    case Sense::Ge: return std::max(0.0, rhs - lhs);
    case Sense::Eq: return std::abs(lhs - rhs);
  }
  return 0.0;
}

int MathProgram::add_var(std::string name, double lb, double ub, VarKind kind) {
  vars_.push_back({std::move(name), lb, ub, kind});
  return static_cast<int>(vars_.size()) - 1;
}

int MathProgram::add_constraint(std::string name, LinearExpr expr, Sense sense, double rhs) {
  rows_.push_back({std::move(name), std::move(expr), sense, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

void MathProgram::add_stage(int priority, std::string name, LinearExpr expr) {
  if (!stages_.empty() && priority >= stages_.back().priority)
    throw ModelError(fmt::format("stage '{}' priority {} not below previous {}", name, priority,
                                 stages_.back().priority));
  stages_.push_back({priority, std::move(name), std::move(expr)});
}

void MathProgram::set_bounds(int var, double lb, double ub) {
  auto& v = vars_.at(static_cast<std::size_t>(var));
  v.lb = lb;
  v.ub = ub;
}

std::size_t MathProgram::num_binaries() const {
  std::size_t n = 0;
  for (const auto& v : vars_) n += v.kind == VarKind::Binary;
  return n;
}

std::vector<int> MathProgram::binary_indices() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < vars_.size(); ++j)
    if (vars_[j].kind == VarKind::Binary) out.push_back(static_cast<int>(j));
  return out;
}

double MathProgram::max_violation(const std::vector<double>& x, std::string* worst) const {
  double worst_v = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const double v = std::max(vars_[j].lb - x[j], x[j] - vars_[j].ub);
    if (v > worst_v) {
      worst_v = v;
      if (worst) *worst = "bound " + vars_[j].name;
    }
  }
  for (const auto& row : rows_) {
    const double v = row.violation(x);
    if (v > worst_v) {
      worst_v = v;
      if (worst) *worst = row.name;
    }
  }
  return worst_v;
}

void MathProgram::validate() const {
  const auto n = static_cast<int>(vars_.size());
  for (const auto& v : vars_) {
    if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub)
      throw ModelError(fmt::format("variable '{}' has empty bounds [{}, {}]", v.name, v.lb, v.ub));
  }
  auto check = [&](const LinearExpr& e, const std::string& where) {
    for (const auto& t : e.terms)
      if (t.var < 0 || t.var >= n)
        throw ModelError(fmt::format("'{}' references unknown variable {}", where, t.var));
  };
  for (const auto& r : rows_) check(r.expr, r.name);
  for (std::size_t k = 0; k < stages_.size(); ++k) {
    check(stages_[k].expr, stages_[k].name);
    if (k > 0 && stages_[k].priority >= stages_[k - 1].priority)
      throw ModelError("stage priorities must be strictly decreasing");
  }
}

namespace {

void dump_expr(std::string& out, const LinearExpr& e) {
  for (const auto& t : e.terms) out += fmt::format(" {}*{}", io::fmt_num(t.coef), t.var);
  if (e.constant != 0.0) out += fmt::format(" + {}", io::fmt_num(e.constant));
}

}  // namespace

std::string MathProgram::dump() const {
  std::string out;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    out += fmt::format("var {} {} {} {} {}\n", j, v.name, v.kind == VarKind::Binary ? 'B' : 'C',
                       io::fmt_num(v.lb), io::fmt_num(v.ub));
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    out += fmt::format("row {} {} {} {} :", i, r.name, to_string(r.sense), io::fmt_num(r.rhs));
    dump_expr(out, r.expr);
    out += '\n';
  }
  for (const auto& s : stages_) {
    out += fmt::format("stage {} {} :", s.priority, s.name);
    dump_expr(out, s.expr);
    out += '\n';
  }
  return out;
}

}  // namespace bess
