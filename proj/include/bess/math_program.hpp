#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace bess {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  VarKind kind = VarKind::Continuous;
};

struct Term {
  int var;
  double coef;
};

struct LinearExpr {
  std::vector<Term> terms;
  double constant = 0.0;

  LinearExpr& add(int var, double coef) {
    if (coef != 0.0) terms.push_back({var, coef});
    return *this;
  }
  LinearExpr& add(const LinearExpr& other, double factor = 1.0);
  double eval(const std::vector<double>& x) const;
};

enum class Sense { Le, Eq, Ge };
const char* to_string(Sense s);

struct Constraint {
  std::string name;
  LinearExpr expr;
  Sense sense = Sense::Le;
  double rhs = 0.0;

  double violation(const std::vector<double>& x) const;
};

struct ObjectiveStage {
  int priority = 0;
  std::string name;
  LinearExpr expr;  // minimised
};

/// A mixed-binary linear program with a staged (prioritised) objective.
class MathProgram {
 public:
  int add_var(std::string name, double lb, double ub, VarKind kind = VarKind::Continuous);
  int add_binary(std::string name) { return add_var(std::move(name), 0.0, 1.0, VarKind::Binary); }
  int add_constraint(std::string name, LinearExpr expr, Sense sense, double rhs);
  /// Stages must be appended in strictly decreasing priority.
  void add_stage(int priority, std::string name, LinearExpr expr);

  void set_bounds(int var, double lb, double ub);

  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<ObjectiveStage>& stages() const { return stages_; }
  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }
  std::size_t num_binaries() const;
  std::vector<int> binary_indices() const;

  /// Largest bound or row violation of `x`; writes the offending name.
  double max_violation(const std::vector<double>& x, std::string* worst = nullptr) const;

  /// Throws ModelError on dangling variable references, bad bounds or
  /// non-decreasing stage priorities.
  void validate() const;

  /// Plain-text listing:
  ///   var <idx> <name> <C|B> <lb> <ub>
  ///   row <idx> <name> <sense> <rhs> : <coef>*<var> ...
  ///   stage <priority> <name> : <coef>*<var> ... [+ <constant>]
  std::string dump() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::vector<ObjectiveStage> stages_;
};

}  // namespace bess
