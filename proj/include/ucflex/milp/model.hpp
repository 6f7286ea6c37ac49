#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ucflex::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Absolute feasibility and integrality tolerances used to accept solutions.
inline constexpr double kFeasibilityTol = 1e-6;
inline constexpr double kIntegralityTol = 1e-6;

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
  bool integer = false;
};

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// Minimization model: variables with bounds and integrality, sparse linear
// rows and a linear objective plus constant offset.
class MilpModel {
 public:
  int add_variable(std::string name, double lower, double upper, double cost,
                   bool integer = false);
  int add_binary(std::string name, double cost = 0.0) {
    return add_variable(std::move(name), 0.0, 1.0, cost, true);
  }

  // Duplicate variable indices are merged; zero coefficients dropped.
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                     double rhs);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  int num_integer() const;
  int num_nonzeros() const;

  const Variable& variable(int j) const { return vars_[j]; }
  Variable& variable(int j) { return vars_[j]; }
  const Constraint& constraint(int i) const { return rows_[i]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }

  double objective_offset() const { return offset_; }
  void set_objective_offset(double v) { offset_ = v; }

  // Human-readable problems with bounds, integrality and coefficients.
  std::vector<std::string> validate() const;

  double objective_value(std::span<const double> x) const;
  double row_activity(int i, std::span<const double> x) const;

  struct Violation {
    std::string what;  // constraint or variable name
    double amount = 0.0;
  };
  // Largest violation of rows, bounds and (optionally) integrality.
  Violation max_violation(std::span<const double> x,
                          bool check_integrality = true) const;
  bool is_feasible(std::span<const double> x, double tol = kFeasibilityTol,
                   bool check_integrality = true) const {
    return max_violation(x, check_integrality).amount <= tol;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  double offset_ = 0.0;
};

enum class Status { kOptimal, kGapReached, kInfeasible, kUnbounded, kTimeLimit };

const char* to_string(Status s);

struct MilpSolution {
  Status status = Status::kInfeasible;
  std::vector<double> values;  // empty when no feasible point is known
  double objective = kInf;
  double bound = -kInf;
  double gap = kInf;
  double wall_seconds = 0.0;
  long long nodes = 0;
  long long lp_iterations = 0;

  bool has_solution() const { return !values.empty(); }
};

// Relative gap between an incumbent and a lower bound.
inline double relative_gap(double objective, double bound) {
  const double scale = std::max(1.0, std::abs(objective));
  return std::max(0.0, (objective - bound) / scale);
}

}  // namespace ucflex::milp
