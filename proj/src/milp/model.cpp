#include "ucflex/milp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ucflex::milp {

int MilpModel::add_variable(std::string name, double lower, double upper,
                            double cost, bool integer) {
  vars_.push_back({std::move(name), lower, upper, cost, integer});
  return static_cast<int>(vars_.size()) - 1;
}

int MilpModel::add_constraint(std::string name, std::vector<Term> terms,
                              Sense sense, double rhs) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  rows_.push_back({std::move(name), std::move(merged), sense, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

int MilpModel::num_integer() const {
  return static_cast<int>(
      std::count_if(vars_.begin(), vars_.end(),
                    [](const Variable& v) { return v.integer; }));
}

int MilpModel::num_nonzeros() const {
  int nnz = 0;
  for (const auto& r : rows_) nnz += static_cast<int>(r.terms.size());
  return nnz;
}

std::vector<std::string> MilpModel::validate() const {
  std::vector<std::string> problems;
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    const Variable& v = vars_[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      problems.push_back("variable " + v.name + ": invalid bounds");
    }
    if (!std::isfinite(v.cost)) {
      problems.push_back("variable " + v.name + ": non-finite cost");
    }
  }
  for (const auto& r : rows_) {
    if (!std::isfinite(r.rhs)) {
      problems.push_back("constraint " + r.name + ": non-finite rhs");
    }
    for (const Term& t : r.terms) {
      if (t.var < 0 || t.var >= n) {
        problems.push_back("constraint " + r.name + ": bad variable index");
      } else if (!std::isfinite(t.coef)) {
        problems.push_back("constraint " + r.name + ": non-finite coefficient");
      }
    }
  }
  return problems;
}

double MilpModel::objective_value(std::span<const double> x) const {
  double obj = offset_;
  for (std::size_t j = 0; j < vars_.size(); ++j) obj += vars_[j].cost * x[j];
  return obj;
}

double MilpModel::row_activity(int i, std::span<const double> x) const {
  double a = 0.0;
  for (const Term& t : rows_[i].terms) a += t.coef * x[t.var];
  return a;
}

MilpModel::Violation MilpModel::max_violation(std::span<const double> x,
                                              bool check_integrality) const {
  Violation worst;
  auto consider = [&](const std::string& what, double amount) {
    if (amount > worst.amount) worst = {what, amount};
  };
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const Variable& v = vars_[j];
    consider(v.name, v.lower - x[j]);
    consider(v.name, x[j] - v.upper);
    if (check_integrality && v.integer) {
      consider(v.name, std::abs(x[j] - std::round(x[j])));
    }
  }
  for (int i = 0; i < num_constraints(); ++i) {
    const Constraint& r = rows_[i];
    const double a = row_activity(i, x);
    switch (r.sense) {
      case Sense::kLessEqual: consider(r.name, a - r.rhs); break;
      case Sense::kGreaterEqual: consider(r.name, r.rhs - a); break;
      case Sense::kEqual: consider(r.name, std::abs(a - r.rhs)); break;
    }
  }
  return worst;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kGapReached: return "gap_reached";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kTimeLimit: return "time_limit";
  }
  return "unknown";
}

}  // namespace ucflex::milp
