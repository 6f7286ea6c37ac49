#pragma once

#include <vector>

#include "ucflex/milp/model.hpp"
#include "ucflex/milp/simplex.hpp"

namespace ucflex::milp {

struct MilpOptions {
  double gap = 1e-4;         // relative, see relative_gap()
  double time_limit = kInf;  // seconds
  long long node_limit = -1;
  LpOptions lp;
};

struct MilpRun {
  MilpSolution solution;
  // Incumbent objective after each improvement, in order found.
  std::vector<double> incumbent_history;
};

// Best-bound branch-and-bound on the most fractional integer variable. Each
// branching plunges into one child and queues the other; when a plunge ends
// the open node with the smallest bound (then smallest id) is resumed.
MilpRun solve_milp_traced(const MilpModel& model, const MilpOptions& options = {});

inline MilpSolution solve_milp(const MilpModel& model,
                               const MilpOptions& options = {}) {
  return solve_milp_traced(model, options).solution;
}

}  // namespace ucflex::milp
